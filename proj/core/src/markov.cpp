#include "aoigf/markov.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace aoigf {

namespace {

// b^e for integer e >= 0 with the 0^0 = 1 convention.
double zpow(double b, long e) {
  if (e == 0) return 1.0;
  return std::pow(b, static_cast<double>(e));
}

// pmf[m] = C(r,m) q^m (1-q)^(r-m), built from incremental log ratios so large
// r neither overflows the coefficient nor underflows the tail start.
std::vector<double> binomial_pmf(int r, double q) {
  std::vector<double> pmf(r + 1, 0.0);
  if (q <= 0.0) {
    pmf[0] = 1.0;
    return pmf;
  }
  if (q >= 1.0) {
    pmf[r] = 1.0;
    return pmf;
  }
  const double lq = std::log(q), l1q = std::log1p(-q);
  double log_c = 0.0;
  for (int m = 0; m <= r; ++m) {
    if (m > 0) log_c += std::log(static_cast<double>(r - m + 1) / m);
    pmf[m] = std::exp(log_c + m * lq + (r - m) * l1q);
  }
  return pmf;
}

double small_binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c *= static_cast<double>(n - k + i) / i;
  return c;
}

double clamp_probability(double v, TransitionModel& model, const char* what,
                         int j) {
  if (v < 0.0) {
    model.max_negative_entry = std::min(model.max_negative_entry, v);
    if (v < -1e-9)
      throw std::runtime_error(std::string(what) + " entry " + std::to_string(v) +
                               " at state " + std::to_string(j) +
                               " is negative beyond tolerance");
    return 0.0;
  }
  if (v > 1.0) {
    if (v > 1.0 + 1e-9)
      throw std::runtime_error(std::string(what) + " entry " + std::to_string(v) +
                               " at state " + std::to_string(j) +
                               " exceeds 1 beyond tolerance");
    return 1.0;
  }
  return v;
}

// Probability that none of m active users is decoded: complement of one lone
// success at some level, summed over levels.
double no_success_mass(int m, int K) {
  const double u = 1.0 / K;
  double s = 0.0;
  for (int k = 1; k <= K; ++k) {
    const double margin = 1.0 - static_cast<double>(k) / K;
    s += m * u * zpow(margin, m - 1);
  }
  return s;
}

}  // namespace

double TransitionModel::entry(int j, int i) const {
  if (i < j || i - j >= bandwidth || i >= num_states) return 0.0;
  return band_at(j, i - j);
}

double TransitionModel::row_sum(int j) const {
  double s = 0.0;
  const int dmax = std::min(bandwidth - 1, num_states - 1 - j);
  for (int d = 0; d <= dmax; ++d) s += band_at(j, d);
  return s;
}

std::vector<double> TransitionModel::propagate(const std::vector<double>& v) const {
  std::vector<double> w(num_states, 0.0);
  for (int j = 0; j < num_states; ++j) {
    const double vj = v[j];
    if (vj == 0.0) continue;
    const int dmax = std::min(bandwidth - 1, num_states - 1 - j);
    for (int d = 0; d <= dmax; ++d) w[j + d] += vj * band_at(j, d);
  }
  return w;
}

TransitionModel oma_transitions(const SystemConfig& config) {
  config.validate();
  if (config.scheme != Scheme::Oma)
    throw std::invalid_argument("oma_transitions needs an OMA config");
  const int M = config.num_users;
  const double s = config.infinite_power()
                       ? 1.0
                       : std::exp(-config.epsilon() / config.tx_power);
  TransitionModel model;
  model.num_states = M;
  model.bandwidth = 2;
  model.band.assign(static_cast<size_t>(M) * 2, 0.0);
  model.absorb.assign(M, 0.0);
  model.scheme = Scheme::Oma;
  model.config = config;
  for (int j = 0; j < M; ++j) {
    const int r = M - j;
    const double q = tx_probability(config.tx_policy, j, M, config.num_levels);
    const double x = q * s * zpow(1.0 - q, r - 1);
    model.band_at(j, 0) = clamp_probability(1.0 - r * x, model, "oma", j);
    if (j + 1 <= M - 1)
      model.band_at(j, 1) = clamp_probability((r - 1) * x, model, "oma", j);
    model.absorb[j] = clamp_probability(x, model, "oma", j);
  }
  return model;
}

TransitionModel noma_transitions(const SystemConfig& config) {
  config.validate();
  if (config.scheme != Scheme::Noma)
    throw std::invalid_argument("noma_transitions needs a NOMA config");
  if (!config.infinite_power())
    throw std::invalid_argument(
        "noma_transitions models the collision-only high-SNR regime; use the "
        "infinite power sentinel (finite power belongs to the simulator)");
  const int M = config.num_users;
  const int K = config.num_levels;
  const double u = 1.0 / K;
  TransitionModel model;
  model.num_states = M;
  model.bandwidth = K + 1;
  model.band.assign(static_cast<size_t>(M) * (K + 1), 0.0);
  model.absorb.assign(M, 0.0);
  model.scheme = Scheme::Noma;
  model.config = config;

  for (int j = 0; j < M; ++j) {
    const int r = M - j;
    const double q = tx_probability(config.tx_policy, j, M, K);
    const std::vector<double> pmf = binomial_pmf(r, q);

    // no decoded user at all
    double stay = 0.0;
    for (int m = 1; m <= r; ++m) stay += pmf[m] * no_success_mass(m, K);
    model.band_at(j, 0) = clamp_probability(1.0 - stay, model, "noma", j);

    // exactly one decoded user, and it is not the tagged one
    if (r >= 2 && j + 1 <= M - 1) {
      const double share = static_cast<double>(r - 1) / r;
      double one = r * q * zpow(1.0 - q, r - 1) * share * K * u;
      for (int m = 2; m <= r; ++m) {
        double inner = 0.0;
        for (int k = 1; k <= K - 1; ++k) {
          double bracket = zpow(1.0 - static_cast<double>(k) / K, m - 1);
          for (int kap = k + 1; kap <= K; ++kap)
            bracket -= (m - 1) * u * zpow(1.0 - static_cast<double>(kap) / K, m - 2);
          inner += share * m * u * bracket;
        }
        one += pmf[m] * inner;
      }
      model.band_at(j, 1) = clamp_probability(one, model, "noma", j);
    }

    // i decoded users, none of them tagged; the decoded ones occupy levels
    // k1 < ... < k2 with i-2 intermediates chosen freely between them
    const int imax = std::min(r - 1, K);
    for (int i = 2; i <= imax; ++i) {
      const double share = static_cast<double>(r - i) / r;
      const double ui = zpow(u, i);
      double all_active = 0.0;  // every transmitter decoded (m = i)
      for (int k1 = 1; k1 <= K - i + 1; ++k1)
        for (int k2 = k1 + i - 1; k2 <= K; ++k2)
          all_active += share * ui * small_binom(k2 - k1 - 1, i - 2);
      double fact = 1.0;
      for (int p = 2; p <= i; ++p) fact *= p;
      double sum = pmf[i] * all_active * fact;

      for (int m = i + 1; m <= r; ++m) {
        double ff = 1.0;  // m (m-1) ... (m-i+1)
        for (int p = 0; p < i; ++p) ff *= (m - p);
        double inner = 0.0;
        for (int k1 = 1; k1 <= K - i; ++k1) {
          for (int k2 = k1 + i - 1; k2 <= K - 1; ++k2) {
            double bracket = zpow(1.0 - static_cast<double>(k2) / K, m - i);
            for (int kap = k2 + 1; kap <= K; ++kap)
              bracket -=
                  (m - i) * u * zpow(1.0 - static_cast<double>(kap) / K, m - i - 1);
            inner += share * ui * small_binom(k2 - k1 - 1, i - 2) * ff * bracket;
          }
        }
        sum += pmf[m] * inner;
      }
      model.band_at(j, i) = clamp_probability(sum, model, "noma", j);
    }

    const double row = model.row_sum(j);
    model.max_row_excess = std::max(model.max_row_excess, row - 1.0);
    model.absorb[j] = clamp_probability(1.0 - row, model, "noma", j);
  }
  return model;
}

TransitionModel transitions(const SystemConfig& config) {
  return config.scheme == Scheme::Oma ? oma_transitions(config)
                                      : noma_transitions(config);
}

double pmf_update_delay(const TransitionModel& model, int n) {
  if (n < 1) throw std::invalid_argument("slot index must be >= 1");
  std::vector<double> v(model.num_states, 0.0);
  v[0] = 1.0;
  for (int step = 1; step < n; ++step) v = model.propagate(v);
  double p = 0.0;
  for (int j = 0; j < model.num_states; ++j) p += v[j] * model.absorb[j];
  return p;
}

double failure_probability(const TransitionModel& model, int slots_per_frame) {
  if (slots_per_frame < 1) throw std::invalid_argument("frame needs >= 1 slot");
  std::vector<double> v(model.num_states, 0.0);
  v[0] = 1.0;
  for (int n = 0; n < slots_per_frame; ++n) v = model.propagate(v);
  double p = 0.0;
  for (double x : v) p += x;
  return std::clamp(p, 0.0, 1.0);
}

RenewalMoments renewal_moments(const TransitionModel& model, int slots_per_frame,
                               double slot_duration) {
  if (slots_per_frame < 1) throw std::invalid_argument("frame needs >= 1 slot");
  if (!(slot_duration > 0.0))
    throw std::invalid_argument("slot_duration must be positive");
  const int N = slots_per_frame;
  const double T = slot_duration;

  std::vector<double> v(model.num_states, 0.0);
  v[0] = 1.0;
  double m1 = 0.0, m2 = 0.0;  // raw delivery-slot moments
  for (int n = 1; n <= N; ++n) {
    double pn = 0.0;
    for (int j = 0; j < model.num_states; ++j) pn += v[j] * model.absorb[j];
    m1 += n * pn;
    m2 += static_cast<double>(n) * n * pn;
    v = model.propagate(v);
  }
  double p_fail = 0.0;
  for (double x : v) p_fail += x;
  p_fail = std::clamp(p_fail, 0.0, 1.0);
  if (p_fail >= 1.0 - 1e-12)
    throw NoAbsorptionError(
        "no absorption within a frame: delivery probability is ~0 and the age "
        "diverges");

  RenewalMoments m;
  m.p_fail = p_fail;
  m.e_s = T * m1 / (1.0 - p_fail);
  m.e_s2 = T * T * m2 / (1.0 - p_fail);
  m.e_x = 1.0 / (1.0 - p_fail);
  m.e_x2 = (1.0 + p_fail) / ((1.0 - p_fail) * (1.0 - p_fail));
  m.e_y = N * T * m.e_x;
  m.e_y2 = static_cast<double>(N) * N * T * T * m.e_x2 + 2.0 * m.e_s2 -
           2.0 * m.e_s * m.e_s;
  m.e_s_prev_y = m.e_s * m.e_y - m.e_s2 + m.e_s * m.e_s;
  return m;
}

double aoi_gar(const RenewalMoments& m) {
  return m.e_s_prev_y / m.e_y + m.e_y2 / (2.0 * m.e_y);
}

double aoi_gaw(const RenewalMoments& m, double slot_duration) {
  return slot_duration + m.e_y2 / (2.0 * m.e_y);
}

double analytical_aoi(const SystemConfig& config) {
  const TransitionModel model = transitions(config);
  const RenewalMoments m =
      renewal_moments(model, config.slots_per_frame, config.slot_duration);
  return config.generation_model == GenerationModel::Gar
             ? aoi_gar(m)
             : aoi_gaw(m, config.slot_duration);
}

}  // namespace aoigf
