#include "aoigf/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "aoigf/rng.hpp"

namespace aoigf {

TraceStats simulate(const SystemConfig& config, long frames, uint64_t seed,
                    const SlotObserver& observer) {
  config.validate();
  if (frames < 1) throw std::invalid_argument("frames must be >= 1");
  const int M = config.num_users;
  const int N = config.slots_per_frame;
  const int K = config.num_levels;
  const double T = config.slot_duration;
  const bool noma = config.scheme == Scheme::Noma;
  const bool inf_power = config.infinite_power();
  const bool jam = config.infeasible_behavior == InfeasibleBehavior::TransmitAndJam;
  const SnrLadder ladder = build_snr_ladder(config.target_rate, K);
  const double outage_threshold = config.epsilon() / config.tx_power;

  TraceStats st;
  st.seed = seed;
  st.frames_run = frames;
  st.slots_per_frame = N;
  st.slot_duration = T;
  st.elapsed = static_cast<double>(frames) * N * T;
  st.frame_success_hist.assign(M + 1, 0);

  const int batches = frames >= 20 ? 20 : static_cast<int>(frames);
  const long batch_frames = frames / batches;
  st.batch_area.assign(batches, 0.0);
  st.batch_seconds.assign(batches, 0.0);

  // age sawtooth cursor; a virtual age-zero delivery sits at t = 0
  double cursor = 0.0;
  double age = 0.0;
  int batch_idx = 0;
  double next_boundary =
      batches > 1 ? static_cast<double>(batch_frames) * N * T : st.elapsed;
  auto segment_to = [&](double t) {
    const double dt = t - cursor;
    if (dt <= 0.0) return;
    const double area = dt * age + 0.5 * dt * dt;
    st.aoi_time_integral += area;
    st.batch_area[batch_idx] += area;
    st.batch_seconds[batch_idx] += dt;
    age += dt;
    cursor = t;
  };
  auto advance_to = [&](double t) {
    while (batch_idx + 1 < batches && next_boundary <= t) {
      segment_to(next_boundary);
      ++batch_idx;
      next_boundary = batch_idx + 1 < batches
                          ? static_cast<double>(batch_frames) * (batch_idx + 1) * N * T
                          : st.elapsed;
    }
    segment_to(t);
  };

  double last_delivery_time = -1.0;
  long last_delivery_frame = -1;

  std::vector<uint8_t> delivered(M);
  std::vector<int> level(M);
  std::vector<uint8_t> decodable(M);
  std::vector<int> occupancy(K + 1);
  std::vector<uint8_t> success(M);
  SlotOutcome outcome;

  for (long f = 0; f < frames; ++f) {
    std::fill(delivered.begin(), delivered.end(), 0);
    int n_delivered = 0;
    const double frame_start = static_cast<double>(f) * N * T;

    for (int n = 0; n < N && n_delivered < M; ++n) {
      const double slot_start = frame_start + n * T;
      const double q = tx_probability(config.tx_policy, n_delivered, M, K);
      std::fill(occupancy.begin(), occupancy.end(), 0);
      std::fill(success.begin(), success.end(), 0);

      for (int u = 0; u < M; ++u) {
        level[u] = 0;
        decodable[u] = 1;
        if (delivered[u]) continue;
        CounterRng rng(seed, static_cast<uint64_t>(f), static_cast<uint64_t>(n),
                       static_cast<uint64_t>(u));
        if (rng.uniform01() >= q) continue;
        if (!noma) {
          level[u] = 1;
          if (!inf_power) decodable[u] = rng.exponential() >= outage_threshold;
        } else {
          const int k = 1 + rng.uniform_int(K);
          const bool feasible =
              inf_power ||
              rng.exponential() >= ladder.levels[k - 1] / config.tx_power;
          if (!feasible && !jam) {
            level[u] = -k;  // wanted k, stayed silent
            continue;
          }
          level[u] = k;
          decodable[u] = feasible;
        }
        ++occupancy[level[u]];
      }

      // resolve the slot
      int termination = 0;
      if (!noma) {
        if (occupancy[1] == 1)
          for (int u = 0; u < M; ++u)
            if (level[u] == 1 && decodable[u]) success[u] = 1;
      } else {
        for (int k = 1; k <= K && termination == 0; ++k) {
          if (occupancy[k] == 0) continue;
          if (occupancy[k] >= 2) {
            termination = k;
            break;
          }
          for (int u = 0; u < M; ++u)
            if (level[u] == k) {
              if (decodable[u])
                success[u] = 1;
              else
                termination = k;
              break;
            }
        }
      }

      for (int u = 0; u < M; ++u) {
        if (!success[u]) continue;
        delivered[u] = 1;
        ++n_delivered;
        if (u == 0) {
          const double t_delivery = slot_start + T;
          const double t_generation =
              config.generation_model == GenerationModel::Gar ? frame_start
                                                              : slot_start;
          advance_to(t_delivery);
          age = t_delivery - t_generation;
          st.s_samples.push_back(t_delivery - t_generation);
          if (last_delivery_time >= 0.0) {
            st.y_samples.push_back(t_delivery - last_delivery_time);
            st.x_samples.push_back(f - last_delivery_frame);
          }
          last_delivery_time = t_delivery;
          last_delivery_frame = f;
          ++st.tagged_success_frames;
        }
      }

      if (observer) {
        outcome.frame = f;
        outcome.slot = n;
        outcome.level.assign(M, 0);
        outcome.decodable.assign(M, 1);
        outcome.state.assign(M, UserSlotState::Silent);
        outcome.occupancy.assign(occupancy.begin(), occupancy.end());
        outcome.termination_level = termination;
        for (int u = 0; u < M; ++u) {
          if (level[u] < 0) {
            outcome.state[u] = UserSlotState::InfeasibleAbstain;
            continue;
          }
          if (level[u] == 0) continue;
          outcome.level[u] = level[u];
          outcome.decodable[u] = decodable[u];
          if (success[u])
            outcome.state[u] = UserSlotState::Success;
          else if (!noma)
            outcome.state[u] = occupancy[1] >= 2 ? UserSlotState::Collided
                                                 : UserSlotState::Outage;
          else if (termination != 0 && level[u] > termination)
            outcome.state[u] = UserSlotState::SicBlocked;
          else if (occupancy[level[u]] >= 2)
            outcome.state[u] = UserSlotState::Collided;
          else
            outcome.state[u] = UserSlotState::Outage;
        }
        observer(outcome);
      }
    }
    st.frame_success_hist[n_delivered] += 1;
  }

  advance_to(st.elapsed);
  return st;
}

EmpiricalMoments empirical_renewal(const TraceStats& stats) {
  EmpiricalMoments m;
  m.cycles = static_cast<long>(stats.s_samples.size());
  if (m.cycles < 100)
    throw std::runtime_error("insufficient cycles: need at least 100 deliveries");
  auto mean_and_m2 = [](const auto& v, double& mean, double& second) {
    double s1 = 0.0, s2 = 0.0;
    for (double x : v) {
      s1 += x;
      s2 += x * x;
    }
    mean = s1 / v.size();
    second = s2 / v.size();
  };
  auto stderr_of = [](const auto& v, double mean) {
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const size_t n = v.size();
    return n > 1 ? std::sqrt(ss / (n - 1) / n) : 0.0;
  };
  mean_and_m2(stats.s_samples, m.e_s, m.e_s2);
  m.se_s = stderr_of(stats.s_samples, m.e_s);
  if (!stats.y_samples.empty()) {
    mean_and_m2(stats.y_samples, m.e_y, m.e_y2);
    m.se_y = stderr_of(stats.y_samples, m.e_y);
  }
  if (!stats.x_samples.empty()) {
    std::vector<double> xs(stats.x_samples.begin(), stats.x_samples.end());
    mean_and_m2(xs, m.e_x, m.e_x2);
    m.se_x = stderr_of(xs, m.e_x);
  }
  m.p_fail = 1.0 - static_cast<double>(stats.tagged_success_frames) /
                       static_cast<double>(stats.frames_run);
  return m;
}

EmpiricalAoi empirical_aoi(const TraceStats& stats) {
  if (!(stats.elapsed > 0.0)) throw std::invalid_argument("empty trace");
  EmpiricalAoi out;
  out.mean = stats.aoi_time_integral / stats.elapsed;
  out.batches = static_cast<int>(stats.batch_area.size());
  if (out.batches > 1) {
    std::vector<double> means;
    means.reserve(out.batches);
    for (int b = 0; b < out.batches; ++b)
      if (stats.batch_seconds[b] > 0.0)
        means.push_back(stats.batch_area[b] / stats.batch_seconds[b]);
    const int nb = static_cast<int>(means.size());
    if (nb > 1) {
      double mu = 0.0;
      for (double x : means) mu += x;
      mu /= nb;
      double ss = 0.0;
      for (double x : means) ss += (x - mu) * (x - mu);
      out.stderr_mean = std::sqrt(ss / (nb - 1) / nb);
    }
  }
  return out;
}

}  // namespace aoigf
