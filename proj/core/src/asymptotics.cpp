#include "aoigf/asymptotics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "aoigf/markov.hpp"
#include "aoigf/rng.hpp"
#include "aoigf/simulator.hpp"

namespace aoigf {

namespace {

double eta_equation(double x) {
  return (1.0 - x / 2.0) * std::exp(-x / 2.0) +
         (1.0 - x * x / 2.0) * std::exp(-x);
}

double zpow(double b, long e) {
  if (e == 0) return 1.0;
  return std::pow(b, static_cast<double>(e));
}

// delivery probability f of the tagged user in one two-level slot
double special_case_f(double ptx, int num_users) {
  if (num_users < 2) throw std::invalid_argument("special case needs M >= 2");
  if (!(ptx >= 0.0 && ptx <= 1.0))
    throw std::invalid_argument("ptx must be in [0, 1]");
  const int M = num_users;
  const double x = 0.5 * ptx;
  return zpow(1.0 - x, M - 1) * x +
         (1.0 - ptx + (M - 1) * x) * zpow(1.0 - ptx, M - 2) * x;
}

}  // namespace

EtaSolution solve_eta() {
  double lo = 1.0, hi = 2.0;
  double f_lo = eta_equation(lo);
  double mid = 0.5 * (lo + hi);
  int it = 0;
  for (; it < 200; ++it) {
    mid = 0.5 * (lo + hi);
    const double f_mid = eta_equation(mid);
    if (std::abs(f_mid) <= 1e-12 || hi - lo <= 0.0) break;
    if ((f_lo > 0.0) == (f_mid > 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return {mid, eta_equation(mid), it};
}

double special_case_p_fail(double ptx, int num_users) {
  return 1.0 - special_case_f(ptx, num_users);
}

double special_case_aoi_noma(double ptx, int num_users, double slot_duration) {
  if (!(slot_duration > 0.0))
    throw std::invalid_argument("slot_duration must be positive");
  const double f = special_case_f(ptx, num_users);
  if (f <= 1e-15)
    throw NoAbsorptionError("delivery probability ~0: the age diverges");
  return slot_duration * (1.0 + (2.0 - f) / (2.0 * f));
}

double optimal_ptx(Scheme scheme, int num_users) {
  if (num_users < 2) throw std::invalid_argument("optimum needs M >= 2");
  if (scheme == Scheme::Oma) return 1.0 / num_users;
  return std::min(1.0, solve_eta().eta / num_users);
}

double asymptotic_aoi(Scheme scheme, int num_users, int slots_per_frame,
                      double slot_duration) {
  const double nt = static_cast<double>(slots_per_frame) * slot_duration;
  if (scheme == Scheme::Oma)
    return nt * num_users * std::exp(1.0);
  const double eta = solve_eta().eta;
  return nt * 2.0 * num_users * std::exp(eta) /
         (eta * (std::exp(eta / 2.0) + 1.0 + eta / 2.0));
}

double aoi_ratio_asymptotic() {
  const double eta = solve_eta().eta;
  return 2.0 * std::exp(eta - 1.0) /
         (eta * (std::exp(eta / 2.0) + 1.0 + eta / 2.0));
}

PtxOptimum grid_optimize_ptx(Scheme scheme, const SystemConfig& config,
                             const std::vector<double>& grid, Evaluator evaluator,
                             long frames, uint64_t seed) {
  if (grid.empty()) throw std::invalid_argument("grid must be non-empty");
  if (evaluator == Evaluator::Simulated && frames < 1)
    throw std::invalid_argument("simulated grid search needs frames >= 1");
  SystemConfig cfg = config;
  cfg.scheme = scheme;
  if (scheme == Scheme::Oma) cfg.num_levels = 1;

  PtxOptimum out;
  out.best_ptx = std::numeric_limits<double>::quiet_NaN();
  out.best_aoi = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < grid.size(); ++i) {
    cfg.tx_policy = TxPolicy::fixed(grid[i]);
    PtxCurvePoint point{grid[i], std::numeric_limits<double>::infinity(), 1.0};
    try {
      if (evaluator == Evaluator::Analytical) {
        const TransitionModel model = transitions(cfg);
        const RenewalMoments m =
            renewal_moments(model, cfg.slots_per_frame, cfg.slot_duration);
        point.p_fail = m.p_fail;
        point.aoi = cfg.generation_model == GenerationModel::Gar
                        ? aoi_gar(m)
                        : aoi_gaw(m, cfg.slot_duration);
      } else {
        const TraceStats stats = simulate(cfg, frames, mix64(seed + i));
        point.aoi = empirical_aoi(stats).mean;
        point.p_fail =
            1.0 - static_cast<double>(stats.tagged_success_frames) /
                      static_cast<double>(stats.frames_run);
      }
    } catch (const NoAbsorptionError&) {
      // divergent grid point, keep +inf
    }
    if (point.aoi < out.best_aoi ||
        (point.aoi == out.best_aoi && point.ptx < out.best_ptx)) {
      out.best_aoi = point.aoi;
      out.best_ptx = point.ptx;
    }
    out.curve.push_back(point);
  }
  return out;
}

}  // namespace aoigf
