#pragma once

#include <cstdint>
#include <vector>

#include "aoigf/config.hpp"

namespace aoigf {

// Root of (1 - x/2) e^{-x/2} + (1 - x^2/2) e^{-x} = 0 on [1, 2]; the optimal
// two-level transmission probability is eta / M.
struct EtaSolution {
  double eta = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

EtaSolution solve_eta();

// Closed forms for the two-level, single-slot special case (K=2, N=1).
double special_case_p_fail(double ptx, int num_users);
double special_case_aoi_noma(double ptx, int num_users, double slot_duration);

// Large-M optimal attempt probabilities (NOMA branch is the K=2, N=1 result).
double optimal_ptx(Scheme scheme, int num_users);

// Large-M closed-form age at the optimal attempt probability.
double asymptotic_aoi(Scheme scheme, int num_users, int slots_per_frame,
                      double slot_duration);

// Limiting NOMA/OMA age ratio; below 0.6, i.e. a 40%+ reduction.
double aoi_ratio_asymptotic();

enum class Evaluator { Analytical, Simulated };

struct PtxCurvePoint {
  double ptx = 0.0;
  double aoi = 0.0;     // +inf where the age diverges
  double p_fail = 1.0;
};

struct PtxOptimum {
  double best_ptx = 0.0;
  double best_aoi = 0.0;
  std::vector<PtxCurvePoint> curve;
};

// Evaluates the age over a probability grid and returns the minimizer plus
// the whole curve.  Ties break toward the smaller probability; divergent
// points are recorded as +inf, not errors.  The simulated evaluator needs
// frames >= 1; seed derives one sub-stream per grid point.
PtxOptimum grid_optimize_ptx(Scheme scheme, const SystemConfig& config,
                             const std::vector<double>& grid, Evaluator evaluator,
                             long frames = 0, uint64_t seed = 0);

}  // namespace aoigf
