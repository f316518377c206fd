#pragma once

#include <stdexcept>
#include <vector>

#include "aoigf/config.hpp"

namespace aoigf {

// Raised when the tagged user cannot deliver within a frame (P_fail ~ 1), so
// the long-run age diverges.
class NoAbsorptionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Absorbing chain over transient states j = 0..M-1 (j = other users already
// delivered in this frame, tagged still pending) plus one absorbing state
// (tagged delivered).  Transient rows are banded: from state j only
// j..j+bandwidth-1 are reachable, so the matrix is stored as one band row per
// state and the absorption column separately.
struct TransitionModel {
  int num_states = 0;  // M
  int bandwidth = 1;   // K+1 band entries per row (OMA: 2)
  std::vector<double> band;    // num_states x bandwidth, row-major
  std::vector<double> absorb;  // per-state absorption probability
  Scheme scheme = Scheme::Oma;
  SystemConfig config;
  // worst pre-clamp defects seen during construction, for diagnostics
  double max_negative_entry = 0.0;
  double max_row_excess = 0.0;

  double entry(int j, int i) const;  // full-matrix accessor, 0 outside band
  double& band_at(int j, int d) { return band[static_cast<size_t>(j) * bandwidth + d]; }
  double band_at(int j, int d) const { return band[static_cast<size_t>(j) * bandwidth + d]; }
  double row_sum(int j) const;  // transient part only
  // one step of v^T P using only the band
  std::vector<double> propagate(const std::vector<double>& v) const;
};

TransitionModel oma_transitions(const SystemConfig& config);
TransitionModel noma_transitions(const SystemConfig& config);
TransitionModel transitions(const SystemConfig& config);  // dispatch on scheme

// P(tagged delivery takes exactly n slots), unconditioned on success.
double pmf_update_delay(const TransitionModel& model, int n);

// P(tagged fails to deliver within a frame of the given length).
double failure_probability(const TransitionModel& model, int slots_per_frame);

struct RenewalMoments {
  double p_fail = 0.0;
  double e_s = 0.0;        // mean service delay, seconds
  double e_s2 = 0.0;       // second moment of S
  double e_x = 0.0;        // mean frames per delivery
  double e_x2 = 0.0;
  double e_y = 0.0;        // mean inter-departure time, seconds
  double e_y2 = 0.0;
  double e_s_prev_y = 0.0;  // cross term E{S_{j-1} Y_j}
};

RenewalMoments renewal_moments(const TransitionModel& model, int slots_per_frame,
                               double slot_duration);

double aoi_gar(const RenewalMoments& m);
double aoi_gaw(const RenewalMoments& m, double slot_duration);

// Convenience: build the chain for the config and evaluate its generation
// model.  NOMA requires the infinite-power sentinel here.
double analytical_aoi(const SystemConfig& config);

}  // namespace aoigf
