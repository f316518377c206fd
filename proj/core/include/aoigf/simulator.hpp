#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "aoigf/config.hpp"

namespace aoigf {

enum class UserSlotState : uint8_t {
  Silent,            // no update pending, or chose not to transmit
  InfeasibleAbstain, // wanted to transmit but the channel cannot reach the level
  Collided,          // shared its level with another transmitter
  SicBlocked,        // on a level behind the termination point
  Outage,            // alone on a reached level but undecodable
  Success,
};

// Everything that happened in one slot, enough to replay the decode decision
// from the raw draws.
struct SlotOutcome {
  long frame = 0;
  int slot = 0;
  std::vector<int> level;          // 1..K while transmitting, 0 otherwise
  std::vector<uint8_t> decodable;  // meaningful where level > 0
  std::vector<UserSlotState> state;
  std::vector<int> occupancy;      // per level, index 0 unused
  int termination_level = 0;       // 0 when decoding ran through
};

using SlotObserver = std::function<void(const SlotOutcome&)>;

struct TraceStats {
  uint64_t seed = 0;
  long frames_run = 0;
  int slots_per_frame = 1;
  double slot_duration = 1.0;
  double elapsed = 0.0;            // frames_run * N * T
  double aoi_time_integral = 0.0;  // exact piecewise-linear area
  long tagged_success_frames = 0;
  std::vector<long> frame_success_hist;  // frames by number of delivered users
  // renewal samples for the tagged user
  std::vector<double> s_samples;  // generation-to-delivery, seconds
  std::vector<double> y_samples;  // gaps between deliveries, seconds
  std::vector<long> x_samples;    // gaps between deliveries, frames
  // equal-frame batches for the standard error of the mean age
  std::vector<double> batch_area;
  std::vector<double> batch_seconds;
};

// Frame/slot simulation measuring the tagged user's age exactly.  The same
// (config, frames, seed) always produces a bit-identical trace.  The observer,
// when set, sees every contested slot.
TraceStats simulate(const SystemConfig& config, long frames, uint64_t seed,
                    const SlotObserver& observer = {});

struct EmpiricalMoments {
  double p_fail = 0.0;
  double e_s = 0.0, e_s2 = 0.0;
  double e_x = 0.0, e_x2 = 0.0;
  double e_y = 0.0, e_y2 = 0.0;
  double se_s = 0.0, se_x = 0.0, se_y = 0.0;  // standard errors of the means
  long cycles = 0;
};

// Sample renewal moments; throws std::runtime_error below 100 delivered
// updates.
EmpiricalMoments empirical_renewal(const TraceStats& stats);

struct EmpiricalAoi {
  double mean = 0.0;
  double stderr_mean = 0.0;
  int batches = 0;
};

EmpiricalAoi empirical_aoi(const TraceStats& stats);

}  // namespace aoigf
