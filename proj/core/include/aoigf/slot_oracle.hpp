#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

namespace aoigf {

// Distribution of a single contention slot as seen by one tagged user that
// still holds an update.  Keys are (successes among the other users, whether
// the tagged user delivered).
struct SlotOutcomeDistribution {
  int remaining_users = 0;
  int num_levels = 1;
  double ptx = 0.0;
  std::vector<double> level_success_probs;
  std::map<std::pair<int, bool>, double> mass;

  double total() const;
  double prob(int non_tagged_successes, bool tagged_success) const;
  double tagged_success() const;  // marginal over non-tagged counts
};

// Outcome of one concrete slot.  levels[u] is the chosen receive level in
// 1..K for a transmitting user and 0 for a silent one; decodable[u] says
// whether user u's signal, if alone on its level, can actually be decoded.
// A collision or an undecodable lone signal stops decoding at that level and
// everything on deeper levels fails.
struct SicResolution {
  std::vector<uint8_t> success;
  int termination_level = 0;  // 0 when the receiver ran through all levels
};
SicResolution sic_resolve(const std::vector<int>& levels,
                          const std::vector<uint8_t>& decodable, int num_levels);

// Exhaustive single-slot distribution under the SIC semantics above.  Every
// transmitter picks a level uniformly; a lone occupant of level k is decoded
// with probability level_success_probs[k-1] (all ones gives the collision-only
// model).  Guarded to remaining <= 12 and num_levels <= 6.
SlotOutcomeDistribution enumerate_noma_slot(
    int remaining, int num_levels, double ptx,
    const std::vector<double>& level_success_probs);

// Single-channel slot: at most one success, and only when exactly one user
// transmits and survives the outage draw (probability success_prob).
SlotOutcomeDistribution enumerate_oma_slot(int remaining, double ptx,
                                           double success_prob);

}  // namespace aoigf
