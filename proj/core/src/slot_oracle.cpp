#include "aoigf/slot_oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace aoigf {

double SlotOutcomeDistribution::total() const {
  double t = 0.0;
  for (const auto& [key, p] : mass) t += p;
  return t;
}

double SlotOutcomeDistribution::prob(int non_tagged_successes,
                                     bool tagged) const {
  auto it = mass.find({non_tagged_successes, tagged});
  return it == mass.end() ? 0.0 : it->second;
}

double SlotOutcomeDistribution::tagged_success() const {
  double t = 0.0;
  for (const auto& [key, p] : mass)
    if (key.second) t += p;
  return t;
}

SicResolution sic_resolve(const std::vector<int>& levels,
                          const std::vector<uint8_t>& decodable,
                          int num_levels) {
  if (decodable.size() != levels.size())
    throw std::invalid_argument("levels/decodable size mismatch");
  const int n = static_cast<int>(levels.size());
  SicResolution res;
  res.success.assign(n, 0);
  for (int k = 1; k <= num_levels; ++k) {
    int occupant = -1, count = 0;
    for (int u = 0; u < n; ++u)
      if (levels[u] == k) {
        ++count;
        occupant = u;
      }
    if (count == 0) continue;
    if (count >= 2 || !decodable[occupant]) {
      res.termination_level = k;
      return res;
    }
    res.success[occupant] = 1;
  }
  return res;
}

namespace {

// Enumeration walks the decoder level by level.  Of the `a` transmitters not
// yet placed on a level, each sits on the current one with probability
// 1/(levels left), independently.  Only four branch classes matter per level:
// empty, lone tagged, lone non-tagged, and collision; a collision or a failed
// lone decode ends the walk and everything still pending fails.
struct Walker {
  int num_levels;
  const std::vector<double>& succ;
  std::map<std::pair<int, bool>, double>& mass;

  void emit(int non_tagged, bool tagged, double w) {
    if (w > 0.0) mass[{non_tagged, tagged}] += w;
  }

  void walk(int k, int pending, bool tagged_pending, double w, int non_tagged,
            bool tagged_done) {
    if (w == 0.0) return;
    if (k > num_levels || pending == 0) {
      emit(non_tagged, tagged_done, w);
      return;
    }
    const double p = 1.0 / (num_levels - k + 1);
    const double p_rest = std::pow(1.0 - p, pending - 1);
    const double p_empty = p_rest * (1.0 - p);
    const double p_lone = pending * p * p_rest;
    const double p_collision = 1.0 - p_empty - p_lone;
    const double s = succ[k - 1];

    walk(k + 1, pending, tagged_pending, w * p_empty, non_tagged, tagged_done);
    if (tagged_pending) {
      const double p_lone_tagged = p * p_rest;
      const double p_lone_other = p_lone - p_lone_tagged;
      walk(k + 1, pending - 1, false, w * p_lone_tagged * s, non_tagged, true);
      emit(non_tagged, tagged_done, w * p_lone_tagged * (1.0 - s));
      walk(k + 1, pending - 1, true, w * p_lone_other * s, non_tagged + 1,
           tagged_done);
      emit(non_tagged, tagged_done, w * p_lone_other * (1.0 - s));
    } else {
      walk(k + 1, pending - 1, false, w * p_lone * s, non_tagged + 1,
           tagged_done);
      emit(non_tagged, tagged_done, w * p_lone * (1.0 - s));
    }
    if (pending >= 2) emit(non_tagged, tagged_done, w * p_collision);
  }
};

double binom_weight(int n, int k, double q) {
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c *= static_cast<double>(n - k + i) / i;
  return c * std::pow(q, k) * std::pow(1.0 - q, n - k);
}

}  // namespace

SlotOutcomeDistribution enumerate_noma_slot(
    int remaining, int num_levels, double ptx,
    const std::vector<double>& level_success_probs) {
  if (remaining < 1 || remaining > 12)
    throw std::invalid_argument("enumeration guard: remaining must be in 1..12");
  if (num_levels < 1 || num_levels > 6)
    throw std::invalid_argument("enumeration guard: num_levels must be in 1..6");
  if (!(ptx >= 0.0 && ptx <= 1.0))
    throw std::invalid_argument("ptx must be in [0, 1]");
  if (static_cast<int>(level_success_probs.size()) != num_levels)
    throw std::invalid_argument("need one success probability per level");
  for (double s : level_success_probs)
    if (!(s >= 0.0 && s <= 1.0))
      throw std::invalid_argument("level success probabilities must be in [0, 1]");

  SlotOutcomeDistribution dist;
  dist.remaining_users = remaining;
  dist.num_levels = num_levels;
  dist.ptx = ptx;
  dist.level_success_probs = level_success_probs;

  Walker walker{num_levels, level_success_probs, dist.mass};
  for (int tagged_active = 0; tagged_active <= 1; ++tagged_active) {
    const double w_tagged = tagged_active ? ptx : 1.0 - ptx;
    if (w_tagged == 0.0) continue;
    for (int others = 0; others <= remaining - 1; ++others) {
      const double w = w_tagged * binom_weight(remaining - 1, others, ptx);
      walker.walk(1, others + tagged_active, tagged_active != 0, w, 0, false);
    }
  }
  return dist;
}

SlotOutcomeDistribution enumerate_oma_slot(int remaining, double ptx,
                                           double success_prob) {
  if (remaining < 1) throw std::invalid_argument("remaining must be >= 1");
  if (!(ptx >= 0.0 && ptx <= 1.0))
    throw std::invalid_argument("ptx must be in [0, 1]");
  if (!(success_prob >= 0.0 && success_prob <= 1.0))
    throw std::invalid_argument("success_prob must be in [0, 1]");

  SlotOutcomeDistribution dist;
  dist.remaining_users = remaining;
  dist.num_levels = 1;
  dist.ptx = ptx;
  dist.level_success_probs = {success_prob};

  const double lone = ptx * std::pow(1.0 - ptx, remaining - 1) * success_prob;
  const double tagged = lone;                    // the tagged is the lone one
  const double other = (remaining - 1) * lone;   // some other user is
  if (tagged > 0.0) dist.mass[{0, true}] += tagged;
  if (other > 0.0) dist.mass[{1, false}] += other;
  const double none = 1.0 - tagged - other;
  if (none > 0.0) dist.mass[{0, false}] += none;
  return dist;
}

}  // namespace aoigf
