#include "aoigf/config.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace aoigf {

bool SystemConfig::infinite_power() const { return std::isinf(tx_power); }

double SystemConfig::epsilon() const { return std::exp2(target_rate) - 1.0; }

void SystemConfig::validate() const {
  if (num_users < 1) throw std::invalid_argument("num_users must be >= 1");
  if (slots_per_frame < 1)
    throw std::invalid_argument("slots_per_frame must be >= 1");
  if (!(slot_duration > 0.0) || !std::isfinite(slot_duration))
    throw std::invalid_argument("slot_duration must be positive");
  if (num_levels < 1) throw std::invalid_argument("num_levels must be >= 1");
  if (!(tx_power > 0.0)) throw std::invalid_argument("tx_power must be positive");
  if (!(target_rate > 0.0) || !std::isfinite(target_rate))
    throw std::invalid_argument("target_rate must be positive and finite");
  if (scheme == Scheme::Oma && num_levels != 1)
    throw std::invalid_argument("OMA requires num_levels == 1");
  if (scheme == Scheme::Noma && num_levels < 2)
    throw std::invalid_argument("NOMA requires num_levels >= 2");
  if (tx_policy.kind == TxPolicy::Kind::Fixed &&
      !(tx_policy.value >= 0.0 && tx_policy.value <= 1.0))
    throw std::invalid_argument("fixed tx probability must be in [0, 1]");
}

SnrLadder build_snr_ladder(double target_rate, int num_levels) {
  if (num_levels < 1) throw std::invalid_argument("ladder needs num_levels >= 1");
  if (!(target_rate > 0.0) || !std::isfinite(target_rate))
    throw std::invalid_argument("ladder needs a positive finite rate");
  SnrLadder ladder;
  ladder.epsilon = std::exp2(target_rate) - 1.0;
  ladder.levels.assign(num_levels, 0.0);
  double interference = 0.0;  // sum of levels below the one being built
  for (int k = num_levels; k >= 1; --k) {
    ladder.levels[k - 1] = ladder.epsilon * (1.0 + interference);
    interference += ladder.levels[k - 1];
  }
  return ladder;
}

double tx_probability(const TxPolicy& policy, int delivered, int num_users,
                      int num_levels) {
  if (delivered < 0 || delivered >= num_users)
    throw std::invalid_argument("delivered count must be in [0, num_users)");
  switch (policy.kind) {
    case TxPolicy::Kind::Fixed:
      return policy.value;
    case TxPolicy::Kind::AdaptiveOma:
      return 1.0 / (num_users - delivered);
    case TxPolicy::Kind::AdaptiveNoma:
      return std::min(1.0, static_cast<double>(num_levels) / num_users);
  }
  throw std::logic_error("unreachable policy kind");
}

double feasibility_probability(double level_snr, double tx_power) {
  if (!(level_snr > 0.0)) throw std::invalid_argument("level_snr must be positive");
  if (!(tx_power > 0.0)) throw std::invalid_argument("tx_power must be positive");
  if (std::isinf(tx_power)) return 1.0;
  return std::exp(-level_snr / tx_power);
}

}  // namespace aoigf
