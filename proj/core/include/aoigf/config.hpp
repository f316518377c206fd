#pragma once

#include <limits>
#include <vector>

namespace aoigf {

// High-SNR sentinel: disables every outage/feasibility failure.
inline constexpr double kInfinitePower = std::numeric_limits<double>::infinity();

enum class Scheme { Oma, Noma };
enum class GenerationModel { Gar, Gaw };

// What a user does when its channel cannot support the chosen receive level.
enum class InfeasibleBehavior { Abstain, TransmitAndJam };

struct TxPolicy {
  enum class Kind { Fixed, AdaptiveOma, AdaptiveNoma };
  Kind kind = Kind::Fixed;
  double value = 0.1;  // used by Fixed only

  static TxPolicy fixed(double p) { return {Kind::Fixed, p}; }
  static TxPolicy adaptive_oma() { return {Kind::AdaptiveOma, 0.0}; }
  static TxPolicy adaptive_noma() { return {Kind::AdaptiveNoma, 0.0}; }
};

struct SystemConfig {
  int num_users = 2;                 // M
  int slots_per_frame = 1;           // N
  double slot_duration = 1.0;        // T, seconds
  int num_levels = 1;                // K, 1 for OMA
  double tx_power = kInfinitePower;  // P, linear scale, noise power normalized to 1
  double target_rate = 0.5;          // R, bits per channel use
  Scheme scheme = Scheme::Oma;
  GenerationModel generation_model = GenerationModel::Gar;
  TxPolicy tx_policy = TxPolicy::fixed(0.1);
  InfeasibleBehavior infeasible_behavior = InfeasibleBehavior::Abstain;

  bool infinite_power() const;
  double epsilon() const;  // 2^R - 1
  void validate() const;   // throws std::invalid_argument on a bad field
};

// Receive-SNR targets P_1 > ... > P_K, built so level k sustains rate R while
// treating all lower levels as noise.
struct SnrLadder {
  double epsilon = 0.0;
  std::vector<double> levels;
};

SnrLadder build_snr_ladder(double target_rate, int num_levels);

// Attempt probability of one undelivered user, given that `delivered` users
// have already finished in the current frame.
double tx_probability(const TxPolicy& policy, int delivered, int num_users,
                      int num_levels);

// Probability that a unit-mean Rayleigh-power channel can be inverted to hit
// receive level `level_snr` within power budget `tx_power`.
double feasibility_probability(double level_snr, double tx_power);

}  // namespace aoigf
