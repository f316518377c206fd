#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "aoigf/config.hpp"
#include "aoigf/markov.hpp"
#include "aoigf/rng.hpp"
#include "aoigf/simulator.hpp"
#include "aoigf/slot_oracle.hpp"

using namespace aoigf;

namespace {

SystemConfig base_config(int users, int levels, int slots, double q,
                         double power) {
  SystemConfig cfg;
  cfg.num_users = users;
  cfg.num_levels = levels;
  cfg.scheme = levels == 1 ? Scheme::Oma : Scheme::Noma;
  cfg.slots_per_frame = slots;
  cfg.slot_duration = 6.0;
  cfg.tx_power = power;
  cfg.tx_policy = TxPolicy::fixed(q);
  return cfg;
}

}  // namespace

TEST_CASE("counter rng streams are stable and uniform-ish") {
  CounterRng a(1, 2, 3, 4);
  CounterRng b(1, 2, 3, 4);
  CHECK(a.next() == b.next());
  CHECK(a.next() == b.next());
  CounterRng c(1, 2, 3, 5);
  CHECK(a.next() != c.next());
  double sum = 0.0;
  CounterRng d(42, 0, 0, 0);
  for (int i = 0; i < 10000; ++i) {
    const double u = d.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    sum += u;
  }
  CHECK(std::fabs(sum / 10000.0 - 0.5) < 0.02);
  CounterRng e(42, 0, 0, 1);
  long counts[4] = {0, 0, 0, 0};
  for (int i = 0; i < 8000; ++i) ++counts[e.uniform_int(4)];
  for (long c4 : counts) CHECK(std::fabs(c4 - 2000.0) < 200.0);
}

TEST_CASE("lone user sawtooth is deterministic") {
  const SystemConfig cfg = base_config(1, 1, 1, 1.0, kInfinitePower);
  const long frames = 10000;
  const TraceStats st = simulate(cfg, frames, 9);
  CHECK(st.tagged_success_frames == frames);
  CHECK(st.frame_success_hist[1] == frames);
  CHECK(st.elapsed == frames * 6.0);
  const EmpiricalAoi aoi = empirical_aoi(st);
  CHECK(std::fabs(aoi.mean - 9.0) <= 0.01);
  // exact up to the age-zero start of the very first cycle
  CHECK(std::fabs(aoi.mean - (9.0 - 6.0 / frames)) < 1e-9);
  CHECK(aoi.stderr_mean < 0.01);
}

TEST_CASE("identical seeds give identical traces") {
  const SystemConfig cfg = base_config(6, 3, 4, 0.3, 50.0);
  const TraceStats a = simulate(cfg, 3000, 1234);
  const TraceStats b = simulate(cfg, 3000, 1234);
  CHECK(a.aoi_time_integral == b.aoi_time_integral);
  CHECK(a.tagged_success_frames == b.tagged_success_frames);
  CHECK(a.s_samples == b.s_samples);
  const TraceStats c = simulate(cfg, 3000, 1235);
  CHECK(a.aoi_time_integral != c.aoi_time_integral);
}

TEST_CASE("two-user failure probability matches the chain") {
  const SystemConfig cfg = base_config(2, 1, 1, 0.5, kInfinitePower);
  const TraceStats st = simulate(cfg, 200000, 77);
  const EmpiricalMoments m = empirical_renewal(st);
  CHECK(std::fabs(m.p_fail - 0.75) < 0.005);
  CHECK(std::fabs(m.e_y - 1.0 * 6.0 / (1.0 - m.p_fail)) <= 3.0 * m.se_y);
}

TEST_CASE("renewal samples live on the slot grid") {
  const SystemConfig cfg = base_config(4, 2, 3, 0.4, kInfinitePower);
  const TraceStats st = simulate(cfg, 20000, 5);
  REQUIRE(!st.s_samples.empty());
  for (double s : st.s_samples) {
    CHECK(s >= 6.0 - 1e-9);
    CHECK(s <= 18.0 + 1e-9);
    CHECK(std::fabs(s / 6.0 - std::round(s / 6.0)) < 1e-9);
  }
  for (double y : st.y_samples) {
    CHECK(y >= 6.0 - 1e-9);
    CHECK(std::fabs(y / 6.0 - std::round(y / 6.0)) < 1e-9);
  }
  long hist_total = 0;
  for (long h : st.frame_success_hist) hist_total += h;
  CHECK(hist_total == st.frames_run);
}

TEST_CASE("too few deliveries raise") {
  const SystemConfig cfg = base_config(1, 1, 1, 1.0, kInfinitePower);
  const TraceStats st = simulate(cfg, 50, 3);
  CHECK_THROWS_AS(empirical_renewal(st), std::runtime_error);
}

TEST_CASE("generate-at-will never ages worse than generate-at-request") {
  SystemConfig gar = base_config(8, 2, 8, 0.2, kInfinitePower);
  SystemConfig gaw = gar;
  gaw.generation_model = GenerationModel::Gaw;
  const TraceStats a = simulate(gar, 20000, 11);
  const TraceStats b = simulate(gaw, 20000, 11);
  CHECK(empirical_aoi(b).mean <= empirical_aoi(a).mean + 1e-9);
}

TEST_CASE("the two generation models coincide on single-slot frames") {
  SystemConfig gar = base_config(5, 2, 1, 0.3, kInfinitePower);
  SystemConfig gaw = gar;
  gaw.generation_model = GenerationModel::Gaw;
  const TraceStats a = simulate(gar, 5000, 21);
  const TraceStats b = simulate(gaw, 5000, 21);
  CHECK(a.aoi_time_integral == b.aoi_time_integral);
}

TEST_CASE("every observed slot replays through the sic oracle") {
  const SystemConfig cfg = base_config(6, 3, 4, 0.45, 5.0);
  long slots_seen = 0;
  simulate(cfg, 400, 99, [&](const SlotOutcome& slot) {
    ++slots_seen;
    const SicResolution replay =
        sic_resolve(slot.level, slot.decodable, cfg.num_levels);
    CHECK(replay.termination_level == slot.termination_level);
    for (std::size_t u = 0; u < slot.state.size(); ++u) {
      const bool sim_success = slot.state[u] == UserSlotState::Success;
      CHECK(sim_success == static_cast<bool>(replay.success[u]));
    }
    // occupancy recount
    std::vector<int> occ(cfg.num_levels + 1, 0);
    for (int lv : slot.level)
      if (lv > 0) ++occ[lv];
    CHECK(occ == slot.occupancy);
  });
  CHECK(slots_seen > 0);
}

TEST_CASE("jamming infeasible users never helps") {
  SystemConfig abstain = base_config(6, 3, 2, 0.5, 2.0);
  SystemConfig jam = abstain;
  jam.infeasible_behavior = InfeasibleBehavior::TransmitAndJam;
  const TraceStats a = simulate(abstain, 30000, 17);
  const TraceStats b = simulate(jam, 30000, 17);
  CHECK(b.tagged_success_frames <= a.tagged_success_frames);
  CHECK(empirical_aoi(b).mean >= empirical_aoi(a).mean - 1e-9);
  CHECK(a.aoi_time_integral != b.aoi_time_integral);
}

TEST_CASE("abstention shows up in the observer states") {
  const SystemConfig cfg = base_config(4, 4, 2, 0.9, 0.5);
  long abstains = 0;
  simulate(cfg, 500, 13, [&](const SlotOutcome& slot) {
    for (std::size_t u = 0; u < slot.state.size(); ++u)
      if (slot.state[u] == UserSlotState::InfeasibleAbstain) {
        ++abstains;
        CHECK(slot.level[u] == 0);
      }
  });
  CHECK(abstains > 0);
}

TEST_CASE("simulated ages agree with the chain at high snr") {
  SUBCASE("single channel") {
    SystemConfig cfg = base_config(2, 1, 1, 0.5, kInfinitePower);
    const double exact = analytical_aoi(cfg);
    const TraceStats st = simulate(cfg, 200000, 31);
    const EmpiricalAoi aoi = empirical_aoi(st);
    CHECK(std::fabs(aoi.mean - exact) <= 3.0 * aoi.stderr_mean);
  }
  SUBCASE("two levels") {
    SystemConfig cfg = base_config(8, 2, 1, 0.2, kInfinitePower);
    const double exact = analytical_aoi(cfg);
    cfg.tx_power = 1e4;
    const TraceStats st = simulate(cfg, 200000, 32);
    const EmpiricalAoi aoi = empirical_aoi(st);
    CHECK(std::fabs(aoi.mean - exact) <= 3.0 * aoi.stderr_mean);
  }
}

TEST_CASE("delivered users stay silent for the rest of the frame") {
  const SystemConfig cfg = base_config(5, 2, 6, 0.6, kInfinitePower);
  std::vector<uint8_t> done;
  long violations = 0;
  long last_frame = -1;
  simulate(cfg, 2000, 55, [&](const SlotOutcome& slot) {
    if (slot.frame != last_frame) {
      done.assign(5, 0);
      last_frame = slot.frame;
    }
    for (std::size_t u = 0; u < slot.state.size(); ++u) {
      if (done[u] && slot.level[u] != 0) ++violations;
      if (slot.state[u] == UserSlotState::Success) done[u] = 1;
    }
  });
  CHECK(violations == 0);
}

TEST_CASE("rejects bad run lengths") {
  const SystemConfig cfg = base_config(2, 1, 1, 0.5, kInfinitePower);
  CHECK_THROWS_AS(simulate(cfg, 0, 1), std::invalid_argument);
}
