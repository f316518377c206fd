#include <cmath>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "aoigf/asymptotics.hpp"
#include "aoigf/config.hpp"
#include "aoigf/markov.hpp"

using namespace aoigf;

namespace {

double bracket_function(double x) {
  return (1.0 - x / 2.0) * std::exp(-x / 2.0) +
         (1.0 - x * x / 2.0) * std::exp(-x);
}

}  // namespace

TEST_CASE("eta root") {
  const EtaSolution sol = solve_eta();
  CHECK(sol.eta >= 1.0);
  CHECK(sol.eta <= 2.0);
  CHECK(std::fabs(sol.residual) <= 1e-10);
  CHECK(std::fabs(sol.eta - 1.6646) <= 5e-4);
  // frozen from an independent high-precision root computation
  CHECK(std::fabs(sol.eta - 1.664610890822404) <= 1e-9);
  CHECK(bracket_function(1.0) > 0.0);
  CHECK(bracket_function(2.0) < 0.0);

  const EtaSolution again = solve_eta();
  CHECK(again.eta == sol.eta);
  CHECK(again.residual == sol.residual);
}

TEST_CASE("limiting age ratio") {
  const double ratio = aoi_ratio_asymptotic();
  CHECK(std::fabs(ratio - 0.5653) <= 1e-3);
  CHECK(std::fabs(ratio - 0.5653372404956257) <= 1e-12);
  CHECK(ratio < 0.6);
  const double quotient = asymptotic_aoi(Scheme::Noma, 100, 1, 6.0) /
                          asymptotic_aoi(Scheme::Oma, 100, 1, 6.0);
  CHECK(std::fabs(quotient - ratio) <= 1e-12);
}

TEST_CASE("two-level single-slot failure probability") {
  CHECK(special_case_p_fail(0.0, 5) == 1.0);
  // ptx = 1, M = 2 exercises the 0^0 = 1 boundary convention
  CHECK(std::fabs(special_case_p_fail(1.0, 2) - 0.5) < 1e-15);
  CHECK_THROWS_AS(special_case_p_fail(0.5, 1), std::invalid_argument);
  CHECK_THROWS_AS(special_case_p_fail(1.5, 4), std::invalid_argument);

  double worst = 0.0;
  for (int users : {4, 8, 16}) {
    for (double q : {0.1, 0.3}) {
      SystemConfig cfg;
      cfg.num_users = users;
      cfg.scheme = Scheme::Noma;
      cfg.num_levels = 2;
      cfg.tx_policy = TxPolicy::fixed(q);
      const TransitionModel model = noma_transitions(cfg);
      worst = std::max(worst, std::fabs(failure_probability(model, 1) -
                                        special_case_p_fail(q, users)));
    }
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("two-level single-slot closed-form age") {
  // f = 1 - p_fail = 0.5 at ptx = 1, M = 2 gives T (1 + 1.5/1) = 2.5 T
  CHECK(std::fabs(special_case_aoi_noma(1.0, 2, 6.0) - 15.0) < 1e-12);
  CHECK_THROWS_AS(special_case_aoi_noma(1e-16, 200, 6.0), NoAbsorptionError);

  for (int users : {50, 100}) {
    const double ptx = optimal_ptx(Scheme::Noma, users);
    SystemConfig cfg;
    cfg.num_users = users;
    cfg.scheme = Scheme::Noma;
    cfg.num_levels = 2;
    cfg.slot_duration = 6.0;
    cfg.tx_policy = TxPolicy::fixed(ptx);
    const double chain = analytical_aoi(cfg);
    const double closed = special_case_aoi_noma(ptx, users, 6.0);
    CHECK(std::fabs(chain - closed) < 1e-9 * closed);
  }
}

TEST_CASE("closed-form age is unimodal in the attempt probability") {
  const int users = 50;
  std::vector<double> curve;
  for (int i = 1; i <= 199; ++i)
    curve.push_back(special_case_aoi_noma(0.005 * i, users, 6.0));
  int direction_changes = 0;
  for (std::size_t i = 2; i < curve.size(); ++i) {
    const bool was_down = curve[i - 1] < curve[i - 2];
    const bool is_down = curve[i] < curve[i - 1];
    if (was_down != is_down) ++direction_changes;
  }
  CHECK(direction_changes == 1);
}

TEST_CASE("optimal attempt probabilities") {
  CHECK(optimal_ptx(Scheme::Oma, 50) == 0.02);
  CHECK(std::fabs(optimal_ptx(Scheme::Noma, 100) - 0.01664610890822404) < 1e-12);
  CHECK_THROWS_AS(optimal_ptx(Scheme::Oma, 1), std::invalid_argument);
  for (int users : {2, 8, 50, 400}) {
    const double p = optimal_ptx(Scheme::Noma, users);
    CHECK(p >= std::sqrt(2.0) / users - 1e-12);
    CHECK(p <= 2.0 / users + 1e-12);
  }
}

TEST_CASE("large-system closed forms") {
  const double oma100 = asymptotic_aoi(Scheme::Oma, 100, 1, 6.0);
  CHECK(std::fabs(oma100 - 600.0 * std::exp(1.0)) < 1e-9);
  CHECK(std::fabs(asymptotic_aoi(Scheme::Oma, 200, 1, 6.0) - 2.0 * oma100) <
        1e-9);
  const double noma100 = asymptotic_aoi(Scheme::Noma, 100, 1, 6.0);
  CHECK(std::fabs(asymptotic_aoi(Scheme::Noma, 200, 1, 6.0) - 2.0 * noma100) <
        1e-9);
  // scales linearly in frame length as well
  CHECK(std::fabs(asymptotic_aoi(Scheme::Oma, 100, 4, 6.0) - 4.0 * oma100) <
        1e-9);
}

TEST_CASE("grid search recovers the optimal probabilities") {
  std::vector<double> grid;
  for (int i = 1; i <= 200; ++i) grid.push_back(5.0 * i / 1000.0);

  SystemConfig cfg;
  cfg.num_users = 8;
  cfg.slots_per_frame = 1;
  cfg.slot_duration = 6.0;

  const PtxOptimum oma = grid_optimize_ptx(Scheme::Oma, cfg, grid,
                                           Evaluator::Analytical);
  CHECK(std::fabs(oma.best_ptx - 0.125) <= 0.005 + 1e-12);
  REQUIRE(oma.curve.size() == grid.size());

  SystemConfig ncfg = cfg;
  ncfg.num_levels = 2;
  const PtxOptimum noma = grid_optimize_ptx(Scheme::Noma, ncfg, grid,
                                            Evaluator::Analytical);
  CHECK(std::fabs(noma.best_ptx - solve_eta().eta / 8.0) <= 0.005 + 1e-12);

  // beyond the minimizer the curve only climbs
  for (const PtxOptimum* opt : {&oma, &noma}) {
    std::size_t arg = 0;
    while (opt->curve[arg].ptx != opt->best_ptx) ++arg;
    for (std::size_t i = arg + 1; i < opt->curve.size(); ++i)
      CHECK(opt->curve[i].aoi >= opt->curve[i - 1].aoi * (1.0 - 1e-12));
  }
}

TEST_CASE("grid search keeps divergent points and single-point grids") {
  SystemConfig cfg;
  cfg.num_users = 8;
  cfg.slots_per_frame = 1;
  cfg.slot_duration = 6.0;
  const PtxOptimum opt = grid_optimize_ptx(Scheme::Oma, cfg, {1e-14, 0.125},
                                           Evaluator::Analytical);
  REQUIRE(opt.curve.size() == 2);
  CHECK(std::isinf(opt.curve[0].aoi));
  CHECK(opt.best_ptx == 0.125);

  const PtxOptimum single =
      grid_optimize_ptx(Scheme::Oma, cfg, {0.3}, Evaluator::Analytical);
  CHECK(single.best_ptx == 0.3);
  CHECK_THROWS_AS(grid_optimize_ptx(Scheme::Oma, cfg, {}, Evaluator::Analytical),
                  std::invalid_argument);
}

TEST_CASE("simulated grid search is deterministic") {
  SystemConfig cfg;
  cfg.num_users = 4;
  cfg.slots_per_frame = 1;
  cfg.slot_duration = 6.0;
  cfg.tx_power = 100.0;
  const std::vector<double> grid = {0.1, 0.25, 0.5};
  const PtxOptimum a =
      grid_optimize_ptx(Scheme::Oma, cfg, grid, Evaluator::Simulated, 5000, 7);
  const PtxOptimum b =
      grid_optimize_ptx(Scheme::Oma, cfg, grid, Evaluator::Simulated, 5000, 7);
  REQUIRE(a.curve.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(a.curve[i].aoi == b.curve[i].aoi);
    CHECK(a.curve[i].p_fail == b.curve[i].p_fail);
  }
  CHECK(a.best_ptx == b.best_ptx);
}
