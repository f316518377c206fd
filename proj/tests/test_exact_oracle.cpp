#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include <doctest.h>

#include "aoigf/slot_oracle.hpp"

using namespace aoigf;

namespace {

using Mass = std::map<std::pair<int, bool>, double>;

// Straight-line reference enumerator: every transmitter subset, every level
// assignment, decode branches resolved level by level.  User 0 is the tagged
// one.  Deliberately shares no code with the library oracle.
void resolve_levels(const std::vector<int>& who, int k, int num_levels,
                    double weight, std::vector<char>& success,
                    const std::vector<double>& succ, Mass& mass) {
  if (k > num_levels) {
    int others = 0;
    bool tagged = false;
    for (std::size_t u = 0; u < success.size(); ++u) {
      if (!success[u]) continue;
      if (u == 0)
        tagged = true;
      else
        ++others;
    }
    mass[{others, tagged}] += weight;
    return;
  }
  int count = 0;
  int lone = -1;
  for (std::size_t u = 0; u < who.size(); ++u)
    if (who[u] == k) {
      ++count;
      lone = static_cast<int>(u);
    }
  if (count == 0) {
    resolve_levels(who, k + 1, num_levels, weight, success, succ, mass);
    return;
  }
  if (count >= 2) {
    resolve_levels(who, num_levels + 1, num_levels, weight, success, succ, mass);
    return;
  }
  const double s = succ[k - 1];
  if (s > 0.0) {
    success[lone] = 1;
    resolve_levels(who, k + 1, num_levels, weight * s, success, succ, mass);
    success[lone] = 0;
  }
  if (s < 1.0)
    resolve_levels(who, num_levels + 1, num_levels, weight * (1.0 - s), success,
                   succ, mass);
}

Mass brute_noma(int remaining, int num_levels, double ptx,
                const std::vector<double>& succ) {
  Mass mass;
  for (std::uint32_t subset = 0; subset < (1u << remaining); ++subset) {
    const int m = std::popcount(subset);
    const double w_subset =
        std::pow(ptx, m) * std::pow(1.0 - ptx, remaining - m);
    if (w_subset == 0.0) continue;
    std::vector<int> active;
    for (int u = 0; u < remaining; ++u)
      if (subset & (1u << u)) active.push_back(u);
    std::vector<int> assign(m, 1);
    const double w_levels = std::pow(1.0 / num_levels, m);
    while (true) {
      std::vector<int> who(remaining, 0);
      for (int t = 0; t < m; ++t) who[active[t]] = assign[t];
      std::vector<char> success(remaining, 0);
      resolve_levels(who, 1, num_levels, w_subset * w_levels, success, succ,
                     mass);
      int pos = 0;
      while (pos < m && assign[pos] == num_levels) assign[pos++] = 1;
      if (pos == m) break;
      ++assign[pos];
    }
  }
  return mass;
}

double brute_prob(const Mass& mass, int others, bool tagged) {
  auto it = mass.find({others, tagged});
  return it == mass.end() ? 0.0 : it->second;
}

}  // namespace

TEST_CASE("two users on two levels always either collide or both succeed") {
  const auto dist = enumerate_noma_slot(2, 2, 1.0, {1.0, 1.0});
  CHECK(std::fabs(dist.prob(0, false) - 0.5) < 1e-15);
  CHECK(std::fabs(dist.prob(1, true) - 0.5) < 1e-15);
  CHECK(std::fabs(dist.tagged_success() - 0.5) < 1e-15);
  CHECK(std::fabs(dist.total() - 1.0) < 1e-15);
}

TEST_CASE("a lone remaining user succeeds when it transmits") {
  const auto dist = enumerate_noma_slot(1, 2, 0.4, {1.0, 1.0});
  CHECK(std::fabs(dist.prob(0, false) - 0.6) < 1e-15);
  CHECK(std::fabs(dist.tagged_success() - 0.4) < 1e-15);
}

TEST_CASE("oracle matches the reference enumerator in the collision-only model") {
  double worst = 0.0;
  for (int remaining = 1; remaining <= 6; ++remaining) {
    for (int levels : {2, 3, 4}) {
      for (double q : {0.3, 0.7, 1.0}) {
        const std::vector<double> ones(levels, 1.0);
        const auto dist = enumerate_noma_slot(remaining, levels, q, ones);
        const Mass ref = brute_noma(remaining, levels, q, ones);
        CHECK(std::fabs(dist.total() - 1.0) < 1e-12);
        for (int others = 0; others <= levels; ++others)
          for (bool tagged : {false, true})
            worst = std::max(worst, std::fabs(dist.prob(others, tagged) -
                                              brute_prob(ref, others, tagged)));
      }
    }
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("oracle matches the reference enumerator with decode failures") {
  double worst = 0.0;
  for (int remaining = 1; remaining <= 5; ++remaining) {
    for (int levels : {2, 3}) {
      std::vector<double> succ;
      for (int k = 1; k <= levels; ++k) succ.push_back(1.0 - 0.15 * k);
      for (double q : {0.35, 0.8}) {
        const auto dist = enumerate_noma_slot(remaining, levels, q, succ);
        const Mass ref = brute_noma(remaining, levels, q, succ);
        CHECK(std::fabs(dist.total() - 1.0) < 1e-12);
        for (int others = 0; others <= levels; ++others)
          for (bool tagged : {false, true})
            worst = std::max(worst, std::fabs(dist.prob(others, tagged) -
                                              brute_prob(ref, others, tagged)));
      }
    }
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("enumeration guards") {
  CHECK_THROWS_AS(enumerate_noma_slot(13, 2, 0.5, {1.0, 1.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(enumerate_noma_slot(2, 7, 0.5, std::vector<double>(7, 1.0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(enumerate_noma_slot(2, 2, 1.5, {1.0, 1.0}),
                  std::invalid_argument);
}

TEST_CASE("single-channel slot distribution") {
  const auto dist = enumerate_oma_slot(2, 0.5, 1.0);
  CHECK(std::fabs(dist.prob(0, false) - 0.5) < 1e-15);
  CHECK(std::fabs(dist.prob(1, false) - 0.25) < 1e-15);
  CHECK(std::fabs(dist.tagged_success() - 0.25) < 1e-15);

  const auto lone = enumerate_oma_slot(1, 1.0, 0.8);
  CHECK(std::fabs(lone.tagged_success() - 0.8) < 1e-15);
  CHECK(std::fabs(lone.prob(0, false) - 0.2) < 1e-15);

  const auto dead = enumerate_oma_slot(4, 0.6, 0.0);
  CHECK(std::fabs(dead.prob(0, false) - 1.0) < 1e-12);
  CHECK(dead.tagged_success() == 0.0);
}

TEST_CASE("sic resolution semantics") {
  SUBCASE("distinct levels all decode") {
    const auto res = sic_resolve({1, 2}, {1, 1}, 2);
    CHECK(res.success == std::vector<std::uint8_t>{1, 1});
    CHECK(res.termination_level == 0);
  }
  SUBCASE("collision stops everything") {
    const auto res = sic_resolve({1, 1}, {1, 1}, 2);
    CHECK(res.success == std::vector<std::uint8_t>{0, 0});
    CHECK(res.termination_level == 1);
  }
  SUBCASE("collision below a decoded level") {
    const auto res = sic_resolve({2, 2, 1}, {1, 1, 1}, 2);
    CHECK(res.success == std::vector<std::uint8_t>{0, 0, 1});
    CHECK(res.termination_level == 2);
  }
  SUBCASE("an undecodable lone signal terminates the scan") {
    const auto res = sic_resolve({1, 2}, {0, 1}, 2);
    CHECK(res.success == std::vector<std::uint8_t>{0, 0});
    CHECK(res.termination_level == 1);
  }
  SUBCASE("silent users are ignored") {
    const auto res = sic_resolve({0, 1}, {1, 1}, 2);
    CHECK(res.success == std::vector<std::uint8_t>{0, 1});
    CHECK(res.termination_level == 0);
  }
  SUBCASE("empty levels are skipped without termination") {
    const auto res = sic_resolve({3, 0, 0}, {1, 1, 1}, 3);
    CHECK(res.success == std::vector<std::uint8_t>{1, 0, 0});
    CHECK(res.termination_level == 0);
  }
}
