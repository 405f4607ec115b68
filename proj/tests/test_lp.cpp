#include <doctest.h>

#include <cstring>
#include <random>

#include "crn/lp.hpp"
#include "support.hpp"

using crn::kLpInfinity;
using crn::LinearProgram;
using crn::LPSolution;
using crn::LPStatus;
using crn::Matrix;

namespace {

LinearProgram random_feasible_lp(std::mt19937_64& rng, std::vector<double>& feasible_point) {
  std::uniform_int_distribution<int> dims(1, 4);
  std::uniform_real_distribution<double> entry(-2.0, 2.0), pos(0.1, 2.0);
  const std::size_t m = dims(rng), n = m + dims(rng);
  LinearProgram lp;
  lp.objective.resize(n);
  lp.lower.assign(n, 0.0);
  lp.upper.assign(n, kLpInfinity);
  lp.a = Matrix(m, n);
  feasible_point.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    lp.objective[j] = entry(rng);
    feasible_point[j] = pos(rng);
  }
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) lp.a(i, j) = entry(rng);
  lp.b = lp.a * feasible_point;
  return lp;
}

}  // namespace

TEST_CASE("textbook cases") {
  SUBCASE("min y subject to y >= 1") {
    LinearProgram lp;
    lp.objective = {1.0};
    lp.lower = {1.0};
    lp.upper = {kLpInfinity};
    lp.a = Matrix(0, 1);
    const LPSolution sol = crn::solve_lp(lp);
    REQUIRE(sol.status == LPStatus::kOptimal);
    CHECK(sol.y[0] == doctest::Approx(1.0));
    CHECK(sol.objective == doctest::Approx(1.0));
  }
  SUBCASE("forced objective value") {
    LinearProgram lp;
    lp.objective = {1.0, 1.0};
    lp.lower = {0.0, 0.0};
    lp.upper = {kLpInfinity, kLpInfinity};
    lp.a = Matrix(1, 2);
    lp.a(0, 0) = lp.a(0, 1) = 1.0;
    lp.b = {2.0};
    const LPSolution sol = crn::solve_lp(lp);
    REQUIRE(sol.status == LPStatus::kOptimal);
    CHECK(sol.objective == doctest::Approx(2.0));
  }
  SUBCASE("bounds forcing infeasibility") {
    LinearProgram lp;
    lp.objective = {0.0, 0.0};
    lp.lower = {0.0, 0.0};
    lp.upper = {0.0, 0.0};
    lp.a = Matrix(1, 2);
    lp.a(0, 0) = 1.0;
    lp.a(0, 1) = -1.0;
    lp.b = {1.0};
    CHECK(crn::solve_lp(lp).status == LPStatus::kInfeasible);
  }
  SUBCASE("unbounded") {
    LinearProgram lp;
    lp.objective = {-1.0};
    lp.lower = {0.0};
    lp.upper = {kLpInfinity};
    lp.a = Matrix(0, 1);
    CHECK(crn::solve_lp(lp).status == LPStatus::kUnbounded);
  }
  SUBCASE("free variable and finite upper bound") {
    // min w subject to w = y - 3, 0 <= y <= 2  ->  w = -3 at y = 0.
    LinearProgram lp;
    lp.objective = {1.0, 0.0};
    lp.lower = {-kLpInfinity, 0.0};
    lp.upper = {kLpInfinity, 2.0};
    lp.a = Matrix(1, 2);
    lp.a(0, 0) = 1.0;
    lp.a(0, 1) = -1.0;
    lp.b = {-3.0};
    const LPSolution sol = crn::solve_lp(lp);
    REQUIRE(sol.status == LPStatus::kOptimal);
    CHECK(sol.objective == doctest::Approx(-3.0));
  }
}

TEST_CASE("solution invariants on random feasible programs") {
  std::mt19937_64 rng(testsupport::test_seed() + 4);
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<double> feasible;
    const LinearProgram lp = random_feasible_lp(rng, feasible);
    const LPSolution sol = crn::solve_lp(lp);
    if (sol.status != LPStatus::kOptimal) {
      // a feasible point exists, so only unbounded is acceptable
      CHECK(sol.status == LPStatus::kUnbounded);
      continue;
    }
    const auto residual = lp.a * sol.y;
    for (std::size_t i = 0; i < lp.b.size(); ++i)
      CHECK(std::fabs(residual[i] - lp.b[i]) <= 1e-8 * (1.0 + crn::max_abs(lp.b)));
    for (std::size_t j = 0; j < lp.num_vars(); ++j) {
      CHECK(sol.y[j] >= lp.lower[j] - 1e-10);
      CHECK(sol.y[j] <= lp.upper[j] + 1e-10);
    }
    // optimality against the known feasible point
    double feas_obj = 0.0;
    for (std::size_t j = 0; j < lp.num_vars(); ++j) feas_obj += lp.objective[j] * feasible[j];
    CHECK(sol.objective <= feas_obj + 1e-7 * (1.0 + std::fabs(feas_obj)));
  }
}

TEST_CASE("weak duality spot-check") {
  // c = A^T z + s with s >= 0 makes z a dual certificate: c.x >= z.b for
  // every feasible x, so the optimum must sit above z.b.
  std::mt19937_64 rng(testsupport::test_seed() + 5);
  std::uniform_real_distribution<double> entry(-2.0, 2.0), pos(0.0, 1.5), strict(0.1, 2.0);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t m = 2, n = 5;
    LinearProgram lp;
    lp.a = Matrix(m, n);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) lp.a(i, j) = entry(rng);
    std::vector<double> x0(n), z(m);
    for (auto& v : x0) v = strict(rng);
    for (auto& v : z) v = entry(rng);
    lp.b = lp.a * x0;
    lp.lower.assign(n, 0.0);
    lp.upper.assign(n, kLpInfinity);
    lp.objective.assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      double atz = 0.0;
      for (std::size_t i = 0; i < m; ++i) atz += lp.a(i, j) * z[i];
      lp.objective[j] = atz + pos(rng);
    }
    const LPSolution sol = crn::solve_lp(lp);
    REQUIRE(sol.status == LPStatus::kOptimal);
    double dual_bound = 0.0;
    for (std::size_t i = 0; i < m; ++i) dual_bound += z[i] * lp.b[i];
    CHECK(sol.objective >= dual_bound - 1e-7 * (1.0 + std::fabs(dual_bound)));
  }
}

TEST_CASE("optimality against sampled feasible points") {
  std::mt19937_64 rng(testsupport::test_seed() + 6);
  std::uniform_real_distribution<double> wiggle(-0.3, 0.3);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> x0;
    const LinearProgram lp = random_feasible_lp(rng, x0);
    const LPSolution sol = crn::solve_lp(lp);
    if (sol.status != LPStatus::kOptimal) continue;
    const Matrix kernel = crn::nullspace(lp.a);
    int sampled = 0;
    for (int s = 0; s < 100 && kernel.cols() > 0; ++s) {
      std::vector<double> x = x0;
      for (std::size_t k = 0; k < kernel.cols(); ++k) {
        const double w = wiggle(rng);
        for (std::size_t j = 0; j < x.size(); ++j) x[j] += w * kernel(j, k);
      }
      bool ok = true;
      for (double xj : x) ok &= xj >= 0.0;
      if (!ok) continue;
      ++sampled;
      double obj = 0.0;
      for (std::size_t j = 0; j < x.size(); ++j) obj += lp.objective[j] * x[j];
      CHECK(sol.objective <= obj + 1e-7 * (1.0 + std::fabs(obj)));
    }
    (void)sampled;
  }
}

TEST_CASE("determinism: identical input gives identical bytes") {
  std::mt19937_64 rng(testsupport::test_seed() + 7);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> x0;
    const LinearProgram lp = random_feasible_lp(rng, x0);
    const LPSolution a = crn::solve_lp(lp);
    const LPSolution b = crn::solve_lp(lp);
    REQUIRE(a.status == b.status);
    REQUIRE(a.y.size() == b.y.size());
    if (!a.y.empty())
      CHECK(std::memcmp(a.y.data(), b.y.data(), a.y.size() * sizeof(double)) == 0);
    CHECK(std::memcmp(&a.objective, &b.objective, sizeof(double)) == 0);
  }
}
