#include <doctest.h>

#include <random>

#include "crn/error.hpp"
#include "crn/model.hpp"
#include "crn/parser.hpp"
#include "support.hpp"

using crn::Complex;
using crn::Matrix;
using crn::Network;
using crn::Reaction;

TEST_CASE("build_matrices on the three-reaction two-species network") {
  const Network net = testsupport::load_network("table1_row2.crn");
  CHECK(net.num_species() == 2);
  CHECK(net.num_reactions() == 3);
  CHECK(net.num_complexes() == 3);
  // Z columns {(2,0),(1,1),(0,2)} in first-appearance order
  CHECK(net.z() == Matrix::from_rows({{2, 1, 0}, {0, 1, 2}}));
  CHECK(net.s() == Matrix::from_rows({{-1, 1, -1}, {1, -1, 1}}));
}

TEST_CASE("single reaction matrices") {
  const Network net =
      Network::build({"X1", "X2"}, {{Complex({1.0, 0.0}), Complex({0.0, 1.0}), 1.0}});
  CHECK(net.s() == Matrix::from_rows({{-1}, {1}}));
  CHECK(net.b() == Matrix::from_rows({{-1}, {1}}));
  CHECK(net.kirchhoff() == Matrix::from_rows({{-1, 0}, {1, 0}}));
}

TEST_CASE("five-reaction four-species network has rank 3") {
  const Network net = testsupport::load_network("table1_row5.crn");
  CHECK(net.num_reactions() == 5);
  CHECK(testsupport::minor_rank(net.s()) == 3);
  CHECK(crn::rank(net.s()) == 3);
}

TEST_CASE("build rejections") {
  const Complex a({1.0, 0.0}), b({0.0, 1.0});
  CHECK_THROWS_WITH_AS(Network::build({"A", "B"}, {{a, b, 1.0}, {a, b, 2.0}}),
                       doctest::Contains("duplicate reaction"), crn::Error);
  CHECK_THROWS_WITH_AS(Network::build({"A", "B"}, {{a, b, 0.0}}),
                       doctest::Contains("positive"), crn::Error);
  CHECK_THROWS_WITH_AS(Network::build({"A", "B"}, {{a, a, 1.0}}),
                       doctest::Contains("identical"), crn::Error);
  CHECK_THROWS_AS(Network::build({"A", "B"}, {{Complex({0.5, 0.0}), b, 1.0}}), crn::Error);
  CHECK_THROWS_AS(Network::build({"A", "B"}, {}), crn::Error);
}

TEST_CASE("mass_action_rates") {
  const Network row2 = testsupport::load_network("table1_row2.crn");
  SUBCASE("at (1,1)") {
    const auto v = row2.mass_action_rates(std::vector<double>{1.0, 1.0});
    CHECK(v == std::vector<double>{1.0, 2.0, 1.0});
  }
  SUBCASE("zero concentration with positive exponent kills the rate") {
    const auto v = row2.mass_action_rates(std::vector<double>{0.0, 3.0});
    CHECK(v == std::vector<double>{0.0, 0.0, 0.0});
  }
  SUBCASE("zero-complex reactant keeps the bare rate constant") {
    const Network inflow = crn::parse_network("0 -> X1 ; k = 0.008").to_network();
    const auto v = inflow.mass_action_rates(std::vector<double>{123.0});
    CHECK(v == std::vector<double>{0.008});
  }
  SUBCASE("negative state rejected") {
    CHECK_THROWS_AS(row2.mass_action_rates(std::vector<double>{-0.1, 1.0}), crn::Error);
  }
}

TEST_CASE("psi") {
  const Network net = crn::parse_network("X1 + 2 X2 -> X1 + X2 ; k = 1").to_network();
  const auto psi = net.psi(std::vector<double>{2.0, 3.0});
  CHECK(psi[0] == doctest::Approx(18.0));  // x1 * x2^2 at (2,3)
  CHECK(psi[1] == doctest::Approx(6.0));

  const Network zero = crn::parse_network("0 -> X1 ; k = 1").to_network();
  CHECK(zero.psi(std::vector<double>{9.0})[0] == 1.0);

  const Network row2 = testsupport::load_network("table1_row2.crn");
  CHECK(row2.psi(std::vector<double>{1.0, 1.0}) == std::vector<double>{1.0, 1.0, 1.0});
}

TEST_CASE("vector_field expands S v(x) symbolically") {
  SUBCASE("row 2") {
    const auto f = testsupport::load_network("table1_row2.crn").vector_field();
    CHECK(f[0].coeff({2, 0}) == doctest::Approx(-1.0));
    CHECK(f[0].coeff({1, 1}) == doctest::Approx(1.0));
    CHECK(f[0].terms().size() == 2);
    CHECK(f[1].coeff({2, 0}) == doctest::Approx(1.0));
    CHECK(f[1].coeff({1, 1}) == doctest::Approx(-1.0));
  }
  SUBCASE("row 1") {
    const auto f = testsupport::load_network("table1_row1.crn").vector_field();
    CHECK(f[0].coeff({2, 0}) == doctest::Approx(-2.0));
    CHECK(f[0].coeff({0, 1}) == doctest::Approx(1.0));
  }
}

TEST_CASE("structure_report") {
  SUBCASE("row 2: one linkage class, deficiency one, not weakly reversible") {
    const auto rep = testsupport::load_network("table1_row2.crn").structure_report();
    CHECK(rep.linkage_classes == 1);
    CHECK(rep.rank == 1);
    CHECK(rep.complexes == 3);
    CHECK(rep.deficiency == 1);
    CHECK_FALSE(rep.weakly_reversible);
  }
  SUBCASE("X1 <-> X2 is weakly reversible with deficiency zero") {
    const auto rep = crn::parse_network("X1 <-> X2 ; k = 1, 1").to_network().structure_report();
    CHECK(rep.linkage_classes == 1);
    CHECK(rep.rank == 1);
    CHECK(rep.deficiency == 0);
    CHECK(rep.weakly_reversible);
  }
  SUBCASE("row 6 splits into three linkage classes") {
    const auto rep = testsupport::load_network("table1_row6.crn").structure_report();
    CHECK(rep.linkage_classes == 3);
  }
}

TEST_CASE("network identities on random networks") {
  std::mt19937_64 rng(testsupport::test_seed() + 2);
  std::uniform_real_distribution<double> point(0.3, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    const Network net = testsupport::random_network(rng);
    // S = Z B entrywise exactly
    CHECK(net.s() == net.z() * net.b());
    // B columns: exactly one +1 and one -1
    for (std::size_t j = 0; j < net.num_reactions(); ++j) {
      int plus = 0, minus = 0, other = 0;
      for (std::size_t l = 0; l < net.num_complexes(); ++l) {
        if (net.b()(l, j) == 1.0) ++plus;
        else if (net.b()(l, j) == -1.0) ++minus;
        else if (net.b()(l, j) != 0.0) ++other;
      }
      CHECK(plus == 1);
      CHECK(minus == 1);
      CHECK(other == 0);
    }
    // Kirchhoff columns close exactly: off-diagonals in ascending row order
    // plus the diagonal give literal zero.
    for (std::size_t pi = 0; pi < net.num_complexes(); ++pi) {
      double off = 0.0;
      for (std::size_t rho = 0; rho < net.num_complexes(); ++rho)
        if (rho != pi) off += net.kirchhoff()(rho, pi);
      CHECK(off + net.kirchhoff()(pi, pi) == 0.0);
    }
    // S v(x) == Z L psi(x) pointwise
    std::vector<double> x(net.num_species());
    for (auto& xi : x) xi = point(rng);
    const auto sv = net.field_at(x);
    const auto zlpsi = net.z() * (net.kirchhoff() * net.psi(x));
    double diff = 0.0;
    for (std::size_t i = 0; i < sv.size(); ++i) diff = std::max(diff, std::fabs(sv[i] - zlpsi[i]));
    CHECK(diff < 1e-12 * (1.0 + crn::max_abs(sv)));
    // the polynomial field agrees with the numeric field
    const auto poly = net.vector_field();
    for (std::size_t i = 0; i < sv.size(); ++i)
      CHECK(poly[i].evaluate(x) == doctest::Approx(sv[i]).epsilon(1e-10));
    // and coefficientwise with the complex-centered expansion Z L psi
    for (std::size_t i = 0; i < net.num_species(); ++i) {
      crn::Polynomial expanded(net.num_species());
      for (std::size_t pi = 0; pi < net.num_complexes(); ++pi) {
        double weight = 0.0;
        for (std::size_t rho = 0; rho < net.num_complexes(); ++rho)
          weight += net.z()(i, rho) * net.kirchhoff()(rho, pi);
        if (weight == 0.0) continue;
        crn::Polynomial::Exponents e(net.num_species());
        for (std::size_t k = 0; k < net.num_species(); ++k)
          e[k] = static_cast<int>(net.complexes()[pi][k]);
        expanded.add_term(e, weight);
      }
      CHECK(poly[i].max_coeff_diff(expanded) < 1e-12 * (1.0 + poly[i].max_abs_coeff()));
    }
  }
}
