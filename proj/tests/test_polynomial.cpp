#include <doctest.h>

#include <random>

#include "crn/error.hpp"
#include "crn/polynomial.hpp"
#include "support.hpp"

using crn::AffineExpr;
using crn::Polynomial;

namespace {

Polynomial random_poly(std::mt19937_64& rng, std::size_t nvars) {
  std::uniform_int_distribution<int> nterms(1, 5), expo(0, 3);
  std::uniform_real_distribution<double> coeff(-3.0, 3.0);
  Polynomial p(nvars);
  const int terms = nterms(rng);
  for (int t = 0; t < terms; ++t) {
    Polynomial::Exponents e(nvars);
    for (auto& ei : e) ei = expo(rng);
    p.add_term(e, coeff(rng));
  }
  return p;
}

}  // namespace

TEST_CASE("ring operations") {
  const Polynomial x = Polynomial::monomial({1}, 1.0);
  SUBCASE("x*x") {
    const Polynomial sq = x * x;
    CHECK(sq.coeff({2}) == 1.0);
    CHECK(sq.terms().size() == 1);
  }
  SUBCASE("(x+1)(x-1) = x^2 - 1") {
    Polynomial a = x;
    a.add_term({0}, 1.0);
    Polynomial b = x;
    b.add_term({0}, -1.0);
    const Polynomial prod = a * b;
    CHECK(prod.coeff({2}) == 1.0);
    CHECK(prod.coeff({0}) == -1.0);
    CHECK(prod.coeff({1}) == 0.0);
    CHECK(prod.terms().size() == 2);
  }
  SUBCASE("scale by zero empties the term map") {
    CHECK(x.scaled(0.0).terms().empty());
  }
  SUBCASE("cleanup threshold") {
    Polynomial p(1);
    p.add_term({3}, 1e-15);
    CHECK(p.is_zero());
    p.add_term({2}, 0.5);
    p.add_term({2}, -0.5);
    CHECK(p.is_zero());
  }
}

TEST_CASE("substitute_affine") {
  SUBCASE("x2 = 2 - x1 applied to -x1^2 + x1 x2") {
    Polynomial f(2);
    f.add_term({2, 0}, -1.0);
    f.add_term({1, 1}, 1.0);
    const Polynomial g = crn::substitute_affine(f, {1}, {AffineExpr{2.0, {-1.0}}});
    CHECK(g.nvars() == 1);
    CHECK(g.coeff({2}) == doctest::Approx(-2.0));
    CHECK(g.coeff({1}) == doctest::Approx(2.0));
    CHECK(g.terms().size() == 2);
  }
  SUBCASE("x2 = x1, x3 = 1 - x1 applied to -2 x1 x2 + 2 x3^2") {
    Polynomial f(3);
    f.add_term({1, 1, 0}, -2.0);
    f.add_term({0, 0, 2}, 2.0);
    const Polynomial g =
        crn::substitute_affine(f, {1, 2}, {AffineExpr{0.0, {1.0}}, AffineExpr{1.0, {-1.0}}});
    CHECK(g.coeff({0}) == doctest::Approx(2.0));
    CHECK(g.coeff({1}) == doctest::Approx(-4.0));
    CHECK(g.coeff({2}) == doctest::Approx(0.0));
  }
  SUBCASE("empty target set is the identity") {
    std::mt19937_64 rng(testsupport::test_seed());
    const Polynomial p = random_poly(rng, 3);
    CHECK(crn::substitute_affine(p, {}, {}) == p);
  }
}

TEST_CASE("evaluate") {
  Polynomial g(1);
  g.add_term({2}, -2.0);
  g.add_term({1}, 2.0);
  CHECK(g.evaluate(std::vector<double>{1.0}) == doctest::Approx(0.0));  // equilibrium of the row-2 field
  CHECK(Polynomial::constant(2, 3.5).evaluate(std::vector<double>{7.0, -1.0}) == 3.5);
  CHECK(Polynomial(2).evaluate(std::vector<double>{1.0, 2.0}) == 0.0);
}

TEST_CASE("substitution commutes with evaluation") {
  std::mt19937_64 rng(testsupport::test_seed() + 1);
  std::uniform_real_distribution<double> pt(0.2, 1.8), cf(-1.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t nvars = 3;
    const Polynomial p = random_poly(rng, nvars);
    // substitute the last variable by an affine map of the first two
    AffineExpr expr{cf(rng), {cf(rng), cf(rng)}};
    const Polynomial q = crn::substitute_affine(p, {2}, {expr});
    const double y0 = pt(rng), y1 = pt(rng);
    const double x2 = expr.constant + expr.coeffs[0] * y0 + expr.coeffs[1] * y1;
    const double direct = p.evaluate(std::vector<double>{y0, y1, x2});
    const double subbed = q.evaluate(std::vector<double>{y0, y1});
    CHECK(subbed == doctest::Approx(direct).epsilon(1e-10));
  }
}

TEST_CASE("reorder_variables") {
  Polynomial p(3);
  p.add_term({2, 1, 0}, 5.0);
  const Polynomial q = crn::reorder_variables(p, {2, 0, 1});
  CHECK(q.coeff({0, 2, 1}) == 5.0);
}

TEST_CASE("substitution rejects negative exponents") {
  Polynomial p(2);
  p.add_term({0, -1}, 1.0);
  CHECK_THROWS_AS(crn::substitute_affine(p, {1}, {AffineExpr{1.0, {0.0}}}), crn::Error);
}
