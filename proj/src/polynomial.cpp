#include "crn/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "crn/error.hpp"

namespace crn {

namespace {

double pow_int(double base, int exponent) {
  double out = 1.0;
  for (int k = 0; k < exponent; ++k) out *= base;
  return out;
}

}  // namespace

Polynomial Polynomial::monomial(Exponents exponents, double coeff) {
  Polynomial p(exponents.size());
  p.add_term(exponents, coeff);
  return p;
}

Polynomial Polynomial::constant(std::size_t nvars, double value) {
  Polynomial p(nvars);
  p.add_term(Exponents(nvars, 0), value);
  return p;
}

double Polynomial::coeff(const Exponents& e) const {
  const auto it = terms_.find(e);
  return it == terms_.end() ? 0.0 : it->second;
}

void Polynomial::add_term(const Exponents& e, double c) {
  if (e.size() != nvars_) throw Error("polynomial term: exponent length mismatch");
  auto [it, inserted] = terms_.try_emplace(e, c);
  if (!inserted) it->second += c;
  if (std::fabs(it->second) <= kCleanupThreshold) terms_.erase(it);
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  if (other.nvars_ != nvars_) throw Error("polynomial sum: variable count mismatch");
  for (const auto& [e, c] : other.terms_) add_term(e, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) {
  if (other.nvars_ != nvars_) throw Error("polynomial difference: variable count mismatch");
  for (const auto& [e, c] : other.terms_) add_term(e, -c);
  return *this;
}

Polynomial Polynomial::scaled(double factor) const {
  Polynomial out(nvars_);
  for (const auto& [e, c] : terms_) out.add_term(e, c * factor);
  return out;
}

double Polynomial::evaluate(std::span<const double> x) const {
  if (x.size() != nvars_) throw Error("polynomial evaluate: point length mismatch");
  double sum = 0.0;
  for (const auto& [e, c] : terms_) {
    double term = c;
    for (std::size_t i = 0; i < nvars_; ++i)
      if (e[i] != 0) term *= pow_int(x[i], e[i]);
    sum += term;
  }
  return sum;
}

double Polynomial::max_coeff_diff(const Polynomial& other) const {
  double worst = 0.0;
  for (const auto& [e, c] : terms_) worst = std::max(worst, std::fabs(c - other.coeff(e)));
  for (const auto& [e, c] : other.terms_) worst = std::max(worst, std::fabs(coeff(e) - c));
  return worst;
}

double Polynomial::max_abs_coeff() const {
  double worst = 0.0;
  for (const auto& [e, c] : terms_) worst = std::max(worst, std::fabs(c));
  return worst;
}

std::string Polynomial::to_string(const std::vector<std::string>& var_names) const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [e, c] : terms_) {
    if (!first) os << (c < 0 ? " - " : " + ");
    else if (c < 0) os << "-";
    first = false;
    os << std::fabs(c);
    for (std::size_t i = 0; i < nvars_; ++i) {
      if (e[i] == 0) continue;
      os << "*" << (i < var_names.size() ? var_names[i] : "x" + std::to_string(i + 1));
      if (e[i] != 1) os << "^" << e[i];
    }
  }
  return os.str();
}

Polynomial operator+(Polynomial a, const Polynomial& b) {
  a += b;
  return a;
}

Polynomial operator-(Polynomial a, const Polynomial& b) {
  a -= b;
  return a;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.nvars() != b.nvars()) throw Error("polynomial product: variable count mismatch");
  Polynomial out(a.nvars());
  for (const auto& [ea, ca] : a.terms()) {
    for (const auto& [eb, cb] : b.terms()) {
      Polynomial::Exponents e(a.nvars());
      for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
      out.add_term(e, ca * cb);
    }
  }
  return out;
}

namespace {

Polynomial affine_to_polynomial(const AffineExpr& expr, std::size_t nrem) {
  if (expr.coeffs.size() != nrem) throw Error("substitute_affine: affine coefficient length mismatch");
  Polynomial p = Polynomial::constant(nrem, expr.constant);
  for (std::size_t j = 0; j < nrem; ++j) {
    if (expr.coeffs[j] == 0.0) continue;
    Polynomial::Exponents e(nrem, 0);
    e[j] = 1;
    p.add_term(e, expr.coeffs[j]);
  }
  return p;
}

Polynomial poly_pow(const Polynomial& base, int exponent, std::size_t nvars) {
  Polynomial out = Polynomial::constant(nvars, 1.0);
  for (int k = 0; k < exponent; ++k) out = out * base;
  return out;
}

}  // namespace

Polynomial substitute_affine(const Polynomial& p, const std::vector<std::size_t>& targets,
                             const std::vector<AffineExpr>& exprs) {
  if (targets.size() != exprs.size()) throw Error("substitute_affine: target/expression count mismatch");
  if (targets.empty()) return p;
  if (!std::is_sorted(targets.begin(), targets.end()))
    throw Error("substitute_affine: targets must be sorted ascending");

  std::vector<int> target_pos(p.nvars(), -1);
  for (std::size_t k = 0; k < targets.size(); ++k) {
    if (targets[k] >= p.nvars()) throw Error("substitute_affine: target variable out of range");
    target_pos[targets[k]] = static_cast<int>(k);
  }
  const std::size_t nrem = p.nvars() - targets.size();

  std::vector<Polynomial> expr_polys;
  expr_polys.reserve(exprs.size());
  for (const auto& expr : exprs) expr_polys.push_back(affine_to_polynomial(expr, nrem));

  Polynomial out(nrem);
  for (const auto& [e, c] : p.terms()) {
    Polynomial::Exponents base(nrem);
    std::size_t j = 0;
    for (std::size_t i = 0; i < p.nvars(); ++i)
      if (target_pos[i] < 0) base[j++] = e[i];
    Polynomial acc = Polynomial::monomial(base, c);
    for (std::size_t i = 0; i < p.nvars(); ++i) {
      const int k = target_pos[i];
      if (k < 0 || e[i] == 0) continue;
      if (e[i] < 0)
        throw Error("substitute_affine: unsupported negative exponent on substituted variable");
      acc = acc * poly_pow(expr_polys[k], e[i], nrem);
    }
    out += acc;
  }
  return out;
}

Polynomial reorder_variables(const Polynomial& p, const std::vector<std::size_t>& new_to_old) {
  if (new_to_old.size() != p.nvars()) throw Error("reorder_variables: permutation length mismatch");
  Polynomial out(p.nvars());
  for (const auto& [e, c] : p.terms()) {
    Polynomial::Exponents ne(p.nvars());
    for (std::size_t j = 0; j < ne.size(); ++j) ne[j] = e[new_to_old[j]];
    out.add_term(ne, c);
  }
  return out;
}

}  // namespace crn
