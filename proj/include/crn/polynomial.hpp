#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace crn {

/// Sparse multivariate polynomial: exponent vector -> coefficient.
///
/// Exponent vectors all share the polynomial's variable count and are kept in
/// an ordered map so that iteration (and everything assembled from it, such
/// as LP constraint matrices) is deterministic. Coefficients below
/// kCleanupThreshold are erased after every arithmetic operation.
class Polynomial {
 public:
  using Exponents = std::vector<int>;
  using TermMap = std::map<Exponents, double>;

  static constexpr double kCleanupThreshold = 1e-14;

  Polynomial() = default;
  explicit Polynomial(std::size_t nvars) : nvars_(nvars) {}

  static Polynomial monomial(Exponents exponents, double coeff);
  static Polynomial constant(std::size_t nvars, double value);

  std::size_t nvars() const { return nvars_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  double coeff(const Exponents& e) const;
  void add_term(const Exponents& e, double c);

  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator-=(const Polynomial& other);
  Polynomial scaled(double factor) const;

  double evaluate(std::span<const double> x) const;

  /// Max absolute coefficient difference over the union of supports.
  double max_coeff_diff(const Polynomial& other) const;

  double max_abs_coeff() const;

  std::string to_string(const std::vector<std::string>& var_names) const;

  bool operator==(const Polynomial& other) const = default;

 private:
  std::size_t nvars_ = 0;
  TermMap terms_;
};

Polynomial operator+(Polynomial a, const Polynomial& b);
Polynomial operator-(Polynomial a, const Polynomial& b);
Polynomial operator*(const Polynomial& a, const Polynomial& b);

using PolynomialVector = std::vector<Polynomial>;

/// value = constant + sum coeffs[j] * y_j, where y are the variables that
/// remain after substitution, in their original relative order.
struct AffineExpr {
  double constant = 0.0;
  std::vector<double> coeffs;
};

/// Substitutes each target variable by an affine expression of the remaining
/// variables and expands. Targets must be sorted ascending; their exponents
/// must be nonnegative integers (throws otherwise). An empty target set
/// returns p unchanged.
Polynomial substitute_affine(const Polynomial& p, const std::vector<std::size_t>& targets,
                             const std::vector<AffineExpr>& exprs);

/// Rewrites p over reordered variables: new variable j is old variable
/// new_to_old[j].
Polynomial reorder_variables(const Polynomial& p, const std::vector<std::size_t>& new_to_old);

}  // namespace crn
