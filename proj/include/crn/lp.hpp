#pragma once

#include <limits>
#include <string>
#include <vector>

#include "crn/matrix.hpp"

namespace crn {

inline constexpr double kLpInfinity = std::numeric_limits<double>::infinity();
inline constexpr double kLpPivotTol = 1e-9;
inline constexpr double kLpFeasTol = 1e-8;

/// min objective . y   subject to   A y = b,  lower <= y <= upper.
/// Bounds may be -inf / +inf componentwise.
struct LinearProgram {
  std::vector<double> objective;
  Matrix a;
  std::vector<double> b;
  std::vector<double> lower;
  std::vector<double> upper;

  std::size_t num_vars() const { return objective.size(); }

  void add_variable(double cost, double lo, double hi);
  void add_equality(const std::vector<double>& coeffs, double rhs);
};

enum class LPStatus { kOptimal, kInfeasible, kUnbounded };

struct LPSolution {
  LPStatus status = LPStatus::kInfeasible;
  std::vector<double> y;
  double objective = 0.0;
  std::size_t iterations = 0;
};

const char* to_string(LPStatus status);

/// Two-phase primal simplex on the bounded-variable standard form (finite
/// lower bounds are shifted out, finite upper bounds become explicit slack
/// rows, free variables are split). Dantzig pricing with smallest-index
/// tie-breaks; switches to Bland's rule after 2*(vars+constraints)
/// degenerate pivots. Deterministic for identical input.
LPSolution solve_lp(const LinearProgram& lp);

}  // namespace crn
