#include "crn/lp.hpp"

#include <algorithm>
#include <cmath>

#include "crn/error.hpp"

namespace crn {

void LinearProgram::add_variable(double cost, double lo, double hi) {
  objective.push_back(cost);
  lower.push_back(lo);
  upper.push_back(hi);
  Matrix grown(a.rows(), objective.size());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j + 1 < objective.size(); ++j) grown(i, j) = a(i, j);
  a = std::move(grown);
}

void LinearProgram::add_equality(const std::vector<double>& coeffs, double rhs) {
  if (coeffs.size() != num_vars()) throw Error("lp: constraint coefficient length mismatch");
  Matrix grown(a.rows() + 1, num_vars());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < num_vars(); ++j) grown(i, j) = a(i, j);
  for (std::size_t j = 0; j < num_vars(); ++j) grown(a.rows(), j) = coeffs[j];
  a = std::move(grown);
  b.push_back(rhs);
}

const char* to_string(LPStatus status) {
  switch (status) {
    case LPStatus::kOptimal: return "optimal";
    case LPStatus::kInfeasible: return "infeasible";
    case LPStatus::kUnbounded: return "unbounded";
  }
  return "unknown";
}

namespace {

// How each user variable maps into the nonnegative standard form.
struct VarMap {
  enum Kind { kShifted, kNegatedShifted, kSplit } kind = kShifted;
  std::size_t col = 0;   // primary standard-form column
  std::size_t col2 = 0;  // second column when split
  double offset = 0.0;
};

/// Dense tableau simplex over min c.x, A x = b, x >= 0.
class Tableau {
 public:
  Tableau(const Matrix& a, const std::vector<double>& b, const std::vector<double>& cost)
      : m_(a.rows()), n_(a.cols()), cost_(cost) {
    t_ = Matrix(m_, n_ + m_);
    rhs_.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) {
      const double sign = b[i] < 0.0 ? -1.0 : 1.0;
      for (std::size_t j = 0; j < n_; ++j) t_(i, j) = sign * a(i, j);
      t_(i, n_ + i) = 1.0;
      rhs_[i] = sign * b[i];
    }
    basis_.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) basis_[i] = n_ + i;
    bland_threshold_ = 2 * (n_ + m_);
  }

  LPStatus run(std::size_t& iterations) {
    // Phase 1: minimize the artificial sum. Artificials never re-enter
    // (entering is restricted to the first n_ columns).
    std::vector<double> phase1_cost(n_ + m_, 0.0);
    for (std::size_t j = n_; j < n_ + m_; ++j) phase1_cost[j] = 1.0;
    const LPStatus ph1 = iterate(phase1_cost, n_, iterations);
    if (ph1 != LPStatus::kOptimal) return LPStatus::kInfeasible;
    const double scale = 1.0 + max_abs(rhs_);
    if (objective_ > kLpFeasTol * scale) return LPStatus::kInfeasible;
    drop_artificials();

    std::vector<double> phase2_cost(n_ + m_, 0.0);
    std::copy(cost_.begin(), cost_.end(), phase2_cost.begin());
    return iterate(phase2_cost, n_, iterations);
  }

  std::vector<double> extract() const {
    std::vector<double> x(n_, 0.0);
    for (std::size_t i = 0; i < m_; ++i)
      if (basis_[i] < n_) x[basis_[i]] = rhs_[i];
    return x;
  }

 private:
  void price_out(const std::vector<double>& cost) {
    rc_ = cost;
    objective_ = 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      const double cb = cost[basis_[i]];
      if (cb == 0.0) continue;
      objective_ += cb * rhs_[i];
      for (std::size_t j = 0; j < n_ + m_; ++j) rc_[j] -= cb * t_(i, j);
    }
  }

  LPStatus iterate(const std::vector<double>& cost, std::size_t active_cols,
                   std::size_t& iterations) {
    active_cols_ = active_cols;
    price_out(cost);
    // Bland's rule rules out cycling in exact arithmetic; refreshing the
    // reduced costs purges incremental drift, and the hard cap guards
    // against stalling on data the tolerances cannot handle.
    const std::size_t limit = 10000 + 200 * (n_ + m_);
    for (std::size_t local = 0; local < limit; ++local) {
      if (local > 0 && local % 500 == 0) price_out(cost);
      const std::size_t enter = pick_entering();
      if (enter == active_cols_) return LPStatus::kOptimal;
      const std::size_t leave = pick_leaving(enter);
      if (leave == m_) return LPStatus::kUnbounded;
      if (rhs_[leave] <= 1e-10) ++degenerate_pivots_;
      pivot(leave, enter);
      ++iterations;
    }
    throw Error("lp: simplex iteration limit exceeded (badly scaled problem?)");
  }

  std::size_t pick_entering() const {
    if (degenerate_pivots_ > bland_threshold_) {
      for (std::size_t j = 0; j < active_cols_; ++j)
        if (rc_[j] < -kLpPivotTol) return j;
      return active_cols_;
    }
    std::size_t best = active_cols_;
    double best_rc = -kLpPivotTol;
    for (std::size_t j = 0; j < active_cols_; ++j)
      if (rc_[j] < best_rc) {
        best_rc = rc_[j];
        best = j;
      }
    return best;
  }

  std::size_t pick_leaving(std::size_t enter) const {
    std::size_t best = m_;
    double best_ratio = 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      const double a = t_(i, enter);
      if (a <= kLpPivotTol) continue;
      const double ratio = rhs_[i] / a;
      if (best == m_ || ratio < best_ratio - 1e-12 ||
          (std::fabs(ratio - best_ratio) <= 1e-12 && basis_[i] < basis_[best])) {
        best = i;
        best_ratio = ratio;
      }
    }
    return best;
  }

  void pivot(std::size_t row, std::size_t col) {
    const double piv = t_(row, col);
    for (std::size_t j = 0; j < n_ + m_; ++j) t_(row, j) /= piv;
    rhs_[row] /= piv;
    if (rhs_[row] < 0.0 && rhs_[row] > -1e-12) rhs_[row] = 0.0;
    t_(row, col) = 1.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == row) continue;
      const double f = t_(i, col);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < n_ + m_; ++j) t_(i, j) -= f * t_(row, j);
      t_(i, col) = 0.0;
      rhs_[i] -= f * rhs_[row];
      if (rhs_[i] < 0.0 && rhs_[i] > -1e-12) rhs_[i] = 0.0;
    }
    const double frc = rc_[col];
    if (frc != 0.0) {
      for (std::size_t j = 0; j < n_ + m_; ++j) rc_[j] -= frc * t_(row, j);
      rc_[col] = 0.0;
      objective_ += frc * rhs_[row];
    }
    basis_[row] = col;
  }

  /// Pivot lingering artificials out of the basis; rows that cannot be
  /// cleared are redundant and get removed.
  void drop_artificials() {
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < n_) {
        keep.push_back(i);
        continue;
      }
      std::size_t col = n_;
      double best = kLpPivotTol;
      for (std::size_t j = 0; j < n_; ++j)
        if (std::fabs(t_(i, j)) > best) {
          best = std::fabs(t_(i, j));
          col = j;
        }
      if (col < n_) {
        pivot(i, col);
        keep.push_back(i);
      }
    }
    if (keep.size() == m_) return;
    Matrix nt(keep.size(), n_ + m_);
    std::vector<double> nrhs(keep.size());
    std::vector<std::size_t> nbasis(keep.size());
    for (std::size_t i = 0; i < keep.size(); ++i) {
      for (std::size_t j = 0; j < n_ + m_; ++j) nt(i, j) = t_(keep[i], j);
      nrhs[i] = rhs_[keep[i]];
      nbasis[i] = basis_[keep[i]];
    }
    t_ = std::move(nt);
    rhs_ = std::move(nrhs);
    basis_ = std::move(nbasis);
    m_ = keep.size();
  }

  std::size_t m_, n_;
  std::vector<double> cost_;
  Matrix t_;
  std::vector<double> rhs_;
  std::vector<double> rc_;
  std::vector<std::size_t> basis_;
  double objective_ = 0.0;
  std::size_t active_cols_ = 0;
  std::size_t degenerate_pivots_ = 0;
  std::size_t bland_threshold_ = 0;
};

}  // namespace

LPSolution solve_lp(const LinearProgram& lp) {
  const std::size_t nv = lp.num_vars();
  if (lp.lower.size() != nv || lp.upper.size() != nv) throw Error("lp: bounds length mismatch");
  if (lp.a.rows() != lp.b.size() || (lp.a.rows() > 0 && lp.a.cols() != nv))
    throw Error("lp: constraint shape mismatch");
  for (std::size_t j = 0; j < nv; ++j) {
    if (std::isnan(lp.lower[j]) || std::isnan(lp.upper[j]) || lp.lower[j] > lp.upper[j])
      throw Error("lp: invalid bounds on variable " + std::to_string(j));
    if (lp.lower[j] == kLpInfinity || lp.upper[j] == -kLpInfinity)
      throw Error("lp: empty bound interval on variable " + std::to_string(j));
  }

  // Map to nonnegative standard form.
  std::vector<VarMap> maps(nv);
  std::vector<double> std_cost;
  std::vector<double> std_upper;  // finite entries become slack rows below
  auto push_col = [&](double cost, double ub) {
    std_cost.push_back(cost);
    std_upper.push_back(ub);
    return std_cost.size() - 1;
  };
  for (std::size_t j = 0; j < nv; ++j) {
    const double lo = lp.lower[j];
    const double hi = lp.upper[j];
    VarMap& vm = maps[j];
    if (lo != -kLpInfinity) {
      vm.kind = VarMap::kShifted;
      vm.offset = lo;
      vm.col = push_col(lp.objective[j], hi == kLpInfinity ? kLpInfinity : hi - lo);
    } else if (hi != kLpInfinity) {
      vm.kind = VarMap::kNegatedShifted;
      vm.offset = hi;
      vm.col = push_col(-lp.objective[j], kLpInfinity);
    } else {
      vm.kind = VarMap::kSplit;
      vm.col = push_col(lp.objective[j], kLpInfinity);
      vm.col2 = push_col(-lp.objective[j], kLpInfinity);
    }
  }

  std::vector<std::size_t> bounded_cols;
  for (std::size_t c = 0; c < std_upper.size(); ++c)
    if (std_upper[c] != kLpInfinity) bounded_cols.push_back(c);

  const std::size_t m0 = lp.a.rows();
  const std::size_t rows = m0 + bounded_cols.size();
  const std::size_t base_cols = std_cost.size();
  const std::size_t cols = base_cols + bounded_cols.size();
  std_cost.resize(cols, 0.0);

  Matrix a_std(rows, cols);
  std::vector<double> b_std(rows, 0.0);
  for (std::size_t i = 0; i < m0; ++i) {
    double rhs = lp.b[i];
    for (std::size_t j = 0; j < nv; ++j) {
      const double aij = lp.a(i, j);
      if (aij == 0.0) continue;
      const VarMap& vm = maps[j];
      rhs -= aij * vm.offset;
      switch (vm.kind) {
        case VarMap::kShifted: a_std(i, vm.col) += aij; break;
        case VarMap::kNegatedShifted: a_std(i, vm.col) -= aij; break;
        case VarMap::kSplit:
          a_std(i, vm.col) += aij;
          a_std(i, vm.col2) -= aij;
          break;
      }
    }
    b_std[i] = rhs;
  }
  for (std::size_t k = 0; k < bounded_cols.size(); ++k) {
    a_std(m0 + k, bounded_cols[k]) = 1.0;
    a_std(m0 + k, base_cols + k) = 1.0;
    b_std[m0 + k] = std_upper[bounded_cols[k]];
  }

  // Row/column equilibration keeps pivots well scaled when constraint
  // magnitudes span many orders (e.g. monomial values near a small
  // equilibrium). Column scaling rescales the variables; undone on exit.
  for (std::size_t i = 0; i < rows; ++i) {
    double row_max = 0.0;
    for (std::size_t j = 0; j < cols; ++j) row_max = std::max(row_max, std::fabs(a_std(i, j)));
    if (row_max <= 0.0) continue;
    for (std::size_t j = 0; j < cols; ++j) a_std(i, j) /= row_max;
    b_std[i] /= row_max;
  }
  std::vector<double> col_scale(cols, 1.0);
  for (std::size_t j = 0; j < cols; ++j) {
    double col_max = 0.0;
    for (std::size_t i = 0; i < rows; ++i) col_max = std::max(col_max, std::fabs(a_std(i, j)));
    if (col_max <= 0.0) continue;
    col_scale[j] = col_max;
    for (std::size_t i = 0; i < rows; ++i) a_std(i, j) /= col_max;
    std_cost[j] /= col_max;
  }

  Tableau tab(a_std, b_std, std_cost);
  LPSolution sol;
  sol.status = tab.run(sol.iterations);
  if (sol.status != LPStatus::kOptimal) return sol;

  std::vector<double> x = tab.extract();
  for (std::size_t j = 0; j < cols; ++j) x[j] /= col_scale[j];
  sol.y.resize(nv);
  for (std::size_t j = 0; j < nv; ++j) {
    const VarMap& vm = maps[j];
    switch (vm.kind) {
      case VarMap::kShifted: sol.y[j] = vm.offset + x[vm.col]; break;
      case VarMap::kNegatedShifted: sol.y[j] = vm.offset - x[vm.col]; break;
      case VarMap::kSplit: sol.y[j] = x[vm.col] - x[vm.col2]; break;
    }
    sol.y[j] = std::clamp(sol.y[j], lp.lower[j], lp.upper[j]);
  }
  sol.objective = 0.0;
  for (std::size_t j = 0; j < nv; ++j) sol.objective += lp.objective[j] * sol.y[j];
  return sol;
}

}  // namespace crn
