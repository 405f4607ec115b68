#include "crn/conservation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "crn/error.hpp"
#include "crn/lp.hpp"

namespace crn {

namespace {

std::vector<double> normalized_min_one(std::vector<double> v) {
  const double lo = *std::min_element(v.begin(), v.end());
  for (double& x : v) x /= lo;
  return v;
}

}  // namespace

ConservedStructure find_conserved_matrix(const Network& net,
                                         std::optional<std::size_t> q_target) {
  ConservedStructure cs;
  const std::size_t n = net.num_species();
  cs.permutation.resize(n);
  std::iota(cs.permutation.begin(), cs.permutation.end(), std::size_t{0});
  if (q_target && *q_target == 0) return cs;

  const Matrix kernel = nullspace(net.s().transposed(), 1e-9);
  const std::size_t dim = kernel.cols();
  if (dim == 0) return cs;

  // One strictly positive kernel vector, when it exists:
  // min sum xi  s.t.  xi - N w = 0,  xi >= 1,  w free.
  LinearProgram lp;
  for (std::size_t i = 0; i < n; ++i) lp.add_variable(1.0, 1.0, kLpInfinity);
  for (std::size_t k = 0; k < dim; ++k) lp.add_variable(0.0, -kLpInfinity, kLpInfinity);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> row(n + dim, 0.0);
    row[i] = 1.0;
    for (std::size_t k = 0; k < dim; ++k) row[n + k] = -kernel(i, k);
    lp.add_equality(row, 0.0);
  }
  const LPSolution sol = solve_lp(lp);
  if (sol.status != LPStatus::kOptimal) return cs;  // q = 0: not mass-conserved

  std::vector<double> rho(sol.y.begin(), sol.y.begin() + n);
  rho = normalized_min_one(rho);

  std::vector<std::vector<double>> columns{rho};
  const std::size_t want = q_target ? std::min(*q_target, dim) : dim;
  for (std::size_t k = 0; k < dim && columns.size() < want; ++k) {
    double delta = kLpInfinity;
    for (std::size_t i = 0; i < n; ++i)
      delta = std::min(delta, rho[i] / std::max(1.0, std::fabs(kernel(i, k))));
    delta *= 0.5;
    std::vector<double> candidate(n);
    for (std::size_t i = 0; i < n; ++i) candidate[i] = rho[i] + delta * kernel(i, k);
    auto trial = columns;
    trial.push_back(candidate);
    if (rank(Matrix::from_columns(trial), 1e-9) > columns.size())
      columns.push_back(normalized_min_one(candidate));
  }

  cs.q = columns.size();
  cs.c = Matrix::from_columns(columns);
  const Matrix residual = net.s().transposed() * cs.c;
  if (residual.max_abs() > 1e-9 * std::max(1.0, net.s().max_abs() * cs.c.max_abs()))
    throw Error("conservation: kernel residual exceeds tolerance");
  return cs;
}

void apply_partition(ConservedStructure& cs, std::vector<std::size_t> permutation) {
  const std::size_t n = cs.c.empty() ? permutation.size() : cs.c.rows();
  if (permutation.size() != n) throw Error("partition: permutation length mismatch");
  std::vector<bool> seen(n, false);
  for (std::size_t p : permutation) {
    if (p >= n || seen[p]) throw Error("partition: not a permutation");
    seen[p] = true;
  }
  cs.permutation = std::move(permutation);
  if (cs.q == 0) return;
  const std::size_t free_count = n - cs.q;
  cs.c_l = Matrix(free_count, cs.q);
  cs.c_r = Matrix(cs.q, cs.q);
  for (std::size_t i = 0; i < free_count; ++i)
    for (std::size_t k = 0; k < cs.q; ++k) cs.c_l(i, k) = cs.c(cs.permutation[i], k);
  for (std::size_t i = 0; i < cs.q; ++i)
    for (std::size_t k = 0; k < cs.q; ++k) cs.c_r(i, k) = cs.c(cs.permutation[free_count + i], k);
  if (rank(cs.c_r, 1e-9) < cs.q) throw Error("partition: C_r block is singular");
}

void choose_partition(ConservedStructure& cs) {
  const std::size_t n = cs.permutation.size();
  if (cs.q == 0) {
    apply_partition(cs, cs.permutation);
    return;
  }
  // Column-pivoted elimination on C^T picks the non-free species; on ties
  // the larger index becomes non-free so low-indexed species stay free.
  Matrix w = cs.c.transposed();  // q x n
  std::vector<bool> taken(n, false);
  std::vector<std::size_t> nonfree;
  for (std::size_t p = 0; p < cs.q; ++p) {
    std::size_t best = n;
    for (std::size_t j = 0; j < n; ++j) {
      if (taken[j]) continue;
      if (best == n || std::fabs(w(p, j)) >= std::fabs(w(p, best))) best = j;
    }
    if (best == n || std::fabs(w(p, best)) <= 1e-12)
      throw Error("partition: conserved matrix is rank-deficient");
    taken[best] = true;
    nonfree.push_back(best);
    for (std::size_t r = p + 1; r < cs.q; ++r) {
      const double f = w(r, best) / w(p, best);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) w(r, j) -= f * w(p, j);
      w(r, best) = 0.0;
    }
  }
  std::sort(nonfree.begin(), nonfree.end());
  std::vector<std::size_t> perm;
  for (std::size_t i = 0; i < n; ++i)
    if (!taken[i]) perm.push_back(i);
  perm.insert(perm.end(), nonfree.begin(), nonfree.end());
  apply_partition(cs, std::move(perm));
}

ReconstructingMatrix assemble_d(const ConservedStructure& cs, const std::vector<double>& d) {
  const std::size_t n = cs.permutation.size();
  const std::size_t p = n - cs.q;
  if (d.size() != p) throw Error("assemble_d: need one positive weight per free species");
  for (double di : d)
    if (!(di > 0.0)) throw Error("assemble_d: weights must be positive");

  ReconstructingMatrix out;
  out.d1 = d;
  out.d = Matrix(n, n);
  for (std::size_t i = 0; i < p; ++i) out.d(i, i) = d[i];
  for (std::size_t k = 0; k < cs.q; ++k) {
    for (std::size_t j = 0; j < p; ++j) out.d(p + k, j) = cs.c_l(j, k);
    for (std::size_t j = 0; j < cs.q; ++j) out.d(p + k, p + j) = cs.c_r(j, k);
  }

  out.dinv = Matrix(n, n);
  for (std::size_t i = 0; i < p; ++i) out.dinv(i, i) = 1.0 / d[i];
  if (cs.q > 0) {
    const Matrix crt_inv = inverse(cs.c_r.transposed());
    const Matrix m = crt_inv * cs.c_l.transposed();  // q x p
    for (std::size_t k = 0; k < cs.q; ++k) {
      for (std::size_t j = 0; j < p; ++j) out.dinv(p + k, j) = -m(k, j) / d[j];
      for (std::size_t j = 0; j < cs.q; ++j) out.dinv(p + k, p + j) = crt_inv(k, j);
    }
  }

  const Matrix check = out.d * out.dinv - Matrix::identity(n);
  if (check.max_abs() > 1e-10)
    throw Error("assemble_d: inverse verification failed (residual " +
                std::to_string(check.max_abs()) + ")");
  return out;
}

AffineSubstitution substitution_map(const ConservedStructure& cs,
                                    const std::vector<double>& x_star) {
  const std::size_t n = cs.permutation.size();
  if (x_star.size() != n) throw Error("substitution_map: equilibrium length mismatch");
  for (double xi : x_star)
    if (!(xi > 0.0)) throw Error("substitution_map: equilibrium must be positive");

  AffineSubstitution sub;
  if (cs.q == 0) return sub;
  const std::size_t p = n - cs.q;

  std::vector<double> star_free(p), star_top(cs.q);
  for (std::size_t j = 0; j < p; ++j) star_free[j] = x_star[cs.permutation[j]];
  for (std::size_t k = 0; k < cs.q; ++k) star_top[k] = x_star[cs.permutation[p + k]];

  const Matrix m = inverse(cs.c_r.transposed()) * cs.c_l.transposed();  // q x p
  for (std::size_t k = 0; k < cs.q; ++k) {
    AffineExpr expr;
    expr.coeffs.resize(p);
    expr.constant = star_top[k];
    for (std::size_t j = 0; j < p; ++j) {
      expr.constant += m(k, j) * star_free[j];
      expr.coeffs[j] = -m(k, j);
    }
    sub.exprs.push_back(std::move(expr));
    sub.targets.push_back(p + k);
  }
  sub.totals = cs.c.transposed() * x_star;
  return sub;
}

}  // namespace crn
