#include "crn/matrix.hpp"

#include <algorithm>
#include <cmath>

#include "crn/error.hpp"

namespace crn {

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t nr = rows.size();
  const std::size_t nc = nr == 0 ? 0 : rows.begin()->size();
  Matrix m(nr, nc);
  std::size_t i = 0;
  for (const auto& row : rows) {
    if (row.size() != nc) throw Error("from_rows: ragged row lengths");
    std::size_t j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

Matrix Matrix::from_columns(const std::vector<std::vector<double>>& cols) {
  const std::size_t nc = cols.size();
  const std::size_t nr = nc == 0 ? 0 : cols.front().size();
  Matrix m(nr, nc);
  for (std::size_t j = 0; j < nc; ++j) {
    if (cols[j].size() != nr) throw Error("from_columns: ragged column lengths");
    for (std::size_t i = 0; i < nr; ++i) m(i, j) = cols[j][i];
  }
  return m;
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

std::vector<double> Matrix::row(std::size_t i) const {
  std::vector<double> out(cols_);
  for (std::size_t j = 0; j < cols_; ++j) out[j] = (*this)(i, j);
  return out;
}

std::vector<double> Matrix::column(std::size_t j) const {
  std::vector<double> out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
  return out;
}

double Matrix::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::fabs(v));
  return m;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw Error("matrix product: shape mismatch");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw Error("matrix difference: shape mismatch");
  Matrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) - b(i, j);
  return c;
}

std::vector<double> operator*(const Matrix& a, const std::vector<double>& x) {
  if (a.cols() != x.size()) throw Error("matrix-vector product: shape mismatch");
  std::vector<double> y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

RrefResult rref(const Matrix& a, double tol) {
  RrefResult out{a, {}};
  Matrix& r = out.r;
  const double scale = std::max(a.max_abs(), 1.0);
  const double threshold = tol * scale;
  std::size_t lead = 0;
  for (std::size_t col = 0; col < r.cols() && lead < r.rows(); ++col) {
    std::size_t best = lead;
    for (std::size_t i = lead + 1; i < r.rows(); ++i)
      if (std::fabs(r(i, col)) > std::fabs(r(best, col))) best = i;
    if (std::fabs(r(best, col)) <= threshold) {
      for (std::size_t i = lead; i < r.rows(); ++i) r(i, col) = 0.0;
      continue;
    }
    if (best != lead)
      for (std::size_t j = 0; j < r.cols(); ++j) std::swap(r(best, j), r(lead, j));
    const double piv = r(lead, col);
    for (std::size_t j = 0; j < r.cols(); ++j) r(lead, j) /= piv;
    r(lead, col) = 1.0;
    for (std::size_t i = 0; i < r.rows(); ++i) {
      if (i == lead) continue;
      const double f = r(i, col);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < r.cols(); ++j) r(i, j) -= f * r(lead, j);
      r(i, col) = 0.0;
    }
    out.pivots.push_back(col);
    ++lead;
  }
  return out;
}

std::size_t rank(const Matrix& a, double tol) {
  if (a.empty()) return 0;
  return rref(a, tol).pivots.size();
}

Matrix nullspace(const Matrix& a, double tol) {
  const RrefResult rr = rref(a, tol);
  std::vector<bool> is_pivot(a.cols(), false);
  for (std::size_t p : rr.pivots) is_pivot[p] = true;
  std::vector<std::vector<double>> basis;
  for (std::size_t free_col = 0; free_col < a.cols(); ++free_col) {
    if (is_pivot[free_col]) continue;
    std::vector<double> v(a.cols(), 0.0);
    v[free_col] = 1.0;
    for (std::size_t prow = 0; prow < rr.pivots.size(); ++prow)
      v[rr.pivots[prow]] = -rr.r(prow, free_col);
    basis.push_back(std::move(v));
  }
  return Matrix::from_columns(basis);
}

std::vector<double> solve(const Matrix& a, const std::vector<double>& b, double tol) {
  if (a.rows() != a.cols()) throw Error("solve: matrix not square");
  if (b.size() != a.rows()) throw Error("solve: right-hand side length mismatch");
  const std::size_t n = a.rows();
  Matrix m = a;
  std::vector<double> x = b;
  const double threshold = tol * std::max(a.max_abs(), 1.0);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t best = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::fabs(m(i, k)) > std::fabs(m(best, k))) best = i;
    if (std::fabs(m(best, k)) <= threshold)
      throw Error("solve: singular system (numerical rank " + std::to_string(rank(a, tol)) +
                  " of " + std::to_string(n) + ")");
    if (best != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(best, j), m(k, j));
      std::swap(x[best], x[k]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = m(i, k) / m(k, k);
      if (f == 0.0) continue;
      for (std::size_t j = k; j < n; ++j) m(i, j) -= f * m(k, j);
      m(i, k) = 0.0;
      x[i] -= f * x[k];
    }
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = x[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= m(i, j) * x[j];
    x[i] = s / m(i, i);
  }
  return x;
}

Matrix inverse(const Matrix& a, double tol) {
  const std::size_t n = a.rows();
  Matrix inv(n, n);
  std::vector<double> e(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    e.assign(n, 0.0);
    e[j] = 1.0;
    const std::vector<double> col = solve(a, e, tol);
    for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
  }
  return inv;
}

bool cholesky(const Matrix& a, Matrix& lower) {
  if (a.rows() != a.cols()) return false;
  const std::size_t n = a.rows();
  lower = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= lower(i, k) * lower(j, k);
      if (i == j) {
        if (s <= 0.0) return false;
        lower(i, i) = std::sqrt(s);
      } else {
        lower(i, j) = s / lower(j, j);
      }
    }
  }
  return true;
}

std::vector<double> solve_spd(const Matrix& a, const std::vector<double>& b) {
  Matrix l;
  if (!cholesky(a, l)) throw Error("solve_spd: matrix not positive definite");
  const std::size_t n = a.rows();
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * y[k];
    y[i] = s / l(i, i);
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = y[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= l(k, i) * x[k];
    x[i] = s / l(i, i);
  }
  return x;
}

std::vector<double> project_onto_columns(const Matrix& a, const std::vector<double>& z,
                                         double tol) {
  if (a.rows() != z.size()) throw Error("project_onto_columns: shape mismatch");
  const double scale = std::max(a.max_abs(), 1.0);
  std::vector<std::vector<double>> q;  // orthonormal basis of the column space
  for (std::size_t j = 0; j < a.cols(); ++j) {
    std::vector<double> v = a.column(j);
    for (const auto& u : q) {
      double dot = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) dot += u[i] * v[i];
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= dot * u[i];
    }
    double norm = 0.0;
    for (double vi : v) norm += vi * vi;
    norm = std::sqrt(norm);
    if (norm <= tol * scale) continue;
    for (double& vi : v) vi /= norm;
    q.push_back(std::move(v));
  }
  std::vector<double> proj(z.size(), 0.0);
  for (const auto& u : q) {
    double dot = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) dot += u[i] * z[i];
    for (std::size_t i = 0; i < z.size(); ++i) proj[i] += dot * u[i];
  }
  return proj;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

}  // namespace crn
