#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

namespace crn {

/// Dense row-major matrix. Everything in this project is small (tens of
/// rows/columns), so no sparse storage or blocking is attempted.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static Matrix from_columns(const std::vector<std::vector<double>>& cols);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  Matrix transposed() const;
  std::vector<double> row(std::size_t i) const;
  std::vector<double> column(std::size_t j) const;

  /// Largest absolute entry; zero for an empty matrix.
  double max_abs() const;

  bool operator==(const Matrix& other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
std::vector<double> operator*(const Matrix& a, const std::vector<double>& x);

struct RrefResult {
  Matrix r;
  std::vector<std::size_t> pivots;  // pivot column indices, one per nonzero row
};

/// Reduced row echelon form with partial pivoting. `tol` is relative to the
/// largest entry of the input.
RrefResult rref(const Matrix& a, double tol = 1e-9);

std::size_t rank(const Matrix& a, double tol = 1e-9);

/// Basis of Ker(a) as matrix columns; empty matrix when the kernel is trivial.
Matrix nullspace(const Matrix& a, double tol = 1e-9);

/// Solves the square system a*x = b by LU with partial pivoting.
/// Throws crn::Error naming the numerical rank when singular.
std::vector<double> solve(const Matrix& a, const std::vector<double>& b, double tol = 1e-9);

/// Inverse of a square nonsingular matrix (column-by-column solve).
Matrix inverse(const Matrix& a, double tol = 1e-9);

/// Cholesky factor of a symmetric matrix; returns false when the matrix is
/// not positive definite.
bool cholesky(const Matrix& a, Matrix& lower);

/// Solves a*x = b for symmetric positive definite a; throws when not PD.
std::vector<double> solve_spd(const Matrix& a, const std::vector<double>& b);

/// Orthogonal projection of z onto the column space of a (Gram-Schmidt on
/// the independent columns).
std::vector<double> project_onto_columns(const Matrix& a, const std::vector<double>& z,
                                         double tol = 1e-9);

double max_abs(const std::vector<double>& v);

}  // namespace crn
