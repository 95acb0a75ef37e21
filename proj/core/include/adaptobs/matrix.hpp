#pragma once

// Small dense matrix algebra used throughout the estimator pipeline.
//
// Everything here is sized for systems of order <= ~10: the largest object
// the observer touches is the 27-entry stacked parameter vector and a 9x9
// diagonal mapping. Determinants and adjugates of matrices up to 6x6 are
// computed by cofactor expansion so that signs of nearly singular mixing
// matrices are not disturbed by pivoting.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace adaptobs {

using Vector = std::vector<double>;

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class SingularMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Row-major dense matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix zeros(std::size_t rows, std::size_t cols) { return Matrix(rows, cols); }
  static Matrix diagonal(std::span<const double> d);
  static Matrix column(std::span<const double> v);
  static Matrix row(std::span<const double> v);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool square() const { return rows_ == cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  Vector row_vector(std::size_t i) const;
  Vector col_vector(std::size_t j) const;
  void set_row(std::size_t i, std::span<const double> v);
  void set_col(std::size_t j, std::span<const double> v);

  Matrix transpose() const;
  bool is_diagonal() const;
  bool all_finite() const;
  double max_abs() const;

  Matrix& operator+=(const Matrix& o);
  Matrix& operator-=(const Matrix& o);
  Matrix& operator*=(double s);

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator*(double s, Matrix a);
Vector operator*(const Matrix& a, std::span<const double> v);

// Vector helpers. Named rather than operators so they resolve without ADL
// tricks on std::vector.
Vector add(std::span<const double> a, std::span<const double> b);
Vector sub(std::span<const double> a, std::span<const double> b);
Vector scaled(std::span<const double> a, double s);
double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);
double norm_inf(std::span<const double> a);
Vector concat(std::initializer_list<std::span<const double>> parts);
Vector unit_vector(std::size_t n, std::size_t i);
/// Row vector times matrix: v^T m.
Vector left_multiply(std::span<const double> v, const Matrix& m);
double frobenius_norm(const Matrix& m);

double determinant(const Matrix& m);
/// Determinant by LU with partial pivoting, any size.
double determinant_lu(const Matrix& m);
/// Transposed cofactor matrix. adj(m) * m == det(m) * I also for singular m.
Matrix adjugate(const Matrix& m);
/// adj(m) / det(m); throws SingularMatrixError when det(m) == 0.
Matrix inverse(const Matrix& m);

Matrix kron(const Matrix& a, const Matrix& b);
Vector kron(std::span<const double> a, std::span<const double> b);
/// Column-major stacking of the columns of m.
Vector vec(const Matrix& m);
Matrix unvec(std::span<const double> v, std::size_t rows, std::size_t cols);
Matrix block_diagonal(std::span<const Matrix> blocks);

/// [-k | (I_{n-1}; 0)]: first column -k, identity on the super-diagonal.
Matrix companion_left(std::span<const double> k);
/// Shift matrix with g^T as the last row.
Matrix companion_bottom(std::span<const double> g);
/// Rows c^T a^k for k = 0..n-1.
Matrix observability(std::span<const double> c_row, const Matrix& a, std::size_t n);

/// Coefficients c_0..c_{n-1} of det(sI - m) = s^n + c_{n-1}s^{n-1} + ... + c_0.
Vector characteristic_polynomial(const Matrix& m);
std::vector<std::complex<double>> eigenvalues(const Matrix& m);
/// Cyclic Jacobi sweep; eigenvalues in ascending order.
Vector symmetric_eigenvalues(const Matrix& m);
double min_symmetric_eigenvalue(const Matrix& m);
bool is_hurwitz(const Matrix& m, double margin = 0.0);
std::size_t numerical_rank(const Matrix& m, double rel_tol = 1e-10);

std::string to_string(const Matrix& m);

}  // namespace adaptobs
