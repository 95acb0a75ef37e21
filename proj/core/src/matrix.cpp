#include "adaptobs/matrix.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <sstream>

namespace adaptobs {

namespace {

constexpr std::size_t kCofactorLimit = 6;

void require(bool ok, const char* what) {
  if (!ok) throw DimensionError(what);
}

// Laplace expansion along the first listed row. `rows`/`cols` select the
// active minor; at most 6 entries each so fixed arrays suffice.
double cofactor_det(const Matrix& m, std::span<const std::size_t> rows,
                    std::span<const std::size_t> cols) {
  const std::size_t k = rows.size();
  if (k == 0) return 1.0;
  if (k == 1) return m(rows[0], cols[0]);
  if (k == 2) {
    return m(rows[0], cols[0]) * m(rows[1], cols[1]) - m(rows[0], cols[1]) * m(rows[1], cols[0]);
  }
  if (k == 3) {
    const auto r0 = rows[0], r1 = rows[1], r2 = rows[2];
    const auto c0 = cols[0], c1 = cols[1], c2 = cols[2];
    return m(r0, c0) * (m(r1, c1) * m(r2, c2) - m(r1, c2) * m(r2, c1)) -
           m(r0, c1) * (m(r1, c0) * m(r2, c2) - m(r1, c2) * m(r2, c0)) +
           m(r0, c2) * (m(r1, c0) * m(r2, c1) - m(r1, c1) * m(r2, c0));
  }
  std::array<std::size_t, kCofactorLimit> sub_cols{};
  double det = 0.0;
  double sign = 1.0;
  for (std::size_t j = 0; j < k; ++j, sign = -sign) {
    const double a = m(rows[0], cols[j]);
    if (a == 0.0) continue;
    std::size_t w = 0;
    for (std::size_t c = 0; c < k; ++c) {
      if (c != j) sub_cols[w++] = cols[c];
    }
    det += sign * a * cofactor_det(m, rows.subspan(1), std::span<const std::size_t>(sub_cols.data(), k - 1));
  }
  return det;
}

double diagonal_product(const Matrix& m) {
  double p = 1.0;
  for (std::size_t i = 0; i < m.rows(); ++i) p *= m(i, i);
  return p;
}

Matrix minor_of(const Matrix& m, std::size_t skip_r, std::size_t skip_c) {
  const std::size_t n = m.rows();
  Matrix out(n - 1, n - 1);
  for (std::size_t i = 0, oi = 0; i < n; ++i) {
    if (i == skip_r) continue;
    for (std::size_t j = 0, oj = 0; j < n; ++j) {
      if (j == skip_c) continue;
      out(oi, oj++) = m(i, j);
    }
    ++oi;
  }
  return out;
}

Eigen::MatrixXd to_eigen(const Matrix& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
  return e;
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    require(r.size() == cols_, "Matrix: ragged initializer list");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> d) {
  Matrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

Matrix Matrix::column(std::span<const double> v) {
  Matrix m(v.size(), 1);
  std::copy(v.begin(), v.end(), m.data_.begin());
  return m;
}

Matrix Matrix::row(std::span<const double> v) {
  Matrix m(1, v.size());
  std::copy(v.begin(), v.end(), m.data_.begin());
  return m;
}

Vector Matrix::row_vector(std::size_t i) const {
  return Vector(data_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
                data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_));
}

Vector Matrix::col_vector(std::size_t j) const {
  Vector v(rows_);
  for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
  return v;
}

void Matrix::set_row(std::size_t i, std::span<const double> v) {
  require(v.size() == cols_, "set_row: length mismatch");
  std::copy(v.begin(), v.end(), data_.begin() + static_cast<std::ptrdiff_t>(i * cols_));
}

void Matrix::set_col(std::size_t j, std::span<const double> v) {
  require(v.size() == rows_, "set_col: length mismatch");
  for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

bool Matrix::is_diagonal() const {
  if (!square()) return false;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j)
      if (i != j && (*this)(i, j) != 0.0) return false;
  return true;
}

bool Matrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

double Matrix::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

Matrix& Matrix::operator+=(const Matrix& o) {
  require(rows_ == o.rows_ && cols_ == o.cols_, "Matrix +=: shape mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& o) {
  require(rows_ == o.rows_ && cols_ == o.cols_, "Matrix -=: shape mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

Matrix& Matrix::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(double s, Matrix a) { return a *= s; }

Matrix operator*(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.rows(), "Matrix *: inner dimension mismatch");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

Vector operator*(const Matrix& a, std::span<const double> v) {
  require(a.cols() == v.size(), "Matrix * vector: dimension mismatch");
  Vector out(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * v[j];
    out[i] = s;
  }
  return out;
}

Vector add(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), "add: length mismatch");
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

Vector sub(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), "sub: length mismatch");
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

Vector scaled(std::span<const double> a, double s) {
  Vector out(a.begin(), a.end());
  for (double& v : out) v *= s;
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), "dot: length mismatch");
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double norm_inf(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

Vector concat(std::initializer_list<std::span<const double>> parts) {
  Vector out;
  for (auto p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

Vector unit_vector(std::size_t n, std::size_t i) {
  Vector e(n, 0.0);
  e.at(i) = 1.0;
  return e;
}

Vector left_multiply(std::span<const double> v, const Matrix& m) {
  require(v.size() == m.rows(), "left_multiply: dimension mismatch");
  Vector out(m.cols(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out[j] += v[i] * m(i, j);
  return out;
}

double frobenius_norm(const Matrix& m) { return norm(m.data()); }

double determinant(const Matrix& m) {
  require(m.square(), "determinant: matrix must be square");
  const std::size_t n = m.rows();
  if (n == 0) return 1.0;
  if (m.is_diagonal()) return diagonal_product(m);
  if (n > kCofactorLimit) return determinant_lu(m);
  std::array<std::size_t, kCofactorLimit> idx{};
  std::iota(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n), std::size_t{0});
  std::span<const std::size_t> s(idx.data(), n);
  return cofactor_det(m, s, s);
}

double determinant_lu(const Matrix& m) {
  require(m.square(), "determinant_lu: matrix must be square");
  const std::size_t n = m.rows();
  Matrix a = m;
  double det = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
    if (a(piv, k) == 0.0) return 0.0;
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      det = -det;
    }
    det *= a(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double l = a(i, k) / a(k, k);
      if (l == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= l * a(k, j);
    }
  }
  return det;
}

Matrix adjugate(const Matrix& m) {
  require(m.square(), "adjugate: matrix must be square");
  const std::size_t n = m.rows();
  Matrix adj(n, n);
  if (n == 0) return adj;
  if (n == 1) {
    adj(0, 0) = 1.0;
    return adj;
  }
  if (m.is_diagonal()) {
    // Products of the other diagonal entries; exact even with zeros.
    for (std::size_t i = 0; i < n; ++i) {
      double p = 1.0;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) p *= m(j, j);
      adj(i, i) = p;
    }
    return adj;
  }
  if (n <= kCofactorLimit) {
    std::array<std::size_t, kCofactorLimit> rows{};
    std::array<std::size_t, kCofactorLimit> cols{};
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        std::size_t w = 0;
        for (std::size_t r = 0; r < n; ++r)
          if (r != j) rows[w++] = r;
        w = 0;
        for (std::size_t c = 0; c < n; ++c)
          if (c != i) cols[w++] = c;
        const double minor = cofactor_det(m, std::span<const std::size_t>(rows.data(), n - 1),
                                          std::span<const std::size_t>(cols.data(), n - 1));
        adj(i, j) = ((i + j) % 2 == 0 ? 1.0 : -1.0) * minor;
      }
    }
    return adj;
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      adj(i, j) = ((i + j) % 2 == 0 ? 1.0 : -1.0) * determinant_lu(minor_of(m, j, i));
  return adj;
}

Matrix inverse(const Matrix& m) {
  const double det = determinant(m);
  if (det == 0.0 || !std::isfinite(det)) throw SingularMatrixError("inverse: matrix is singular");
  Matrix adj = adjugate(m);
  adj *= 1.0 / det;
  return adj;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

Vector kron(std::span<const double> a, std::span<const double> b) {
  Vector out;
  out.reserve(a.size() * b.size());
  for (double ai : a)
    for (double bj : b) out.push_back(ai * bj);
  return out;
}

Vector vec(const Matrix& m) {
  Vector v;
  v.reserve(m.size());
  for (std::size_t j = 0; j < m.cols(); ++j)
    for (std::size_t i = 0; i < m.rows(); ++i) v.push_back(m(i, j));
  return v;
}

Matrix unvec(std::span<const double> v, std::size_t rows, std::size_t cols) {
  require(v.size() == rows * cols, "unvec: length mismatch");
  Matrix m(rows, cols);
  for (std::size_t j = 0; j < cols; ++j)
    for (std::size_t i = 0; i < rows; ++i) m(i, j) = v[j * rows + i];
  return m;
}

Matrix block_diagonal(std::span<const Matrix> blocks) {
  std::size_t r = 0, c = 0;
  for (const auto& b : blocks) {
    r += b.rows();
    c += b.cols();
  }
  Matrix out(r, c);
  std::size_t r0 = 0, c0 = 0;
  for (const auto& b : blocks) {
    for (std::size_t i = 0; i < b.rows(); ++i)
      for (std::size_t j = 0; j < b.cols(); ++j) out(r0 + i, c0 + j) = b(i, j);
    r0 += b.rows();
    c0 += b.cols();
  }
  return out;
}

Matrix companion_left(std::span<const double> k) {
  require(!k.empty(), "companion_left: empty gain vector");
  const std::size_t n = k.size();
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i) a(i, 0) = -k[i];
  for (std::size_t i = 0; i + 1 < n; ++i) a(i, i + 1) = 1.0;
  return a;
}

Matrix companion_bottom(std::span<const double> g) {
  require(!g.empty(), "companion_bottom: empty coefficient vector");
  const std::size_t n = g.size();
  Matrix a(n, n);
  for (std::size_t i = 0; i + 1 < n; ++i) a(i, i + 1) = 1.0;
  for (std::size_t j = 0; j < n; ++j) a(n - 1, j) = g[j];
  return a;
}

Matrix observability(std::span<const double> c_row, const Matrix& a, std::size_t n) {
  require(a.square() && a.rows() == n, "observability: a must be n x n");
  require(c_row.size() == n, "observability: row length must be n");
  Matrix o(n, n);
  Vector r(c_row.begin(), c_row.end());
  for (std::size_t k = 0; k < n; ++k) {
    o.set_row(k, r);
    r = left_multiply(r, a);
  }
  return o;
}

Vector characteristic_polynomial(const Matrix& m) {
  require(m.square(), "characteristic_polynomial: matrix must be square");
  // Faddeev-LeVerrier: M_k = A M_{k-1} + c_{n-k+1} I, c_{n-k} = -tr(A M_k)/k.
  const std::size_t n = m.rows();
  Vector c(n, 0.0);
  Matrix mk(n, n);
  double prev = 1.0;
  for (std::size_t k = 1; k <= n; ++k) {
    Matrix next = m * mk;
    for (std::size_t i = 0; i < n; ++i) next(i, i) += prev;
    mk = std::move(next);
    Matrix am = m * mk;
    double tr = 0.0;
    for (std::size_t i = 0; i < n; ++i) tr += am(i, i);
    prev = -tr / static_cast<double>(k);
    c[n - k] = prev;
  }
  return c;
}

std::vector<std::complex<double>> eigenvalues(const Matrix& m) {
  require(m.square(), "eigenvalues: matrix must be square");
  if (m.rows() == 0) return {};
  Eigen::EigenSolver<Eigen::MatrixXd> es(to_eigen(m), /*computeEigenvectors=*/false);
  const auto& ev = es.eigenvalues();
  std::vector<std::complex<double>> out(static_cast<std::size_t>(ev.size()));
  for (Eigen::Index i = 0; i < ev.size(); ++i) out[static_cast<std::size_t>(i)] = ev(i);
  return out;
}

Vector symmetric_eigenvalues(const Matrix& m) {
  require(m.square(), "symmetric_eigenvalues: matrix must be square");
  const std::size_t n = m.rows();
  Matrix a = m;
  // Symmetrize against round-off in accumulated Gram matrices.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) a(i, j) = a(j, i) = 0.5 * (a(i, j) + a(j, i));
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0, total = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        total += a(i, j) * a(i, j);
        if (i != j) off += a(i, j) * a(i, j);
      }
    if (off <= 1e-30 * total || off == 0.0) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  Vector ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

double min_symmetric_eigenvalue(const Matrix& m) {
  const Vector ev = symmetric_eigenvalues(m);
  return ev.empty() ? 0.0 : ev.front();
}

bool is_hurwitz(const Matrix& m, double margin) {
  for (const auto& l : eigenvalues(m))
    if (!(l.real() < -margin)) return false;
  return true;
}

std::size_t numerical_rank(const Matrix& m, double rel_tol) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(to_eigen(m));
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > rel_tol * s(0)) ++r;
  return r;
}

std::string to_string(const Matrix& m) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    os << (i ? "; " : "");
    for (std::size_t j = 0; j < m.cols(); ++j) os << (j ? ", " : "") << m(i, j);
  }
  os << ']';
  return os.str();
}

}  // namespace adaptobs
