#include "pk/matrix.hpp"

#include <cmath>
#include <cstdlib>
#include <utility>

namespace pk {

Matrix::Matrix(int rows, int cols)
    : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, 0.0) {
  if (rows < 0 || cols < 0) throw InvalidParameter("Matrix: negative dimension");
}

Matrix::Matrix(int rows, int cols, Vec entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (rows < 0 || cols < 0) throw InvalidParameter("Matrix: negative dimension");
  if (data_.size() != static_cast<size_t>(rows) * cols)
    throw InvalidParameter("Matrix: entry count does not match dimensions");
  check_finite();
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = static_cast<int>(rows.size());
  cols_ = rows_ > 0 ? static_cast<int>(rows.begin()->size()) : 0;
  data_.reserve(static_cast<size_t>(rows_) * cols_);
  for (const auto& r : rows) {
    if (static_cast<int>(r.size()) != cols_)
      throw InvalidParameter("Matrix: ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
  check_finite();
}

void Matrix::check_finite() const {
  for (double x : data_)
    if (!std::isfinite(x)) throw InvalidParameter("Matrix: non-finite entry");
}

Matrix Matrix::identity(int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diag(std::span<const double> d) {
  Matrix m(static_cast<int>(d.size()), static_cast<int>(d.size()));
  for (size_t i = 0; i < d.size(); ++i) m(static_cast<int>(i), static_cast<int>(i)) = d[i];
  m.check_finite();
  return m;
}

Matrix Matrix::column(std::span<const double> v) {
  Matrix m(static_cast<int>(v.size()), 1);
  for (size_t i = 0; i < v.size(); ++i) m(static_cast<int>(i), 0) = v[i];
  m.check_finite();
  return m;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

double Matrix::frobenius_norm() const {
  double s = 0.0;
  for (double x : data_) s += x * x;
  return std::sqrt(s);
}

double Matrix::max_abs() const {
  double m = 0.0;
  for (double x : data_) m = std::max(m, std::fabs(x));
  return m;
}

Matrix& Matrix::operator+=(const Matrix& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw InvalidParameter("Matrix +=: shape mismatch");
  for (size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  check_finite();
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw InvalidParameter("Matrix -=: shape mismatch");
  for (size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  check_finite();
  return *this;
}

Matrix& Matrix::operator*=(double s) {
  for (double& x : data_) x *= s;
  check_finite();
  return *this;
}

Vec Matrix::to_vec() const { return data_; }

Matrix operator+(const Matrix& a, const Matrix& b) {
  Matrix r = a;
  r += b;
  return r;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  Matrix r = a;
  r -= b;
  return r;
}

Matrix operator-(const Matrix& a) {
  Matrix r = a;
  r *= -1.0;
  return r;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw InvalidParameter("Matrix *: shape mismatch");
  Matrix out(a.rows(), b.cols());
  mul_into(a, b, out);
  for (int i = 0; i < out.rows(); ++i)
    for (int j = 0; j < out.cols(); ++j)
      if (!std::isfinite(out(i, j))) throw InvalidParameter("Matrix *: non-finite result");
  return out;
}

Matrix operator*(double s, const Matrix& a) {
  Matrix r = a;
  r *= s;
  return r;
}

Matrix operator*(const Matrix& a, double s) { return s * a; }

bool operator==(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && a.entries() == b.entries();
}

void mul_into(const Matrix& a, const Matrix& b, Matrix& out) {
  const int n = a.rows(), k = a.cols(), m = b.cols();
  double* o = out.data();
  const double* ad = a.data();
  const double* bd = b.data();
  for (int i = 0; i < n * m; ++i) o[i] = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int p = 0; p < k; ++p) {
      const double aip = ad[static_cast<size_t>(i) * k + p];
      const double* brow = bd + static_cast<size_t>(p) * m;
      double* orow = o + static_cast<size_t>(i) * m;
      for (int j = 0; j < m; ++j) orow[j] += aip * brow[j];
    }
  }
}

void tmul_into(const Matrix& a, const Matrix& b, Matrix& out) {
  // out(i,j) = sum_p a(p,i) b(p,j)
  const int n = a.cols(), k = a.rows(), m = b.cols();
  double* o = out.data();
  const double* ad = a.data();
  const double* bd = b.data();
  for (int i = 0; i < n * m; ++i) o[i] = 0.0;
  for (int p = 0; p < k; ++p) {
    const double* arow = ad + static_cast<size_t>(p) * n;
    const double* brow = bd + static_cast<size_t>(p) * m;
    for (int i = 0; i < n; ++i) {
      const double api = arow[i];
      double* orow = o + static_cast<size_t>(i) * m;
      for (int j = 0; j < m; ++j) orow[j] += api * brow[j];
    }
  }
}

void mul_nt_into(const Matrix& a, const Matrix& b, Matrix& out) {
  // out(i,j) = sum_p a(i,p) b(j,p)
  const int n = a.rows(), k = a.cols(), m = b.rows();
  double* o = out.data();
  const double* ad = a.data();
  const double* bd = b.data();
  for (int i = 0; i < n; ++i) {
    const double* arow = ad + static_cast<size_t>(i) * k;
    double* orow = o + static_cast<size_t>(i) * m;
    for (int j = 0; j < m; ++j) {
      const double* brow = bd + static_cast<size_t>(j) * k;
      double s = 0.0;
      for (int p = 0; p < k; ++p) s += arow[p] * brow[p];
      orow[j] = s;
    }
  }
}

Vec matvec(const Matrix& a, std::span<const double> x) {
  if (a.cols() != static_cast<int>(x.size())) throw InvalidParameter("matvec: shape mismatch");
  Vec y(a.rows(), 0.0);
  for (int i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (int j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) {
      const double aij = a(i, j);
      if (aij == 0.0) continue;
      for (int k = 0; k < b.rows(); ++k)
        for (int l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
    }
  return out;
}

Matrix vec(const Matrix& m) {
  Matrix out(m.rows() * m.cols(), 1);
  for (int j = 0; j < m.cols(); ++j)
    for (int i = 0; i < m.rows(); ++i) out(j * m.rows() + i, 0) = m(i, j);
  return out;
}

Matrix unvec(const Matrix& v, int rows, int cols) {
  if (v.cols() != 1 || v.rows() != rows * cols) throw InvalidParameter("unvec: shape mismatch");
  Matrix out(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) out(i, j) = v(j * rows + i, 0);
  return out;
}

Matrix commutation_matrix(int m, int n) {
  if (m < 1 || n < 1) throw InvalidParameter("commutation_matrix: dims must be >= 1");
  Matrix v(m * n, m * n);
  // vec(X)[j*m + i] = X(i,j); vec(X^T)[i*n + j] = X(i,j).
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) v(i * n + j, j * m + i) = 1.0;
  return v;
}

Matrix solve_linear(const Matrix& a, const Matrix& b) {
  if (a.rows() != a.cols()) throw InvalidParameter("solve_linear: a must be square");
  if (a.rows() != b.rows()) throw InvalidParameter("solve_linear: rhs shape mismatch");
  const int n = a.rows(), k = b.cols();
  Vec lu(a.data(), a.data() + static_cast<size_t>(n) * n);
  Vec x(b.data(), b.data() + static_cast<size_t>(n) * k);
  const double tol = 1e-12 * a.max_abs();

  for (int col = 0; col < n; ++col) {
    int piv = col;
    double best = std::fabs(lu[static_cast<size_t>(col) * n + col]);
    for (int r = col + 1; r < n; ++r) {
      const double v = std::fabs(lu[static_cast<size_t>(r) * n + col]);
      if (v > best) {
        best = v;
        piv = r;
      }
    }
    if (best <= tol) throw SingularMatrix("solve_linear: pivot below threshold");
    if (piv != col) {
      for (int c = 0; c < n; ++c)
        std::swap(lu[static_cast<size_t>(col) * n + c], lu[static_cast<size_t>(piv) * n + c]);
      for (int c = 0; c < k; ++c)
        std::swap(x[static_cast<size_t>(col) * k + c], x[static_cast<size_t>(piv) * k + c]);
    }
    const double d = lu[static_cast<size_t>(col) * n + col];
    for (int r = col + 1; r < n; ++r) {
      const double f = lu[static_cast<size_t>(r) * n + col] / d;
      if (f == 0.0) continue;
      for (int c = col; c < n; ++c)
        lu[static_cast<size_t>(r) * n + c] -= f * lu[static_cast<size_t>(col) * n + c];
      for (int c = 0; c < k; ++c)
        x[static_cast<size_t>(r) * k + c] -= f * x[static_cast<size_t>(col) * k + c];
    }
  }
  for (int row = n - 1; row >= 0; --row) {
    for (int c = 0; c < k; ++c) {
      double s = x[static_cast<size_t>(row) * k + c];
      for (int j = row + 1; j < n; ++j)
        s -= lu[static_cast<size_t>(row) * n + j] * x[static_cast<size_t>(j) * k + c];
      x[static_cast<size_t>(row) * k + c] = s / lu[static_cast<size_t>(row) * n + row];
    }
  }
  return Matrix(n, k, std::move(x));
}

bool spectral_radius_below_one(const Matrix& a) {
  if (a.rows() != a.cols()) throw InvalidParameter("spectral_radius_below_one: a must be square");
  const int n = a.rows();
  if (n == 0) return true;
  Vec cur(a.data(), a.data() + static_cast<size_t>(n) * n);
  Vec nxt(static_cast<size_t>(n) * n, 0.0);
  for (int iter = 0; iter <= 12; ++iter) {
    double f2 = 0.0;
    for (double v : cur) f2 += v * v;
    const double f = std::sqrt(f2);
    if (!std::isfinite(f)) return false;  // blew up while squaring
    if (f < 1e-6) return true;
    if (iter == 12) return false;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int p = 0; p < n; ++p)
          s += cur[static_cast<size_t>(i) * n + p] * cur[static_cast<size_t>(p) * n + j];
        nxt[static_cast<size_t>(i) * n + j] = s;
      }
    std::swap(cur, nxt);
  }
  return false;
}

}  // namespace pk
