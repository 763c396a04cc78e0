#pragma once

#include <initializer_list>
#include <span>
#include <vector>

#include "pk/errors.hpp"

namespace pk {

using Vec = std::vector<double>;

/// Dense row-major matrix sized for small control problems (dims here stay
/// below ~40). Construction rejects non-finite entries; the *_into kernels
/// below skip that check for iterative inner loops.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols);  // zero-filled
  Matrix(int rows, int cols, Vec entries);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(int n);
  static Matrix diag(std::span<const double> d);
  static Matrix column(std::span<const double> v);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  double& operator()(int i, int j) { return data_[static_cast<size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return data_[static_cast<size_t>(i) * cols_ + j]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  const Vec& entries() const { return data_; }

  Matrix transpose() const;
  double frobenius_norm() const;
  double max_abs() const;

  Matrix& operator+=(const Matrix& o);
  Matrix& operator-=(const Matrix& o);
  Matrix& operator*=(double s);

  /// Column-vector view helpers (for n x 1 shapes).
  Vec to_vec() const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  Vec data_;

  void check_finite() const;
};

Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a);
Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);
Matrix operator*(const Matrix& a, double s);
bool operator==(const Matrix& a, const Matrix& b);

/// out = a * b. Shapes must already conform; no finite check.
void mul_into(const Matrix& a, const Matrix& b, Matrix& out);
/// out = transpose(a) * b.
void tmul_into(const Matrix& a, const Matrix& b, Matrix& out);
/// out = a * transpose(b).
void mul_nt_into(const Matrix& a, const Matrix& b, Matrix& out);

Vec matvec(const Matrix& a, std::span<const double> x);

/// Kronecker product: block (i,j) of the result is a(i,j) * b.
Matrix kron(const Matrix& a, const Matrix& b);

/// Column-major vectorization: stacks the columns of m into an (rows*cols) x 1
/// column. This convention makes vec(A X B) = kron(B^T, A) vec(X) hold.
Matrix vec(const Matrix& m);

/// Inverse of vec for a rows x cols target.
Matrix unvec(const Matrix& v, int rows, int cols);

/// Commutation matrix V with V * vec(X) = vec(X^T) for every m x n matrix X.
Matrix commutation_matrix(int m, int n);

/// Solves a X = b by partially pivoted LU elimination. Throws SingularMatrix
/// when a pivot falls to or below 1e-12 times the largest initial entry of a.
Matrix solve_linear(const Matrix& a, const Matrix& b);

/// Practical spectral-radius test: true iff the Frobenius norm of a^4096
/// (12 repeated squarings) drops below 1e-6. Eigenvalues within ~1e-3 of the
/// unit circle may be misclassified; the DARE residual check is the primary
/// correctness gate for callers.
bool spectral_radius_below_one(const Matrix& a);

}  // namespace pk
