#pragma once

#include "pk/matrix.hpp"

namespace pk {

/// Discrete-time LQR data: x' = a x + b u with stage cost
/// x^T q x + u^T r u, q symmetric PSD and r symmetric PD.
struct DareProblem {
  Matrix a;  // n x n
  Matrix b;  // n x m
  Matrix q;  // n x n
  Matrix r;  // m x m
};

/// Throws InvalidParameter unless shapes conform, q is symmetric PSD
/// (within 1e-10 / Cholesky-with-shift) and r is symmetric PD.
void validate_dare_problem(const DareProblem& prob);

struct DareSolution {
  Matrix p;        // stabilizing value matrix, n x n
  Matrix k;        // feedback gain (r + b^T p b)^{-1} b^T p a, m x n
  int iterations;  // fixed-point iterations used
  double residual; // Frobenius norm of the DARE defect at p
};

/// Jacobians of the stabilizing DARE solution under the column-major vec
/// convention.
struct DareSensitivity {
  Matrix dp_da;  // n^2 x n^2
  Matrix dp_db;  // n^2 x (n*m)
};

/// Fixed-point value iteration p <- q + a^T p a - a^T p b (r + b^T p b)^{-1}
/// b^T p a starting at p0 = q, symmetrized each sweep, stopping at
/// ||dp||_F <= 1e-12 (1 + ||p||_F) or 10000 iterations. Throws
/// NotStabilizable on iteration exhaustion or when the closed loop a - b k
/// fails the spectral test.
DareSolution solve_dare(const DareProblem& prob);

/// Gain factor (r + b^T p b)^{-1} b^T p a for a given value matrix.
Matrix lqr_gain(const DareProblem& prob, const Matrix& p);

/// Frobenius norm of p - q - a^T p a + a^T p b (r + b^T p b)^{-1} b^T p a.
double dare_residual(const DareProblem& prob, const Matrix& p);

/// Coefficient blocks of the implicit-function Jacobians:
/// dvecP/dvecA = z1^{-1} z2 and dvecP/dvecB = z1^{-1} z3.
///
/// With m3 = r + b^T p b, m2 = m3^{-1}, m1 = p - p b m2 b^T p and
/// t = p b m2 b^T:
///   z1 = I - (a^T (x) a^T) [I - (t (x) I) - (I (x) t) + (t (x) t)]
///   z2 = (V_{n,n} + I) (I (x) a^T m1)
///   z3 = (a^T (x) a^T) [ (p b m2 (x) p b m2) (I_{m^2} + V_{m,m}) (I_m (x) b^T p)
///                        - (I_{n^2} + V_{n,n}) (p b m2 (x) p) ]
/// z3 comes from implicit differentiation of the DARE with respect to b,
/// the same product-rule expansion that yields z2; it is validated against
/// the central-difference oracle in the test suite.
struct DareZ {
  Matrix z1, z2, z3;
};
DareZ dare_z_matrices(const DareProblem& prob, const Matrix& p);

/// Analytic sensitivities at the stabilizing solution. Throws SingularMatrix
/// when z1 is numerically singular.
DareSensitivity dare_jacobians(const DareProblem& prob, const DareSolution& sol);

/// Central-difference oracle. Each entry of a (then b) is perturbed by
/// +-step * (1 + |entry|) and the DARE re-solved; NotStabilizable from a
/// perturbed solve propagates.
DareSensitivity dare_jacobians_fd(const DareProblem& prob, double step);

}  // namespace pk
