#include "pk/riccati.hpp"

#include <cmath>

namespace pk {
namespace {

constexpr int kMaxIterations = 10000;

bool cholesky_ok(const Matrix& m, double shift) {
  const int n = m.rows();
  Matrix l(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = m(i, j) + (i == j ? shift : 0.0);
      for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      if (i == j) {
        if (s <= 0.0 || !std::isfinite(s)) return false;
        l(i, i) = std::sqrt(s);
      } else {
        l(i, j) = s / l(j, j);
      }
    }
  }
  return true;
}

bool symmetric_within(const Matrix& m, double tol) {
  for (int i = 0; i < m.rows(); ++i)
    for (int j = i + 1; j < m.cols(); ++j)
      if (std::fabs(m(i, j) - m(j, i)) > tol) return false;
  return true;
}

}  // namespace

void validate_dare_problem(const DareProblem& prob) {
  const int n = prob.a.rows();
  const int m = prob.b.cols();
  if (prob.a.cols() != n) throw InvalidParameter("DareProblem: a must be square");
  if (prob.b.rows() != n) throw InvalidParameter("DareProblem: b row count mismatch");
  if (prob.q.rows() != n || prob.q.cols() != n)
    throw InvalidParameter("DareProblem: q shape mismatch");
  if (prob.r.rows() != m || prob.r.cols() != m)
    throw InvalidParameter("DareProblem: r shape mismatch");
  if (!symmetric_within(prob.q, 1e-10)) throw InvalidParameter("DareProblem: q not symmetric");
  if (!symmetric_within(prob.r, 1e-10)) throw InvalidParameter("DareProblem: r not symmetric");
  // Cholesky-with-shift as the PSD proxy; r must pass without a shift.
  if (!cholesky_ok(prob.q, 1e-10 * (1.0 + prob.q.max_abs())))
    throw InvalidParameter("DareProblem: q not positive semidefinite");
  if (!cholesky_ok(prob.r, 0.0))
    throw InvalidParameter("DareProblem: r not positive definite");
}

DareSolution solve_dare(const DareProblem& prob) {
  validate_dare_problem(prob);
  const int n = prob.a.rows();
  const int m = prob.b.cols();

  Matrix p = prob.q;
  Matrix pa(n, n), atpa(n, n), pb(n, m), btpb(m, m), m3(m, m), g(m, n), x(m, n), gain_term(n, n);
  int iterations = 0;
  for (; iterations < kMaxIterations; ++iterations) {
    mul_into(p, prob.a, pa);
    tmul_into(prob.a, pa, atpa);
    mul_into(p, prob.b, pb);
    tmul_into(prob.b, pb, btpb);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) m3(i, j) = prob.r(i, j) + btpb(i, j);
    tmul_into(prob.b, pa, g);  // g = b^T p a
    x = solve_linear(m3, g);   // x = m3^{-1} b^T p a
    tmul_into(g, x, gain_term);  // g^T x = a^T p b m3^{-1} b^T p a

    double delta2 = 0.0, norm2 = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j <= i; ++j) {
        const double vij = prob.q(i, j) + atpa(i, j) - gain_term(i, j);
        const double vji = prob.q(j, i) + atpa(j, i) - gain_term(j, i);
        const double next = 0.5 * (vij + vji);  // symmetrize against drift
        const double di = next - p(i, j);
        const double w = (i == j) ? 1.0 : 2.0;
        delta2 += w * di * di;
        norm2 += w * next * next;
        p(i, j) = next;
        p(j, i) = next;
      }
    if (!std::isfinite(norm2) || norm2 > 1e200)
      throw NotStabilizable("solve_dare: iteration diverged");
    if (std::sqrt(delta2) <= 1e-12 * (1.0 + std::sqrt(norm2))) {
      ++iterations;
      break;
    }
  }
  if (iterations >= kMaxIterations)
    throw NotStabilizable("solve_dare: exceeded iteration limit");

  DareSolution sol;
  sol.p = p;
  sol.k = lqr_gain(prob, p);
  sol.iterations = iterations;
  sol.residual = dare_residual(prob, p);
  if (!spectral_radius_below_one(prob.a - prob.b * sol.k))
    throw NotStabilizable("solve_dare: closed loop failed the spectral test");
  return sol;
}

Matrix lqr_gain(const DareProblem& prob, const Matrix& p) {
  const Matrix pb = p * prob.b;
  const Matrix m3 = prob.r + prob.b.transpose() * pb;
  const Matrix g = prob.b.transpose() * p * prob.a;
  return solve_linear(m3, g);
}

double dare_residual(const DareProblem& prob, const Matrix& p) {
  const Matrix pb = p * prob.b;
  const Matrix m3 = prob.r + prob.b.transpose() * pb;
  const Matrix g = prob.b.transpose() * p * prob.a;
  const Matrix correction = prob.a.transpose() * pb * solve_linear(m3, g);
  const Matrix defect = p - prob.q - prob.a.transpose() * p * prob.a + correction;
  return defect.frobenius_norm();
}

DareZ dare_z_matrices(const DareProblem& prob, const Matrix& p) {
  const int n = prob.a.rows();
  const int m = prob.b.cols();
  const Matrix at = prob.a.transpose();
  const Matrix pb = p * prob.b;
  const Matrix m3 = prob.r + prob.b.transpose() * pb;
  const Matrix m2 = solve_linear(m3, Matrix::identity(m));
  const Matrix pbm2 = pb * m2;
  const Matrix t = pbm2 * prob.b.transpose();  // p b m2 b^T
  const Matrix m1 = p - t * p;                 // p - p b m2 b^T p
  const Matrix in = Matrix::identity(n);
  const Matrix in2 = Matrix::identity(n * n);
  const Matrix atxat = kron(at, at);

  DareZ z;
  Matrix bracket = in2 - kron(t, in) - kron(in, t) + kron(t, t);
  z.z1 = in2 - atxat * bracket;
  z.z2 = (commutation_matrix(n, n) + in2) * kron(in, at * m1);
  // Implicit differentiation with respect to b; see the header note.
  const Matrix btp = prob.b.transpose() * p;
  z.z3 = atxat * (kron(pbm2, pbm2) * (Matrix::identity(m * m) + commutation_matrix(m, m)) *
                      kron(Matrix::identity(m), btp) -
                  (in2 + commutation_matrix(n, n)) * kron(pbm2, p));
  return z;
}

DareSensitivity dare_jacobians(const DareProblem& prob, const DareSolution& sol) {
  const DareZ z = dare_z_matrices(prob, sol.p);
  DareSensitivity s;
  s.dp_da = solve_linear(z.z1, z.z2);
  s.dp_db = solve_linear(z.z1, z.z3);
  return s;
}

DareSensitivity dare_jacobians_fd(const DareProblem& prob, double step) {
  const int n = prob.a.rows();
  const int m = prob.b.cols();
  DareSensitivity s{Matrix(n * n, n * n), Matrix(n * n, n * m)};

  auto column = [&](Matrix& target, int col, const Matrix& plus, const Matrix& minus, double h) {
    for (int i = 0; i < n * n; ++i) target(i, col) = (plus(i, 0) - minus(i, 0)) / (2.0 * h);
  };

  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double h = step * (1.0 + std::fabs(prob.a(i, j)));
      DareProblem pp = prob, pm = prob;
      pp.a(i, j) += h;
      pm.a(i, j) -= h;
      column(s.dp_da, j * n + i, vec(solve_dare(pp).p), vec(solve_dare(pm).p), h);
    }
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < n; ++i) {
      const double h = step * (1.0 + std::fabs(prob.b(i, j)));
      DareProblem pp = prob, pm = prob;
      pp.b(i, j) += h;
      pm.b(i, j) -= h;
      column(s.dp_db, j * n + i, vec(solve_dare(pp).p), vec(solve_dare(pm).p), h);
    }
  return s;
}

}  // namespace pk
