#pragma once

// Continuous Lyapunov equations A X + X A* + Q = 0 for stable A, by
// Bartels–Stewart back-substitution on the complex Schur form.

#include <complex>

#include <Eigen/Dense>

#include "qconcat/error.hpp"

namespace qconcat {

// Solves A X + X A* + Q = 0.
inline Eigen::MatrixXcd solve_lyapunov(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& q) {
  require(a.rows() == a.cols() && q.rows() == a.rows() && q.cols() == a.cols(), "Lyapunov operands must be square and match");
  const Eigen::Index n = a.rows();
  if (n == 0) return Eigen::MatrixXcd(0, 0);
  Eigen::ComplexSchur<Eigen::MatrixXcd> schur(a);
  if (schur.info() != Eigen::Success) throw NumericalFailure("Schur decomposition did not converge");
  const Eigen::MatrixXcd& t = schur.matrixT();
  const Eigen::MatrixXcd& u = schur.matrixU();
  for (Eigen::Index i = 0; i < n; ++i)
    if (t(i, i).real() >= 0.0) throw NumericalFailure("Lyapunov solve needs a stable matrix");
  // With A = U T U*, X = U Y U* and F = -U* Q U:
  //   (T + conj(T_jj) I) y_j = f_j - Σ_{k>j} conj(T_jk) y_k.
  const Eigen::MatrixXcd f = -(u.adjoint() * q * u);
  Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index j = n - 1; j >= 0; --j) {
    const Eigen::Index tail = n - j - 1;
    Eigen::VectorXcd rhs = f.col(j);
    if (tail > 0) rhs.noalias() -= y.rightCols(tail) * t.row(j).tail(tail).adjoint();
    const std::complex<double> shift = std::conj(t(j, j));
    for (Eigen::Index i = n - 1; i >= 0; --i) {
      std::complex<double> acc = rhs(i);
      if (i + 1 < n) acc -= t.row(i).tail(n - i - 1).transpose().cwiseProduct(y.col(j).tail(n - i - 1)).sum();
      y(i, j) = acc / (t(i, i) + shift);
    }
  }
  Eigen::MatrixXcd x = u * y * u.adjoint();
  return 0.5 * (x + x.adjoint());
}

// ‖A X + X A* + Q‖_F.
inline double lyapunov_residual(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& x, const Eigen::MatrixXcd& q) {
  return (a * x + x * a.adjoint() + q).norm();
}

}  // namespace qconcat
