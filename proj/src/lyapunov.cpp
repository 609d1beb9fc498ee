#include "circsynth/lyapunov.hpp"

#include <Eigen/Eigenvalues>
#include <string>

#include "circsynth/errors.hpp"

namespace circsynth {

Mat solve_lyapunov(const Mat& A, const Mat& Q) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n || Q.rows() != n || Q.cols() != n)
    throw NumericsError("dimension", "solve_lyapunov: dimension mismatch");
  if (n == 0) return Mat(0, 0);
  if ((Q - Q.transpose()).norm() > 1e-10 * std::max(1.0, Q.norm()))
    throw NumericsError("not-symmetric", "solve_lyapunov: Q must be symmetric");

  Eigen::ComplexSchur<CMat> schur(A.cast<cplx>());
  const CMat& T = schur.matrixT();
  const CMat& U = schur.matrixU();
  for (Eigen::Index k = 0; k < n; ++k)
    if (!(T(k, k).real() < 0.0))
      throw NumericsError("stability", "solve_lyapunov: A is not Hurwitz (eigenvalue with Re = " +
                                           std::to_string(T(k, k).real()) + ")");

  // T Y + Y T^H = F with Y = U^H X U, solved from the last column backwards.
  const CMat F = -(U.adjoint() * Q.cast<cplx>() * U);
  CMat Y = CMat::Zero(n, n);
  for (Eigen::Index j = n - 1; j >= 0; --j) {
    CVec rhs = F.col(j);
    for (Eigen::Index k = j + 1; k < n; ++k) rhs -= std::conj(T(j, k)) * Y.col(k);
    CMat M = T;
    M.diagonal().array() += std::conj(T(j, j));
    Y.col(j) = M.triangularView<Eigen::Upper>().solve(rhs);
  }
  Mat X = (U * Y * U.adjoint()).real();
  return 0.5 * (X + X.transpose());
}

double lyapunov_residual(const Mat& A, const Mat& X, const Mat& Q) {
  const double q = Q.norm();
  return (A * X + X * A.transpose() + Q).norm() / (q > 0.0 ? q : 1.0);
}

}  // namespace circsynth
