#include "ligme/linalg.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace ligme {

RealVector matvec(const RealMatrix& M, const RealVector& x) {
  require_dims(M.cols() == x.size(),
               "matvec: matrix is " + std::to_string(M.rows()) + "x" +
                   std::to_string(M.cols()) + " but vector has dimension " +
                   std::to_string(x.size()));
  return M * x;
}

double operator_norm(const RealMatrix& M, double tol, long max_iter) {
  require(M.size() > 0, "operator_norm: empty matrix");
  require(tol > 0.0, "operator_norm: tol must be positive");
  require_finite(M, "operator_norm: matrix");
  const double frob = M.norm();
  require(frob > 0.0, "operator_norm: zero matrix has no dominant direction");

  // Power iteration on G = MᵀM; only matvecs with M and Mᵀ are formed so the
  // cost stays O(rows·cols) per sweep.
  RealVector v = RealVector::Ones(M.cols());
  v /= v.norm();
  double lambda = 0.0;
  for (long k = 0; k < max_iter; ++k) {
    RealVector gv = M.transpose() * (M * v);
    const double lambda_next = v.dot(gv);  // Rayleigh quotient for G
    const double gv_norm = gv.norm();
    if (gv_norm == 0.0) {
      // v is in the null space of M; for a nonzero M the all-ones start makes
      // this possible only in contrived cases.  Restart deterministically from
      // the first coordinate direction not annihilated by M.
      for (Eigen::Index j = 0; j < M.cols(); ++j) {
        if (M.col(j).squaredNorm() > 0.0) {
          v = RealVector::Unit(M.cols(), j);
          break;
        }
      }
      continue;
    }
    const bool converged =
        std::abs(lambda_next - lambda) <= tol * std::abs(lambda_next);
    lambda = lambda_next;
    v = gv / gv_norm;
    if (converged && k > 0) return std::sqrt(std::max(lambda, 0.0));
  }
  throw ConvergenceError(
      "operator_norm: power iteration did not converge within " +
          std::to_string(max_iter) + " iterations (last estimate " +
          std::to_string(std::sqrt(std::max(lambda, 0.0))) + ")",
      std::sqrt(std::max(lambda, 0.0)));
}

PsdCertification min_eigenvalue_psd_check(const RealMatrix& S, double tol) {
  require_dims(S.rows() == S.cols(),
               "min_eigenvalue_psd_check: matrix is " +
                   std::to_string(S.rows()) + "x" + std::to_string(S.cols()) +
                   ", expected square");
  require_finite(S, "min_eigenvalue_psd_check: matrix");
  const double scale = S.norm();
  const double asym = (S - S.transpose()).norm();
  if (asym > 1e-8 * scale && scale > 0.0)
    throw std::invalid_argument(
        "min_eigenvalue_psd_check: matrix asymmetry " + std::to_string(asym) +
        " exceeds 1e-8 * norm " + std::to_string(scale));
  const RealMatrix sym = 0.5 * (S + S.transpose());
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(sym,
                                               Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw std::runtime_error(
        "min_eigenvalue_psd_check: eigendecomposition failed");
  const double min_eig = es.eigenvalues().minCoeff();
  return PsdCertification{min_eig >= -tol, min_eig};
}

}  // namespace ligme
