#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ligme/linalg.hpp"
#include "ligme/rng.hpp"
#include "ligme/types.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

using namespace ligme;

namespace {

RealMatrix random_matrix(RngStream& rng, Eigen::Index rows, Eigen::Index cols) {
  RealMatrix m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = rng.gaussian();
  return m;
}

double svd_norm(const RealMatrix& m) {
  return Eigen::JacobiSVD<RealMatrix>(m).singularValues()(0);
}

}  // namespace

TEST_CASE("matvec matches Eigen and checks shapes") {
  RngStream rng(11);
  const RealMatrix M = random_matrix(rng, 5, 3);
  RealVector x(3);
  x << 1.0, -2.0, 0.5;
  CHECK((matvec(M, x) - M * x).norm() == 0.0);

  RealVector wrong(4);
  wrong.setZero();
  CHECK_THROWS_AS(matvec(M, wrong), DimensionError);
}

TEST_CASE("operator norm on matrices with known norms") {
  CHECK(operator_norm(RealMatrix::Identity(4, 4)) == doctest::Approx(1.0));
  // The zero matrix is outside the contract: power iteration has no dominant
  // direction to find, so the precondition rejects it up front.
  CHECK_THROWS_AS(operator_norm(RealMatrix::Zero(3, 5)), std::invalid_argument);

  RealMatrix d = RealMatrix::Zero(3, 3);
  d.diagonal() << 3.0, 1.0, 0.5;
  CHECK(operator_norm(d) == doctest::Approx(3.0).epsilon(1e-8));

  // Rank one: ‖u vᵀ‖ = ‖u‖·‖v‖.
  RngStream rng(12);
  RealVector u(6), v(4);
  for (int i = 0; i < 6; ++i) u[i] = rng.gaussian();
  for (int i = 0; i < 4; ++i) v[i] = rng.gaussian();
  const RealMatrix r1 = u * v.transpose();
  CHECK(operator_norm(r1) == doctest::Approx(u.norm() * v.norm()).epsilon(1e-8));
}

TEST_CASE("operator norm agrees with SVD on random matrices") {
  RngStream rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index rows = 2 + static_cast<Eigen::Index>(rng.uniform_int(10));
    const Eigen::Index cols = 2 + static_cast<Eigen::Index>(rng.uniform_int(10));
    const RealMatrix m = random_matrix(rng, rows, cols);
    CHECK(operator_norm(m) == doctest::Approx(svd_norm(m)).epsilon(1e-6));
  }
}

TEST_CASE("operator norm recovers when the start vector is in the null space") {
  // MᵀM maps the all-ones start vector to zero; the deterministic restart
  // must still find the spectral norm (top singular value 2 here).
  RealMatrix m(2, 2);
  m << 1.0, -1.0, -1.0, 1.0;
  CHECK(operator_norm(m) == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("operator norm exhausts its budget with a ConvergenceError") {
  RngStream rng(14);
  const RealMatrix m = random_matrix(rng, 8, 8);
  try {
    operator_norm(m, 1e-16, 2);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(e.last_estimate > 0.0);  // carries the best estimate so far
    CHECK(e.last_estimate == doctest::Approx(svd_norm(m)).epsilon(0.5));
  }
}

TEST_CASE("psd check certifies definite and rejects indefinite matrices") {
  RngStream rng(15);
  const RealMatrix g = random_matrix(rng, 9, 5);
  const RealMatrix spd =
      g.transpose() * g + 0.1 * RealMatrix::Identity(5, 5);
  const PsdCertification ok = min_eigenvalue_psd_check(spd);
  CHECK(ok.psd);
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(spd);
  CHECK(ok.min_eigenvalue ==
        doctest::Approx(es.eigenvalues().minCoeff()).epsilon(1e-10));

  RealMatrix indef = RealMatrix::Zero(2, 2);
  indef.diagonal() << 1.0, -1.0;
  const PsdCertification bad = min_eigenvalue_psd_check(indef);
  CHECK_FALSE(bad.psd);
  CHECK(bad.min_eigenvalue == doctest::Approx(-1.0));
}

TEST_CASE("psd check tolerance boundary") {
  RealMatrix nearly = RealMatrix::Zero(2, 2);
  nearly.diagonal() << 1.0, -1e-12;
  CHECK(min_eigenvalue_psd_check(nearly, 1e-10).psd);  // within -tol
  nearly.diagonal() << 1.0, -1e-6;
  CHECK_FALSE(min_eigenvalue_psd_check(nearly, 1e-10).psd);
}

TEST_CASE("psd check rejects asymmetric and non-square input") {
  RealMatrix asym(2, 2);
  asym << 1.0, 0.5, -0.5, 1.0;  // asymmetry far beyond 1e-8·‖S‖
  CHECK_THROWS_AS(min_eigenvalue_psd_check(asym), std::invalid_argument);

  RealMatrix mild(2, 2);
  mild << 1.0, 0.5, 0.5 + 1e-13, 1.0;  // rounding-level asymmetry is fine
  CHECK_NOTHROW(min_eigenvalue_psd_check(mild));

  CHECK_THROWS_AS(min_eigenvalue_psd_check(RealMatrix::Zero(2, 3)),
                  std::invalid_argument);
}
