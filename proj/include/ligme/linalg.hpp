#pragma once

#include "ligme/types.hpp"

// Small dense linear-algebra services: checked matrix-vector products, spectral
// norm estimation, and symmetric positive-semidefiniteness certification.
namespace ligme {

// y = M x with an explicit shape check (error names both shapes).
RealVector matvec(const RealMatrix& M, const RealVector& x);

// Largest singular value of M, estimated by power iteration on MᵀM from the
// deterministic all-ones start vector.  Stops when the Rayleigh-quotient
// estimate of the top eigenvalue changes by less than `tol` relatively.
// Throws ConvergenceError (carrying the last estimate) after `max_iter`.
double operator_norm(const RealMatrix& M, double tol = 1e-8,
                     long max_iter = 10000);

// Outcome of a positive-semidefiniteness test: `psd` holds iff the smallest
// eigenvalue of the symmetrized input is ≥ -tol; the eigenvalue is the witness.
struct PsdCertification {
  bool psd = false;
  double min_eigenvalue = 0.0;
};

// Smallest eigenvalue of (S + Sᵀ)/2 by dense symmetric eigendecomposition.
// Inputs whose asymmetry exceeds 1e-8·‖S‖ are rejected as errors rather than
// silently symmetrized.
PsdCertification min_eigenvalue_psd_check(const RealMatrix& S,
                                          double tol = 1e-10);

}  // namespace ligme
