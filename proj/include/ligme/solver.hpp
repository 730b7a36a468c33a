#pragma once

#include "ligme/constellation.hpp"
#include "ligme/regularizer.hpp"
#include "ligme/types.hpp"

#include <optional>
#include <vector>

// Fixed-point solver for the hull-constrained, Moreau-enhanced least-squares
// model
//
//   minimize  ½‖y - A x‖²  +  mu·Theta(x)   subject to  x ∈ C,
//
// where C is the convex hull of the stacked alphabet and Theta the enhanced
// sum of shifted weighted norms.  The iteration is a primal-dual fixed-point
// map on the tuple u = (x, v, w); under the certified overall-convexity
// condition AᵀA - mu·Σ_l B_lᵀB_l ⪰ O and the step-size conditions below it is
// averaged nonexpansive in a weighted inner product, so the iterates converge
// to a global minimizer.
namespace ligme {

// One realized instance: data, sensing matrix, hull constraint, regularizer,
// and the alphabet used for the final quantization step.
struct RealizedProblem {
  RealVector y;
  RealMatrix A;
  HullDescriptor hull;
  LigmeRegularizer reg;
  Alphabet alphabet;
  // ‖A‖², estimated at construction (or passed by a caller that already has
  // it); step-size formulas and validation read it instead of re-estimating.
  double a_opnorm_sq = 0.0;

  static RealizedProblem make(RealVector y, RealMatrix A, HullDescriptor hull,
                              LigmeRegularizer reg, Alphabet alphabet,
                              std::optional<double> a_opnorm_sq = std::nullopt);

  Eigen::Index dim() const { return A.cols(); }
  bool certified() const { return reg.gme.certified(); }
};

// Relaxation/step parameters of the fixed-point map.  Valid parameters
// satisfy kappa > 1, (sigma - mu·L)·Id - (kappa/2)·AᵀA ⪰ O and
// tau ≥ (kappa/2 + 2/kappa)·mu·max_l ‖B_l‖².
struct StepSizes {
  double sigma = 0.0;
  double tau = 0.0;
  double kappa = 0.0;
};

// sigma = (kappa/2)·‖A‖² + mu·L + (kappa - 1) and
// tau = (kappa/2 + 2/kappa)·mu·max_l ‖B_l‖² + (kappa - 1); the operator-norm
// estimates are inflated by a factor (1 + 1e-6) so the inequalities survive
// the estimation tolerance.
StepSizes default_step_sizes(const RealizedProblem& problem, double kappa);

// The tuple the fixed-point map acts on: the estimate x plus one auxiliary
// pair (v_l, w_l) per shift.
struct SolverState {
  RealVector x;
  ProductVector v;
  ProductVector w;
  long iteration = 0;
  double fixed_point_residual = 0.0;  // ‖u_{k+1} - u_k‖, plain product norm

  static SolverState zero(const RealizedProblem& problem);
};

enum class Termination { MaxIterations, ResidualBelowTol };

struct SolveOptions {
  long max_iter = 1000;
  double residual_tol = 1e-10;  // 0 disables the residual stop
  bool record_objective = false;
  bool allow_uncertified = false;
};

struct SolveReport {
  RealVector x_final;
  RealVector x_quantized;
  std::vector<int> quantized_indices;
  long iterations = 0;
  Termination termination = Termination::MaxIterations;
  std::vector<double> residual_history;
  std::vector<double> objective_history;  // filled when record_objective
  // True when the run used heuristics (reweighting, or a superiorization
  // schedule whose perturbations are not summable) that void the convergence
  // guarantee.
  bool heuristic_modifications = false;
};

// One application of the fixed-point map:
//   x⁺   = P_C[ x - (1/sigma)·Aᵀ(Ax - y)
//               + (mu/sigma)·Σ_l (B_lᵀB_l (x - v_l) - w_l) ]
//   v_l⁺ = s_l + Prox_{(mu/tau)Ψ_l}[ (mu/tau)·B_lᵀB_l (2x⁺ - x - v_l)
//                                    + v_l - s_l ]
//   w_l⁺ = (Id - Prox_{Ψ_l})[ 2x⁺ - x + w_l - s_l ]
// with s_l the l-th shift; the updated x feeds the v and w updates.
SolverState apply_T_cLiGME(const SolverState& state,
                           const RealizedProblem& problem,
                           const StepSizes& steps);

// Iterates the map from `init` until the plain-norm fixed-point residual
// drops below residual_tol or max_iter is reached.  Refuses problems without
// a positive overall-convexity certificate unless allow_uncertified is set.
SolveReport solve(const RealizedProblem& problem, const StepSizes& steps,
                  const SolverState& init, const SolveOptions& options);

// ½‖y - Ax‖² + mu·Theta(x); Theta via the closed form when available, the
// iterative evaluator otherwise.
double objective_value(const RealVector& x, const RealizedProblem& problem);

// The weighted-inner-product matrix of the convergence analysis,
//   [ sigma·I      -mu·(B_lᵀB_l)_l   -mu·(I)_l ]
//   [ -mu·(B_lᵀB_l)_lᵀ   tau·I         O       ]
//   [ -mu·(I)_lᵀ          O           mu·I     ]
// assembled densely (dimension D + 2·L·D; intended for small diagnostics).
RealMatrix assemble_p_matrix(const RealizedProblem& problem,
                             const StepSizes& steps);

// Quadratic form uᵀ𝔓u of a state-space displacement without assembling 𝔓.
double p_quadratic_form(const RealizedProblem& problem, const StepSizes& steps,
                        const RealVector& dx, const ProductVector& dv,
                        const ProductVector& dw);

}  // namespace ligme
