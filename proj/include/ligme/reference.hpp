#pragma once

#include "ligme/types.hpp"

#include <functional>
#include <vector>

// Independent reference implementations ("oracles") used to validate the
// closed-form operators and the solver.  Nothing here calls the production
// prox / projection / solver code: every routine minimizes its defining
// objective numerically (golden-section or dense sampling with provable
// refinement), so agreement between the two paths is meaningful evidence.
namespace ligme::reference {

// Golden-section search for the minimizer of a unimodal function on
// [lo, hi]; returns the midpoint of the final bracket (width ≤ tol).
double golden_section_minimize(const std::function<double(double)>& f,
                               double lo, double hi, double tol = 1e-10);

// argmin_v gamma·Σ_n omega_n |v_n| + ½‖v − u‖², solved per coordinate by
// golden-section search over the bracket [min(0, u_n), max(0, u_n)] padded
// by one unit (the objective is strictly convex, hence unimodal).
RealVector prox_weighted_l1_oracle(const RealVector& u, double gamma,
                                   const WeightVector& omega);

// argmin_v gamma·Σ_n omega_n ‖(v_n, v_{N+n})‖ + ½‖v − u‖² for the stacked
// (Re, Im) layout.  Per pair, Cauchy-Schwarz reduces the 2-D problem to the
// radius along the direction of u (min over directions at fixed radius t is
// attained at t·u/‖u‖), and the resulting strictly convex 1-D objective
// gamma·omega_n·t + ½(t − ‖u‖)² is solved by golden-section search — the
// thresholding formula under test is never used.
RealVector prox_weighted_l21_oracle(const RealVector& u_hat, double gamma,
                                    const WeightVector& omega);

// Nearest point of the regular octagon conv{circumradius·(cos kπ/4,
// sin kπ/4)} by exhaustive means: interior points (all eight half-plane
// tests) are returned unchanged; otherwise each edge is sampled densely and
// the best edge's strictly convex squared distance is refined by
// golden-section search on the edge parameter.
void project_octagon_oracle(double px, double py, double circumradius,
                            double& qx, double& qy);

// ½‖y − Ax‖² + mu·Σ_l Σ_n weights[l][n]·|x_n − shifts[l][n]| evaluated with
// plain loops (no library regularizer code).
double soav_objective_reference(const RealVector& x, const RealVector& y,
                                const RealMatrix& A, double mu,
                                const std::vector<RealVector>& shifts,
                                const std::vector<WeightVector>& weights);

struct SubgradientResult {
  RealVector x;
  double objective = 0.0;
};

// Projected subgradient method for the convex (zero-coupling) model over the
// box [lo, hi]^N with the strong-convexity step 2/(m·(t+1)), m the smallest
// eigenvalue of AᵀA (must be positive); tracks and returns the best iterate.
SubgradientResult projected_subgradient_soav(
    const RealVector& y, const RealMatrix& A, double lo, double hi, double mu,
    const std::vector<RealVector>& shifts,
    const std::vector<WeightVector>& weights, long iterations);

}  // namespace ligme::reference
