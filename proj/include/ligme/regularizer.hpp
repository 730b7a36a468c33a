#pragma once

#include "ligme/constellation.hpp"
#include "ligme/linalg.hpp"
#include "ligme/types.hpp"

#include <optional>
#include <vector>

// The discreteness-promoting regularizer: a sum of weighted norms of shifted
// copies of the unknown (one shift per alphabet value), made nonconvex by a
// generalized Moreau enhancement
//
//   Theta(x) = Σ_l [ Ψ_l(x - s_l) - min_v ( Ψ_l(v) + ½‖B_l(x - s_l - v)‖² ) ]
//
// with Ψ_l a weighted l1 or l2,1 norm.  B_l = O recovers the plain convex
// sum-of-absolute-values penalty; B_l = sqrt(gamma_l/mu)·A keeps the overall
// least-squares-plus-penalty objective convex whenever Σ_l gamma_l ≤ 1.
namespace ligme {

enum class SeedNorm { WeightedL1, WeightedL21 };

// The convex seed Ψ: per shift l, a weight vector and a shift vector.
// Weighted l1 weights have one entry per coordinate; weighted l2,1 weights
// have one entry per (Re, Im) pair of the stacked layout.  Across shifts the
// weights of each coordinate (or pair) sum to one.
struct SeedRegularizer {
  SeedNorm variant = SeedNorm::WeightedL1;
  std::vector<RealVector> shifts;
  std::vector<WeightVector> weights;

  static SeedRegularizer weighted_l1(std::vector<RealVector> shifts,
                                     std::vector<WeightVector> weights);
  static SeedRegularizer weighted_l21(std::vector<RealVector> shifts,
                                      std::vector<WeightVector> weights);

  // Canonical seed for an alphabet over `num_symbols` symbols with uniform
  // weights 1/L: one shift per real level (real / QAM, weighted l1 over the
  // stacked coordinates) or per constellation point (PSK, weighted l2,1 with
  // shifts (Re(a)·1; Im(a)·1)).
  static SeedRegularizer for_alphabet(const Alphabet& alphabet,
                                      Eigen::Index num_symbols);

  int count() const { return static_cast<int>(shifts.size()); }
  Eigen::Index dim() const { return shifts.empty() ? 0 : shifts[0].size(); }

  // Value of the l-th unshifted weighted norm at u.
  double seed_norm(int l, const RealVector& u) const;
  // prox of gamma times the l-th unshifted weighted norm.
  RealVector prox_seed(int l, double gamma, const RealVector& u) const;

 private:
  void validate() const;
};

// The family of coupling operators B_l of the Moreau enhancement.
struct GmeSpec {
  enum class Kind { Zero, ScaledIdentity, ScaledSensing, Explicit };

  Kind kind = Kind::Zero;
  // ScaledIdentity: B_l = b·Id for every l.
  double b = 0.0;
  // ScaledSensing: B_l = sqrt(gamma_l/mu)·A; the Gram matrix AᵀA and the
  // squared operator norm of A are precomputed at build time.
  RealVector gammas;
  RealMatrix sensing_gram;
  double sensing_opnorm_sq = 0.0;
  double mu_at_build = 0.0;
  // Explicit: arbitrary per-shift matrices, with B_lᵀB_l and ‖B_l‖²
  // precomputed at construction.
  std::vector<RealMatrix> matrices;
  std::vector<RealMatrix> btb_cache;
  std::vector<double> opnorm_sq_cache;

  int block_count = 0;
  Eigen::Index dimension = 0;

  // Outcome of the most recent overall-convexity certification, if any.
  std::optional<PsdCertification> certification;

  static GmeSpec zero(int count, Eigen::Index dim);
  static GmeSpec scaled_identity(double b, int count, Eigen::Index dim);
  static GmeSpec explicit_matrices(std::vector<RealMatrix> mats);

  int count() const { return block_count; }
  Eigen::Index dim() const { return dimension; }
  bool certified() const { return certification && certification->psd; }

  // out = B_lᵀB_l · u.
  void apply_btb(int l, const RealVector& u, RealVector& out) const;
  // Σ_l B_lᵀB_l · u_l over a product vector.
  RealVector btb_sum(const ProductVector& u) const;
  // Dense B_lᵀB_l (used for diagnostics and small-scale certification).
  RealMatrix btb_matrix(int l) const;
  // Σ_l B_lᵀB_l as a dense matrix.
  RealMatrix penalty_matrix() const;
  // max_l ‖B_l‖² (squared operator norm).
  double max_btb_norm() const;
  // ‖B_l‖² for one block.
  double btb_norm(int l) const;
};

// B_l = sqrt(total_gamma/(L·mu)) · A for every l; with total_gamma ≤ 1 the
// overall objective stays convex for any mu > 0.
GmeSpec build_gme_scaled_sensing(const RealMatrix& A, double mu, int count,
                                 double total_gamma);

// Same coupling built from a precomputed Gram matrix AᵀA and squared operator
// norm ‖A‖²; callers that already hold both (e.g. per-realization caches)
// avoid recomputing them.
GmeSpec build_gme_scaled_sensing_from_gram(RealMatrix gram, double a_opnorm_sq,
                                           double mu, int count,
                                           double total_gamma);

// Checks AᵀA - mu·Σ_l B_lᵀB_l ⪰ O by dense symmetric eigendecomposition and
// stamps the outcome (including the smallest-eigenvalue witness) into `gme`.
PsdCertification certify_overall_convexity(const RealMatrix& A, GmeSpec& gme,
                                           double mu, double tol = 1e-10);

// The full regularizer Theta with its convexity-controlling weight mu.
struct LigmeRegularizer {
  SeedRegularizer seed;
  GmeSpec gme;
  double mu = 0.0;

  static LigmeRegularizer make(SeedRegularizer seed, GmeSpec gme, double mu);
};

// Σ_l Ψ_l(x - s_l): the plain convex sum-of-shifted-norms value.
double eval_soav(const RealVector& x, const SeedRegularizer& seed);

// Minimax concave penalty of a scalar:
//   |x| - (gamma/2)·x²  for |x| ≤ 1/gamma,   1/(2·gamma)  otherwise.
double eval_mcp(double x, double gamma_mcp);

// Theta(x) in closed form; valid when the coupling is ScaledIdentity and the
// seed is weighted l1, where Theta separates into per-coordinate sums of
// minimax concave penalties with slope b²/omega.
double eval_ligme_closed_form(const RealVector& x,
                              const LigmeRegularizer& reg);

// Theta(x) by solving the inner minimization of each shifted block with
// proximal-gradient iterations (fixed step 1/‖B_l‖²), stopping when the
// inner objective decreases by less than `tol` between sweeps.  Throws
// ConvergenceError carrying the best value after `max_iter` inner steps.
double eval_ligme_iterative(const RealVector& x, const LigmeRegularizer& reg,
                            double tol = 1e-10, long max_iter = 100000);

// Smallest ScaledIdentity coefficient b beyond which every alphabet value is
// an isolated local minimizer of the per-coordinate penalty:
// sqrt(2·omega_max / d_min) for a real alphabet with at least two values.
double isolated_minimizer_threshold(const Alphabet& alphabet,
                                    const std::vector<WeightVector>& weights);

struct GridSpec {
  double lo = 0.0, hi = 0.0, step = 0.0;
};

struct GridMinimizer {
  double location = 0.0;
  double value = 0.0;
};

// Strict local minimizers of the per-coordinate penalty of coordinate n over
// the uniform grid described by `grid` (value strictly below both neighbors).
std::vector<GridMinimizer> scan_local_minimizers(const LigmeRegularizer& reg,
                                                 Eigen::Index coordinate,
                                                 const GridSpec& grid);

}  // namespace ligme
