#pragma once

#include "ligme/solver.hpp"

#include <optional>

// Heuristic refinements of the fixed-point solver: iterative reweighting of
// the seed-norm weights toward the alphabet values the iterate is closest to,
// and superiorization (a small perturbation toward the quantized iterate
// before each fixed-point step).  Summable perturbation schedules preserve
// the convergence guarantee; reweighting and nonsummable schedules are
// heuristics and are flagged as such in the solve report.
namespace ligme {

// Replace the weights every `period` iterations using inverse distances to
// the alphabet values, regularized by `delta`.
struct ReweightingPolicy {
  long period = 100;
  double delta = 2.220446049250313e-16;  // machine epsilon

  static ReweightingPolicy make(long period, double delta);
};

// Perturbation size β_k per iteration k.
struct SuperiorizationPolicy {
  enum class Schedule { Zero, Geometric, InversePower, Constant };
  Schedule schedule = Schedule::Zero;
  double c = 0.0;  // magnitude
  double r = 0.0;  // Geometric ratio: β_k = c·r^k
  double p = 0.0;  // InversePower exponent: β_k = c·k^{-p} (β_0 = c)

  static SuperiorizationPolicy zero();
  static SuperiorizationPolicy geometric(double c, double r);
  static SuperiorizationPolicy inverse_power(double c, double p);
  static SuperiorizationPolicy constant(double c);

  double beta(long k) const;
  // Whether Σ_k β_k < ∞, i.e. whether the convergence guarantee survives.
  bool summable() const;
};

// Inverse-distance weights (ω_n^(l) ∝ 1/(d(x_n, a_l) + delta), normalized to
// sum to one over l): per coordinate against the real alphabet values for
// real / QAM alphabets, per (Re, Im) pair against the constellation points
// for PSK.
std::vector<WeightVector> reweight(const RealVector& x,
                                   const Alphabet& alphabet, double delta);

// x + beta·(q - x) with q the per-symbol quantization of x onto the alphabet.
RealVector superiorize(const RealVector& x, const Alphabet& alphabet,
                       double beta);

// The fixed-point loop of `solve` with the two heuristics spliced in: at the
// top of iteration k the weights are replaced when k is a multiple of the
// reweighting period, then x is superiorized with β_k, then the fixed-point
// map is applied.  Step sizes are never recomputed.  With both policies
// absent (or β ≡ 0) the trajectory is bitwise identical to `solve`.
SolveReport solve_modified(const RealizedProblem& problem,
                           const StepSizes& steps, const SolverState& init,
                           const SolveOptions& options,
                           const std::optional<ReweightingPolicy>& reweighting,
                           const std::optional<SuperiorizationPolicy>& superiorization);

}  // namespace ligme
