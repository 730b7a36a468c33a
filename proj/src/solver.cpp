#include "ligme/solver.hpp"

#include "ligme/prox.hpp"
#include "loop_detail.hpp"

#include <cmath>
#include <limits>

namespace ligme {

namespace {

// Safety factor applied to power-iteration operator-norm estimates, which can
// understate the true norm by up to their relative tolerance.
constexpr double kNormInflation = 1.0 + 1e-6;

// The fixed-point map with preallocated workspace.  One instance serves one
// solve; the seed copy is mutable so iterative reweighting can swap weights
// without touching the caller's problem.
class CligmeOperator {
 public:
  CligmeOperator(const RealizedProblem& problem, const StepSizes& steps)
      : problem_(problem),
        steps_(steps),
        seed_(problem.reg.seed),
        L_(problem.reg.seed.count()),
        D_(problem.dim()),
        residual_m_(problem.A.rows()),
        grad_(D_),
        pre_x_(D_),
        coupling_(D_),
        scratch_(D_),
        relaxed_(D_),
        block_tmp_(D_) {
    const double mu = problem.reg.mu;
    require(steps.kappa > 1.0 && std::isfinite(steps.kappa),
            "step sizes: kappa must exceed 1");
    require(steps.sigma > mu * L_,
            "step sizes: sigma = " + std::to_string(steps.sigma) +
                " must exceed mu*L = " + std::to_string(mu * L_));
    const double tau_floor =
        (steps.kappa / 2.0 + 2.0 / steps.kappa) * mu *
        problem.reg.gme.max_btb_norm();
    require(steps.tau > 0.0 && steps.tau >= tau_floor * (1.0 - 1e-9),
            "step sizes: tau = " + std::to_string(steps.tau) +
                " is below (kappa/2 + 2/kappa)*mu*max_l ||B_l||^2 = " +
                std::to_string(tau_floor));
    require(steps.sigma - mu * L_ >=
                (steps.kappa / 2.0) * problem.a_opnorm_sq * (1.0 - 1e-6),
            "step sizes: (sigma - mu*L)*Id - (kappa/2)*A'A is not positive "
            "semidefinite (sigma too small for ||A||^2 = " +
                std::to_string(problem.a_opnorm_sq) + ")");
  }

  // Replaces the seed weights (iterative reweighting); revalidates the
  // sum-to-one invariant by rebuilding the seed.
  void set_weights(std::vector<WeightVector> weights) {
    seed_ = seed_.variant == SeedNorm::WeightedL1
                ? SeedRegularizer::weighted_l1(seed_.shifts, std::move(weights))
                : SeedRegularizer::weighted_l21(seed_.shifts, std::move(weights));
  }

  // One application of the map, in place; updates the iteration counter and
  // the plain-norm fixed-point residual.
  void step(SolverState& st) {
    const double mu = problem_.reg.mu;
    const double sigma = steps_.sigma, tau = steps_.tau;
    const GmeSpec& gme = problem_.reg.gme;

    // x half: gradient of the quadratic plus the coupling correction.
    residual_m_.noalias() = problem_.A * st.x;
    residual_m_ -= problem_.y;
    grad_.noalias() = problem_.A.transpose() * residual_m_;
    coupling_sum(st.x, st.v, coupling_);
    for (const auto& w_l : st.w.blocks) coupling_ -= w_l;
    pre_x_ = st.x - grad_ / sigma + (mu / sigma) * coupling_;
    RealVector x_new = project_constellation_hull(pre_x_, problem_.hull);

    // 2x⁺ - x drives both auxiliary updates.
    relaxed_ = 2.0 * x_new - st.x;

    double res_sq = (x_new - st.x).squaredNorm();
    for (int l = 0; l < L_; ++l) {
      const auto lu = static_cast<std::size_t>(l);
      const RealVector& shift = seed_.shifts[lu];
      RealVector& v_l = st.v.blocks[lu];
      RealVector& w_l = st.w.blocks[lu];

      scratch_ = relaxed_ - v_l;
      gme.apply_btb(l, scratch_, block_tmp_);
      // v_l⁺ = s_l + Prox_{(mu/tau)Ψ_l}( (mu/tau)·B'B(2x⁺-x-v_l) + v_l - s_l )
      scratch_ = (mu / tau) * block_tmp_ + v_l - shift;
      block_tmp_ = seed_.prox_seed(l, mu / tau, scratch_);
      block_tmp_ += shift;
      res_sq += (block_tmp_ - v_l).squaredNorm();
      v_l.swap(block_tmp_);

      // w_l⁺ = (Id - Prox_{Ψ_l})(2x⁺ - x + w_l - s_l)
      scratch_ = relaxed_ + w_l - shift;
      block_tmp_ = scratch_ - seed_.prox_seed(l, 1.0, scratch_);
      res_sq += (block_tmp_ - w_l).squaredNorm();
      w_l.swap(block_tmp_);
    }

    st.x.swap(x_new);
    st.fixed_point_residual = std::sqrt(res_sq);
    ++st.iteration;
  }

  const SeedRegularizer& seed() const { return seed_; }

 private:
  // out = Σ_l B_lᵀB_l (x - v_l), specialised per coupling kind so structured
  // couplings cost a single Gram matvec.
  void coupling_sum(const RealVector& x, const ProductVector& v,
                    RealVector& out) {
    const GmeSpec& gme = problem_.reg.gme;
    switch (gme.kind) {
      case GmeSpec::Kind::Zero:
        out.setZero();
        return;
      case GmeSpec::Kind::ScaledIdentity: {
        out = static_cast<double>(L_) * x;
        for (const auto& v_l : v.blocks) out -= v_l;
        out *= gme.b * gme.b;
        return;
      }
      case GmeSpec::Kind::ScaledSensing: {
        scratch_.setZero();
        double gamma_sum = 0.0;
        for (int l = 0; l < L_; ++l) {
          const double c = gme.gammas[l] / gme.mu_at_build;
          gamma_sum += c;
          scratch_ += c * v.blocks[static_cast<std::size_t>(l)];
        }
        scratch_ = gamma_sum * x - scratch_;
        out.noalias() = gme.sensing_gram * scratch_;
        return;
      }
      case GmeSpec::Kind::Explicit: {
        out.setZero();
        for (int l = 0; l < L_; ++l) {
          scratch_ = x - v.blocks[static_cast<std::size_t>(l)];
          out.noalias() +=
              gme.btb_cache[static_cast<std::size_t>(l)] * scratch_;
        }
        return;
      }
    }
  }

  const RealizedProblem& problem_;
  const StepSizes steps_;
  SeedRegularizer seed_;
  const int L_;
  const Eigen::Index D_;
  RealVector residual_m_, grad_, pre_x_, coupling_, scratch_, relaxed_,
      block_tmp_;
};

void validate_state(const SolverState& st, const RealizedProblem& problem) {
  const int L = problem.reg.seed.count();
  require_dims(st.x.size() == problem.dim(),
               "solver state: x has dimension " + std::to_string(st.x.size()) +
                   ", problem expects " + std::to_string(problem.dim()));
  require_dims(st.v.count() == L && st.w.count() == L,
               "solver state: expected " + std::to_string(L) +
                   " auxiliary blocks, got v:" + std::to_string(st.v.count()) +
                   " w:" + std::to_string(st.w.count()));
  require_finite(st.x, "solver state: x");
  for (const auto& b : st.v.blocks) {
    require_dims(b.size() == problem.dim(), "solver state: v block dimension");
    require_finite(b, "solver state: v");
  }
  for (const auto& b : st.w.blocks) {
    require_dims(b.size() == problem.dim(), "solver state: w block dimension");
    require_finite(b, "solver state: w");
  }
}

}  // namespace

RealizedProblem RealizedProblem::make(RealVector y, RealMatrix A,
                                      HullDescriptor hull,
                                      LigmeRegularizer reg, Alphabet alphabet,
                                      std::optional<double> a_opnorm_sq) {
  require_finite(y, "RealizedProblem: y");
  require_finite(A, "RealizedProblem: A");
  require_dims(y.size() == A.rows(),
               "RealizedProblem: y has dimension " + std::to_string(y.size()) +
                   " but A has " + std::to_string(A.rows()) + " rows");
  require_dims(A.cols() == reg.seed.dim(),
               "RealizedProblem: A has " + std::to_string(A.cols()) +
                   " columns but the regularizer acts on dimension " +
                   std::to_string(reg.seed.dim()));
  require_dims(hull.ambient_dim == A.cols(),
               "RealizedProblem: hull lives in dimension " +
                   std::to_string(hull.ambient_dim) + " but A has " +
                   std::to_string(A.cols()) + " columns");
  if (alphabet.is_complex())
    require_dims(A.cols() % 2 == 0,
                 "RealizedProblem: complex alphabet needs an even stacked "
                 "dimension, got " + std::to_string(A.cols()));
  RealizedProblem p;
  p.y = std::move(y);
  p.A = std::move(A);
  p.hull = hull;
  p.reg = std::move(reg);
  p.alphabet = std::move(alphabet);
  p.a_opnorm_sq =
      a_opnorm_sq ? *a_opnorm_sq : std::pow(operator_norm(p.A), 2);
  require(p.a_opnorm_sq >= 0.0 && std::isfinite(p.a_opnorm_sq),
          "RealizedProblem: invalid operator-norm hint");
  return p;
}

StepSizes default_step_sizes(const RealizedProblem& problem, double kappa) {
  require(kappa > 1.0 && std::isfinite(kappa),
          "default_step_sizes: kappa must exceed 1");
  const double mu = problem.reg.mu;
  const int L = problem.reg.seed.count();
  StepSizes s;
  s.kappa = kappa;
  s.sigma = (kappa / 2.0) * problem.a_opnorm_sq * kNormInflation + mu * L +
            (kappa - 1.0);
  s.tau = (kappa / 2.0 + 2.0 / kappa) * mu *
              problem.reg.gme.max_btb_norm() * kNormInflation +
          (kappa - 1.0);
  return s;
}

SolverState SolverState::zero(const RealizedProblem& problem) {
  SolverState st;
  const int L = problem.reg.seed.count();
  st.x = RealVector::Zero(problem.dim());
  st.v = ProductVector::zero(L, problem.dim());
  st.w = ProductVector::zero(L, problem.dim());
  st.iteration = 0;
  st.fixed_point_residual = std::numeric_limits<double>::infinity();
  return st;
}

SolverState apply_T_cLiGME(const SolverState& state,
                           const RealizedProblem& problem,
                           const StepSizes& steps) {
  validate_state(state, problem);
  CligmeOperator op(problem, steps);
  SolverState next = state;
  op.step(next);
  return next;
}

double objective_value(const RealVector& x, const RealizedProblem& problem) {
  const bool closed_form =
      (problem.reg.gme.kind == GmeSpec::Kind::ScaledIdentity ||
       problem.reg.gme.kind == GmeSpec::Kind::Zero) &&
      problem.reg.seed.variant == SeedNorm::WeightedL1;
  const double theta = closed_form
                           ? eval_ligme_closed_form(x, problem.reg)
                           : eval_ligme_iterative(x, problem.reg);
  return 0.5 * (problem.y - problem.A * x).squaredNorm() +
         problem.reg.mu * theta;
}

RealMatrix assemble_p_matrix(const RealizedProblem& problem,
                             const StepSizes& steps) {
  const Eigen::Index D = problem.dim();
  const int L = problem.reg.seed.count();
  const double mu = problem.reg.mu;
  const Eigen::Index total = D + 2 * L * D;
  RealMatrix P = RealMatrix::Zero(total, total);
  P.topLeftCorner(D, D) = steps.sigma * RealMatrix::Identity(D, D);
  for (int l = 0; l < L; ++l) {
    const Eigen::Index v_off = D + l * D;
    const Eigen::Index w_off = D + (L + l) * D;
    const RealMatrix coupling = -mu * problem.reg.gme.btb_matrix(l);
    P.block(0, v_off, D, D) = coupling;
    P.block(v_off, 0, D, D) = coupling.transpose();
    P.block(0, w_off, D, D) = -mu * RealMatrix::Identity(D, D);
    P.block(w_off, 0, D, D) = -mu * RealMatrix::Identity(D, D);
    P.block(v_off, v_off, D, D) = steps.tau * RealMatrix::Identity(D, D);
    P.block(w_off, w_off, D, D) = mu * RealMatrix::Identity(D, D);
  }
  return P;
}

double p_quadratic_form(const RealizedProblem& problem, const StepSizes& steps,
                        const RealVector& dx, const ProductVector& dv,
                        const ProductVector& dw) {
  const int L = problem.reg.seed.count();
  require_dims(dv.count() == L && dw.count() == L,
               "p_quadratic_form: displacement block counts do not match the "
               "problem");
  const double mu = problem.reg.mu;
  double q = steps.sigma * dx.squaredNorm() + steps.tau * dv.squared_norm() +
             mu * dw.squared_norm();
  RealVector tmp(problem.dim());
  for (int l = 0; l < L; ++l) {
    problem.reg.gme.apply_btb(l, dv.blocks[static_cast<std::size_t>(l)], tmp);
    q -= 2.0 * mu * dx.dot(tmp);
    q -= 2.0 * mu * dx.dot(dw.blocks[static_cast<std::size_t>(l)]);
  }
  return q;
}

SolveReport solve(const RealizedProblem& problem, const StepSizes& steps,
                  const SolverState& init, const SolveOptions& options) {
  return detail::fixed_point_loop(problem, steps, init, options, std::nullopt,
                                  std::nullopt);
}

namespace detail {

SolveReport fixed_point_loop(
    const RealizedProblem& problem, const StepSizes& steps,
    const SolverState& init, const SolveOptions& options,
    const std::optional<ReweightingPolicy>& reweighting,
    const std::optional<SuperiorizationPolicy>& superiorization) {
  require(options.max_iter >= 0, "solve: max_iter must be nonnegative");
  require(options.residual_tol >= 0.0, "solve: residual_tol must be nonnegative");
  if (!problem.certified() && !options.allow_uncertified) {
    const std::string witness =
        problem.reg.gme.certification
            ? " (certified min eigenvalue " +
                  std::to_string(problem.reg.gme.certification->min_eigenvalue) +
                  " < 0)"
            : " (no certification has been run)";
    throw CertificationError(
        "solve: refusing a problem without a positive overall-convexity "
        "certificate" + witness +
        "; run certify_overall_convexity first or set allow_uncertified");
  }
  validate_state(init, problem);

  CligmeOperator op(problem, steps);
  SolverState st = init;
  SolveReport report;
  report.heuristic_modifications =
      reweighting.has_value() ||
      (superiorization.has_value() && !superiorization->summable());
  report.residual_history.reserve(static_cast<std::size_t>(options.max_iter));

  report.termination = Termination::MaxIterations;
  for (long k = 0; k < options.max_iter; ++k) {
    if (reweighting && st.iteration % reweighting->period == 0)
      op.set_weights(reweight(st.x, problem.alphabet, reweighting->delta));
    if (superiorization) {
      const double beta = superiorization->beta(st.iteration);
      if (beta != 0.0)
        st.x = superiorize(st.x, problem.alphabet, beta);
    }
    op.step(st);
    report.residual_history.push_back(st.fixed_point_residual);
    if (options.record_objective)
      report.objective_history.push_back(objective_value(st.x, problem));
    if (options.residual_tol > 0.0 &&
        st.fixed_point_residual < options.residual_tol) {
      report.termination = Termination::ResidualBelowTol;
      break;
    }
  }

  report.x_final = st.x;
  report.iterations = st.iteration - init.iteration;
  QuantizeResult q = quantize_to_alphabet(st.x, problem.alphabet);
  report.x_quantized = std::move(q.values);
  report.quantized_indices = std::move(q.indices);
  return report;
}

}  // namespace detail

}  // namespace ligme
