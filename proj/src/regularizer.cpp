#include "ligme/regularizer.hpp"

#include "ligme/prox.hpp"

#include <algorithm>
#include <cmath>

namespace ligme {

namespace {

constexpr double kWeightSumTol = 1e-9;

// MCP with the b = 0 (purely convex) limit folded in.
double mcp_or_abs(double t, double gamma_mcp) {
  if (gamma_mcp == 0.0) return std::abs(t);
  return eval_mcp(t, gamma_mcp);
}

}  // namespace

void SeedRegularizer::validate() const {
  require(!shifts.empty(), "SeedRegularizer: at least one shift is required");
  require(shifts.size() == weights.size(),
          "SeedRegularizer: " + std::to_string(shifts.size()) + " shifts vs " +
              std::to_string(weights.size()) + " weight vectors");
  const Eigen::Index d = shifts[0].size();
  require(d > 0, "SeedRegularizer: zero-dimensional shifts");
  const Eigen::Index groups =
      variant == SeedNorm::WeightedL1 ? d : d / 2;
  if (variant == SeedNorm::WeightedL21)
    require_dims(d % 2 == 0,
                 "SeedRegularizer: weighted l2,1 needs even stacked dimension");
  RealVector sums = RealVector::Zero(groups);
  for (std::size_t l = 0; l < shifts.size(); ++l) {
    require_dims(shifts[l].size() == d,
                 "SeedRegularizer: shift " + std::to_string(l) +
                     " has dimension " + std::to_string(shifts[l].size()) +
                     ", expected " + std::to_string(d));
    require_finite(shifts[l], "SeedRegularizer: shift");
    require_dims(weights[l].size() == groups,
                 "SeedRegularizer: weight vector " + std::to_string(l) +
                     " has dimension " + std::to_string(weights[l].size()) +
                     ", expected " + std::to_string(groups));
    for (Eigen::Index n = 0; n < groups; ++n)
      require(weights[l][n] > 0.0 && std::isfinite(weights[l][n]),
              "SeedRegularizer: weights must be strictly positive and finite");
    sums += weights[l];
  }
  for (Eigen::Index n = 0; n < groups; ++n)
    require(std::abs(sums[n] - 1.0) <= kWeightSumTol,
            "SeedRegularizer: weights of coordinate " + std::to_string(n) +
                " sum to " + std::to_string(sums[n]) + ", expected 1");
}

SeedRegularizer SeedRegularizer::weighted_l1(std::vector<RealVector> shifts,
                                             std::vector<WeightVector> weights) {
  SeedRegularizer s;
  s.variant = SeedNorm::WeightedL1;
  s.shifts = std::move(shifts);
  s.weights = std::move(weights);
  s.validate();
  return s;
}

SeedRegularizer SeedRegularizer::weighted_l21(std::vector<RealVector> shifts,
                                              std::vector<WeightVector> weights) {
  SeedRegularizer s;
  s.variant = SeedNorm::WeightedL21;
  s.shifts = std::move(shifts);
  s.weights = std::move(weights);
  s.validate();
  return s;
}

SeedRegularizer SeedRegularizer::for_alphabet(const Alphabet& alphabet,
                                              Eigen::Index num_symbols) {
  require(num_symbols > 0, "SeedRegularizer::for_alphabet: num_symbols must be positive");
  std::vector<RealVector> shifts;
  std::vector<WeightVector> weights;
  switch (alphabet.modulation) {
    case Modulation::Real: {
      const int L = alphabet.size();
      for (const auto& p : alphabet.points) {
        shifts.push_back(RealVector::Constant(num_symbols, p.real()));
        weights.push_back(WeightVector::Constant(num_symbols, 1.0 / L));
      }
      return weighted_l1(std::move(shifts), std::move(weights));
    }
    case Modulation::Qam: {
      // One shift per real amplitude level, acting on all 2N stacked
      // coordinates at once.
      const int L = static_cast<int>(alphabet.axis_levels.size());
      for (int l = 0; l < L; ++l) {
        shifts.push_back(
            RealVector::Constant(2 * num_symbols, alphabet.axis_levels[l]));
        weights.push_back(WeightVector::Constant(2 * num_symbols, 1.0 / L));
      }
      return weighted_l1(std::move(shifts), std::move(weights));
    }
    case Modulation::Psk: {
      const int L = alphabet.size();
      for (const auto& p : alphabet.points) {
        RealVector s(2 * num_symbols);
        s.head(num_symbols).setConstant(p.real());
        s.tail(num_symbols).setConstant(p.imag());
        shifts.push_back(std::move(s));
        weights.push_back(WeightVector::Constant(num_symbols, 1.0 / L));
      }
      return weighted_l21(std::move(shifts), std::move(weights));
    }
  }
  throw std::logic_error("SeedRegularizer::for_alphabet: unknown modulation");
}

double SeedRegularizer::seed_norm(int l, const RealVector& u) const {
  require(l >= 0 && l < count(), "SeedRegularizer::seed_norm: shift index out of range");
  require_dims(u.size() == dim(), "SeedRegularizer::seed_norm: input has dimension " +
                                      std::to_string(u.size()) + ", expected " +
                                      std::to_string(dim()));
  const WeightVector& w = weights[static_cast<std::size_t>(l)];
  if (variant == SeedNorm::WeightedL1)
    return u.cwiseAbs().dot(w);
  const Eigen::Index n_pairs = u.size() / 2;
  double s = 0.0;
  for (Eigen::Index n = 0; n < n_pairs; ++n)
    s += w[n] * std::hypot(u[n], u[n_pairs + n]);
  return s;
}

RealVector SeedRegularizer::prox_seed(int l, double gamma,
                                      const RealVector& u) const {
  require(l >= 0 && l < count(), "SeedRegularizer::prox_seed: shift index out of range");
  const WeightVector& w = weights[static_cast<std::size_t>(l)];
  return variant == SeedNorm::WeightedL1 ? prox_weighted_l1(u, gamma, w)
                                         : prox_weighted_l21(u, gamma, w);
}

GmeSpec GmeSpec::zero(int count, Eigen::Index dim) {
  require(count >= 1 && dim >= 1, "GmeSpec::zero: count and dim must be positive");
  GmeSpec g;
  g.kind = Kind::Zero;
  g.block_count = count;
  g.dimension = dim;
  return g;
}

GmeSpec GmeSpec::scaled_identity(double b, int count, Eigen::Index dim) {
  require(count >= 1 && dim >= 1,
          "GmeSpec::scaled_identity: count and dim must be positive");
  require(b >= 0.0 && std::isfinite(b),
          "GmeSpec::scaled_identity: coefficient must be finite and nonnegative");
  GmeSpec g;
  g.kind = Kind::ScaledIdentity;
  g.b = b;
  g.block_count = count;
  g.dimension = dim;
  return g;
}

GmeSpec GmeSpec::explicit_matrices(std::vector<RealMatrix> mats) {
  require(!mats.empty(), "GmeSpec::explicit_matrices: at least one matrix required");
  GmeSpec g;
  g.kind = Kind::Explicit;
  g.block_count = static_cast<int>(mats.size());
  g.dimension = mats[0].cols();
  require(g.dimension >= 1, "GmeSpec::explicit_matrices: zero-column matrix");
  for (const auto& m : mats) {
    require_dims(m.cols() == g.dimension,
                 "GmeSpec::explicit_matrices: column counts differ (" +
                     std::to_string(m.cols()) + " vs " +
                     std::to_string(g.dimension) + ")");
    require_finite(m, "GmeSpec::explicit_matrices: matrix");
  }
  g.matrices = std::move(mats);
  for (const auto& m : g.matrices) {
    g.btb_cache.push_back(m.transpose() * m);
    g.opnorm_sq_cache.push_back(m.squaredNorm() == 0.0
                                    ? 0.0
                                    : std::pow(operator_norm(m), 2));
  }
  return g;
}

void GmeSpec::apply_btb(int l, const RealVector& u, RealVector& out) const {
  require(l >= 0 && l < block_count, "GmeSpec::apply_btb: block index out of range");
  require_dims(u.size() == dimension, "GmeSpec::apply_btb: input has dimension " +
                                          std::to_string(u.size()) +
                                          ", expected " +
                                          std::to_string(dimension));
  switch (kind) {
    case Kind::Zero:
      out = RealVector::Zero(dimension);
      return;
    case Kind::ScaledIdentity:
      out = (b * b) * u;
      return;
    case Kind::ScaledSensing:
      out.noalias() = (gammas[l] / mu_at_build) * (sensing_gram * u);
      return;
    case Kind::Explicit:
      out.noalias() = btb_cache[static_cast<std::size_t>(l)] * u;
      return;
  }
}

RealVector GmeSpec::btb_sum(const ProductVector& u) const {
  require_dims(u.count() == block_count,
               "GmeSpec::btb_sum: product vector has " +
                   std::to_string(u.count()) + " blocks, expected " +
                   std::to_string(block_count));
  RealVector out = RealVector::Zero(dimension);
  switch (kind) {
    case Kind::Zero:
      return out;
    case Kind::ScaledIdentity: {
      for (const auto& blk : u.blocks) out += blk;
      out *= b * b;
      return out;
    }
    case Kind::ScaledSensing: {
      RealVector weighted = RealVector::Zero(dimension);
      for (int l = 0; l < block_count; ++l)
        weighted += (gammas[l] / mu_at_build) * u.blocks[static_cast<std::size_t>(l)];
      out.noalias() = sensing_gram * weighted;
      return out;
    }
    case Kind::Explicit: {
      for (int l = 0; l < block_count; ++l)
        out.noalias() +=
            btb_cache[static_cast<std::size_t>(l)] * u.blocks[static_cast<std::size_t>(l)];
      return out;
    }
  }
  return out;
}

RealMatrix GmeSpec::btb_matrix(int l) const {
  require(l >= 0 && l < block_count, "GmeSpec::btb_matrix: block index out of range");
  switch (kind) {
    case Kind::Zero:
      return RealMatrix::Zero(dimension, dimension);
    case Kind::ScaledIdentity:
      return (b * b) * RealMatrix::Identity(dimension, dimension);
    case Kind::ScaledSensing:
      return (gammas[l] / mu_at_build) * sensing_gram;
    case Kind::Explicit:
      return btb_cache[static_cast<std::size_t>(l)];
  }
  throw std::logic_error("GmeSpec::btb_matrix: unknown kind");
}

RealMatrix GmeSpec::penalty_matrix() const {
  switch (kind) {
    case Kind::Zero:
      return RealMatrix::Zero(dimension, dimension);
    case Kind::ScaledIdentity:
      return (block_count * b * b) * RealMatrix::Identity(dimension, dimension);
    case Kind::ScaledSensing:
      return (gammas.sum() / mu_at_build) * sensing_gram;
    case Kind::Explicit: {
      RealMatrix s = RealMatrix::Zero(dimension, dimension);
      for (const auto& m : btb_cache) s += m;
      return s;
    }
  }
  throw std::logic_error("GmeSpec::penalty_matrix: unknown kind");
}

double GmeSpec::btb_norm(int l) const {
  require(l >= 0 && l < block_count, "GmeSpec::btb_norm: block index out of range");
  switch (kind) {
    case Kind::Zero:
      return 0.0;
    case Kind::ScaledIdentity:
      return b * b;
    case Kind::ScaledSensing:
      return (gammas[l] / mu_at_build) * sensing_opnorm_sq;
    case Kind::Explicit:
      return opnorm_sq_cache[static_cast<std::size_t>(l)];
  }
  throw std::logic_error("GmeSpec::btb_norm: unknown kind");
}

double GmeSpec::max_btb_norm() const {
  double m = 0.0;
  for (int l = 0; l < block_count; ++l) m = std::max(m, btb_norm(l));
  return m;
}

GmeSpec build_gme_scaled_sensing(const RealMatrix& A, double mu, int count,
                                 double total_gamma) {
  require(A.size() > 0, "build_gme_scaled_sensing: empty sensing matrix");
  require_finite(A, "build_gme_scaled_sensing: sensing matrix");
  return build_gme_scaled_sensing_from_gram(A.transpose() * A,
                                            std::pow(operator_norm(A), 2), mu,
                                            count, total_gamma);
}

GmeSpec build_gme_scaled_sensing_from_gram(RealMatrix gram, double a_opnorm_sq,
                                           double mu, int count,
                                           double total_gamma) {
  require(gram.size() > 0 && gram.rows() == gram.cols(),
          "build_gme_scaled_sensing: Gram matrix must be square");
  require(a_opnorm_sq >= 0.0 && std::isfinite(a_opnorm_sq),
          "build_gme_scaled_sensing: squared norm must be nonnegative");
  require(mu > 0.0 && std::isfinite(mu),
          "build_gme_scaled_sensing: mu must be positive");
  require(count >= 1, "build_gme_scaled_sensing: count must be positive");
  require(total_gamma > 0.0 && total_gamma <= 1.0,
          "build_gme_scaled_sensing: total_gamma must lie in (0, 1], got " +
              std::to_string(total_gamma));
  GmeSpec g;
  g.kind = GmeSpec::Kind::ScaledSensing;
  g.block_count = count;
  g.dimension = gram.cols();
  g.gammas = RealVector::Constant(count, total_gamma / count);
  g.sensing_gram = std::move(gram);
  g.sensing_opnorm_sq = a_opnorm_sq;
  g.mu_at_build = mu;
  return g;
}

PsdCertification certify_overall_convexity(const RealMatrix& A, GmeSpec& gme,
                                           double mu, double tol) {
  require(mu > 0.0 && std::isfinite(mu),
          "certify_overall_convexity: mu must be positive");
  require_dims(A.cols() == gme.dim(),
               "certify_overall_convexity: sensing matrix has " +
                   std::to_string(A.cols()) + " columns but coupling acts on "
                   "dimension " + std::to_string(gme.dim()));
  if (gme.kind == GmeSpec::Kind::ScaledSensing)
    require(std::abs(mu - gme.mu_at_build) <=
                1e-12 * std::max(1.0, std::abs(gme.mu_at_build)),
            "certify_overall_convexity: coupling was built for mu = " +
                std::to_string(gme.mu_at_build) + ", certification asked for " +
                std::to_string(mu));
  const RealMatrix S = A.transpose() * A - mu * gme.penalty_matrix();
  const PsdCertification cert = min_eigenvalue_psd_check(S, tol);
  gme.certification = cert;
  return cert;
}

LigmeRegularizer LigmeRegularizer::make(SeedRegularizer seed, GmeSpec gme,
                                        double mu) {
  require(mu > 0.0 && std::isfinite(mu), "LigmeRegularizer: mu must be positive");
  require_dims(seed.dim() == gme.dim(),
               "LigmeRegularizer: seed acts on dimension " +
                   std::to_string(seed.dim()) + " but coupling on " +
                   std::to_string(gme.dim()));
  require_dims(seed.count() == gme.count(),
               "LigmeRegularizer: " + std::to_string(seed.count()) +
                   " seed shifts vs " + std::to_string(gme.count()) +
                   " coupling blocks");
  if (gme.kind == GmeSpec::Kind::ScaledSensing)
    require(std::abs(mu - gme.mu_at_build) <=
                1e-12 * std::max(1.0, std::abs(gme.mu_at_build)),
            "LigmeRegularizer: coupling was built for mu = " +
                std::to_string(gme.mu_at_build) + " but regularizer uses mu = " +
                std::to_string(mu));
  LigmeRegularizer r;
  r.seed = std::move(seed);
  r.gme = std::move(gme);
  r.mu = mu;
  return r;
}

double eval_soav(const RealVector& x, const SeedRegularizer& seed) {
  require_dims(x.size() == seed.dim(),
               "eval_soav: input has dimension " + std::to_string(x.size()) +
                   ", expected " + std::to_string(seed.dim()));
  double s = 0.0;
  for (int l = 0; l < seed.count(); ++l)
    s += seed.seed_norm(l, x - seed.shifts[static_cast<std::size_t>(l)]);
  return s;
}

double eval_mcp(double x, double gamma_mcp) {
  require(gamma_mcp > 0.0 && std::isfinite(gamma_mcp),
          "eval_mcp: gamma must be positive");
  const double a = std::abs(x);
  if (a <= 1.0 / gamma_mcp) return a - 0.5 * gamma_mcp * x * x;
  return 0.5 / gamma_mcp;
}

double eval_ligme_closed_form(const RealVector& x,
                              const LigmeRegularizer& reg) {
  require(reg.gme.kind == GmeSpec::Kind::ScaledIdentity ||
              reg.gme.kind == GmeSpec::Kind::Zero,
          "eval_ligme_closed_form: closed form needs a ScaledIdentity (or zero) "
          "coupling");
  require(reg.seed.variant == SeedNorm::WeightedL1,
          "eval_ligme_closed_form: closed form needs a weighted l1 seed");
  require_dims(x.size() == reg.seed.dim(),
               "eval_ligme_closed_form: input has dimension " +
                   std::to_string(x.size()) + ", expected " +
                   std::to_string(reg.seed.dim()));
  const double b2 =
      reg.gme.kind == GmeSpec::Kind::Zero ? 0.0 : reg.gme.b * reg.gme.b;
  double total = 0.0;
  for (int l = 0; l < reg.seed.count(); ++l) {
    const RealVector& shift = reg.seed.shifts[static_cast<std::size_t>(l)];
    const WeightVector& w = reg.seed.weights[static_cast<std::size_t>(l)];
    for (Eigen::Index n = 0; n < x.size(); ++n)
      total += w[n] * mcp_or_abs(x[n] - shift[n], b2 / w[n]);
  }
  return total;
}

double eval_ligme_iterative(const RealVector& x, const LigmeRegularizer& reg,
                            double tol, long max_iter) {
  require(tol > 0.0, "eval_ligme_iterative: tol must be positive");
  require_dims(x.size() == reg.seed.dim(),
               "eval_ligme_iterative: input has dimension " +
                   std::to_string(x.size()) + ", expected " +
                   std::to_string(reg.seed.dim()));
  double total = 0.0;
  RealVector btb_diff(reg.seed.dim());
  for (int l = 0; l < reg.seed.count(); ++l) {
    const RealVector u = x - reg.seed.shifts[static_cast<std::size_t>(l)];
    const double outer = reg.seed.seed_norm(l, u);
    const double rho = reg.gme.btb_norm(l);
    if (rho == 0.0) {
      // No coupling: the inner minimum of a nonnegative norm is zero.
      total += outer;
      continue;
    }
    // Inner problem: min_v Ψ_l(v) + ½ (u-v)ᵀ B_lᵀB_l (u-v), solved by
    // proximal-gradient steps of fixed length 1/‖B_l‖².
    RealVector v = u;
    reg.gme.apply_btb(l, v - u, btb_diff);
    double inner = reg.seed.seed_norm(l, v) + 0.5 * btb_diff.dot(v - u);
    long k = 0;
    for (; k < max_iter; ++k) {
      const RealVector v_next =
          reg.seed.prox_seed(l, 1.0 / rho, v - btb_diff / rho);
      reg.gme.apply_btb(l, v_next - u, btb_diff);
      const double inner_next =
          reg.seed.seed_norm(l, v_next) + 0.5 * btb_diff.dot(v_next - u);
      const double decrease = inner - inner_next;
      v = v_next;
      const bool done = decrease < tol;
      inner = std::min(inner, inner_next);
      if (done) break;
    }
    if (k == max_iter)
      throw ConvergenceError(
          "eval_ligme_iterative: inner minimization of block " +
              std::to_string(l) + " did not settle within " +
              std::to_string(max_iter) + " iterations (best value " +
              std::to_string(total + outer - inner) + ")",
          total + outer - inner);
    total += outer - inner;
  }
  return total;
}

double isolated_minimizer_threshold(const Alphabet& alphabet,
                                    const std::vector<WeightVector>& weights) {
  require(alphabet.modulation == Modulation::Real,
          "isolated_minimizer_threshold: defined for real alphabets");
  require(alphabet.size() >= 2,
          "isolated_minimizer_threshold: needs at least two alphabet values");
  require(!weights.empty(), "isolated_minimizer_threshold: empty weight family");
  double omega_max = 0.0;
  for (const auto& w : weights) {
    require(w.size() > 0, "isolated_minimizer_threshold: empty weight vector");
    omega_max = std::max(omega_max, w.maxCoeff());
  }
  return std::sqrt(2.0 * omega_max / alphabet.min_distance());
}

std::vector<GridMinimizer> scan_local_minimizers(const LigmeRegularizer& reg,
                                                 Eigen::Index coordinate,
                                                 const GridSpec& grid) {
  require(reg.gme.kind == GmeSpec::Kind::ScaledIdentity ||
              reg.gme.kind == GmeSpec::Kind::Zero,
          "scan_local_minimizers: needs a ScaledIdentity (or zero) coupling");
  require(reg.seed.variant == SeedNorm::WeightedL1,
          "scan_local_minimizers: needs a weighted l1 seed");
  require(coordinate >= 0 && coordinate < reg.seed.dim(),
          "scan_local_minimizers: coordinate out of range");
  require(grid.step > 0.0 && std::isfinite(grid.step),
          "scan_local_minimizers: grid step must be positive");
  require(grid.hi > grid.lo, "scan_local_minimizers: degenerate grid range");
  const long n_steps = std::lround((grid.hi - grid.lo) / grid.step);
  require(n_steps >= 2, "scan_local_minimizers: grid needs at least 3 points");

  const double b2 =
      reg.gme.kind == GmeSpec::Kind::Zero ? 0.0 : reg.gme.b * reg.gme.b;
  const auto psi = [&](double t) {
    double s = 0.0;
    for (int l = 0; l < reg.seed.count(); ++l) {
      const double w = reg.seed.weights[static_cast<std::size_t>(l)][coordinate];
      const double shift =
          reg.seed.shifts[static_cast<std::size_t>(l)][coordinate];
      s += w * mcp_or_abs(t - shift, b2 / w);
    }
    return s;
  };

  std::vector<double> values(static_cast<std::size_t>(n_steps) + 1);
  for (long i = 0; i <= n_steps; ++i)
    values[static_cast<std::size_t>(i)] = psi(grid.lo + i * grid.step);

  std::vector<GridMinimizer> minimizers;
  for (long i = 1; i < n_steps; ++i) {
    const double v = values[static_cast<std::size_t>(i)];
    if (v < values[static_cast<std::size_t>(i - 1)] &&
        v < values[static_cast<std::size_t>(i + 1)])
      minimizers.push_back(GridMinimizer{grid.lo + i * grid.step, v});
  }
  return minimizers;
}

}  // namespace ligme
