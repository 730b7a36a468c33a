#include "ligme/reference.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ligme::reference {

namespace {

// Bracket shrinking by function-value comparison localizes a minimizer no
// better than sqrt(eps)·scale of the working precision, so the oracles
// evaluate their objectives in long double: the comparison noise floor drops
// from ~1e-7 to ~1e-9, well inside every advertised tolerance.
template <class Float, class Fn>
Float golden_section_impl(const Fn& f, Float lo, Float hi, Float tol) {
  if (!(lo <= hi)) throw std::invalid_argument("golden_section: lo > hi");
  if (!(tol > 0)) throw std::invalid_argument("golden_section: tol <= 0");
  const Float gr = (std::sqrt(Float(5)) - 1) / 2;
  Float a = lo, b = hi;
  Float c = b - gr * (b - a);
  Float d = a + gr * (b - a);
  Float fc = f(c), fd = f(d);
  // Each step shrinks the bracket by the golden ratio; the cap defends
  // against tolerances below the floating-point resolution of the bracket.
  for (int it = 0; it < 400 && b - a > tol; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = f(d);
    }
  }
  return (a + b) / 2;
}

}  // namespace

double golden_section_minimize(const std::function<double(double)>& f,
                               double lo, double hi, double tol) {
  return golden_section_impl<double>(f, lo, hi, tol);
}

RealVector prox_weighted_l1_oracle(const RealVector& u, double gamma,
                                   const WeightVector& omega) {
  if (u.size() != omega.size())
    throw std::invalid_argument("prox_weighted_l1_oracle: dimension mismatch");
  if (!(gamma > 0.0))
    throw std::invalid_argument("prox_weighted_l1_oracle: gamma <= 0");
  RealVector p(u.size());
  for (Eigen::Index n = 0; n < u.size(); ++n) {
    const long double un = u[n];
    const long double w = static_cast<long double>(gamma) * omega[n];
    const auto objective = [un, w](long double v) {
      return w * std::abs(v) + 0.5L * (v - un) * (v - un);
    };
    const long double lo = std::min(0.0L, un) - 1;
    const long double hi = std::max(0.0L, un) + 1;
    p[n] = static_cast<double>(
        golden_section_impl<long double>(objective, lo, hi, 1e-13L));
  }
  return p;
}

RealVector prox_weighted_l21_oracle(const RealVector& u_hat, double gamma,
                                    const WeightVector& omega) {
  if (u_hat.size() % 2 != 0 || u_hat.size() != 2 * omega.size())
    throw std::invalid_argument("prox_weighted_l21_oracle: dimension mismatch");
  if (!(gamma > 0.0))
    throw std::invalid_argument("prox_weighted_l21_oracle: gamma <= 0");
  const Eigen::Index N = omega.size();
  RealVector p(u_hat.size());
  for (Eigen::Index n = 0; n < N; ++n) {
    const double re = u_hat[n];
    const double im = u_hat[N + n];
    const double r = std::hypot(re, im);
    if (r == 0.0) {
      p[n] = 0.0;
      p[N + n] = 0.0;
      continue;
    }
    const long double w = static_cast<long double>(gamma) * omega[n];
    const long double rl = r;
    const auto radial = [w, rl](long double t) {
      return w * t + 0.5L * (t - rl) * (t - rl);
    };
    const double t = static_cast<double>(
        golden_section_impl<long double>(radial, 0.0L, rl + 1, 1e-13L));
    p[n] = t * re / r;
    p[N + n] = t * im / r;
  }
  return p;
}

void project_octagon_oracle(double px, double py, double circumradius,
                            double& qx, double& qy) {
  if (!(circumradius > 0.0))
    throw std::invalid_argument("project_octagon_oracle: circumradius <= 0");
  constexpr double kPi = 3.14159265358979323846;
  double vx[9], vy[9];
  for (int k = 0; k <= 8; ++k) {
    vx[k] = circumradius * std::cos(k * kPi / 4.0);
    vy[k] = circumradius * std::sin(k * kPi / 4.0);
  }
  // Interior test: inside every supporting half-plane (edge normals point
  // outward through the edge midpoints).
  bool inside = true;
  for (int k = 0; k < 8 && inside; ++k) {
    const double mx = 0.5 * (vx[k] + vx[k + 1]);
    const double my = 0.5 * (vy[k] + vy[k + 1]);
    const double mn = std::hypot(mx, my);
    if ((px * mx + py * my) / mn > mn + 1e-12 * circumradius) inside = false;
  }
  if (inside) {
    qx = px;
    qy = py;
    return;
  }
  // Dense sampling of all edges, then golden-section refinement of the best
  // edge's squared distance (strictly convex in the edge parameter).
  const int kSamples = 2000;
  double best = std::numeric_limits<double>::infinity();
  int best_edge = 0;
  double best_t = 0.0;
  for (int k = 0; k < 8; ++k) {
    const double ex = vx[k + 1] - vx[k];
    const double ey = vy[k + 1] - vy[k];
    for (int i = 0; i <= kSamples; ++i) {
      const double t = static_cast<double>(i) / kSamples;
      const double dx = px - (vx[k] + t * ex);
      const double dy = py - (vy[k] + t * ey);
      const double d2 = dx * dx + dy * dy;
      if (d2 < best) {
        best = d2;
        best_edge = k;
        best_t = t;
      }
    }
  }
  const int k = best_edge;
  const long double ex = vx[k + 1] - vx[k];
  const long double ey = vy[k + 1] - vy[k];
  const long double pxl = px, pyl = py, v0x = vx[k], v0y = vy[k];
  const auto dist2 = [&](long double t) {
    const long double dx = pxl - (v0x + t * ex);
    const long double dy = pyl - (v0y + t * ey);
    return dx * dx + dy * dy;
  };
  const long double t = golden_section_impl<long double>(
      dist2, std::max(0.0L, static_cast<long double>(best_t) - 2.0L / kSamples),
      std::min(1.0L, static_cast<long double>(best_t) + 2.0L / kSamples),
      1e-15L);
  qx = static_cast<double>(v0x + t * ex);
  qy = static_cast<double>(v0y + t * ey);
}

double soav_objective_reference(const RealVector& x, const RealVector& y,
                                const RealMatrix& A, double mu,
                                const std::vector<RealVector>& shifts,
                                const std::vector<WeightVector>& weights) {
  double fit = 0.0;
  for (Eigen::Index r = 0; r < A.rows(); ++r) {
    double row = 0.0;
    for (Eigen::Index c = 0; c < A.cols(); ++c) row += A(r, c) * x[c];
    fit += (y[r] - row) * (y[r] - row);
  }
  double reg = 0.0;
  for (std::size_t l = 0; l < shifts.size(); ++l)
    for (Eigen::Index n = 0; n < x.size(); ++n)
      reg += weights[l][n] * std::abs(x[n] - shifts[l][n]);
  return 0.5 * fit + mu * reg;
}

SubgradientResult projected_subgradient_soav(
    const RealVector& y, const RealMatrix& A, double lo, double hi, double mu,
    const std::vector<RealVector>& shifts,
    const std::vector<WeightVector>& weights, long iterations) {
  if (shifts.size() != weights.size() || shifts.empty())
    throw std::invalid_argument("projected_subgradient_soav: bad seed data");
  if (!(lo <= hi))
    throw std::invalid_argument("projected_subgradient_soav: lo > hi");
  const Eigen::Index N = A.cols();
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(A.transpose() * A,
                                               Eigen::EigenvaluesOnly);
  const double m = es.eigenvalues().minCoeff();
  if (!(m > 0.0))
    throw std::invalid_argument(
        "projected_subgradient_soav: AᵀA must be positive definite for the "
        "strong-convexity step rule");

  RealVector x = RealVector::Zero(N).cwiseMax(lo).cwiseMin(hi);
  SubgradientResult best;
  best.x = x;
  best.objective = soav_objective_reference(x, y, A, mu, shifts, weights);
  RealVector g(N);
  for (long t = 0; t < iterations; ++t) {
    g = A.transpose() * (A * x - y);
    for (std::size_t l = 0; l < shifts.size(); ++l)
      for (Eigen::Index n = 0; n < N; ++n) {
        const double d = x[n] - shifts[l][n];
        if (d > 0.0)
          g[n] += mu * weights[l][n];
        else if (d < 0.0)
          g[n] -= mu * weights[l][n];
      }
    const double step = 2.0 / (m * static_cast<double>(t + 1));
    x = (x - step * g).cwiseMax(lo).cwiseMin(hi);
    const double f = soav_objective_reference(x, y, A, mu, shifts, weights);
    if (f < best.objective) {
      best.objective = f;
      best.x = x;
    }
  }
  return best;
}

}  // namespace ligme::reference
