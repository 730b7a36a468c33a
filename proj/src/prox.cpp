#include "ligme/prox.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ligme {

namespace {

void validate_shrinkage_args(Eigen::Index u_size, double gamma,
                             const WeightVector& omega, Eigen::Index n_groups,
                             const char* name) {
  require(gamma > 0.0, std::string(name) + ": gamma must be positive");
  require_dims(omega.size() == n_groups,
               std::string(name) + ": weight vector has dimension " +
                   std::to_string(omega.size()) + " but input of dimension " +
                   std::to_string(u_size) + " needs " +
                   std::to_string(n_groups));
  for (Eigen::Index n = 0; n < omega.size(); ++n)
    require(omega[n] > 0.0 && std::isfinite(omega[n]),
            std::string(name) + ": weights must be positive and finite");
}

}  // namespace

RealVector prox_weighted_l1(const RealVector& u, double gamma,
                            const WeightVector& omega) {
  validate_shrinkage_args(u.size(), gamma, omega, u.size(),
                          "prox_weighted_l1");
  RealVector out(u.size());
  for (Eigen::Index n = 0; n < u.size(); ++n) {
    const double t = gamma * omega[n];
    const double mag = std::abs(u[n]) - t;
    out[n] = mag > 0.0 ? std::copysign(mag, u[n]) : 0.0;
  }
  return out;
}

RealVector prox_weighted_l21(const RealVector& u_stacked, double gamma,
                             const WeightVector& omega) {
  require_dims(u_stacked.size() % 2 == 0,
               "prox_weighted_l21: stacked input has odd dimension " +
                   std::to_string(u_stacked.size()));
  const Eigen::Index n_pairs = u_stacked.size() / 2;
  validate_shrinkage_args(u_stacked.size(), gamma, omega, n_pairs,
                          "prox_weighted_l21");
  RealVector out(u_stacked.size());
  for (Eigen::Index n = 0; n < n_pairs; ++n) {
    const double re = u_stacked[n], im = u_stacked[n_pairs + n];
    const double r = std::hypot(re, im);
    const double scale = r > gamma * omega[n] ? 1.0 - gamma * omega[n] / r : 0.0;
    out[n] = scale * re;
    out[n_pairs + n] = scale * im;
  }
  return out;
}

RealVector project_box(const RealVector& x, double lower, double upper) {
  require(lower <= upper, "project_box: lower bound " + std::to_string(lower) +
                              " exceeds upper bound " + std::to_string(upper));
  return x.cwiseMax(lower).cwiseMin(upper);
}

Eigen::Vector2d project_regular_octagon_pair(const Eigen::Vector2d& p,
                                             double circumradius) {
  require(circumradius > 0.0 && std::isfinite(circumradius),
          "project_regular_octagon_pair: circumradius must be positive");
  if (p.squaredNorm() == 0.0) return p;  // origin is interior

  constexpr double kSector = std::numbers::pi / 4.0;
  const double half_sector = kSector / 2.0;

  // Fold into the sector [0, π/4) by rotating back a whole number of sectors,
  // then into [0, π/8] by reflecting across the sector bisector if needed.
  double theta = std::atan2(p.y(), p.x());
  if (theta < 0.0) theta += 2.0 * std::numbers::pi;
  int k = static_cast<int>(std::floor(theta / kSector));
  k = std::clamp(k, 0, 7);  // guards theta == 2π after rounding
  const double c = std::cos(k * kSector), s = std::sin(k * kSector);
  Eigen::Vector2d q(c * p.x() + s * p.y(), -s * p.x() + c * p.y());
  const bool reflected = std::atan2(q.y(), q.x()) > half_sector;
  if (reflected) {
    // Reflection across the line at angle π/8.
    const double c2 = std::cos(2.0 * half_sector), s2 = std::sin(2.0 * half_sector);
    q = Eigen::Vector2d(c2 * q.x() + s2 * q.y(), s2 * q.x() - c2 * q.y());
  }

  // In the folded half-sector the only relevant boundary piece is the half
  // edge from the vertex V = (R, 0) to the edge midpoint at angle π/8.  The
  // edge's outward unit normal sits at angle π/8 and the apothem is
  // R·cos(π/8).
  const Eigen::Vector2d normal(std::cos(half_sector), std::sin(half_sector));
  const double apothem = circumradius * std::cos(half_sector);
  const double overshoot = q.dot(normal) - apothem;
  if (overshoot > 0.0) {
    const Eigen::Vector2d vertex(circumradius, 0.0);
    const Eigen::Vector2d edge_dir(-normal.y(), normal.x());
    const double t_max = (apothem * normal - vertex).dot(edge_dir);
    const double t = std::clamp((q - vertex).dot(edge_dir), 0.0, t_max);
    q = vertex + t * edge_dir;
  }

  // Unfold: inverse reflection, then inverse rotation.
  if (reflected) {
    const double c2 = std::cos(2.0 * half_sector), s2 = std::sin(2.0 * half_sector);
    q = Eigen::Vector2d(c2 * q.x() + s2 * q.y(), s2 * q.x() - c2 * q.y());
  }
  return Eigen::Vector2d(c * q.x() - s * q.y(), s * q.x() + c * q.y());
}

RealVector project_constellation_hull(const RealVector& x_stacked,
                                      const HullDescriptor& hull) {
  require_dims(x_stacked.size() == hull.ambient_dim,
               "project_constellation_hull: input has dimension " +
                   std::to_string(x_stacked.size()) + " but hull expects " +
                   std::to_string(hull.ambient_dim));
  if (hull.kind == HullDescriptor::Kind::Box)
    return project_box(x_stacked, hull.lower, hull.upper);
  const Eigen::Index n_pairs = x_stacked.size() / 2;
  RealVector out(x_stacked.size());
  for (Eigen::Index n = 0; n < n_pairs; ++n) {
    const Eigen::Vector2d q = project_regular_octagon_pair(
        Eigen::Vector2d(x_stacked[n], x_stacked[n_pairs + n]),
        hull.circumradius);
    out[n] = q.x();
    out[n_pairs + n] = q.y();
  }
  return out;
}

}  // namespace ligme
