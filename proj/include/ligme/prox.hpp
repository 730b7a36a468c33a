#pragma once

#include "ligme/constellation.hpp"
#include "ligme/types.hpp"

#include <utility>

// Proximity operators and Euclidean projections used by the fixed-point
// solver: weighted l1 / l2,1 shrinkage, the conjugate and shifted variants,
// and projections onto boxes, regular octagons, and constellation hulls.
namespace ligme {

// prox of gamma * Σ_n omega_n |u_n|: componentwise soft threshold
// sgn(u_n) * max(0, |u_n| - gamma*omega_n).
RealVector prox_weighted_l1(const RealVector& u, double gamma,
                            const WeightVector& omega);

// prox of gamma * Σ_n omega_n ‖(u_n, u_{N+n})‖₂ on stacked (Re; Im) input:
// each pair is scaled by max(0, 1 - gamma*omega_n / ‖pair‖); a zero pair maps
// to zero.
RealVector prox_weighted_l21(const RealVector& u_stacked, double gamma,
                             const WeightVector& omega);

// prox of the convex conjugate via the Moreau identity at unit parameter:
// Prox_{f*}(u) = u - Prox_f(u).
template <class ProxFn>
RealVector prox_conjugate(ProxFn&& prox_f, const RealVector& u) {
  RealVector p = std::forward<ProxFn>(prox_f)(u);
  require_dims(p.size() == u.size(),
               "prox_conjugate: inner prox changed dimension from " +
                   std::to_string(u.size()) + " to " + std::to_string(p.size()));
  return u - p;
}

// prox of f(· - z): translate, apply, translate back.
template <class ProxFn>
RealVector prox_shifted(ProxFn&& prox_f, const RealVector& z,
                        const RealVector& u) {
  require_dims(z.size() == u.size(),
               "prox_shifted: shift has dimension " + std::to_string(z.size()) +
                   " but input has " + std::to_string(u.size()));
  RealVector p = std::forward<ProxFn>(prox_f)(u - z);
  require_dims(p.size() == u.size(),
               "prox_shifted: inner prox changed dimension");
  return z + p;
}

// Componentwise clamp onto [lower, upper]^dim.
RealVector project_box(const RealVector& x, double lower, double upper);

// Euclidean projection of a point in the plane onto the regular octagon with
// vertices circumradius * (cos(k·π/4), sin(k·π/4)), k = 0..7.  Computed by
// folding the point into one sixteenth sector of the dihedral symmetry,
// projecting onto the single relevant edge segment, and unfolding.
Eigen::Vector2d project_regular_octagon_pair(const Eigen::Vector2d& p,
                                             double circumradius);

// Projection onto a constellation hull in the stacked layout: componentwise
// clamp for a box hull, per-(Re, Im)-pair octagon projection otherwise.
RealVector project_constellation_hull(const RealVector& x_stacked,
                                      const HullDescriptor& hull);

}  // namespace ligme
