#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "nurbsgeo/errors.hpp"
#include "nurbsgeo/surface.hpp"
#include "nurbsgeo/types.hpp"

namespace nurbsgeo {

struct ProjectionConfig {
  int max_iterations = 100;
  double damp = 0.6;         // trust radius factor after a rejected step, in (0,1)
  double tolerance = 1e-10;  // on distance change and on the step length, model units
  int seed_grid = 8;         // samples per direction for the starting point search

  void validate() const {
    if (max_iterations < 1) throw ValidationError("projection max_iterations must be >= 1");
    if (!(damp > 0.0 && damp < 1.0)) throw ValidationError("projection damp must lie in (0,1)");
    if (!(tolerance > 0.0)) throw ValidationError("projection tolerance must be positive");
    if (seed_grid < 2) throw ValidationError("projection seed grid must be >= 2");
  }
};

struct ClosestPointResult {
  double xi = 0.0;
  double eta = 0.0;
  Vec3 point = Vec3::Zero();
  double distance = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> history;  // distance after the seed and after every accepted step
};

/// Parameters of the nearest sample on a uniform grid x grid lattice. Ties
/// keep the lexicographically smallest (xi, eta).
inline Vec2 seed_projection(const NurbsSurface<3>& surface, const Vec3& target, int grid = 8) {
  if (grid < 2) throw ValidationError("seed grid must be >= 2");
  Vec2 best(0.0, 0.0);
  double best_d2 = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid; ++i) {
    const double xi = static_cast<double>(i) / (grid - 1);
    for (int j = 0; j < grid; ++j) {
      const double eta = static_cast<double>(j) / (grid - 1);
      const double d2 = (surface.point(xi, eta) - target).squaredNorm();
      if (d2 < best_d2) {
        best_d2 = d2;
        best = Vec2(xi, eta);
      }
    }
  }
  return best;
}

/// Distance increases below this are round-off, not a failed step.
inline constexpr double kDistanceNoise = 1e-13;

/// Iterative projection from a given starting parameter.
///
/// Each iteration moves xi and eta independently by the component of the
/// gap x_P - x_S along the unit tangent divided by the tangent length. Step
/// magnitudes are capped, keeping the step direction, by a trust radius that starts at 1, is multiplied by
/// `damp` whenever a step would increase the distance beyond round-off (the
/// step is then rejected) and divided by it again (up to 1) after an accepted
/// step. Accepted distances never increase by more than kDistanceNoise.
/// Parameters are clamped to [0,1]. Iteration stops once an accepted step changes both the
/// distance and the surface point by less than `tolerance`, or once the
/// trust radius has collapsed (no descent left at round-off level).
inline ClosestPointResult closest_point_from(const NurbsSurface<3>& surface, const Vec3& target, Vec2 start,
                                             const ProjectionConfig& cfg = {}) {
  cfg.validate();
  if (!all_finite<3>(target)) throw ValidationError("projection target must be finite");
  ClosestPointResult out;
  double xi = std::clamp(start.x(), 0.0, 1.0);
  double eta = std::clamp(start.y(), 0.0, 1.0);
  SurfaceDerivatives<3> d = surface.derivatives(xi, eta);
  double dist = (target - d.point).norm();
  out.history.push_back(dist);
  double radius = 1.0;

  for (int it = 1; it <= cfg.max_iterations; ++it) {
    out.iterations = it;
    const double l1 = d.d_xi.norm(), l2 = d.d_eta.norm();
    if (l1 < 1e-14 || l2 < 1e-14)
      throw GeometryError("singular surface: tangent vanishes at (" + std::to_string(xi) + ", " +
                          std::to_string(eta) + ")");
    const Vec3 gap = target - d.point;
    double step_xi = (d.d_xi / l1).dot(gap) / l1;
    double step_eta = (d.d_eta / l2).dot(gap) / l2;
    const double largest = std::max(std::abs(step_xi), std::abs(step_eta));
    if (largest > radius) {
      step_xi *= radius / largest;
      step_eta *= radius / largest;
    }
    const double nxi = std::clamp(xi + step_xi, 0.0, 1.0);
    const double neta = std::clamp(eta + step_eta, 0.0, 1.0);
    const SurfaceDerivatives<3> nd = surface.derivatives(nxi, neta);
    const double ndist = (target - nd.point).norm();

    if (ndist <= dist + kDistanceNoise) {
      const double moved = (nd.point - d.point).norm();
      const double change = std::abs(dist - ndist);
      xi = nxi;
      eta = neta;
      d = nd;
      dist = ndist;
      out.history.push_back(dist);
      radius = std::min(1.0, radius / cfg.damp);
      if (change < cfg.tolerance && moved < cfg.tolerance) {
        out.converged = true;
        break;
      }
    } else {
      radius *= cfg.damp;
      if (radius < 1e-14) {
        out.converged = true;
        break;
      }
    }
  }
  out.xi = xi;
  out.eta = eta;
  out.point = d.point;
  out.distance = dist;
  return out;
}

/// Closest point with a grid-search seed.
inline ClosestPointResult closest_point(const NurbsSurface<3>& surface, const Vec3& target,
                                        const ProjectionConfig& cfg = {}) {
  cfg.validate();
  return closest_point_from(surface, target, seed_projection(surface, target, cfg.seed_grid), cfg);
}

}  // namespace nurbsgeo
