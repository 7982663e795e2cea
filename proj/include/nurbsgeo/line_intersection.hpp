#pragma once

#include <algorithm>
#include <cmath>

#include "nurbsgeo/closest_point.hpp"
#include "nurbsgeo/curve.hpp"
#include "nurbsgeo/errors.hpp"
#include "nurbsgeo/surface.hpp"

namespace nurbsgeo {

enum class LineUpdate {
  TangentPlane,  // intersect the line with the tangent plane at the foot point
  Projection,    // slide by the projection of the foot gap onto the line
};

struct LineIntersectConfig {
  int max_iterations = 50;
  LineUpdate update = LineUpdate::TangentPlane;
  double tolerance = 1e-9;           // on the line-parameter update
  double residual_tolerance = 1e-8;  // line-to-surface gap accepted as a hit, model units
  ProjectionConfig projection;

  void validate() const {
    if (max_iterations < 1) throw ValidationError("line intersection max_iterations must be >= 1");
    if (!(tolerance > 0.0)) throw ValidationError("line intersection tolerance must be positive");
    if (!(residual_tolerance > 0.0)) throw ValidationError("line intersection residual tolerance must be positive");
    projection.validate();
  }
};

struct LineIntersectResult {
  Vec3 point = Vec3::Zero();  // on the surface
  double xi_line = 1.0;
  double xi = 0.0;
  double eta = 0.0;
  bool converged = false;
  double residual = 0.0;  // gap between the line point and its closest surface point
  int iterations = 0;
};

/// Lines closer to parallel than this (sine of the angle to the tangent plane)
/// use the projection update.
inline constexpr double kGrazing = 0.05;

/// Intersection of a straight (degree 1, two control points) line with a
/// surface by alternating projections.
///
/// Starting from the line end (xi = 1): project the current line point onto
/// the surface, then move along the line. The projection update slides by the
/// component of the projection gap along the line direction,
/// xi += (x_S - x_L) . V / |V|^2, which converges linearly and slowly for
/// oblique lines. The default tangent-plane update jumps to where the line
/// crosses the tangent plane at x_S, xi += n . (x_S - x_L) / (n . V), and falls
/// back to the projection update for near-parallel lines. Stops once the
/// update falls below the tolerance. A fixed point that leaves a gap larger
/// than residual_tolerance (parallel or missing line) is reported as not
/// converged.
inline LineIntersectResult line_surface_intersection(const NurbsCurve<3>& line, const NurbsSurface<3>& surface,
                                                     const LineIntersectConfig& cfg = {}) {
  cfg.validate();
  if (line.degree() != 1 || line.control_points().size() != 2)
    throw ValidationError("line must be degree 1 with two control points");
  const Vec3 dir = line.control_points()[1].position - line.control_points()[0].position;
  const double len2 = dir.squaredNorm();
  if (!(len2 > 0.0)) throw GeometryError("line has zero length");

  LineIntersectResult out;
  double xi = 1.0;
  ClosestPointResult foot = closest_point(surface, line.point(xi), cfg.projection);
  bool settled = false;
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    out.iterations = it;
    if (it > 1) foot = closest_point_from(surface, line.point(xi), Vec2(foot.xi, foot.eta), cfg.projection);
    const Vec3 on_line = line.point(xi);
    const Vec3 gap = foot.point - on_line;
    double delta = gap.dot(dir) / len2;
    if (cfg.update == LineUpdate::TangentPlane) {
      const auto [t1, t2] = surface.tangents(foot.xi, foot.eta);
      const Vec3 n = t1.cross(t2);
      const double across = n.dot(dir);
      if (std::abs(across) > kGrazing * n.norm() * std::sqrt(len2)) delta = n.dot(gap) / across;
    }
    const double nxi = std::clamp(xi + delta, 0.0, 1.0);
    const double step = nxi - xi;
    xi = nxi;
    if (std::abs(step) < cfg.tolerance) {
      settled = true;
      break;
    }
  }
  foot = closest_point_from(surface, line.point(xi), Vec2(foot.xi, foot.eta), cfg.projection);
  out.xi_line = xi;
  out.xi = foot.xi;
  out.eta = foot.eta;
  out.point = foot.point;
  out.residual = foot.distance;
  out.converged = settled && out.residual <= cfg.residual_tolerance;
  return out;
}

}  // namespace nurbsgeo
