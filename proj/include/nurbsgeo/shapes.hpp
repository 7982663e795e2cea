#pragma once

#include <cmath>

#include "nurbsgeo/surface.hpp"
#include "nurbsgeo/types.hpp"

namespace nurbsgeo::shapes {

/// Quadratic-by-linear patch: a quarter arc of radius 1 in the y-z plane
/// from (0,1,0) to (0,0,1), extruded along x from 0 to 1. The middle arc
/// weight is 0.707 (not exactly 1/sqrt(2)), so the arc is circular only to
/// about 1e-4.
inline NurbsSurface<3> extruded_quarter_arc() {
  const SplineBasis quad(KnotVector({0, 0, 0, 1, 1, 1}), 2);
  const SplineBasis lin(KnotVector({0, 0, 1, 1}), 1);
  return NurbsSurface<3>(quad, lin,
                         {
                             {Vec3(0, 1, 0), 1.0},    // (0,0)
                             {Vec3(1, 1, 0), 1.0},    // (0,1)
                             {Vec3(0, 1, 1), 0.707},  // (1,0)
                             {Vec3(1, 1, 1), 0.707},  // (1,1)
                             {Vec3(0, 0, 1), 1.0},    // (2,0)
                             {Vec3(1, 0, 1), 1.0},    // (2,1)
                         });
}

/// Full circular cylinder with its axis along z. xi runs once around the
/// circle starting and ending at angle 0 (nine-point rational quadratic),
/// eta runs from z0 to z1.
inline NurbsSurface<3> vertical_cylinder(const Vec2& center, double radius, double z0, double z1) {
  const SplineBasis circle(KnotVector({0, 0, 0, 0.25, 0.25, 0.5, 0.5, 0.75, 0.75, 1, 1, 1}), 2);
  const SplineBasis lin(KnotVector({0, 0, 1, 1}), 1);
  const double h = std::sqrt(0.5);
  const double dirs[9][2] = {{1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}, {1, 0}};
  std::vector<ControlPoint<3>> net;
  for (int i = 0; i < 9; ++i) {
    const double w = (i % 2 == 1) ? h : 1.0;
    const double x = center.x() + radius * dirs[i][0];
    const double y = center.y() + radius * dirs[i][1];
    net.push_back({Vec3(x, y, z0), w});
    net.push_back({Vec3(x, y, z1), w});
  }
  return NurbsSurface<3>(circle, lin, std::move(net));
}

}  // namespace nurbsgeo::shapes
