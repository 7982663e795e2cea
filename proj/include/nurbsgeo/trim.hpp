#pragma once

#include <algorithm>
#include <string>
#include <utility>

#include "nurbsgeo/errors.hpp"
#include "nurbsgeo/surface.hpp"
#include "nurbsgeo/types.hpp"

namespace nurbsgeo {

/// Reparameterization of the unit square into (a sub-region of) another
/// surface's parameter square. Its boundary iso-lines are the trimming
/// curves.
class TrimMap {
public:
  static constexpr double kTolerance = 1e-9;
  static constexpr int kValidationSamples = 65;

  TrimMap() = default;

  explicit TrimMap(NurbsSurface<2> map) : map_(std::move(map)) {
    // Convex hull property: control points inside the square keep the image
    // inside, so sampling is only needed when some lie outside.
    bool hull_inside = true;
    for (const auto& cp : map_.control_points())
      if (!inside(cp.position, 0.0)) hull_inside = false;
    if (hull_inside) return;
    for (int a = 0; a < kValidationSamples; ++a) {
      for (int b = 0; b < kValidationSamples; ++b) {
        const double s = static_cast<double>(a) / (kValidationSamples - 1);
        const double t = static_cast<double>(b) / (kValidationSamples - 1);
        const Vec2 q = map_.point(s, t);
        if (!inside(q, kTolerance))
          throw GeometryError("invalid trim map: image (" + std::to_string(q.x()) + ", " + std::to_string(q.y()) +
                              ") leaves the unit square");
      }
    }
  }

  static TrimMap identity() {
    return TrimMap(make_bilinear<2>(Vec2(0, 0), Vec2(1, 0), Vec2(0, 1), Vec2(1, 1)));
  }

  const NurbsSurface<2>& surface() const noexcept { return map_; }

  /// Image of (xi, eta); round-off overshoot up to kTolerance is clamped.
  Vec2 operator()(double xi, double eta) const {
    Vec2 q = map_.point(xi, eta);
    if (!inside(q, kTolerance))
      throw GeometryError("invalid trim map: image (" + std::to_string(q.x()) + ", " + std::to_string(q.y()) +
                          ") leaves the unit square");
    q.x() = std::clamp(q.x(), 0.0, 1.0);
    q.y() = std::clamp(q.y(), 0.0, 1.0);
    return q;
  }

private:
  static bool inside(const Vec2& q, double tol) {
    return q.x() >= -tol && q.x() <= 1.0 + tol && q.y() >= -tol && q.y() <= 1.0 + tol;
  }

  NurbsSurface<2> map_ = make_bilinear<2>(Vec2(0, 0), Vec2(1, 0), Vec2(0, 1), Vec2(1, 1));
};

inline Vec2 trim_map_eval(const TrimMap& trim, double xi, double eta) { return trim(xi, eta); }

/// Base surface seen through a trim map.
struct TrimmedSurface {
  NurbsSurface<3> base;
  TrimMap trim;

  Vec3 point(double xi, double eta) const {
    const Vec2 q = trim(xi, eta);
    return base.point(q.x(), q.y());
  }
};

inline Vec3 trimmed_surface_point(const TrimmedSurface& ts, double xi, double eta) { return ts.point(xi, eta); }

}  // namespace nurbsgeo
