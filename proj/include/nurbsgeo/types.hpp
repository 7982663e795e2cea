#pragma once

#include <cmath>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace nurbsgeo {

template <int Dim>
using Vec = Eigen::Matrix<double, Dim, 1>;

using Vec2 = Vec<2>;
using Vec3 = Vec<3>;

/// Control point in Dim-dimensional space with a rational weight.
template <int Dim>
struct ControlPoint {
  Vec<Dim> position = Vec<Dim>::Zero();
  double weight = 1.0;

  bool operator==(const ControlPoint& o) const { return position == o.position && weight == o.weight; }
};

template <int Dim>
bool all_finite(const Vec<Dim>& v) {
  for (int k = 0; k < Dim; ++k)
    if (!std::isfinite(v[k])) return false;
  return true;
}

}  // namespace nurbsgeo
