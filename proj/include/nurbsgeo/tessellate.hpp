#pragma once

#include <array>
#include <vector>

#include "nurbsgeo/errors.hpp"
#include "nurbsgeo/types.hpp"

namespace nurbsgeo {

struct TriangleMesh {
  static constexpr double kMinArea = 1e-14;

  std::vector<Vec3> vertices;
  std::vector<Vec2> params;
  std::vector<std::array<int, 3>> triangles;

  double triangle_area(const std::array<int, 3>& t) const {
    const Vec3& a = vertices[static_cast<std::size_t>(t[0])];
    const Vec3& b = vertices[static_cast<std::size_t>(t[1])];
    const Vec3& c = vertices[static_cast<std::size_t>(t[2])];
    return 0.5 * (b - a).cross(c - a).norm();
  }

  double area() const {
    double s = 0.0;
    for (const auto& t : triangles) s += triangle_area(t);
    return s;
  }
};

/// Uniform n_xi x n_eta grid in parameter space, two triangles per cell.
/// Works for anything with `Vec3 point(double, double) const`. Cells that
/// collapse to zero area (poles, collapsed edges) drop their triangles.
template <class Surface>
TriangleMesh tessellate(const Surface& surface, int n_xi, int n_eta) {
  if (n_xi < 2 || n_eta < 2) throw ValidationError("tessellation needs at least 2 samples per direction");
  TriangleMesh mesh;
  mesh.vertices.reserve(static_cast<std::size_t>(n_xi * n_eta));
  mesh.params.reserve(static_cast<std::size_t>(n_xi * n_eta));
  for (int i = 0; i < n_xi; ++i) {
    const double xi = static_cast<double>(i) / (n_xi - 1);
    for (int j = 0; j < n_eta; ++j) {
      const double eta = static_cast<double>(j) / (n_eta - 1);
      mesh.vertices.push_back(surface.point(xi, eta));
      mesh.params.emplace_back(xi, eta);
    }
  }
  auto id = [n_eta](int i, int j) { return i * n_eta + j; };
  mesh.triangles.reserve(static_cast<std::size_t>(2 * (n_xi - 1) * (n_eta - 1)));
  for (int i = 0; i + 1 < n_xi; ++i) {
    for (int j = 0; j + 1 < n_eta; ++j) {
      for (const std::array<int, 3>& t : {std::array<int, 3>{id(i, j), id(i + 1, j), id(i + 1, j + 1)},
                                          std::array<int, 3>{id(i, j), id(i + 1, j + 1), id(i, j + 1)}}) {
        if (mesh.triangle_area(t) > TriangleMesh::kMinArea) mesh.triangles.push_back(t);
      }
    }
  }
  return mesh;
}

}  // namespace nurbsgeo
