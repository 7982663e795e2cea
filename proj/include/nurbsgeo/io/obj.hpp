#pragma once

#include <cstdio>
#include <string>

#include "nurbsgeo/errors.hpp"
#include "nurbsgeo/tessellate.hpp"

namespace nurbsgeo::io {

/// Wavefront OBJ text: `v x y z` lines, then `f i j k` with 1-based indices.
/// Vertices are offset by `base` so several meshes can share one file.
inline std::string obj_text(const TriangleMesh& mesh, std::size_t base = 0, const std::string& group = {}) {
  std::string out;
  char buf[128];
  if (!group.empty()) out += "o " + group + "\n";
  for (const Vec3& v : mesh.vertices) {
    if (!all_finite<3>(v)) throw GeometryError("mesh vertex is not finite");
    std::snprintf(buf, sizeof buf, "v %.16e %.16e %.16e\n", v.x(), v.y(), v.z());
    out += buf;
  }
  for (const auto& t : mesh.triangles) {
    std::snprintf(buf, sizeof buf, "f %zu %zu %zu\n", base + static_cast<std::size_t>(t[0]) + 1,
                  base + static_cast<std::size_t>(t[1]) + 1, base + static_cast<std::size_t>(t[2]) + 1);
    out += buf;
  }
  return out;
}

}  // namespace nurbsgeo::io
