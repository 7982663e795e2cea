#include <gtest/gtest.h>

#include <cmath>
#include <cstring>

#include "nurbsgeo/shapes.hpp"
#include "nurbsgeo/surface_intersection.hpp"
#include "nurbsgeo/tessellate.hpp"

using namespace nurbsgeo;

namespace {

constexpr double kRadius = 0.25;
const Vec2 kCenter(0.5, 0.5);

NurbsSurface<3> cylinder() { return shapes::vertical_cylinder(kCenter, kRadius, 0.0, 1.5); }

IntersectConfig with_lines(int n) {
  IntersectConfig cfg;
  cfg.nlines = n;
  return cfg;
}

double dense_distance(const NurbsSurface<3>& s, const Vec3& x) {
  ProjectionConfig cfg;
  cfg.seed_grid = 24;
  cfg.max_iterations = 400;
  return closest_point(s, x, cfg).distance;
}

// Area of the quarter-arc surface outside the cylinder, by midpoint quadrature
// over an n x n parameter grid with the exact inside test on the 3D point.
double area_outside_cylinder(int n) {
  const auto s = shapes::extruded_quarter_arc();
  double area = 0.0;
  const double h = 1.0 / n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const auto d = s.derivatives((i + 0.5) * h, (j + 0.5) * h);
      const Vec2 xy(d.point.x(), d.point.y());
      if ((xy - kCenter).norm() >= kRadius) area += d.d_xi.cross(d.d_eta).norm() * h * h;
    }
  return area;
}

// The surface-1 trim curve pushed to 3D.
std::vector<Vec3> curve_samples(const Decomposition& d, int n) {
  std::vector<Vec3> out;
  for (int k = 0; k < n; ++k) out.push_back(d.patches[0].surface.point(static_cast<double>(k) / (n - 1), 1.0));
  return out;
}

double hausdorff(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  auto one_way = [](const std::vector<Vec3>& x, const std::vector<Vec3>& y) {
    double worst = 0.0;
    for (const Vec3& p : x) {
      double best = INFINITY;
      for (const Vec3& q : y) best = std::min(best, (p - q).norm());
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(one_way(a, b), one_way(b, a));
}

// Largest distance to surface 2 of the surface-1 trim curve sampled halfway
// between its interpolation parameters.
double midpoint_residual(int nlines) {
  const auto s1 = cylinder();
  const auto s2 = shapes::extruded_quarter_arc();
  const Decomposition d = surface_surface_intersection(s1, s2, with_lines(nlines));
  const auto& t = d.patches[0].boundary_params;
  double worst = 0.0;
  for (std::size_t k = 0; k + 1 < t.size(); ++k) {
    const Vec3 x = d.patches[0].surface.point(0.5 * (t[k] + t[k + 1]), 1.0);
    worst = std::max(worst, dense_distance(s2, x));
  }
  return worst;
}

}  // namespace

TEST(IsoLines, CylinderStations) {
  const auto lines = generate_iso_lines(cylinder(), shapes::extruded_quarter_arc(), with_lines(5));
  ASSERT_EQ(lines.size(), 5u);
  for (std::size_t k = 0; k < 5; ++k) {
    EXPECT_DOUBLE_EQ(lines[k].xi, 0.25 * static_cast<double>(k));
    const auto& cps = lines[k].line.control_points();
    const Vec3 dir = (cps[1].position - cps[0].position).normalized();
    EXPECT_LT((dir - Vec3(0, 0, 1)).norm(), 1e-12);
    // the line passes through the surface-1 iso-curve ends
    EXPECT_LT((lines[k].line.point((0.0 - lines[k].t_lo) / (lines[k].t_hi - lines[k].t_lo)) -
               cylinder().point(lines[k].xi, 0.0))
                  .norm(),
              1e-12);
    EXPECT_LT(lines[k].t_lo, 0.0);
    EXPECT_GT(lines[k].t_hi, 1.0);
  }
}

TEST(IsoLines, PlanarSurfaceGivesParallelLines) {
  const auto plane = make_bilinear<3>(Vec3(0, 0, 0), Vec3(2, 0, 0), Vec3(0.3, 0, 1), Vec3(2.3, 0, 1));
  const auto lines = generate_iso_lines(plane, shapes::extruded_quarter_arc(), with_lines(7));
  const auto dir = [](const IsoLine& l) {
    return (l.line.control_points()[1].position - l.line.control_points()[0].position).normalized();
  };
  for (const auto& l : lines) EXPECT_LT((dir(l) - dir(lines.front())).norm(), 1e-12);
}

TEST(IsoLines, ConfigAndDegenerateSurface) {
  EXPECT_THROW(generate_iso_lines(cylinder(), cylinder(), with_lines(2)), ValidationError);
  IntersectConfig cfg = with_lines(3);
  cfg.trim_degree = 3;
  EXPECT_THROW(cfg.validate(), ValidationError);
  const auto flat = make_bilinear<3>(Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 0, 0), Vec3(1, 0, 0));
  EXPECT_THROW(generate_iso_lines(flat, cylinder(), with_lines(5)), GeometryError);
}

TEST(IntersectionPoints, AllOnBothSurfaces) {
  const auto s1 = cylinder();
  const auto s2 = shapes::extruded_quarter_arc();
  const IntersectConfig cfg;
  const auto pts = compute_intersection_points(generate_iso_lines(s1, s2, cfg), s1, s2, cfg);
  ASSERT_EQ(pts.points.size(), 17u);
  for (const auto& d : pts.diagnostics) EXPECT_TRUE(d.converged && d.accepted);
  for (std::size_t k = 0; k < pts.points.size(); ++k) {
    const auto& p = pts.points[k];
    EXPECT_EQ(p.line_index, static_cast<int>(k));
    EXPECT_LE(dense_distance(s1, p.p3d), 1e-6);
    EXPECT_LE(dense_distance(s2, p.p3d), 1e-6);
    EXPECT_LT((s1.point(p.uv1.x(), p.uv1.y()) - p.p3d).norm(), 1e-6);
    EXPECT_LT((s2.point(p.uv2.x(), p.uv2.y()) - p.p3d).norm(), 1e-9);
    // on the cylinder wall, on the arc
    EXPECT_NEAR((Vec2(p.p3d.x(), p.p3d.y()) - kCenter).norm(), kRadius, 1e-6);
    EXPECT_NEAR(p.uv1.x(), k / 16.0, 1e-6);
  }
}

TEST(IntersectionPoints, DisjointSurfacesFail) {
  const auto far = shapes::vertical_cylinder(kCenter, kRadius, 10.0, 11.5);
  const auto s2 = shapes::extruded_quarter_arc();
  const IntersectConfig cfg;
  EXPECT_THROW(compute_intersection_points(generate_iso_lines(far, s2, cfg), far, s2, cfg), ConvergenceError);
  try {
    surface_surface_intersection(far, s2, cfg);
    FAIL() << "expected an error";
  } catch (const ConvergenceError& e) {
    EXPECT_EQ(std::string(e.what()).rfind("intersect lines: insufficient intersection", 0), 0u) << e.what();
  }
}

TEST(TrimSurface1, FlatCut) {
  const auto s1 = cylinder();
  const double c = 0.37;
  IntersectionCurvePoints pts;
  for (int k = 0; k < 9; ++k) pts.points.push_back({s1.point(k / 8.0, c), Vec2(k / 8.0, c), Vec2::Zero(), k});
  const Patch lower = trim_intersecting_surface(s1, pts, IntersectConfig{});
  IntersectConfig upper_cfg;
  upper_cfg.keep_upper = true;
  const Patch upper = trim_intersecting_surface(s1, pts, upper_cfg);
  for (int a = 0; a <= 20; ++a)
    for (int b = 0; b <= 20; ++b) {
      const Vec2 q = lower.surface.trim(a / 20.0, b / 20.0);
      EXPECT_GE(q.x(), -1e-9);
      EXPECT_LE(q.x(), 1.0 + 1e-9);
      EXPECT_GE(q.y(), -1e-9);
      EXPECT_LE(q.y(), c + 1e-9);
      const Vec2 r = upper.surface.trim(a / 20.0, b / 20.0);
      EXPECT_GE(r.y(), c - 1e-9);
      EXPECT_LE(r.y(), 1.0 + 1e-9);
    }
  // corners reach the full [0,1] x [0,c] box
  EXPECT_LT((lower.surface.trim(0, 0) - Vec2(0, 0)).norm(), 1e-9);
  EXPECT_LT((lower.surface.trim(1, 0) - Vec2(1, 0)).norm(), 1e-9);
  EXPECT_LT((lower.surface.trim(0, 1) - Vec2(0, c)).norm(), 1e-9);
  EXPECT_LT((lower.surface.trim(1, 1) - Vec2(1, c)).norm(), 1e-9);
  EXPECT_EQ(lower.trim_edge_t, 1.0);
  EXPECT_EQ(upper.trim_edge_t, 0.0);
}

TEST(Pipeline, FivePatchesOnTheExamplePair) {
  const auto s1 = cylinder();
  const auto s2 = shapes::extruded_quarter_arc();
  const Decomposition d = surface_surface_intersection(s1, s2);
  ASSERT_EQ(d.patches.size(), 5u);
  EXPECT_EQ(d.patches[0].source, 1);
  for (int q = 0; q < 4; ++q) {
    EXPECT_EQ(d.patches[static_cast<std::size_t>(q + 1)].source, 2);
    EXPECT_EQ(d.patches[static_cast<std::size_t>(q + 1)].quadrant, q);
  }
  for (const auto& p : d.patches)
    for (int a = 0; a <= 10; ++a)
      for (int b = 0; b <= 10; ++b) EXPECT_TRUE(all_finite<3>(p.surface.point(a / 10.0, b / 10.0)));
}

TEST(Pipeline, TrimmedCylinderTopEdgeOnSurface2) {
  const auto s1 = cylinder();
  const auto s2 = shapes::extruded_quarter_arc();
  const Decomposition d = surface_surface_intersection(s1, s2);
  const Patch& top = d.patches[0];
  const auto& t = top.boundary_params;
  ASSERT_EQ(t.size(), d.curve.points.size());
  for (std::size_t k = 0; k < t.size(); ++k) {
    // parameter space: the trim edge reproduces the uv1 points
    EXPECT_LT((top.surface.trim(t[k], 1.0) - d.curve.points[k].uv1).norm(), top.fit_residual + 1e-8);
    // model space: it lies on surface 2
    EXPECT_LT(dense_distance(s2, top.surface.point(t[k], 1.0)), 1e-4);
  }
  // the kept side is the lower part of the cylinder
  EXPECT_LT(top.surface.point(0.3, 0.0).z(), 1e-12);
}

TEST(Pipeline, EveryLoopPointOnAQuadrantBoundary) {
  const Decomposition d = surface_surface_intersection(cylinder(), shapes::extruded_quarter_arc());
  for (const auto& p : d.curve.points) {
    double best = INFINITY;
    for (std::size_t k = 1; k < d.patches.size(); ++k) {
      const Patch& patch = d.patches[k];
      const auto& t = patch.boundary_params;
      for (std::size_t m = 0; m < t.size(); ++m)
        if ((patch.boundary[m] - p.uv2).norm() < 1e-15)
          best = std::min(best, (patch.surface.trim(t[m], patch.trim_edge_t) - p.uv2).norm());
    }
    EXPECT_LE(best, 1e-6);
  }
}

TEST(Pipeline, QuadrantLocalCoordinates) {
  const Decomposition d = surface_surface_intersection(cylinder(), shapes::extruded_quarter_arc());
  for (std::size_t k = 1; k < d.patches.size(); ++k) {
    const Patch& patch = d.patches[k];
    ASSERT_EQ(patch.local.size(), patch.boundary.size());
    for (const Vec2& q : patch.local) {
      EXPECT_GE(q.minCoeff(), -1e-12);
      EXPECT_LE(q.maxCoeff(), 1.0 + 1e-12);
    }
  }
}

TEST(Pipeline, BoundaryFidelity) {
  // At the interpolation nodes the trim edge reproduces the intersection
  // points to the fit residual. Between nodes it stays near the true
  // intersection curve: quadrant arcs end at split-line crossings that are
  // interpolated linearly between loop points 22.5 degrees apart on the
  // cylinder, so they may sit off the circle by up to the chord sag.
  const auto s1 = cylinder();
  const auto s2 = shapes::extruded_quarter_arc();
  const Decomposition d = surface_surface_intersection(s1, s2);
  const double sag = kRadius * (1.0 - std::cos(M_PI / 16.0));
  for (const Patch& patch : d.patches) {
    const auto& t = patch.boundary_params;
    ASSERT_EQ(t.size(), patch.boundary.size());
    for (std::size_t m = 0; m < t.size(); ++m)
      EXPECT_LE((patch.surface.trim(t[m], patch.trim_edge_t) - patch.boundary[m]).norm(), patch.fit_residual + 1e-6);
    for (int k = 0; k < 50; ++k) {
      const Vec3 x = patch.surface.point(k / 49.0, patch.trim_edge_t);
      if (patch.source == 1) {
        EXPECT_LT(dense_distance(s2, x), 1e-3) << "sample " << k;
      } else {
        EXPECT_LT(std::abs((Vec2(x.x(), x.y()) - kCenter).norm() - kRadius), sag) << "quadrant " << patch.quadrant;
      }
    }
  }
}

TEST(Pipeline, AreaConservation) {
  const Decomposition d = surface_surface_intersection(cylinder(), shapes::extruded_quarter_arc());
  double area = 0.0;
  for (std::size_t k = 1; k < d.patches.size(); ++k) area += tessellate(d.patches[k].surface, 128, 128).area();
  const double expected = area_outside_cylinder(1000);
  EXPECT_NEAR(area, expected, 0.01 * expected);
}

TEST(Pipeline, RefinementSelfConsistency) {
  const auto s1 = cylinder();
  const auto s2 = shapes::extruded_quarter_arc();
  const auto coarse = surface_surface_intersection(s1, s2, with_lines(9));
  const auto fine = surface_surface_intersection(s1, s2, with_lines(33));
  EXPECT_LE(hausdorff(curve_samples(coarse, 200), curve_samples(fine, 200)), 5e-3);
}

TEST(Pipeline, DoublingLinesDoesNotWorsenMidpoints) {
  const double r9 = midpoint_residual(9), r17 = midpoint_residual(17), r33 = midpoint_residual(33);
  EXPECT_LE(r17, 1.1 * r9);
  EXPECT_LE(r33, 1.1 * r17);
}

TEST(Pipeline, Deterministic) {
  const auto a = surface_surface_intersection(cylinder(), shapes::extruded_quarter_arc());
  const auto b = surface_surface_intersection(cylinder(), shapes::extruded_quarter_arc());
  ASSERT_EQ(a.patches.size(), b.patches.size());
  for (std::size_t k = 0; k < a.patches.size(); ++k) {
    const auto& ca = a.patches[k].surface.trim.surface().control_points();
    const auto& cb = b.patches[k].surface.trim.surface().control_points();
    ASSERT_EQ(ca.size(), cb.size());
    for (std::size_t m = 0; m < ca.size(); ++m) {
      EXPECT_EQ(std::memcmp(ca[m].position.data(), cb[m].position.data(), sizeof(double) * 2), 0);
      EXPECT_EQ(ca[m].weight, cb[m].weight);
    }
  }
}

TEST(Pipeline, OpenLoopIsUnsupported) {
  // a flat wall crossing the arc surface from edge to edge
  const auto wall = make_bilinear<3>(Vec3(0.2, 0.5, 0), Vec3(0.8, 0.5, 0), Vec3(0.2, 0.5, 1.5), Vec3(0.8, 0.5, 1.5));
  try {
    surface_surface_intersection(wall, shapes::extruded_quarter_arc());
    FAIL() << "expected an error";
  } catch (const TopologyError& e) {
    EXPECT_EQ(std::string(e.what()).rfind("subdivide surface 2: ", 0), 0u) << e.what();
  }
}
