#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "nurbsgeo/closest_point.hpp"
#include "nurbsgeo/curve.hpp"
#include "nurbsgeo/errors.hpp"
#include "nurbsgeo/fitting.hpp"
#include "nurbsgeo/line_intersection.hpp"
#include "nurbsgeo/surface.hpp"
#include "nurbsgeo/trim.hpp"

namespace nurbsgeo {

struct IntersectConfig {
  int nlines = 17;
  int trim_degree = 2;
  double extent = 0.1;          // relative overshoot of the generated lines
  bool keep_upper = false;      // keep the eta = 1 side of surface 1 instead of the eta = 0 side
  double point_tolerance = 1e-6;  // accepted distance of an intersection point to either surface
  ParamMethod surface1_params = ParamMethod::Uniform;  // the lines sit at uniform xi stations
  LineIntersectConfig line;

  void validate() const {
    if (nlines < 3) throw ValidationError("nlines must be >= 3");
    if (trim_degree < 1) throw ValidationError("trim degree must be >= 1");
    if (nlines < trim_degree + 1) throw ValidationError("nlines must be >= trim degree + 1");
    if (!(extent >= 0.0)) throw ValidationError("line extent must be non-negative");
    if (!(point_tolerance > 0.0)) throw ValidationError("point tolerance must be positive");
    line.validate();
  }
};

/// Straight line standing in for the surface-1 iso-curve at `xi`. Line
/// parameter s in [0,1] corresponds to iso-curve parameter
/// eta = t_lo + s * (t_hi - t_lo).
struct IsoLine {
  double xi = 0.0;
  double t_lo = 0.0;
  double t_hi = 1.0;
  NurbsCurve<3> line;

  double eta_at(double s) const { return t_lo + s * (t_hi - t_lo); }
};

struct IntersectionPoint {
  Vec3 p3d = Vec3::Zero();
  Vec2 uv1 = Vec2::Zero();
  Vec2 uv2 = Vec2::Zero();
  int line_index = 0;
};

struct LineDiagnostic {
  int line_index = 0;
  double xi = 0.0;
  bool converged = false;
  double residual1 = 0.0;  // distance of the hit to surface 1
  double residual2 = 0.0;  // line to surface 2 gap
  bool accepted = false;
};

struct IntersectionCurvePoints {
  std::vector<IntersectionPoint> points;
  std::vector<LineDiagnostic> diagnostics;
};

/// Trimmed piece of one input surface. The trim map's t = trim_edge_t
/// iso-line follows the intersection curve; `boundary` holds the
/// intersection data on that edge in the owning surface's parameters and
/// `local` the same points in the quadrant's own [0,1]^2 coordinates.
struct Patch {
  int source = 1;       // 1 or 2
  int quadrant = -1;    // 0..3 for surface 2 pieces: bit 0 = upper xi half, bit 1 = upper eta half
  double trim_edge_t = 1.0;
  TrimmedSurface surface;
  std::vector<Vec2> boundary;
  std::vector<double> boundary_params;  // where each boundary point sits along the trim edge
  std::vector<Vec2> local;
  double fit_residual = 0.0;
};

struct Decomposition {
  std::vector<Patch> patches;
  IntersectionCurvePoints curve;
};

/// nlines uniformly spaced xi stations on surface 1, each a straight line
/// through S1(xi, 0) and S1(xi, 1). The line is lengthened to also span the
/// control box of surface 2 along its direction, then by `extent` of its
/// length at both ends.
inline std::vector<IsoLine> generate_iso_lines(const NurbsSurface<3>& surface1, const NurbsSurface<3>& surface2,
                                               const IntersectConfig& cfg) {
  cfg.validate();
  std::vector<IsoLine> lines;
  lines.reserve(static_cast<std::size_t>(cfg.nlines));
  for (int k = 0; k < cfg.nlines; ++k) {
    const double xi = static_cast<double>(k) / (cfg.nlines - 1);
    const Vec3 a = surface1.point(xi, 0.0), b = surface1.point(xi, 1.0);
    const Vec3 dir = b - a;
    const double len2 = dir.squaredNorm();
    if (!(len2 > 1e-24))
      throw GeometryError("degenerate iso-line at xi = " + std::to_string(xi) + " (zero length)");
    double lo = 0.0, hi = 1.0;
    for (const auto& cp : surface2.control_points()) {
      const double s = (cp.position - a).dot(dir) / len2;
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }
    const double pad = cfg.extent * (hi - lo);
    lo -= pad;
    hi += pad;
    lines.push_back({xi, lo, hi, make_line<3>(a + lo * dir, a + hi * dir)});
  }
  return lines;
}

/// Intersects every line with surface 2 and recovers surface-1 parameters by
/// projecting each hit back onto surface 1, seeded at the line's xi. Hits
/// farther than point_tolerance from either surface are dropped and only
/// show up in the diagnostics.
inline IntersectionCurvePoints compute_intersection_points(const std::vector<IsoLine>& lines,
                                                           const NurbsSurface<3>& surface1,
                                                           const NurbsSurface<3>& surface2,
                                                           const IntersectConfig& cfg) {
  cfg.validate();
  IntersectionCurvePoints out;
  for (std::size_t k = 0; k < lines.size(); ++k) {
    const IsoLine& iso = lines[k];
    const LineIntersectResult hit = line_surface_intersection(iso.line, surface2, cfg.line);
    LineDiagnostic diag;
    diag.line_index = static_cast<int>(k);
    diag.xi = iso.xi;
    diag.converged = hit.converged;
    diag.residual2 = hit.residual;
    if (hit.converged) {
      const Vec2 seed(iso.xi, std::clamp(iso.eta_at(hit.xi_line), 0.0, 1.0));
      const ClosestPointResult back = closest_point_from(surface1, hit.point, seed, cfg.line.projection);
      diag.residual1 = back.distance;
      diag.accepted = back.distance <= cfg.point_tolerance && hit.residual <= cfg.point_tolerance;
      if (diag.accepted) out.points.push_back({hit.point, Vec2(back.xi, back.eta), Vec2(hit.xi, hit.eta), diag.line_index});
    }
    out.diagnostics.push_back(diag);
  }
  const auto needed = static_cast<std::size_t>(cfg.trim_degree) + 1;
  if (out.points.size() < needed)
    throw ConvergenceError("insufficient intersection: " + std::to_string(out.points.size()) + " of " +
                           std::to_string(lines.size()) + " lines hit surface 2, need " + std::to_string(needed) +
                           " (the surfaces may not intersect)");
  return out;
}

namespace detail {

/// Gives two curves of equal degree a common knot vector by inserting the
/// knots each one lacks.
template <int Dim>
void merge_knots(NurbsCurve<Dim>& a, NurbsCurve<Dim>& b) {
  auto missing = [](const NurbsCurve<Dim>& from, const NurbsCurve<Dim>& into) {
    std::vector<double> need;
    const auto& f = from.basis().knots.values();
    const auto& t = into.basis().knots.values();
    std::size_t i = 0, j = 0;
    while (i < f.size()) {
      if (j < t.size() && t[j] == f[i]) {
        ++i;
        ++j;
      } else if (j < t.size() && t[j] < f[i]) {
        ++j;
      } else {
        need.push_back(f[i]);
        ++i;
      }
    }
    return need;
  };
  const std::vector<double> for_a = missing(b, a), for_b = missing(a, b);
  for (double u : for_a) a = insert_knot(a, u);
  for (double u : for_b) b = insert_knot(b, u);
}

/// Ruled trim map: t = 0 follows `bottom`, t = 1 follows `top`.
inline TrimMap ruled_trim(NurbsCurve<2> bottom, NurbsCurve<2> top) {
  merge_knots(bottom, top);
  std::vector<ControlPoint<2>> net;
  for (std::size_t i = 0; i < bottom.control_points().size(); ++i) {
    net.push_back(bottom.control_points()[i]);
    net.push_back(top.control_points()[i]);
  }
  return TrimMap(NurbsSurface<2>(bottom.basis(), SplineBasis(KnotVector({0, 0, 1, 1}), 1), std::move(net)));
}

/// Degree-d polyline a -> corner -> b with the corner at the chord-length
/// break parameter; equally spaced control points keep it exactly straight.
inline NurbsCurve<2> corner_path(const Vec2& a, const Vec2& corner, const Vec2& b, int degree) {
  const double l1 = (corner - a).norm(), l2 = (b - corner).norm();
  const double split = l1 + l2 > 0.0 ? std::clamp(l1 / (l1 + l2), 1e-6, 1.0 - 1e-6) : 0.5;
  std::vector<double> knots(static_cast<std::size_t>(degree) + 1, 0.0);
  for (int k = 0; k < degree; ++k) knots.push_back(split);
  for (int k = 0; k <= degree; ++k) knots.push_back(1.0);
  std::vector<ControlPoint<2>> cps;
  for (int k = 0; k < degree; ++k) cps.push_back({a + (corner - a) * (static_cast<double>(k) / degree), 1.0});
  for (int k = 0; k <= degree; ++k) cps.push_back({corner + (b - corner) * (static_cast<double>(k) / degree), 1.0});
  return NurbsCurve<2>(SplineBasis(KnotVector(std::move(knots)), degree), std::move(cps));
}

}  // namespace detail

/// Surface 1 is closed in xi when its xi = 0 and xi = 1 iso-curves coincide.
inline bool closed_in_xi(const NurbsSurface<3>& surface, int samples = 9) {
  for (int k = 0; k < samples; ++k) {
    const double eta = static_cast<double>(k) / (samples - 1);
    if ((surface.point(0.0, eta) - surface.point(1.0, eta)).norm() > 1e-9) return false;
  }
  return true;
}

/// Trims surface 1 along a curve fitted through the uv1 points. The kept
/// side is the eta = 0 side (eta = 1 with keep_upper); the trim edge is the
/// trim map's t = 1 iso-line (t = 0 with keep_upper). When surface 1 is
/// closed in xi and the points run from xi = 0 to xi = 1, the fit also sees
/// the points wrapped around from the other end, so the curve ends are no
/// less accurate than its middle.
inline Patch trim_intersecting_surface(const NurbsSurface<3>& surface1, const IntersectionCurvePoints& points,
                                       const IntersectConfig& cfg) {
  cfg.validate();
  std::vector<Vec2> uv;
  for (const auto& p : points.points) uv.push_back(p.uv1);
  const int count = static_cast<int>(uv.size());
  const int degree = std::min(cfg.trim_degree, count - 1);
  const bool wrap = count >= 4 && std::abs(uv.front().x()) < 1e-6 && std::abs(uv.back().x() - 1.0) < 1e-6 &&
                    closed_in_xi(surface1);
  const int pad = wrap ? std::min(degree + 1, count - 2) : 0;

  std::vector<Vec2> ext;
  for (int k = pad; k >= 1; --k) ext.push_back(uv[static_cast<std::size_t>(count - 1 - k)] - Vec2(1.0, 0.0));
  ext.insert(ext.end(), uv.begin(), uv.end());
  for (int k = 1; k <= pad; ++k) ext.push_back(uv[static_cast<std::size_t>(k)] + Vec2(1.0, 0.0));
  const CurveFit<2> fit = fit_curve<2>(ext, degree, std::nullopt, cfg.surface1_params, KnotPlacement::Averaged);

  NurbsCurve<2> curve = fit.curve;
  std::vector<double> params(fit.params.begin() + pad, fit.params.begin() + pad + count);
  if (pad > 0) {
    const double a = params.front(), b = params.back();
    curve = subcurve(curve, a, b);
    for (double& t : params) t = (t - a) / (b - a);
    params.front() = 0.0;
    params.back() = 1.0;
  }

  std::vector<ControlPoint<2>> net;
  for (const auto& c : curve.control_points()) {
    const Vec2 edge = cfg.keep_upper ? Vec2(c.position.x(), 1.0) : Vec2(c.position.x(), 0.0);
    if (cfg.keep_upper) {
      net.push_back(c);
      net.push_back({edge, c.weight});
    } else {
      net.push_back({edge, c.weight});
      net.push_back(c);
    }
  }
  Patch patch;
  patch.source = 1;
  patch.trim_edge_t = cfg.keep_upper ? 0.0 : 1.0;
  patch.surface = {surface1, TrimMap(NurbsSurface<2>(curve.basis(), SplineBasis(KnotVector({0, 0, 1, 1}), 1),
                                                     std::move(net)))};
  patch.boundary = uv;
  patch.boundary_params = std::move(params);
  patch.local = uv;
  patch.fit_residual = fit.result.residual_norm;
  return patch;
}

/// Splits surface 2's parameter square at the center of the uv2 loop's
/// bounding box and trims each quadrant to exclude the loop interior. Each
/// quadrant map is ruled between the quadrant's outer corner path (t = 0)
/// and a curve fitted through the loop points inside it (t = 1).
inline std::vector<Patch> subdivide_and_trim_intersected(const NurbsSurface<3>& surface2,
                                                         const IntersectionCurvePoints& points, bool closed,
                                                         const IntersectConfig& cfg) {
  cfg.validate();
  if (!closed)
    throw TopologyError("open intersection loop: surface 1 is not closed in xi, so the uv2 points do not form a loop");
  std::vector<Vec2> loop;
  for (const auto& p : points.points) loop.push_back(p.uv2);
  if (loop.size() >= 2 && (loop.front() - loop.back()).norm() < 1e-9) loop.pop_back();
  if (loop.size() < 3) throw TopologyError("intersection loop has fewer than 3 distinct points");
  for (const Vec2& q : loop)
    if (!(q.x() > 0.0 && q.x() < 1.0 && q.y() > 0.0 && q.y() < 1.0))
      throw TopologyError("intersection loop reaches the boundary of surface 2 (open loops are not supported)");

  Vec2 lo = loop.front(), hi = loop.front();
  for (const Vec2& q : loop) {
    lo = lo.cwiseMin(q);
    hi = hi.cwiseMax(q);
  }
  const Vec2 c = 0.5 * (lo + hi);
  const double eps = 1e-12;

  // Loop with split-line crossings inserted; points on a line keep a flag.
  struct Node {
    Vec2 q;
    bool on_v;  // xi = c.x
    bool on_h;  // eta = c.y
  };
  auto side = [&](double v, double center) { return std::abs(v - center) <= eps ? 0 : (v < center ? -1 : 1); };
  std::vector<Node> ring;
  for (std::size_t k = 0; k < loop.size(); ++k) {
    const Vec2 a = loop[k], b = loop[(k + 1) % loop.size()];
    ring.push_back({a, side(a.x(), c.x()) == 0, side(a.y(), c.y()) == 0});
    std::vector<std::pair<double, Node>> cuts;
    const int ax = side(a.x(), c.x()), bx = side(b.x(), c.x());
    const int ay = side(a.y(), c.y()), by = side(b.y(), c.y());
    if (ax * bx < 0) {
      const double s = (c.x() - a.x()) / (b.x() - a.x());
      cuts.push_back({s, {Vec2(c.x(), a.y() + s * (b.y() - a.y())), true, false}});
    }
    if (ay * by < 0) {
      const double s = (c.y() - a.y()) / (b.y() - a.y());
      cuts.push_back({s, {Vec2(a.x() + s * (b.x() - a.x()), c.y()), false, true}});
    }
    std::sort(cuts.begin(), cuts.end(), [](const auto& l, const auto& r) { return l.first < r.first; });
    for (const auto& cut : cuts) ring.push_back(cut.second);
  }
  for (const Node& n : ring)
    if (n.on_v && n.on_h) throw TopologyError("intersection loop passes through its own bounding-box center");

  std::vector<Patch> out;
  for (int quadrant = 0; quadrant < 4; ++quadrant) {
    const int sx = (quadrant & 1) ? 1 : -1, sy = (quadrant & 2) ? 1 : -1;
    auto inside = [&](const Node& n) {
      return (n.on_v || side(n.q.x(), c.x()) == sx) && (n.on_h || side(n.q.y(), c.y()) == sy);
    };
    // maximal cyclic runs of quadrant points that start and end on the two split lines
    const std::size_t n = ring.size();
    std::size_t start = n;
    for (std::size_t k = 0; k < n; ++k)
      if (!inside(ring[k])) {
        start = k;
        break;
      }
    if (start == n) throw TopologyError("intersection loop lies in a single quadrant");
    std::vector<std::vector<Node>> runs;
    std::vector<Node> cur;
    for (std::size_t step = 1; step <= n; ++step) {
      const Node& node = ring[(start + step) % n];
      if (inside(node)) {
        cur.push_back(node);
      } else if (!cur.empty()) {
        runs.push_back(cur);
        cur.clear();
      }
    }
    if (!cur.empty()) runs.push_back(cur);
    std::vector<std::vector<Node>> arcs;
    for (auto& run : runs) {
      if (run.size() < 2) continue;
      const Node &f = run.front(), &b = run.back();
      if (f.on_v && b.on_h) std::reverse(run.begin(), run.end());
      if (run.front().on_h && run.back().on_v) arcs.push_back(run);
    }
    if (arcs.size() != 1)
      throw TopologyError("quadrant " + std::to_string(quadrant) + " holds " + std::to_string(arcs.size()) +
                          " loop segments, expected 1");

    std::vector<Vec2> arc_pts;
    for (const Node& node : arcs.front()) arc_pts.push_back(node.q);
    if (arc_pts.size() == 2) arc_pts.insert(arc_pts.begin() + 1, 0.5 * (arc_pts[0] + arc_pts[1]));
    const int degree = std::min(cfg.trim_degree, static_cast<int>(arc_pts.size()) - 1);
    const CurveFit<2> arc = fit_trim_curve(arc_pts, degree);

    const Vec2 corner(sx < 0 ? 0.0 : 1.0, sy < 0 ? 0.0 : 1.0);
    const NurbsCurve<2> outer =
        detail::corner_path(Vec2(corner.x(), c.y()), corner, Vec2(c.x(), corner.y()), degree);

    Patch patch;
    patch.source = 2;
    patch.quadrant = quadrant;
    patch.trim_edge_t = 1.0;
    patch.surface = {surface2, detail::ruled_trim(outer, arc.curve)};
    patch.boundary = arc_pts;
    patch.boundary_params = arc.params;
    const Vec2 q0 = c.cwiseMin(corner), q1 = c.cwiseMax(corner);
    for (const Vec2& q : arc_pts) patch.local.push_back((q - q0).cwiseQuotient(q1 - q0));
    patch.fit_residual = arc.result.residual_norm;
    out.push_back(std::move(patch));
  }
  return out;
}

/// Full pipeline: trimmed surface 1 followed by the four trimmed quadrants
/// of surface 2.
inline Decomposition surface_surface_intersection(const NurbsSurface<3>& surface1, const NurbsSurface<3>& surface2,
                                                  const IntersectConfig& cfg = {}) {
  cfg.validate();
  Decomposition out;
  std::vector<IsoLine> lines;
  try {
    lines = generate_iso_lines(surface1, surface2, cfg);
  } catch (Error& e) {
    e.prepend("generate lines");
    throw;
  }
  try {
    out.curve = compute_intersection_points(lines, surface1, surface2, cfg);
  } catch (Error& e) {
    e.prepend("intersect lines");
    throw;
  }
  try {
    out.patches.push_back(trim_intersecting_surface(surface1, out.curve, cfg));
  } catch (Error& e) {
    e.prepend("trim surface 1");
    throw;
  }
  try {
    const bool closed = closed_in_xi(surface1) && out.curve.diagnostics.front().accepted &&
                        out.curve.diagnostics.back().accepted;
    for (Patch& p : subdivide_and_trim_intersected(surface2, out.curve, closed, cfg)) out.patches.push_back(std::move(p));
  } catch (Error& e) {
    e.prepend("subdivide surface 2");
    throw;
  }
  return out;
}

}  // namespace nurbsgeo
