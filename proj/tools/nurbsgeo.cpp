// nurbsgeo: command-line driver for the geometry library.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "nurbsgeo/closest_point.hpp"
#include "nurbsgeo/fitting.hpp"
#include "nurbsgeo/io/document.hpp"
#include "nurbsgeo/io/obj.hpp"
#include "nurbsgeo/line_intersection.hpp"
#include "nurbsgeo/surface_intersection.hpp"
#include "nurbsgeo/tessellate.hpp"

using namespace nurbsgeo;

namespace {

enum Exit { kOk = 0, kUsage = 1, kParse = 2, kValidation = 3, kNumerical = 4, kIo = 5 };

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v == 0.0 ? 0.0 : v);
  return buf;
}

template <class V>
std::string fmt_vec(const V& v) {
  std::string out;
  for (Eigen::Index k = 0; k < v.size(); ++k) out += (k ? " " : "") + fmt(v[k]);
  return out;
}

void line(const std::string& key, const std::string& value) { std::cout << key << ": " << value << "\n"; }

/// Whitespace separated coordinates, one point per line; '#' starts a comment.
std::vector<Vec3> read_points(const std::string& path) {
  std::istringstream in(io::read_file(path));
  std::vector<Vec3> pts;
  std::string text;
  int lineno = 0;
  while (std::getline(in, text)) {
    ++lineno;
    if (const auto hash = text.find('#'); hash != std::string::npos) text.resize(hash);
    std::istringstream ls(text);
    std::vector<double> vals;
    double v;
    while (ls >> v) vals.push_back(v);
    if (!ls.eof()) throw ParseError(path + ": line " + std::to_string(lineno) + ": expected numbers");
    if (vals.empty()) continue;
    if (vals.size() != 3)
      throw ParseError(path + ": line " + std::to_string(lineno) + ": expected 3 coordinates, got " +
                       std::to_string(vals.size()));
    pts.emplace_back(vals[0], vals[1], vals[2]);
  }
  return pts;
}

void report_fit(const FitResult<3>& r) {
  line("residual", fmt(r.residual_norm));
  line("exact", r.exact ? "true" : "false");
}

struct Options {
  std::string doc, entity, entity2, out, points, name;
  double xi = 0.0, eta = 0.0;
  std::vector<double> point;
  int degree = 3, degree_eta = 3, approx = 0, rows = 0, cols = 0, control_xi = 0, control_eta = 0;
  bool uniform = false, keep_upper = false;
  ProjectionConfig projection;
  IntersectConfig intersect;
  int nx = 32, ny = 32;
};

int cmd_eval(const Options& o) {
  const io::Document doc = io::load(o.doc);
  const io::Entity& e = doc.at(o.entity);
  line("entity", e.name);
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, NurbsCurve<2>> || std::is_same_v<T, NurbsCurve<3>>) {
          line("xi", fmt(o.xi));
          line("point", fmt_vec(v.point(o.xi)));
          line("tangent", fmt_vec(v.tangent(o.xi)));
        } else if constexpr (std::is_same_v<T, NurbsSurface<2>> || std::is_same_v<T, NurbsSurface<3>>) {
          const auto d = v.derivatives(o.xi, o.eta);
          line("xi", fmt(o.xi));
          line("eta", fmt(o.eta));
          line("point", fmt_vec(d.point));
          line("d_xi", fmt_vec(d.d_xi));
          line("d_eta", fmt_vec(d.d_eta));
        } else if constexpr (std::is_same_v<T, TrimmedSurface>) {
          line("xi", fmt(o.xi));
          line("eta", fmt(o.eta));
          line("base_params", fmt_vec(v.trim(o.xi, o.eta)));
          line("point", fmt_vec(v.point(o.xi, o.eta)));
        } else {
          throw ValidationError("entity '" + e.name + "' is a point set and cannot be evaluated");
        }
      },
      e.value);
  return kOk;
}

int cmd_fit_curve(const Options& o) {
  const auto pts = read_points(o.points);
  const auto method = o.uniform ? ParamMethod::Uniform : ParamMethod::ChordLength;
  const std::optional<std::size_t> count =
      o.approx > 0 ? std::optional<std::size_t>(static_cast<std::size_t>(o.approx)) : std::nullopt;
  const CurveFit<3> fit = fit_curve<3>(pts, o.degree, count, method);
  io::Document doc;
  doc.add(o.name.empty() ? "curve" : o.name, fit.curve);
  io::save(o.out, doc);
  line("points", std::to_string(pts.size()));
  line("control_points", std::to_string(fit.curve.control_points().size()));
  report_fit(fit.result);
  line("written", o.out);
  return kOk;
}

int cmd_fit_surface(const Options& o) {
  const auto pts = read_points(o.points);
  const auto method = o.uniform ? ParamMethod::Uniform : ParamMethod::ChordLength;
  auto opt = [](int n) { return n > 0 ? std::optional<std::size_t>(static_cast<std::size_t>(n)) : std::nullopt; };
  const SurfaceFit<3> fit = fit_surface_grid<3>(pts, static_cast<std::size_t>(o.rows), static_cast<std::size_t>(o.cols),
                                                o.degree, o.degree_eta, opt(o.control_xi), opt(o.control_eta), method);
  io::Document doc;
  doc.add(o.name.empty() ? "surface" : o.name, fit.surface);
  io::save(o.out, doc);
  line("points", std::to_string(pts.size()));
  line("control_net", std::to_string(fit.surface.count_xi()) + "x" + std::to_string(fit.surface.count_eta()));
  report_fit(fit.result);
  line("written", o.out);
  return kOk;
}

int cmd_closest(const Options& o) {
  const io::Document doc = io::load(o.doc);
  const auto& s = doc.get<NurbsSurface<3>>(o.entity);
  const ClosestPointResult r = closest_point(s, Vec3(o.point[0], o.point[1], o.point[2]), o.projection);
  line("xi", fmt(r.xi));
  line("eta", fmt(r.eta));
  line("point", fmt_vec(r.point));
  line("distance", fmt(r.distance));
  line("iterations", std::to_string(r.iterations));
  line("converged", r.converged ? "true" : "false");
  if (!r.converged) throw ConvergenceError("closest point did not converge in " + std::to_string(r.iterations) + " iterations");
  return kOk;
}

int cmd_intersect_line(const Options& o) {
  const io::Document doc = io::load(o.doc);
  const auto& l = doc.get<NurbsCurve<3>>(o.entity);
  const auto& s = doc.get<NurbsSurface<3>>(o.entity2);
  LineIntersectConfig cfg;
  cfg.projection = o.projection;
  const LineIntersectResult r = line_surface_intersection(l, s, cfg);
  line("point", fmt_vec(r.point));
  line("xi_line", fmt(r.xi_line));
  line("xi", fmt(r.xi));
  line("eta", fmt(r.eta));
  line("residual", fmt(r.residual));
  line("iterations", std::to_string(r.iterations));
  line("converged", r.converged ? "true" : "false");
  if (!r.converged) throw ConvergenceError("line does not meet the surface (residual " + fmt(r.residual) + ")");
  return kOk;
}

int cmd_intersect(const Options& o) {
  const io::Document doc = io::load(o.doc);
  const auto& s1 = doc.get<NurbsSurface<3>>(o.entity);
  const auto& s2 = doc.get<NurbsSurface<3>>(o.entity2);
  IntersectConfig cfg = o.intersect;
  cfg.keep_upper = o.keep_upper;
  cfg.line.projection = o.projection;
  const Decomposition d = surface_surface_intersection(s1, s2, cfg);

  io::Document out;
  for (const Patch& p : d.patches)
    out.add(p.source == 1 ? o.entity + "_trimmed" : o.entity2 + "_q" + std::to_string(p.quadrant), p.surface);
  io::PointSet ps;
  for (const auto& p : d.curve.points) ps.points.push_back(p.p3d);
  out.add("intersection_points", ps);
  io::save(o.out, out);

  int accepted = 0;
  for (const auto& g : d.curve.diagnostics) accepted += g.accepted;
  line("lines", std::to_string(d.curve.diagnostics.size()));
  line("intersection_points", std::to_string(accepted));
  for (const auto& g : d.curve.diagnostics)
    std::cout << "  line " << g.line_index << " xi " << fmt(g.xi) << (g.accepted ? " hit" : " miss") << " residual "
              << fmt(std::max(g.residual1, g.residual2)) << "\n";
  line("patches", std::to_string(d.patches.size()));
  for (const Patch& p : d.patches)
    std::cout << "  " << (p.source == 1 ? o.entity + "_trimmed" : o.entity2 + "_q" + std::to_string(p.quadrant))
              << " boundary_points " << p.boundary.size() << " fit_residual " << fmt(p.fit_residual) << "\n";
  line("written", o.out);
  return kOk;
}

int cmd_tessellate(const Options& o) {
  const io::Document doc = io::load(o.doc);
  const io::Entity& e = doc.at(o.entity);
  TriangleMesh mesh;
  if (const auto* s = std::get_if<NurbsSurface<3>>(&e.value)) {
    mesh = tessellate(*s, o.nx, o.ny);
  } else if (const auto* t = std::get_if<TrimmedSurface>(&e.value)) {
    mesh = tessellate(*t, o.nx, o.ny);
  } else {
    throw ValidationError("entity '" + e.name + "' is a " + io::type_name(e.value) +
                          "; only 3D surfaces and trimmed surfaces can be tessellated");
  }
  io::write_file(o.out, io::obj_text(mesh, 0, e.name));
  line("vertices", std::to_string(mesh.vertices.size()));
  line("triangles", std::to_string(mesh.triangles.size()));
  line("area", fmt(mesh.area()));
  line("written", o.out);
  return kOk;
}

void fail_line(const char* kind, const std::string& message) {
  std::cerr << nlohmann::json{{"error", kind}, {"message", message}}.dump() << std::endl;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"NURBS geometry kernel: evaluation, fitting, projection and intersection"};
  app.require_subcommand(1);
  Options o;
  int (*run)(const Options&) = nullptr;

  auto projection_flags = [&](CLI::App* c) {
    c->add_option("--damp", o.projection.damp, "trust radius factor after a rejected step, in (0,1)");
    c->add_option("--tol", o.projection.tolerance, "projection tolerance");
    c->add_option("--iters", o.projection.max_iterations, "projection iteration limit");
    c->add_option("--seed-grid", o.projection.seed_grid, "samples per direction for the start search");
  };

  auto* eval = app.add_subcommand("eval", "evaluate a curve, surface or trimmed surface");
  eval->add_option("doc", o.doc)->required();
  eval->add_option("entity", o.entity)->required();
  eval->add_option("--xi", o.xi)->required();
  eval->add_option("--eta", o.eta);
  eval->callback([&] { run = cmd_eval; });

  auto* fc = app.add_subcommand("fit-curve", "fit a curve through (or near) points from a text file");
  fc->add_option("points", o.points)->required();
  fc->add_option("--degree", o.degree)->required();
  fc->add_option("--approx", o.approx, "control point count for a least-squares fit");
  fc->add_flag("--uniform", o.uniform, "uniform instead of chord-length parameters");
  fc->add_option("--name", o.name);
  fc->add_option("--out", o.out)->required();
  fc->callback([&] { run = cmd_fit_curve; });

  auto* fs = app.add_subcommand("fit-surface", "fit a surface to a rows x cols grid of points");
  fs->add_option("points", o.points)->required();
  fs->add_option("--rows", o.rows, "points along xi")->required();
  fs->add_option("--cols", o.cols, "points along eta")->required();
  fs->add_option("--degree-xi", o.degree)->required();
  fs->add_option("--degree-eta", o.degree_eta)->required();
  fs->add_option("--control-xi", o.control_xi);
  fs->add_option("--control-eta", o.control_eta);
  fs->add_flag("--uniform", o.uniform);
  fs->add_option("--name", o.name);
  fs->add_option("--out", o.out)->required();
  fs->callback([&] { run = cmd_fit_surface; });

  auto* cp = app.add_subcommand("closest", "closest point on a surface");
  cp->add_option("doc", o.doc)->required();
  cp->add_option("surface", o.entity)->required();
  cp->add_option("--point", o.point, "x,y,z")->required()->delimiter(',')->expected(3);
  projection_flags(cp);
  cp->callback([&] { run = cmd_closest; });

  auto* il = app.add_subcommand("intersect-line", "intersect a straight line with a surface");
  il->add_option("doc", o.doc)->required();
  il->add_option("line", o.entity)->required();
  il->add_option("surface", o.entity2)->required();
  projection_flags(il);
  il->callback([&] { run = cmd_intersect_line; });

  auto* ss = app.add_subcommand("intersect", "surface-surface intersection and trimmed decomposition");
  ss->add_option("doc", o.doc)->required();
  ss->add_option("surface1", o.entity, "intersecting surface (provides the lines)")->required();
  ss->add_option("surface2", o.entity2, "intersected surface (gets subdivided)")->required();
  ss->add_option("--nlines", o.intersect.nlines);
  ss->add_option("--degree", o.intersect.trim_degree, "trim curve degree");
  ss->add_flag("--keep-upper", o.keep_upper, "keep the eta = 1 side of surface 1");
  ss->add_option("--out", o.out, "decomposition document")->required();
  projection_flags(ss);
  ss->callback([&] { run = cmd_intersect; });

  auto* ts = app.add_subcommand("tessellate", "triangle mesh as Wavefront OBJ");
  ts->add_option("doc", o.doc)->required();
  ts->add_option("entity", o.entity)->required();
  ts->add_option("--nx", o.nx);
  ts->add_option("--ny", o.ny);
  ts->add_option("--out", o.out)->required();
  ts->callback([&] { run = cmd_tessellate; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    return run(o);
  } catch (const ParseError& e) {
    fail_line("parse", e.what());
    return kParse;
  } catch (const IoError& e) {
    fail_line("io", e.what());
    return kIo;
  } catch (const ConvergenceError& e) {
    fail_line("convergence", e.what());
    return kNumerical;
  } catch (const SingularSystemError& e) {
    fail_line("singular", e.what());
    return kNumerical;
  } catch (const TopologyError& e) {
    fail_line("topology", e.what());
    return kValidation;
  } catch (const GeometryError& e) {
    fail_line("geometry", e.what());
    return kValidation;
  } catch (const DomainError& e) {
    fail_line("domain", e.what());
    return kValidation;
  } catch (const ShapeError& e) {
    fail_line("shape", e.what());
    return kValidation;
  } catch (const ValidationError& e) {
    fail_line("validation", e.what());
    return kValidation;
  } catch (const Error& e) {
    fail_line("error", e.what());
    return kValidation;
  }
}
