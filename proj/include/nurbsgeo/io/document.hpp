#pragma once

// Geometry documents: JSON text holding named curves, surfaces, trimmed
// surfaces and point sets. Reading goes through nlohmann::json; writing uses
// a fixed layout with every real number in %.16e so that save -> load -> save
// reproduces the same bytes. See docs/format.md for the schema.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"
#include "nurbsgeo/curve.hpp"
#include "nurbsgeo/errors.hpp"
#include "nurbsgeo/surface.hpp"
#include "nurbsgeo/trim.hpp"

namespace nurbsgeo::io {

inline constexpr const char* kFormatTag = "nurbsgeo";
inline constexpr int kFormatVersion = 1;

struct PointSet {
  std::vector<Vec3> points;
};

using EntityValue =
    std::variant<NurbsCurve<2>, NurbsCurve<3>, NurbsSurface<2>, NurbsSurface<3>, TrimmedSurface, PointSet>;

struct Entity {
  std::string name;
  EntityValue value;
};

inline const char* type_name(const EntityValue& v) {
  switch (v.index()) {
    case 0:
    case 1: return "curve";
    case 2:
    case 3: return "surface";
    case 4: return "trimmed_surface";
    default: return "points";
  }
}

class Document {
public:
  std::vector<Entity> entities;

  const Entity* find(const std::string& name) const {
    for (const auto& e : entities)
      if (e.name == name) return &e;
    return nullptr;
  }

  const Entity& at(const std::string& name) const {
    if (const Entity* e = find(name)) return *e;
    throw ValidationError("no entity named '" + name + "'");
  }

  template <class T>
  const T& get(const std::string& name) const {
    const Entity& e = at(name);
    if (const T* v = std::get_if<T>(&e.value)) return *v;
    throw ValidationError("entity '" + name + "' is a " + type_name(e.value) + ", not the expected type");
  }

  void add(std::string name, EntityValue value) {
    if (find(name)) throw ValidationError("duplicate entity name '" + name + "'");
    entities.push_back({std::move(name), std::move(value)});
  }
};

// ---------------------------------------------------------------- writing

namespace detail {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.16e", v == 0.0 ? 0.0 : v);
  return buf;
}

inline std::string quoted(const std::string& s) { return nlohmann::json(s).dump(); }

inline std::string number_list(const std::vector<double>& v) {
  std::string out = "[";
  for (std::size_t k = 0; k < v.size(); ++k) out += (k ? ", " : "") + num(v[k]);
  return out + "]";
}

template <int Dim>
std::string control_rows(const std::vector<ControlPoint<Dim>>& cps, const std::string& indent) {
  std::string out = "[\n";
  for (std::size_t k = 0; k < cps.size(); ++k) {
    out += indent + "  [";
    for (int d = 0; d < Dim; ++d) out += num(cps[k].position[d]) + ", ";
    out += num(cps[k].weight) + "]" + (k + 1 < cps.size() ? ",\n" : "\n");
  }
  return out + indent + "]";
}

template <int Dim>
std::string curve_fields(const NurbsCurve<Dim>& c, const std::string& in) {
  return in + "\"dim\": " + std::to_string(Dim) + ",\n" + in + "\"degree\": " + std::to_string(c.degree()) + ",\n" + in +
         "\"knots\": " + number_list(c.basis().knots.values()) + ",\n" + in +
         "\"control_points\": " + control_rows<Dim>(c.control_points(), in);
}

template <int Dim>
std::string surface_fields(const NurbsSurface<Dim>& s, const std::string& in) {
  return in + "\"dim\": " + std::to_string(Dim) + ",\n" + in + "\"degree_xi\": " + std::to_string(s.basis_xi().degree) +
         ",\n" + in + "\"degree_eta\": " + std::to_string(s.basis_eta().degree) + ",\n" + in +
         "\"knots_xi\": " + number_list(s.basis_xi().knots.values()) + ",\n" + in +
         "\"knots_eta\": " + number_list(s.basis_eta().knots.values()) + ",\n" + in +
         "\"control_points\": " + control_rows<Dim>(s.control_points(), in);
}

inline std::string entity_body(const EntityValue& value, const std::string& in) {
  return std::visit(
      [&](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, NurbsCurve<2>> || std::is_same_v<T, NurbsCurve<3>>) {
          return curve_fields(v, in);
        } else if constexpr (std::is_same_v<T, NurbsSurface<2>> || std::is_same_v<T, NurbsSurface<3>>) {
          return surface_fields(v, in);
        } else if constexpr (std::is_same_v<T, TrimmedSurface>) {
          const std::string inner = in + "  ";
          return in + "\"base\": {\n" + surface_fields(v.base, inner) + "\n" + in + "},\n" + in + "\"trim\": {\n" +
                 surface_fields(v.trim.surface(), inner) + "\n" + in + "}";
        } else {
          std::string out = in + "\"points\": [\n";
          for (std::size_t k = 0; k < v.points.size(); ++k)
            out += in + "  [" + num(v.points[k].x()) + ", " + num(v.points[k].y()) + ", " + num(v.points[k].z()) +
                   "]" + (k + 1 < v.points.size() ? ",\n" : "\n");
          return out + in + "]";
        }
      },
      value);
}

}  // namespace detail

inline std::string serialize(const Document& doc) {
  std::string out = "{\n  \"format\": \"" + std::string(kFormatTag) + "\",\n  \"version\": " +
                    std::to_string(kFormatVersion) + ",\n  \"entities\": [";
  for (std::size_t k = 0; k < doc.entities.size(); ++k) {
    const Entity& e = doc.entities[k];
    out += k ? ",\n" : "\n";
    out += "    {\n      \"name\": " + detail::quoted(e.name) + ",\n      \"type\": \"" + type_name(e.value) + "\",\n" +
           detail::entity_body(e.value, "      ") + "\n    }";
  }
  out += doc.entities.empty() ? "]\n}\n" : "\n  ]\n}\n";
  return out;
}

// ---------------------------------------------------------------- reading

namespace detail {

using nlohmann::json;

struct Reader {
  std::string entity;

  [[noreturn]] void fail(const std::string& what) const {
    throw ValidationError("entity '" + entity + "': " + what);
  }

  const json& field(const json& obj, const char* key) const {
    if (!obj.is_object()) fail("expected an object");
    const auto it = obj.find(key);
    if (it == obj.end()) fail(std::string("missing field '") + key + "'");
    return *it;
  }

  int integer(const json& obj, const char* key) const {
    const json& v = field(obj, key);
    if (!v.is_number_integer()) fail(std::string("field '") + key + "' must be an integer");
    return v.get<int>();
  }

  double real(const json& v, const std::string& where) const {
    if (!v.is_number()) fail(where + " must be a number");
    return v.get<double>();
  }

  std::vector<double> reals(const json& obj, const char* key) const {
    const json& v = field(obj, key);
    if (!v.is_array()) fail(std::string("field '") + key + "' must be an array");
    std::vector<double> out;
    for (const auto& x : v) out.push_back(real(x, std::string("entries of '") + key + "'"));
    return out;
  }

  template <int Dim>
  std::vector<ControlPoint<Dim>> control_points(const json& obj) const {
    const json& v = field(obj, "control_points");
    if (!v.is_array()) fail("field 'control_points' must be an array");
    std::vector<ControlPoint<Dim>> out;
    for (std::size_t k = 0; k < v.size(); ++k) {
      const json& row = v[k];
      if (!row.is_array() || row.size() != static_cast<std::size_t>(Dim) + 1)
        fail("control point " + std::to_string(k) + " must be [" + (Dim == 2 ? "x, y" : "x, y, z") + ", w]");
      ControlPoint<Dim> cp;
      for (int d = 0; d < Dim; ++d) cp.position[d] = real(row[static_cast<std::size_t>(d)], "control point coordinates");
      cp.weight = real(row[static_cast<std::size_t>(Dim)], "control point weights");
      out.push_back(cp);
    }
    return out;
  }

  SplineBasis basis(const json& obj, const char* knots_key, const char* degree_key) const {
    const int degree = integer(obj, degree_key);
    try {
      return SplineBasis(KnotVector(reals(obj, knots_key)), degree);
    } catch (Error& e) {
      e.prepend("entity '" + entity + "': " + knots_key);
      throw;
    }
  }

  template <class F>
  auto guarded(F&& make) const {
    try {
      return make();
    } catch (Error& e) {
      if (std::string(e.what()).rfind("entity '", 0) != 0) e.prepend("entity '" + entity + "'");
      throw;
    }
  }

  int dim(const json& obj, int fallback) const {
    if (!obj.is_object() || !obj.contains("dim")) return fallback;
    const int d = integer(obj, "dim");
    if (d != 2 && d != 3) fail("dim must be 2 or 3");
    return d;
  }

  template <int Dim>
  NurbsSurface<Dim> surface(const json& obj) const {
    SplineBasis bx = basis(obj, "knots_xi", "degree_xi");
    SplineBasis by = basis(obj, "knots_eta", "degree_eta");
    auto cps = control_points<Dim>(obj);
    return guarded([&] { return NurbsSurface<Dim>(std::move(bx), std::move(by), std::move(cps)); });
  }

  template <int Dim>
  NurbsCurve<Dim> curve(const json& obj) const {
    SplineBasis b = basis(obj, "knots", "degree");
    auto cps = control_points<Dim>(obj);
    return guarded([&] { return NurbsCurve<Dim>(std::move(b), std::move(cps)); });
  }

  EntityValue value(const json& obj) const {
    const json& t = field(obj, "type");
    if (!t.is_string()) fail("field 'type' must be a string");
    const std::string type = t.get<std::string>();
    if (type == "curve") {
      if (dim(obj, 3) == 2) return curve<2>(obj);
      return curve<3>(obj);
    }
    if (type == "surface") {
      if (dim(obj, 3) == 2) return surface<2>(obj);
      return surface<3>(obj);
    }
    if (type == "trimmed_surface") {
      const json& base = field(obj, "base");
      const json& trim = field(obj, "trim");
      if (dim(base, 3) != 3) fail("trimmed surface base must have dim 3");
      if (dim(trim, 2) != 2) fail("trim map must have dim 2");
      NurbsSurface<3> b = surface<3>(base);
      NurbsSurface<2> m = surface<2>(trim);
      return guarded([&] { return EntityValue(TrimmedSurface{std::move(b), TrimMap(std::move(m))}); });
    }
    if (type == "points") {
      const json& v = field(obj, "points");
      if (!v.is_array()) fail("field 'points' must be an array");
      PointSet ps;
      for (std::size_t k = 0; k < v.size(); ++k) {
        if (!v[k].is_array() || v[k].size() != 3) fail("point " + std::to_string(k) + " must be [x, y, z]");
        ps.points.emplace_back(real(v[k][0], "point coordinates"), real(v[k][1], "point coordinates"),
                               real(v[k][2], "point coordinates"));
      }
      return ps;
    }
    fail("unknown type '" + type + "'");
  }
};

inline std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t k = 0; k + 1 < byte && k < text.size(); ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace detail

/// Parses and validates document text. Syntax errors raise ParseError with
/// line and column; schema and geometry violations raise the library's
/// validation errors prefixed with the entity name.
inline Document parse(const std::string& text) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const auto [line, col] = detail::line_column(text, e.byte);
    std::string msg = e.what();
    const auto cut = msg.find("syntax error");
    if (cut != std::string::npos) msg = msg.substr(cut);
    throw ParseError("line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + msg);
  }
  if (!root.is_object()) throw ValidationError("document must be a JSON object");
  const auto fmt = root.find("format");
  if (fmt == root.end() || *fmt != kFormatTag) throw ValidationError("document format must be \"nurbsgeo\"");
  const auto ver = root.find("version");
  if (ver == root.end() || !ver->is_number_integer() || *ver != kFormatVersion)
    throw ValidationError("unsupported document version (expected 1)");
  const auto ents = root.find("entities");
  if (ents == root.end() || !ents->is_array()) throw ValidationError("document needs an 'entities' array");

  Document doc;
  for (std::size_t k = 0; k < ents->size(); ++k) {
    const auto& obj = (*ents)[k];
    detail::Reader r{"#" + std::to_string(k)};
    const auto& name = r.field(obj, "name");
    if (!name.is_string() || name.get<std::string>().empty()) r.fail("field 'name' must be a non-empty string");
    r.entity = name.get<std::string>();
    doc.add(r.entity, r.value(obj));
  }
  return doc;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw IoError("failed writing '" + path + "'");
}

inline Document load(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return parse(text);
  } catch (Error& e) {
    e.prepend(path);
    throw;
  }
}

inline void save(const std::string& path, const Document& doc) { write_file(path, serialize(doc)); }

}  // namespace nurbsgeo::io
