#pragma once

#include <algorithm>

#include <string>
#include <utility>
#include <vector>

#include "nurbsgeo/basis.hpp"
#include "nurbsgeo/errors.hpp"
#include "nurbsgeo/types.hpp"

namespace nurbsgeo {

/// Rational B-spline curve in Dim dimensions. Dim = 2 is used for trimming
/// curves living in a parameter square.
template <int Dim>
class NurbsCurve {
public:
  using Point = Vec<Dim>;

  NurbsCurve() = default;

  NurbsCurve(SplineBasis basis, std::vector<ControlPoint<Dim>> control_points)
      : control_points_(std::move(control_points)) {
    if (control_points_.size() != basis.size())
      throw ShapeError("curve has " + std::to_string(control_points_.size()) + " control points, basis needs " +
                       std::to_string(basis.size()));
    std::vector<double> w;
    w.reserve(control_points_.size());
    for (const auto& cp : control_points_) {
      if (!all_finite<Dim>(cp.position)) throw ValidationError("control point coordinates must be finite");
      w.push_back(cp.weight);
    }
    spec_ = BasisSpec(std::move(basis), std::move(w));
  }

  const SplineBasis& basis() const noexcept { return spec_.basis; }
  const BasisSpec& spec() const noexcept { return spec_; }
  int degree() const noexcept { return spec_.basis.degree; }
  const std::vector<ControlPoint<Dim>>& control_points() const noexcept { return control_points_; }

  Point point(double xi) const {
    const BasisEval b = nurbs_basis_1d(spec_, xi);
    Point x = Point::Zero();
    for (std::size_t r = 0; r < b.values.size(); ++r) x += b.values[r] * control_points_[b.first_index + r].position;
    return x;
  }

  /// First derivative with respect to xi; not normalized.
  Point tangent(double xi) const {
    const BasisEval b = nurbs_basis_1d(spec_, xi);
    Point v = Point::Zero();
    for (std::size_t r = 0; r < b.values.size(); ++r) v += b.derivs[r] * control_points_[b.first_index + r].position;
    return v;
  }

private:
  BasisSpec spec_ = BasisSpec::unweighted(SplineBasis(KnotVector({0.0, 0.0, 1.0, 1.0}), 1));
  std::vector<ControlPoint<Dim>> control_points_{ControlPoint<Dim>{}, ControlPoint<Dim>{}};
};

/// Straight degree-1 curve from `a` (xi = 0) to `b` (xi = 1).
template <int Dim>
NurbsCurve<Dim> make_line(const Vec<Dim>& a, const Vec<Dim>& b) {
  return NurbsCurve<Dim>(SplineBasis(KnotVector({0.0, 0.0, 1.0, 1.0}), 1), {{a, 1.0}, {b, 1.0}});
}

/// Inserts knot u once (Boehm). The curve's shape and parameterization are
/// unchanged; weights are carried through homogeneous coordinates.
template <int Dim>
NurbsCurve<Dim> insert_knot(const NurbsCurve<Dim>& curve, double u) {
  const auto& knots = curve.basis().knots;
  const int p = curve.degree();
  const std::size_t k = find_span(knots, p, u);
  const auto pu = static_cast<std::size_t>(p);
  const auto& cps = curve.control_points();

  using Homogeneous = Vec<Dim + 1>;
  auto lift = [](const ControlPoint<Dim>& c) {
    Homogeneous h;
    h.template head<Dim>() = c.position * c.weight;
    h[Dim] = c.weight;
    return h;
  };
  auto drop = [](const Homogeneous& h) {
    return ControlPoint<Dim>{h.template head<Dim>() / h[Dim], h[Dim]};
  };

  std::vector<ControlPoint<Dim>> out;
  out.reserve(cps.size() + 1);
  for (std::size_t i = 0; i <= cps.size(); ++i) {
    if (i + pu <= k) {
      out.push_back(cps[i]);
    } else if (i > k) {
      out.push_back(cps[i - 1]);
    } else {
      const double den = knots[i + pu] - knots[i];
      const double a = den == 0.0 ? 0.0 : (u - knots[i]) / den;
      out.push_back(drop(a * lift(cps[i]) + (1.0 - a) * lift(cps[i - 1])));
    }
  }
  std::vector<double> kv = knots.values();
  kv.insert(kv.begin() + static_cast<std::ptrdiff_t>(k) + 1, u);
  return NurbsCurve<Dim>(SplineBasis(KnotVector(std::move(kv)), p), std::move(out));
}

/// Piece of the curve between interior parameters a < b, reparameterized to
/// [0,1]. Both ends are raised to multiplicity `degree` by knot insertion,
/// after which the control points in between describe the piece exactly.
template <int Dim>
NurbsCurve<Dim> subcurve(NurbsCurve<Dim> curve, double a, double b) {
  if (!(0.0 < a && a < b && b < 1.0)) throw DomainError("subcurve bounds must satisfy 0 < a < b < 1");
  const int p = curve.degree();
  if (p == 0) throw ValidationError("subcurve needs degree >= 1");
  auto multiplicity = [&](double u) {
    const auto& v = curve.basis().knots.values();
    return static_cast<int>(std::count(v.begin(), v.end(), u));
  };
  for (double u : {a, b})
    while (multiplicity(u) < p) curve = insert_knot(curve, u);
  const auto& v = curve.basis().knots.values();
  const auto ia = static_cast<std::size_t>(std::find(v.begin(), v.end(), a) - v.begin());
  const auto ib = static_cast<std::size_t>(std::find(v.begin(), v.end(), b) - v.begin());
  std::vector<double> kv(static_cast<std::size_t>(p) + 1, a);
  kv.insert(kv.end(), v.begin() + static_cast<std::ptrdiff_t>(ia) + p, v.begin() + static_cast<std::ptrdiff_t>(ib));
  kv.insert(kv.end(), static_cast<std::size_t>(p) + 1, b);
  std::vector<ControlPoint<Dim>> cps(curve.control_points().begin() + static_cast<std::ptrdiff_t>(ia) - 1,
                                     curve.control_points().begin() + static_cast<std::ptrdiff_t>(ib));
  return NurbsCurve<Dim>(SplineBasis(KnotVector(std::move(kv)), p), std::move(cps));
}

}  // namespace nurbsgeo
