#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "nurbsgeo/errors.hpp"
#include "nurbsgeo/knot_vector.hpp"

namespace nurbsgeo {

// Indices are 0-based throughout: basis function i of a window starting at
// `first_index` sits at values[i - first_index].

/// Spline basis plus one positive weight per basis function.
struct BasisSpec {
  SplineBasis basis;
  std::vector<double> weights;

  BasisSpec() = default;
  BasisSpec(SplineBasis b, std::vector<double> w) : basis(std::move(b)), weights(std::move(w)) {
    if (weights.size() != basis.size())
      throw ShapeError("weight count " + std::to_string(weights.size()) + " != basis count " +
                       std::to_string(basis.size()));
    for (double x : weights)
      if (!(x > 0.0) || !std::isfinite(x)) throw ValidationError("weights must be positive and finite");
  }

  /// All weights 1.
  static BasisSpec unweighted(SplineBasis b) {
    std::vector<double> w(b.size(), 1.0);
    return BasisSpec(std::move(b), std::move(w));
  }
};

/// The p+1 potentially nonzero functions at a parameter and their first
/// derivatives.
struct BasisEval {
  std::size_t first_index = 0;
  std::vector<double> values;
  std::vector<double> derivs;
};

/// Tensor-product window of (p+1)(q+1) functions, flattened with the xi
/// index outer: entry a*(q+1)+b belongs to function (first_xi+a, first_eta+b).
struct BasisEval2D {
  std::size_t first_xi = 0;
  std::size_t first_eta = 0;
  std::size_t count_xi = 0;
  std::size_t count_eta = 0;
  std::vector<double> values;
  std::vector<double> d_xi;
  std::vector<double> d_eta;
};

/// Non-rational B-spline basis by the Cox-de Boor triangle. Zero-width
/// intervals contribute 0 (the 0/0 convention).
inline BasisEval bspline_basis(const KnotVector& knots, int degree, double xi) {
  const std::size_t span = find_span(knots, degree, xi);
  const auto p = static_cast<std::size_t>(degree);
  BasisEval out;
  out.first_index = span - p;
  out.values.assign(p + 1, 0.0);
  out.derivs.assign(p + 1, 0.0);
  if (degree == 0) {
    out.values[0] = 1.0;
    return out;
  }

  std::vector<double> left(p + 1, 0.0), right(p + 1, 0.0), lower;
  std::vector<double>& n = out.values;
  n[0] = 1.0;
  for (std::size_t d = 1; d <= p; ++d) {
    left[d] = xi - knots[span + 1 - d];
    right[d] = knots[span + d] - xi;
    if (d == p) lower.assign(n.begin(), n.begin() + static_cast<std::ptrdiff_t>(p));
    double saved = 0.0;
    for (std::size_t r = 0; r < d; ++r) {
      const double denom = right[r + 1] + left[d - r];
      const double temp = denom == 0.0 ? 0.0 : n[r] / denom;
      n[r] = saved + right[r + 1] * temp;
      saved = left[d - r] * temp;
    }
    n[d] = saved;
  }

  // B'_{i,p} = p [ B_{i,p-1} / (u_{i+p} - u_i) - B_{i+1,p-1} / (u_{i+p+1} - u_{i+1}) ]
  const double pd = static_cast<double>(degree);
  for (std::size_t r = 0; r <= p; ++r) {
    const std::size_t i = span - p + r;
    double d = 0.0;
    if (r >= 1) {
      const double den = knots[i + p] - knots[i];
      if (den != 0.0) d += lower[r - 1] / den;
    }
    if (r < p) {
      const double den = knots[i + p + 1] - knots[i + 1];
      if (den != 0.0) d -= lower[r] / den;
    }
    out.derivs[r] = pd * d;
  }
  return out;
}

/// Rational basis over one direction; derivatives by the quotient rule.
inline BasisEval nurbs_basis_1d(const BasisSpec& spec, double xi) {
  BasisEval b = bspline_basis(spec.basis.knots, spec.basis.degree, xi);
  double w = 0.0, dw = 0.0;
  for (std::size_t r = 0; r < b.values.size(); ++r) {
    const double wi = spec.weights[b.first_index + r];
    w += b.values[r] * wi;
    dw += b.derivs[r] * wi;
  }
  for (std::size_t r = 0; r < b.values.size(); ++r) {
    const double wi = spec.weights[b.first_index + r];
    const double v = b.values[r] * wi / w;
    b.derivs[r] = (b.derivs[r] * wi - v * dw) / w;
    b.values[r] = v;
  }
  return b;
}

/// Rational tensor-product basis. The weights come from a per-control-point
/// net (rows along xi, columns along eta), so the product B_a(xi) B_b(eta)
/// is weighted jointly and normalized once.
inline BasisEval2D nurbs_basis_2d(const SplineBasis& basis_xi, const SplineBasis& basis_eta,
                                  const Eigen::MatrixXd& weights, double xi, double eta) {
  if (static_cast<std::size_t>(weights.rows()) != basis_xi.size() ||
      static_cast<std::size_t>(weights.cols()) != basis_eta.size())
    throw ShapeError("weight net is " + std::to_string(weights.rows()) + "x" + std::to_string(weights.cols()) +
                     ", basis needs " + std::to_string(basis_xi.size()) + "x" + std::to_string(basis_eta.size()));

  const BasisEval bu = bspline_basis(basis_xi.knots, basis_xi.degree, xi);
  const BasisEval bv = bspline_basis(basis_eta.knots, basis_eta.degree, eta);
  BasisEval2D out;
  out.first_xi = bu.first_index;
  out.first_eta = bv.first_index;
  out.count_xi = bu.values.size();
  out.count_eta = bv.values.size();
  const std::size_t total = out.count_xi * out.count_eta;
  out.values.resize(total);
  out.d_xi.resize(total);
  out.d_eta.resize(total);

  double w = 0.0, wu = 0.0, wv = 0.0;
  for (std::size_t a = 0; a < out.count_xi; ++a) {
    for (std::size_t b = 0; b < out.count_eta; ++b) {
      const double wij = weights(static_cast<Eigen::Index>(out.first_xi + a), static_cast<Eigen::Index>(out.first_eta + b));
      const std::size_t k = a * out.count_eta + b;
      out.values[k] = bu.values[a] * bv.values[b] * wij;
      out.d_xi[k] = bu.derivs[a] * bv.values[b] * wij;
      out.d_eta[k] = bu.values[a] * bv.derivs[b] * wij;
      w += out.values[k];
      wu += out.d_xi[k];
      wv += out.d_eta[k];
    }
  }
  for (std::size_t k = 0; k < total; ++k) {
    const double r = out.values[k] / w;
    out.d_xi[k] = (out.d_xi[k] - r * wu) / w;
    out.d_eta[k] = (out.d_eta[k] - r * wv) / w;
    out.values[k] = r;
  }
  return out;
}

}  // namespace nurbsgeo
