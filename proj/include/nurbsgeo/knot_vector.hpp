#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "nurbsgeo/errors.hpp"

namespace nurbsgeo {

/// Non-decreasing sequence of parameter breakpoints, normalized to [0,1].
///
/// Construction rescales the input affinely so the first value is exactly 0
/// and the last exactly 1. Values already on [0,1] are kept bit-for-bit.
class KnotVector {
public:
  KnotVector() = default;

  explicit KnotVector(std::vector<double> values) : values_(std::move(values)) {
    if (values_.size() < 2) throw ValidationError("knot vector needs at least 2 values");
    for (double v : values_)
      if (!std::isfinite(v)) throw ValidationError("knot values must be finite");
    for (std::size_t k = 0; k + 1 < values_.size(); ++k)
      if (values_[k] > values_[k + 1])
        throw ValidationError("knot values must be non-decreasing (index " + std::to_string(k) + ")");
    const double lo = values_.front();
    const double hi = values_.back();
    if (!(hi > lo)) throw ValidationError("knot vector spans an empty interval");
    if (lo != 0.0 || hi != 1.0)
      for (double& v : values_) v = (v - lo) / (hi - lo);
  }

  /// Clamped knot vector with uniformly spaced interior knots for
  /// `basis_count` functions of degree `degree`.
  static KnotVector uniform_clamped(std::size_t basis_count, int degree) {
    const auto p = static_cast<std::size_t>(degree);
    if (degree < 0 || basis_count < p + 1)
      throw ValidationError("uniform knot vector needs at least degree+1 basis functions");
    std::vector<double> v(p + 1, 0.0);
    const std::size_t spans = basis_count - p;
    for (std::size_t j = 1; j < spans; ++j) v.push_back(static_cast<double>(j) / static_cast<double>(spans));
    v.insert(v.end(), p + 1, 1.0);
    return KnotVector(std::move(v));
  }

  const std::vector<double>& values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t k) const { return values_[k]; }

  /// Number of basis functions of the given degree over these knots.
  std::size_t basis_count(int degree) const noexcept {
    const auto need = static_cast<std::size_t>(degree) + 1;
    return values_.size() > need ? values_.size() - need : 0;
  }

  bool is_clamped(int degree) const noexcept {
    if (degree < 0) return false;
    const auto p = static_cast<std::size_t>(degree);
    if (values_.size() < 2 * (p + 1)) return false;
    for (std::size_t k = 0; k <= p; ++k) {
      if (values_[k] != values_.front()) return false;
      if (values_[values_.size() - 1 - k] != values_.back()) return false;
    }
    // End multiplicity must be exactly p+1; more would leave a basis
    // function identically zero.
    if (values_[p + 1] == values_.front() || values_[values_.size() - p - 2] == values_.back()) return false;
    for (std::size_t k = p + 1; k + p + 1 < values_.size(); ++k)
      if (values_[k] == values_[k + p + 1]) return false;  // interior multiplicity > p+1
    return true;
  }

  bool operator==(const KnotVector&) const = default;

private:
  std::vector<double> values_{0.0, 1.0};
};

/// Knot vector plus degree. Always clamped.
struct SplineBasis {
  KnotVector knots;
  int degree = 0;

  SplineBasis() = default;
  SplineBasis(KnotVector k, int p) : knots(std::move(k)), degree(p) {
    if (p < 0) throw ValidationError("degree must be non-negative");
    if (!knots.is_clamped(p))
      throw ValidationError("knot vector must be clamped for degree " + std::to_string(p) +
                            " (end multiplicity p+1, length >= 2(p+1))");
  }

  std::size_t size() const noexcept { return knots.basis_count(degree); }

  bool operator==(const SplineBasis&) const = default;
};

/// Index k of the knot span with knots[k] <= xi < knots[k+1]. The right end
/// xi = 1 maps to the last non-degenerate span.
inline std::size_t find_span(const KnotVector& knots, int degree, double xi) {
  if (!(xi >= 0.0 && xi <= 1.0)) throw DomainError("parameter " + std::to_string(xi) + " outside [0,1]");
  const auto p = static_cast<std::size_t>(degree);
  const std::size_t n = knots.basis_count(degree);
  const auto& v = knots.values();
  if (xi >= v[n]) return n - 1;
  // last k in [p, n-1] with v[k] <= xi
  auto it = std::upper_bound(v.begin() + static_cast<std::ptrdiff_t>(p), v.begin() + static_cast<std::ptrdiff_t>(n), xi);
  return static_cast<std::size_t>(it - v.begin()) - 1;
}

/// Anchor locations of the basis functions (Greville abscissae). For
/// degree 0 there is no averaging window; the knot-interval midpoints are
/// returned instead.
inline std::vector<double> greville_abscissae(const KnotVector& knots, int degree) {
  const std::size_t n = knots.basis_count(degree);
  std::vector<double> g(n);
  if (degree == 0) {
    for (std::size_t i = 0; i < n; ++i) g[i] = 0.5 * (knots[i] + knots[i + 1]);
    return g;
  }
  const auto p = static_cast<std::size_t>(degree);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t k = i + 1; k <= i + p; ++k) s += knots[k];
    g[i] = s / static_cast<double>(degree);
  }
  return g;
}

}  // namespace nurbsgeo
