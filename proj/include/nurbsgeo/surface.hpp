#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "nurbsgeo/basis.hpp"
#include "nurbsgeo/errors.hpp"
#include "nurbsgeo/types.hpp"

namespace nurbsgeo {

template <int Dim>
struct SurfaceDerivatives {
  Vec<Dim> point;
  Vec<Dim> d_xi;
  Vec<Dim> d_eta;
};

/// Tensor-product rational surface. The control net is stored row-major with
/// the xi index outer: control point (i, j) is at i * count_eta() + j.
template <int Dim>
class NurbsSurface {
public:
  using Point = Vec<Dim>;

  NurbsSurface() = default;

  NurbsSurface(SplineBasis basis_xi, SplineBasis basis_eta, std::vector<ControlPoint<Dim>> net)
      : basis_xi_(std::move(basis_xi)), basis_eta_(std::move(basis_eta)), net_(std::move(net)) {
    const std::size_t nu = basis_xi_.size(), nv = basis_eta_.size();
    if (net_.size() != nu * nv)
      throw ShapeError("control net has " + std::to_string(net_.size()) + " points, basis needs " +
                       std::to_string(nu) + "x" + std::to_string(nv));
    weights_.resize(static_cast<Eigen::Index>(nu), static_cast<Eigen::Index>(nv));
    for (std::size_t i = 0; i < nu; ++i) {
      for (std::size_t j = 0; j < nv; ++j) {
        const auto& cp = net_[i * nv + j];
        if (!(cp.weight > 0.0) || !std::isfinite(cp.weight))
          throw ValidationError("weights must be positive and finite");
        if (!all_finite<Dim>(cp.position)) throw ValidationError("control point coordinates must be finite");
        weights_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = cp.weight;
      }
    }
  }

  const SplineBasis& basis_xi() const noexcept { return basis_xi_; }
  const SplineBasis& basis_eta() const noexcept { return basis_eta_; }
  std::size_t count_xi() const noexcept { return basis_xi_.size(); }
  std::size_t count_eta() const noexcept { return basis_eta_.size(); }
  const std::vector<ControlPoint<Dim>>& control_points() const noexcept { return net_; }
  const ControlPoint<Dim>& control_point(std::size_t i, std::size_t j) const { return net_[i * count_eta() + j]; }
  const Eigen::MatrixXd& weights() const noexcept { return weights_; }

  BasisEval2D basis(double xi, double eta) const {
    return nurbs_basis_2d(basis_xi_, basis_eta_, weights_, xi, eta);
  }

  Point point(double xi, double eta) const {
    const BasisEval2D b = basis(xi, eta);
    Point x = Point::Zero();
    for_window(b, [&](std::size_t k, const Point& c) { x += b.values[k] * c; });
    return x;
  }

  /// Point plus the two (unnormalized) tangent vectors.
  SurfaceDerivatives<Dim> derivatives(double xi, double eta) const {
    const BasisEval2D b = basis(xi, eta);
    SurfaceDerivatives<Dim> d{Point::Zero(), Point::Zero(), Point::Zero()};
    for_window(b, [&](std::size_t k, const Point& c) {
      d.point += b.values[k] * c;
      d.d_xi += b.d_xi[k] * c;
      d.d_eta += b.d_eta[k] * c;
    });
    return d;
  }

  std::pair<Point, Point> tangents(double xi, double eta) const {
    const auto d = derivatives(xi, eta);
    return {d.d_xi, d.d_eta};
  }

private:
  template <class F>
  void for_window(const BasisEval2D& b, F&& f) const {
    const std::size_t nv = count_eta();
    for (std::size_t a = 0; a < b.count_xi; ++a)
      for (std::size_t c = 0; c < b.count_eta; ++c)
        f(a * b.count_eta + c, net_[(b.first_xi + a) * nv + b.first_eta + c].position);
  }

  SplineBasis basis_xi_{KnotVector({0.0, 0.0, 1.0, 1.0}), 1};
  SplineBasis basis_eta_{KnotVector({0.0, 0.0, 1.0, 1.0}), 1};
  std::vector<ControlPoint<Dim>> net_{4};
  Eigen::MatrixXd weights_ = Eigen::MatrixXd::Ones(2, 2);
};

/// Bilinear patch through four corners; corner (a, b) sits at xi = a, eta = b.
template <int Dim>
NurbsSurface<Dim> make_bilinear(const Vec<Dim>& c00, const Vec<Dim>& c10, const Vec<Dim>& c01, const Vec<Dim>& c11) {
  const SplineBasis lin(KnotVector({0.0, 0.0, 1.0, 1.0}), 1);
  return NurbsSurface<Dim>(lin, lin, {{c00, 1.0}, {c01, 1.0}, {c10, 1.0}, {c11, 1.0}});
}

}  // namespace nurbsgeo
