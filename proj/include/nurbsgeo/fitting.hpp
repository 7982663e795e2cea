#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "nurbsgeo/basis.hpp"
#include "nurbsgeo/curve.hpp"
#include "nurbsgeo/errors.hpp"
#include "nurbsgeo/surface.hpp"
#include "nurbsgeo/types.hpp"

namespace nurbsgeo {

// Fitting solves for control point coordinates only; weights are inputs.

/// Columns whose pivot falls below this fraction of the largest pivot make
/// the system rank deficient.
inline constexpr double kRankTolerance = 1e-12;

template <int Dim>
struct CurveFitProblem {
  BasisSpec basis;
  std::vector<double> params;
  std::vector<Vec<Dim>> targets;
};

template <int Dim>
struct SurfaceFitProblem {
  SplineBasis basis_xi;
  SplineBasis basis_eta;
  Eigen::MatrixXd weights;  // count_xi x count_eta
  std::vector<Vec2> params;
  std::vector<Vec<Dim>> targets;
};

template <int Dim>
struct FitResult {
  std::vector<Vec<Dim>> control_points;
  double residual_norm = 0.0;  // |A c - x| over all coordinates
  bool exact = false;          // square system, solved directly
};

enum class ParamMethod { ChordLength, Uniform };

/// Uniform: equally spaced interior knots. Averaged: each interior knot is
/// the mean of `degree` consecutive sample parameters, which follows uneven
/// parameter spacing and avoids overshoot in interpolation.
enum class KnotPlacement { Uniform, Averaged };

/// Clamped knot vector for `count` control points. Averaged placement needs
/// the sample parameters and exactly count of them.
inline KnotVector fit_knots(std::size_t count, int degree, KnotPlacement placement, const std::vector<double>& params) {
  if (placement == KnotPlacement::Uniform || degree == 0) return KnotVector::uniform_clamped(count, degree);
  if (params.size() != count) throw ValidationError("averaged knots need one parameter per control point");
  const auto p = static_cast<std::size_t>(degree);
  std::vector<double> u(p + 1, 0.0);
  for (std::size_t j = 1; j + p < count; ++j) {
    double sum = 0.0;
    for (std::size_t i = j; i < j + p; ++i) sum += params[i];
    u.push_back(sum / degree);
  }
  u.insert(u.end(), p + 1, 1.0);
  return KnotVector(std::move(u));
}

/// Compact collocation matrix: one row per sample, one column per control
/// point, entries R_j(xi_i).
template <int Dim>
Eigen::MatrixXd collocation_matrix(const CurveFitProblem<Dim>& problem) {
  const std::size_t m = problem.basis.basis.size();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(problem.params.size()), static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < problem.params.size(); ++i) {
    const BasisEval b = nurbs_basis_1d(problem.basis, problem.params[i]);
    for (std::size_t r = 0; r < b.values.size(); ++r)
      a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(b.first_index + r)) = b.values[r];
  }
  return a;
}

template <int Dim>
Eigen::MatrixXd collocation_matrix(const SurfaceFitProblem<Dim>& problem) {
  const std::size_t nv = problem.basis_eta.size();
  const std::size_t m = problem.basis_xi.size() * nv;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(problem.params.size()), static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < problem.params.size(); ++i) {
    const BasisEval2D b = nurbs_basis_2d(problem.basis_xi, problem.basis_eta, problem.weights, problem.params[i].x(),
                                         problem.params[i].y());
    for (std::size_t u = 0; u < b.count_xi; ++u)
      for (std::size_t v = 0; v < b.count_eta; ++v)
        a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>((b.first_xi + u) * nv + b.first_eta + v)) =
            b.values[u * b.count_eta + v];
  }
  return a;
}

/// Interleaved block form: sample i, coordinate d is row i*dim + d; control
/// point j, coordinate d is column j*dim + d. Each compact entry R_j(xi_i)
/// appears once per coordinate on the block diagonal.
inline Eigen::MatrixXd block_collocation_matrix(const Eigen::MatrixXd& compact, int dim) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(compact.rows() * dim, compact.cols() * dim);
  for (Eigen::Index i = 0; i < compact.rows(); ++i)
    for (Eigen::Index j = 0; j < compact.cols(); ++j)
      for (int d = 0; d < dim; ++d) a(i * dim + d, j * dim + d) = compact(i, j);
  return a;
}

namespace detail {

template <int Dim>
Eigen::MatrixXd stack_targets(const std::vector<Vec<Dim>>& targets) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(targets.size()), Dim);
  for (std::size_t i = 0; i < targets.size(); ++i) x.row(static_cast<Eigen::Index>(i)) = targets[i].transpose();
  return x;
}

inline void check_params(const std::vector<double>& params) {
  for (double t : params)
    if (!(t >= 0.0 && t <= 1.0)) throw DomainError("fit parameter " + std::to_string(t) + " outside [0,1]");
}

inline void check_params(const std::vector<Vec2>& params) {
  for (const auto& t : params)
    if (!(t.x() >= 0.0 && t.x() <= 1.0 && t.y() >= 0.0 && t.y() <= 1.0))
      throw DomainError("fit parameter outside [0,1]^2");
}

template <int Dim>
FitResult<Dim> solve_collocation(const Eigen::MatrixXd& a, const Eigen::MatrixXd& x) {
  const Eigen::Index rows = a.rows(), cols = a.cols();
  if (rows < cols)
    throw ValidationError("underdetermined fit: " + std::to_string(rows) + " samples for " + std::to_string(cols) +
                          " control points");

  FitResult<Dim> out;
  Eigen::MatrixXd c;
  if (rows == cols) {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
    const Eigen::VectorXd diag = lu.matrixLU().diagonal().cwiseAbs();
    if (diag.minCoeff() < kRankTolerance * diag.maxCoeff())
      throw SingularSystemError("collocation matrix is singular (duplicate or coincident sample parameters, or "
                                "parameters violating the knot spacing)");
    c = lu.solve(x);
    out.exact = true;
  } else {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    const Eigen::VectorXd diag = qr.matrixR().diagonal().head(cols).cwiseAbs();
    if (diag.minCoeff() < kRankTolerance * diag.maxCoeff())
      throw SingularSystemError("collocation matrix is rank deficient (some control point has no sample in its "
                                "support, or samples coincide)");
    c = qr.solve(x);
  }
  out.residual_norm = (a * c - x).norm();
  out.control_points.resize(static_cast<std::size_t>(cols));
  for (Eigen::Index j = 0; j < cols; ++j) out.control_points[static_cast<std::size_t>(j)] = c.row(j).transpose();
  return out;
}

}  // namespace detail

/// Square systems by LU with partial pivoting, overdetermined ones by
/// column-pivoted QR least squares.
template <int Dim>
FitResult<Dim> solve_fit(const CurveFitProblem<Dim>& problem) {
  if (problem.params.size() != problem.targets.size()) throw ShapeError("parameter and target counts differ");
  detail::check_params(problem.params);
  return detail::solve_collocation<Dim>(collocation_matrix(problem), detail::stack_targets<Dim>(problem.targets));
}

template <int Dim>
FitResult<Dim> solve_fit(const SurfaceFitProblem<Dim>& problem) {
  if (problem.params.size() != problem.targets.size()) throw ShapeError("parameter and target counts differ");
  detail::check_params(problem.params);
  return detail::solve_collocation<Dim>(collocation_matrix(problem), detail::stack_targets<Dim>(problem.targets));
}

/// 0 and 1 at the ends, interior parameters by cumulative chord length.
template <int Dim>
std::vector<double> parameterize_chord_length(const std::vector<Vec<Dim>>& points) {
  if (points.size() < 2) throw ValidationError("parameterization needs at least 2 points");
  std::vector<double> t(points.size(), 0.0);
  for (std::size_t i = 1; i < points.size(); ++i) {
    const double d = (points[i] - points[i - 1]).norm();
    if (!(d > 0.0))
      throw GeometryError("degenerate parameterization: points " + std::to_string(i - 1) + " and " +
                          std::to_string(i) + " coincide");
    t[i] = t[i - 1] + d;
  }
  const double total = t.back();
  for (double& v : t) v /= total;
  t.back() = 1.0;
  return t;
}

inline std::vector<double> parameterize_uniform(std::size_t count) {
  if (count < 2) throw ValidationError("parameterization needs at least 2 points");
  std::vector<double> t(count);
  for (std::size_t i = 0; i < count; ++i) t[i] = static_cast<double>(i) / static_cast<double>(count - 1);
  return t;
}

template <int Dim>
std::vector<double> parameterize(const std::vector<Vec<Dim>>& points, ParamMethod method) {
  return method == ParamMethod::ChordLength ? parameterize_chord_length<Dim>(points) : parameterize_uniform(points.size());
}

template <int Dim>
struct CurveFit {
  NurbsCurve<Dim> curve;
  FitResult<Dim> result;
  std::vector<double> params;
};

/// Fits a unit-weight curve of the given degree through (control_count
/// unset) or near (control_count < point count) the points on a clamped
/// knot vector, uniform by default.
template <int Dim>
CurveFit<Dim> fit_curve(const std::vector<Vec<Dim>>& points, int degree,
                        std::optional<std::size_t> control_count = std::nullopt,
                        ParamMethod method = ParamMethod::ChordLength,
                        KnotPlacement placement = KnotPlacement::Uniform) {
  if (degree < 0) throw ValidationError("degree must be non-negative");
  const std::size_t n = control_count.value_or(points.size());
  if (n < static_cast<std::size_t>(degree) + 1)
    throw ValidationError("need at least degree+1 = " + std::to_string(degree + 1) + " control points");
  std::vector<double> params = parameterize<Dim>(points, method);
  CurveFitProblem<Dim> problem{BasisSpec::unweighted(SplineBasis(fit_knots(n, degree, placement, params), degree)),
                               std::move(params), points};
  FitResult<Dim> result = solve_fit(problem);
  std::vector<ControlPoint<Dim>> cps;
  for (const auto& c : result.control_points) cps.push_back({c, 1.0});
  return {NurbsCurve<Dim>(problem.basis.basis, std::move(cps)), std::move(result), std::move(problem.params)};
}

/// Interpolating parameter-space curve used as a trimming curve (chord-length
/// parameters, averaged knots).
inline CurveFit<2> fit_trim_curve(const std::vector<Vec2>& parameter_points, int degree) {
  if (parameter_points.size() < static_cast<std::size_t>(degree) + 1)
    throw ValidationError("trim curve of degree " + std::to_string(degree) + " needs at least " +
                          std::to_string(degree + 1) + " points");
  return fit_curve<2>(parameter_points, degree, std::nullopt, ParamMethod::ChordLength, KnotPlacement::Averaged);
}

template <int Dim>
struct SurfaceFit {
  NurbsSurface<Dim> surface;
  FitResult<Dim> result;
  std::vector<double> params_xi;
  std::vector<double> params_eta;
};

/// Fits a unit-weight surface to a rows x cols grid of points (row index
/// along xi, stored row-major). Parameters are chord lengths averaged over
/// the grid lines of each direction.
template <int Dim>
SurfaceFit<Dim> fit_surface_grid(const std::vector<Vec<Dim>>& grid, std::size_t rows, std::size_t cols, int degree_xi,
                                 int degree_eta, std::optional<std::size_t> control_xi = std::nullopt,
                                 std::optional<std::size_t> control_eta = std::nullopt,
                                 ParamMethod method = ParamMethod::ChordLength) {
  if (grid.size() != rows * cols)
    throw ShapeError("grid has " + std::to_string(grid.size()) + " points, expected " + std::to_string(rows) + "x" +
                     std::to_string(cols));
  auto averaged = [&](bool along_xi) {
    const std::size_t len = along_xi ? rows : cols, lines = along_xi ? cols : rows;
    std::vector<double> acc(len, 0.0);
    for (std::size_t l = 0; l < lines; ++l) {
      std::vector<Vec<Dim>> line;
      for (std::size_t k = 0; k < len; ++k) line.push_back(along_xi ? grid[k * cols + l] : grid[l * cols + k]);
      const auto t = parameterize<Dim>(line, method);
      for (std::size_t k = 0; k < len; ++k) acc[k] += t[k];
    }
    for (double& v : acc) v /= static_cast<double>(lines);
    acc.front() = 0.0;
    acc.back() = 1.0;
    return acc;
  };
  SurfaceFit<Dim> out;
  out.params_xi = averaged(true);
  out.params_eta = averaged(false);
  const std::size_t nu = control_xi.value_or(rows), nv = control_eta.value_or(cols);
  if (nu < static_cast<std::size_t>(degree_xi) + 1 || nv < static_cast<std::size_t>(degree_eta) + 1)
    throw ValidationError("need at least degree+1 control points per direction");
  SurfaceFitProblem<Dim> problem{SplineBasis(KnotVector::uniform_clamped(nu, degree_xi), degree_xi),
                                 SplineBasis(KnotVector::uniform_clamped(nv, degree_eta), degree_eta),
                                 Eigen::MatrixXd::Ones(static_cast<Eigen::Index>(nu), static_cast<Eigen::Index>(nv)),
                                 {},
                                 grid};
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) problem.params.emplace_back(out.params_xi[i], out.params_eta[j]);
  out.result = solve_fit(problem);
  std::vector<ControlPoint<Dim>> cps;
  for (const auto& c : out.result.control_points) cps.push_back({c, 1.0});
  out.surface = NurbsSurface<Dim>(problem.basis_xi, problem.basis_eta, std::move(cps));
  return out;
}

}  // namespace nurbsgeo
