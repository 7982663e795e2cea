#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "nurbsgeo/fitting.hpp"
#include "oracles.hpp"

using namespace nurbsgeo;

namespace {

const std::vector<Vec3> kFourPoints{Vec3(0, 0, 0), Vec3(1, 2, 0), Vec3(3, 2, 1), Vec3(4, 0, 1)};

double fit_residual(const CurveFitProblem<3>& problem, const std::vector<Vec3>& cps) {
  const Eigen::MatrixXd a = collocation_matrix(problem);
  double s = 0.0;
  for (std::size_t i = 0; i < problem.params.size(); ++i) {
    Vec3 p = Vec3::Zero();
    for (std::size_t j = 0; j < cps.size(); ++j) p += a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * cps[j];
    s += (p - problem.targets[i]).squaredNorm();
  }
  return std::sqrt(s);
}

}  // namespace

TEST(Collocation, BlockRowStructure) {
  // one sample, two linear basis functions, 3D
  const CurveFitProblem<3> problem{BasisSpec::unweighted(SplineBasis(KnotVector({0, 0, 1, 1}), 1)), {0.25},
                                   {Vec3(1, 2, 3)}};
  const Eigen::MatrixXd compact = collocation_matrix(problem);
  ASSERT_EQ(compact.rows(), 1);
  ASSERT_EQ(compact.cols(), 2);
  const Eigen::MatrixXd a = block_collocation_matrix(compact, 3);
  ASSERT_EQ(a.rows(), 3);
  ASSERT_EQ(a.cols(), 6);
  Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(3, 6);
  for (int d = 0; d < 3; ++d) {
    expected(d, d) = 0.75;
    expected(d, 3 + d) = 0.25;
  }
  EXPECT_TRUE(a.isApprox(expected, 1e-15));
}

TEST(Collocation, LinearEndpointsGiveIdentity) {
  const CurveFitProblem<3> problem{BasisSpec::unweighted(SplineBasis(KnotVector({0, 0, 1, 1}), 1)), {0.0, 1.0},
                                   {Vec3::Zero(), Vec3::Ones()}};
  EXPECT_TRUE(collocation_matrix(problem).isIdentity(0.0));
  EXPECT_TRUE(block_collocation_matrix(collocation_matrix(problem), 3).isIdentity(0.0));
}

TEST(Collocation, RowsSumToOne) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> uni(0.0, 1.0), wd(0.3, 3.0);
  const SplineBasis b(KnotVector(oracle::random_clamped(rng, 3, 5)), 3);
  std::vector<double> w(b.size());
  for (double& x : w) x = wd(rng);
  CurveFitProblem<3> problem{BasisSpec(b, w), {}, {}};
  for (int i = 0; i < 40; ++i) {
    problem.params.push_back(uni(rng));
    problem.targets.push_back(Vec3::Zero());
  }
  const Eigen::VectorXd sums = collocation_matrix(problem).rowwise().sum();
  for (Eigen::Index i = 0; i < sums.size(); ++i) EXPECT_NEAR(sums(i), 1.0, 1e-14);
}

TEST(Collocation, SurfaceRowsSumToOne) {
  const SplineBasis bx(KnotVector::uniform_clamped(4, 2), 2), by(KnotVector::uniform_clamped(5, 3), 3);
  Eigen::MatrixXd w = Eigen::MatrixXd::Constant(4, 5, 1.0);
  w(1, 2) = 2.5;
  w(2, 3) = 0.4;
  SurfaceFitProblem<3> problem{bx, by, w, {}, {}};
  for (int i = 0; i <= 6; ++i)
    for (int j = 0; j <= 6; ++j) {
      problem.params.emplace_back(i / 6.0, j / 6.0);
      problem.targets.push_back(Vec3::Zero());
    }
  const Eigen::MatrixXd a = collocation_matrix(problem);
  EXPECT_EQ(a.cols(), 20);
  for (Eigen::Index i = 0; i < a.rows(); ++i) EXPECT_NEAR(a.row(i).sum(), 1.0, 1e-14);
}

TEST(ChordLength, Examples) {
  const auto t = parameterize_chord_length<3>({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0)});
  EXPECT_EQ(t, (std::vector<double>{0.0, 0.5, 1.0}));
  const auto u = parameterize_chord_length<3>({Vec3(0, 0, 0), Vec3(0, 1, 0), Vec3(0, 1, 3)});
  EXPECT_NEAR(u[1], 0.25, 1e-15);
  EXPECT_EQ(u.back(), 1.0);
  EXPECT_EQ(parameterize_chord_length<2>({Vec2(0, 0), Vec2(3, 4)}), (std::vector<double>{0.0, 1.0}));
}

TEST(ChordLength, DegenerateInputs) {
  EXPECT_THROW(parameterize_chord_length<3>({Vec3(1, 1, 1), Vec3(1, 1, 1), Vec3(2, 2, 2)}), GeometryError);
  EXPECT_THROW(parameterize_chord_length<3>({Vec3(1, 1, 1)}), ValidationError);
  EXPECT_EQ(parameterize_uniform(5), (std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0}));
}

TEST(FitCurve, CubicThroughFourPoints) {
  const auto fit = fit_curve<3>(kFourPoints, 3);
  EXPECT_TRUE(fit.result.exact);
  EXPECT_LE(fit.result.residual_norm, 1e-10);
  for (std::size_t i = 0; i < kFourPoints.size(); ++i)
    EXPECT_LT((fit.curve.point(fit.params[i]) - kFourPoints[i]).norm(), 1e-10);
  // end interpolation of a clamped curve
  EXPECT_LT((fit.curve.control_points().front().position - kFourPoints.front()).norm(), 1e-12);
  EXPECT_LT((fit.curve.control_points().back().position - kFourPoints.back()).norm(), 1e-12);
}

TEST(FitCurve, QuadraticApproximationSatisfiesNormalEquations) {
  const auto fit = fit_curve<3>(kFourPoints, 2, 3);
  EXPECT_FALSE(fit.result.exact);
  EXPECT_GT(fit.result.residual_norm, 1e-3);
  const CurveFitProblem<3> problem{BasisSpec::unweighted(fit.curve.basis()), fit.params, kFourPoints};
  const Eigen::MatrixXd a = collocation_matrix(problem);
  Eigen::MatrixXd c(3, 3), x(4, 3);
  for (int j = 0; j < 3; ++j) c.row(j) = fit.result.control_points[static_cast<std::size_t>(j)].transpose();
  for (int i = 0; i < 4; ++i) x.row(i) = kFourPoints[static_cast<std::size_t>(i)].transpose();
  EXPECT_LE((a.transpose() * (a * c - x)).norm(), 1e-9);
  EXPECT_NEAR(fit.result.residual_norm, (a * c - x).norm(), 1e-12);
}

TEST(FitCurve, LeastSquaresIsOptimal) {
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> uni(-1.0, 1.0), wd(0.5, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    const SplineBasis b(KnotVector::uniform_clamped(5, 2), 2);
    std::vector<double> w(5);
    for (double& x : w) x = wd(rng);
    CurveFitProblem<3> problem{BasisSpec(b, w), parameterize_uniform(15), {}};
    for (int i = 0; i < 15; ++i) problem.targets.emplace_back(uni(rng), uni(rng), uni(rng));
    const auto result = solve_fit(problem);
    const double base = fit_residual(problem, result.control_points);
    EXPECT_NEAR(base, result.residual_norm, 1e-12);
    for (std::size_t j = 0; j < 5; ++j)
      for (int d = 0; d < 3; ++d)
        for (double h : {1e-3, -1e-3}) {
          auto cps = result.control_points;
          cps[j](d) += h;
          EXPECT_GE(fit_residual(problem, cps), base);
        }
  }
}

TEST(FitCurve, GrevilleReproduction) {
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> uni(-2.0, 2.0), wd(0.5, 2.0);
  for (int p = 1; p <= 4; ++p) {
    const SplineBasis b(KnotVector(oracle::random_clamped(rng, p, 4)), p);
    std::vector<ControlPoint<3>> cps;
    std::vector<double> w;
    for (std::size_t j = 0; j < b.size(); ++j) {
      cps.push_back({Vec3(uni(rng), uni(rng), uni(rng)), wd(rng)});
      w.push_back(cps.back().weight);
    }
    const NurbsCurve<3> curve(b, cps);
    CurveFitProblem<3> problem{BasisSpec(b, w), greville_abscissae(b.knots, b.degree), {}};
    for (double t : problem.params) problem.targets.push_back(curve.point(t));
    const auto result = solve_fit(problem);
    EXPECT_TRUE(result.exact);
    for (std::size_t j = 0; j < cps.size(); ++j) EXPECT_LT((result.control_points[j] - cps[j].position).norm(), 1e-8);
  }
}

TEST(FitCurve, Errors) {
  const CurveFitProblem<3> dup{BasisSpec::unweighted(SplineBasis(KnotVector::uniform_clamped(3, 2), 2)),
                              {0.0, 0.5, 0.5},
                              {Vec3::Zero(), Vec3::Ones(), Vec3::Ones()}};
  EXPECT_THROW(solve_fit(dup), SingularSystemError);

  // two samples in the first span only: the last basis function is never hit
  const CurveFitProblem<3> gap{BasisSpec::unweighted(SplineBasis(KnotVector({0, 0, 0.5, 1, 1}), 1)),
                              {0.0, 0.1, 0.2, 0.3},
                              {Vec3::Zero(), Vec3::Ones(), Vec3::Ones(), Vec3::Zero()}};
  EXPECT_THROW(solve_fit(gap), SingularSystemError);

  const CurveFitProblem<3> under{BasisSpec::unweighted(SplineBasis(KnotVector::uniform_clamped(4, 3), 3)),
                                {0.0, 1.0},
                                {Vec3::Zero(), Vec3::Ones()}};
  EXPECT_THROW(solve_fit(under), ValidationError);

  const CurveFitProblem<3> outside{BasisSpec::unweighted(SplineBasis(KnotVector::uniform_clamped(2, 1), 1)),
                                  {0.0, 1.5},
                                  {Vec3::Zero(), Vec3::Ones()}};
  EXPECT_THROW(solve_fit(outside), DomainError);

  const CurveFitProblem<3> mismatch{BasisSpec::unweighted(SplineBasis(KnotVector::uniform_clamped(2, 1), 1)),
                                   {0.0, 1.0},
                                   {Vec3::Zero()}};
  EXPECT_THROW(solve_fit(mismatch), ShapeError);
  EXPECT_THROW(fit_curve<3>(kFourPoints, 4), ValidationError);
}

TEST(FitSurface, TwelvePointGrid) {
  // 3 rows along xi (p = 2), 4 columns along eta (q = 3)
  std::vector<Vec3> grid;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 4; ++j) grid.emplace_back(i, j * 0.8, std::sin(0.9 * i) * std::cos(0.7 * j));
  const auto fit = fit_surface_grid<3>(grid, 3, 4, 2, 3);
  EXPECT_TRUE(fit.result.exact);
  EXPECT_LE(fit.result.residual_norm, 1e-9);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 4; ++j)
      EXPECT_LT((fit.surface.point(fit.params_xi[static_cast<std::size_t>(i)], fit.params_eta[static_cast<std::size_t>(j)]) -
                 grid[static_cast<std::size_t>(i * 4 + j)])
                    .norm(),
                1e-9);
}

TEST(FitSurface, ApproximationAndShapeErrors) {
  std::vector<Vec3> grid;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 5; ++j) grid.emplace_back(i, j, 0.1 * i * j);
  // bilinear data is reproduced exactly by a smaller biquadratic net
  const auto fit = fit_surface_grid<3>(grid, 6, 5, 2, 2, 4, 3);
  EXPECT_FALSE(fit.result.exact);
  EXPECT_LT(fit.result.residual_norm, 1e-9);
  EXPECT_THROW(fit_surface_grid<3>(grid, 5, 5, 2, 2), ShapeError);
}

TEST(FitTrimCurve, Examples) {
  const auto seg = fit_trim_curve({Vec2(0.1, 0.2), Vec2(0.7, 0.9)}, 1);
  EXPECT_LT((seg.curve.point(0.5) - Vec2(0.4, 0.55)).norm(), 1e-12);

  std::vector<Vec2> line;
  for (double t : {0.0, 0.1, 0.35, 0.6, 1.0}) line.emplace_back(0.2 + 0.5 * t, 0.9 - 0.6 * t);
  const auto straight = fit_trim_curve(line, 2);
  for (int k = 0; k <= 49; ++k) {
    const Vec2 q = straight.curve.point(k / 49.0);
    // distance to the supporting line through (0.2, 0.9) with direction (0.5, -0.6)
    EXPECT_LT(std::abs((q.x() - 0.2) * -0.6 - (q.y() - 0.9) * 0.5) / std::hypot(0.5, 0.6), 1e-9);
  }

  std::vector<Vec2> ring;
  for (int k = 0; k < 9; ++k) ring.emplace_back(0.5 + 0.3 * std::cos(0.6 * k), 0.5 + 0.3 * std::sin(0.6 * k));
  const auto circ = fit_trim_curve(ring, 3);
  EXPECT_LE(circ.result.residual_norm, 1e-9);
  for (std::size_t k = 0; k < ring.size(); ++k) EXPECT_LT((circ.curve.point(circ.params[k]) - ring[k]).norm(), 1e-9);

  EXPECT_THROW(fit_trim_curve({Vec2(0, 0), Vec2(1, 1)}, 2), ValidationError);
}
