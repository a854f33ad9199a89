#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "frenetsim/curve_model.hpp"

using namespace frenetsim;
using std::numbers::pi;

namespace {

// max over samples and over the non-boundary frame vectors of
// |dV_i/ds - (-kappa_{i-1} V_{i-1} + kappa_i V_{i+1})|
double frenet_residual(const FrenetData& f) {
  const int n = f.dimension;
  double worst = 0.0;
  for (int i = 1; i <= n; ++i) {
    Matrix v(static_cast<Eigen::Index>(f.size()), n);
    for (std::size_t k = 0; k < f.size(); ++k) v.row(static_cast<Eigen::Index>(k)) = f.frames[k].row(i - 1);
    const Matrix dv = Differentiator(f.s, 1, 4).apply(v, 1);
    for (std::size_t k = 8; k + 8 < f.size(); ++k) {
      Vector rhs = Vector::Zero(n);
      if (i > 1) rhs -= f.kappa(k, i - 1) * f.frame_vector(k, i - 1);
      if (i < n) rhs += f.kappa(k, i) * f.frame_vector(k, i + 1);
      worst = std::max(worst, (dv.row(static_cast<Eigen::Index>(k)).transpose() - rhs).norm());
    }
  }
  return worst;
}

double frame_defect(const FrenetData& f) {
  double worst = 0.0;
  for (const auto& m : f.frames) {
    const auto n = m.rows();
    worst = std::max(worst, (m * m.transpose() - Matrix::Identity(n, n)).cwiseAbs().maxCoeff());
    worst = std::max(worst, std::abs(m.determinant() - 1.0));
  }
  return worst;
}

BuiltinCurve random_poly(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix c = Matrix::Zero(n, n + 2);
  for (int d = 0; d < n; ++d) {
    for (int p = 0; p < n + 2; ++p) c(d, p) = g(rng) / (1.0 + p);
  }
  // a dominant t^(d+1) term keeps the derivatives independent
  for (int d = 0; d < n; ++d) c(d, d + 1) += 3.0;
  return BuiltinCurve::custom_poly(c);
}

}  // namespace

TEST(Builtin, ExactPointsAtZero) {
  auto c = builtin_evaluate(BuiltinCurve::circle(1.0), {0.0, 1.0});
  EXPECT_NEAR(c.points(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(c.points(0, 1), 0.0, 1e-15);
  auto h = builtin_evaluate(BuiltinCurve::helix(3.0, 4.0), {0.0, 1.0});
  EXPECT_NEAR(h.points(0, 0), 3.0, 1e-15);
  EXPECT_NEAR(h.points(0, 1), 0.0, 1e-15);
  EXPECT_NEAR(h.points(0, 2), 0.0, 1e-15);
  auto l = builtin_evaluate(BuiltinCurve::log_spiral(0.1), {0.0, 1.0});
  EXPECT_NEAR(l.points(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(l.points(0, 1), 0.0, 1e-15);
}

TEST(Builtin, InvalidParametersAndParameters) {
  EXPECT_THROW(builtin_evaluate(BuiltinCurve::circle(-1.0), {0.0, 1.0}), Error);
  EXPECT_THROW(builtin_evaluate(BuiltinCurve::helix(0.0, 1.0), {0.0, 1.0}), Error);
  EXPECT_THROW(builtin_evaluate(BuiltinCurve::circle(1.0), {1.0, 0.0}), Error);
}

TEST(Builtin, ExactDerivativesMatchNumeric) {
  const auto c = builtin_sample(random_poly(3, 1), -1.0, 1.0, 400);
  for (int o = 1; o <= 3; ++o) {
    // the third derivative needs spread-out nodes to stay above roundoff
    const std::size_t stride = o == 3 ? 4 : 1;
    const Matrix num = Differentiator(c.t, o, 5, stride).apply(c.points, o);
    const Matrix& exact = c.derivatives[static_cast<std::size_t>(o - 1)];
    EXPECT_LT((num - exact).cwiseAbs().maxCoeff(), 1e-6 * exact.cwiseAbs().maxCoeff()) << "order " << o;
  }
}

TEST(ArcLength, CircleHelixAndLine) {
  const auto circle = arclength_reparam(BuiltinCurve::circle(2.0), 0.0, 2.0 * pi, 1000);
  EXPECT_NEAR(circle.t.back(), 4.0 * pi, 1e-9);
  EXPECT_EQ(circle.param_kind, ParamKind::UnitSpeed);
  const auto helix = arclength_reparam(BuiltinCurve::helix(3.0, 4.0), 0.0, 2.0 * pi, 500);
  EXPECT_NEAR(helix.t.back(), 10.0 * pi, 1e-9);

  // segment (0,0,0) -> (1,0,0) with nonuniform parameter spacing
  std::vector<double> t;
  Matrix pts = Matrix::Zero(41, 3);
  for (int k = 0; k <= 40; ++k) {
    const double u = k / 40.0;
    t.push_back(0.5 * u + 0.5 * u * u);
    pts(k, 0) = t.back();
  }
  const auto seg = arclength_reparam(make_curve(t, pts), 101);
  EXPECT_NEAR(seg.t.back(), 1.0, 1e-3);
  for (std::size_t k = 0; k < seg.size(); ++k) EXPECT_NEAR(seg.points(static_cast<Eigen::Index>(k), 0), seg.t[k], 1e-3);
}

TEST(ArcLength, SampledCircleLengthWithinTolerance) {
  const auto c = points_only(builtin_sample(BuiltinCurve::circle(2.0), 0.0, 2.0 * pi, 400));
  const auto r = arclength_reparam(c, 500);
  EXPECT_NEAR(r.t.back(), 4.0 * pi, 4.0 * pi * 1e-3);
}

TEST(ArcLength, ZeroSpeedAndTooFewSamples) {
  const std::vector<double> t{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  Matrix pts = Matrix::Zero(10, 2);
  EXPECT_THROW(arclength_reparam(make_curve(t, pts), 20), Error);
  try {
    arclength_reparam(make_curve(t, pts), 20);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroSpeed);
  }
  try {
    arclength_reparam(BuiltinCurve::circle(1.0), 0.0, 1.0, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TooFewSamples);
  }
}

TEST(Frenet, CircleCurvatureExactAndNumeric) {
  for (bool exact : {true, false}) {
    auto c = builtin_sample(BuiltinCurve::circle(2.0), 0.0, 2.0 * pi, 1000);
    if (!exact) c = points_only(c);
    const FrenetData f = frenet_apparatus(c);
    for (std::size_t k = 0; k < f.size(); ++k) EXPECT_NEAR(f.kappa(k, 1), 0.5, 1e-4);
  }
}

TEST(Frenet, HelixCurvatures) {
  for (bool exact : {true, false}) {
    auto c = builtin_sample(BuiltinCurve::helix(3.0, 4.0), 0.0, 4.0 * pi, 2000);
    if (!exact) c = points_only(c);
    const FrenetData f = frenet_apparatus(c);
    EXPECT_LT(frame_defect(f), 1e-12);
    for (std::size_t k = 0; k < f.size(); ++k) {
      ASSERT_NEAR(f.kappa(k, 1), 0.12, 1e-6);
      ASSERT_NEAR(f.kappa(k, 2), 0.16, 1e-6);
    }
    EXPECT_NEAR(f.total_length, 20.0 * pi, 1e-9);
  }
}

TEST(Frenet, LeftHandedHelixHasNegativeTorsion) {
  const auto c = points_only(builtin_sample(BuiltinCurve::helix(3.0, -4.0), 0.0, 4.0 * pi, 1000));
  const FrenetData f = frenet_apparatus(c);
  for (std::size_t k = 0; k < f.size(); ++k) ASSERT_NEAR(f.kappa(k, 2), -0.16, 1e-6);
}

TEST(Frenet, StraightLineIsDegenerate) {
  for (bool exact : {true, false}) {
    auto c = builtin_sample(BuiltinCurve::line(3), 0.0, 1.0, 200);
    if (!exact) c = points_only(c);
    try {
      frenet_apparatus(c);
      FAIL() << "expected FrameDegenerate";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::FrameDegenerate);
    }
  }
}

TEST(Frenet, DimensionMismatchOnBadTables) {
  auto c = builtin_sample(BuiltinCurve::circle(1.0), 0.0, 1.0, 50);
  c.points.conservativeResize(Eigen::NoChange, 3);
  EXPECT_THROW(frenet_apparatus(c), Error);
}

TEST(Frenet, GeneralParameterMatchesUnitSpeed) {
  const auto generic = points_only(builtin_sample(BuiltinCurve::log_spiral(0.15), 0.0, 3.0 * pi, 1500));
  const auto unit = arclength_reparam(BuiltinCurve::log_spiral(0.15), 0.0, 3.0 * pi, 1500);
  const FrenetData fg = frenet_apparatus(generic);
  const FrenetData fu = frenet_apparatus(unit);
  const double mu = std::hypot(0.15, 1.0);
  for (std::size_t k = 0; k < fg.size(); ++k) ASSERT_NEAR(fg.kappa(k, 1) * mu * std::exp(0.15 * fg.t[k]), 1.0, 1e-7);
  // unit-speed samples: kappa = 1/(c s + 1/mu) with s measured from t = 0
  for (std::size_t k = 0; k < fu.size(); ++k) ASSERT_NEAR(fu.kappa(k, 1), 1.0 / (0.15 * fu.t[k] + mu), 1e-6);
}

// Property: frames are orthonormal with det +1 on random polynomial curves in E^2..E^5.
TEST(FrenetProperty, FramesOrthonormalOnRandomCurves) {
  for (int n = 2; n <= 5; ++n) {
    for (unsigned seed = 1; seed <= 5; ++seed) {
      const auto c = points_only(builtin_sample(random_poly(n, seed * 17 + static_cast<unsigned>(n)), 1.0, 3.0, 400));
      const FrenetData f = frenet_apparatus(c);
      EXPECT_LT(frame_defect(f), 1e-6) << "n=" << n << " seed=" << seed;
    }
  }
}

// Property: kappa_1..kappa_{n-2} agree between a curve and its reversal;
// the signed last curvature picks up (-1)^(n(n+1)/2), from V_k -> (-1)^k V_k
// for k < n and V_n fixed by the orientation of the frame.
TEST(FrenetProperty, ReversalInvariance) {
  for (int n = 2; n <= 5; ++n) {
    const auto c = points_only(builtin_sample(random_poly(n, 99 + static_cast<unsigned>(n)), 1.0, 3.0, 600));
    const FrenetData f = frenet_apparatus(c);
    const FrenetData r = frenet_apparatus(reversed(c));
    ASSERT_EQ(f.size(), r.size());
    const std::size_t m = f.size();
    for (int j = 1; j <= n - 2; ++j) {
      const double scale = sup_norm(f.kappa_column(j));
      for (std::size_t k = 0; k < m; ++k) ASSERT_NEAR(f.kappa(k, j), r.kappa(m - 1 - k, j), 1e-6 * scale);
    }
    const double sign = (n * (n + 1) / 2) % 2 == 0 ? 1.0 : -1.0;
    const double scale = sup_norm(f.kappa_column(n - 1));
    // the last curvature needs the n-th derivative, whose one-sided stencils dominate near the ends
    for (std::size_t k = 0; k < m; ++k) ASSERT_NEAR(f.kappa(k, n - 1), sign * r.kappa(m - 1 - k, n - 1), 1e-4 * scale);
  }
}

// Property: the finite-difference Frenet residual shrinks as the sampling is refined.
TEST(FrenetProperty, ResidualConvergesUnderRefinement) {
  const auto curve = BuiltinCurve::helix(2.0, 1.0, 3);
  double prev = 0.0;
  for (std::size_t count : {30u, 40u, 60u}) {
    const double res = frenet_residual(frenet_apparatus(builtin_sample(curve, 0.0, 2.0 * pi, count)));
    if (prev > 0.0) {
      EXPECT_LT(res, prev / 4.0) << count;
    }
    prev = res;
  }
  EXPECT_LT(prev, 1e-6);
}

TEST(FrenetProperty, ResidualSmallInHigherDimensions) {
  for (int n = 4; n <= 5; ++n) {
    const auto c = builtin_sample(random_poly(n, 5 + static_cast<unsigned>(n)), 1.0, 2.0, 800);
    EXPECT_LT(frenet_residual(frenet_apparatus(c)), 1e-5) << n;
  }
}
