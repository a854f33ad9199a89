#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "frenetsim/special_curves.hpp"

using namespace frenetsim;
using std::numbers::pi;

namespace {

const double kA = 3.0 / std::sqrt(13.0);
const double kB = 2.0 / std::sqrt(13.0);

SelfSimilarSpec spec(int n, int i, double kt, std::vector<double> ktj, double hi = 4.0 * pi, std::size_t samples = 2000) {
  SelfSimilarSpec s;
  s.dimension = n;
  s.index = i;
  s.kt = kt;
  s.ktj = std::move(ktj);
  s.sigma_lo = 0.0;
  s.sigma_hi = hi;
  s.samples = samples;
  return s;
}

double max_abs(const std::vector<double>& v) { return sup_norm(v); }

SampledCurve helix(double t1 = 1.5) { return points_only(builtin_sample(BuiltinCurve::helix(3.0, 4.0), 0.0, t1, 2000)); }

}  // namespace

TEST(SelfSimilarSpec, Validation) {
  EXPECT_NO_THROW(spec(2, 1, 0.1, {1.0}).validate());
  EXPECT_THROW(spec(2, 1, 0.1, {0.9}).validate(), Error);           // kt_1 = 1 for i = 1
  EXPECT_THROW(spec(3, 2, 0.1, {0.0, 1.0}).validate(), Error);      // kt_1 must be nonzero
  EXPECT_THROW(spec(3, 2, 0.1, {0.6, 0.6}).validate(), Error);      // unit-circle constraint
  EXPECT_THROW(spec(3, 4, 0.1, {kA, kB}).validate(), Error);        // index range
  EXPECT_THROW(spec(3, 2, 0.1, {kA, kB, 0.1}).validate(), Error);   // wrong count
  EXPECT_NO_THROW(spec(3, 3, 0.0, {0.5, 1.0}).validate());          // i = n: kt_{n-1}^2 = 1
}

// Oracle: 2x2 skew matrix with kt_1 = 1 rotates at unit rate with unit amplitude.
TEST(SolveSelfSimilar, PlaneCase) {
  for (double kt : {-0.3, 0.0, 0.4}) {
    const auto sol = solve_self_similar(spec(2, 1, kt, {1.0}));
    ASSERT_EQ(sol.lambdas.size(), 1u);
    EXPECT_NEAR(sol.lambdas[0], 1.0, 1e-12);
    EXPECT_NEAR(sol.amps[0], 1.0, 1e-12);
    EXPECT_NEAR(sol.b[0], std::hypot(kt, 1.0), 1e-12);
  }
}

// Oracle: kt_1 = kt_2 = kt_3 = c gives lambda^2 = c^2 (3 -+ sqrt 5)/2.
TEST(SolveSelfSimilar, EqualCurvaturesInE4) {
  const double c = std::sqrt(0.5);  // i = 2 forces kt_1^2 + kt_2^2 = 1
  const double cc = c * c;
  const auto sol = solve_self_similar(spec(4, 2, 0.1, {c, c, c}));
  EXPECT_NEAR(sol.lambdas[0] * sol.lambdas[0], cc * (3.0 - std::sqrt(5.0)) / 2.0, 1e-12);
  EXPECT_NEAR(sol.lambdas[1] * sol.lambdas[1], cc * (3.0 + std::sqrt(5.0)) / 2.0, 1e-12);
  double sum = 0.0;
  double moment = 0.0;
  for (int j = 0; j < 2; ++j) {
    sum += sol.amps[static_cast<std::size_t>(j)] * sol.amps[static_cast<std::size_t>(j)];
    moment += std::pow(sol.amps[static_cast<std::size_t>(j)] * sol.lambdas[static_cast<std::size_t>(j)], 2);
  }
  EXPECT_NEAR(sum, 1.0, 1e-12);
  EXPECT_NEAR(moment, cc, 1e-12);
  for (double r : sol.constraint_residuals) EXPECT_LT(r, 1e-9);
  EXPECT_LT(sol.projection_mismatch, 1e-12);
}

// E^3 with kt_1 = 3/sqrt13, kt_2 = 2/sqrt13: lambda^2 = kt_1^2 + kt_2^2 = 1,
// a_1^2 = kt_1^2 = 9/13 and r^2 = kt_2^2 = 4/13 for every kt.
TEST(SolveSelfSimilar, ThreeSpaceExampleValues) {
  for (double kt : {-0.05, 0.0, 0.3}) {
    const auto sol = solve_self_similar(spec(3, 2, kt, {kA, kB}));
    EXPECT_NEAR(sol.lambdas[0] * sol.lambdas[0], 1.0, 1e-12);
    EXPECT_NEAR(sol.amps[0] * sol.amps[0], 9.0 / 13.0, 1e-12);
    EXPECT_NEAR(sol.axial * sol.axial, 4.0 / 13.0, 1e-12);
    if (kt != 0.0) {
      EXPECT_NEAR(std::pow(kt * sol.axial_amplitude(), 2), 4.0 / 13.0, 1e-12);
    }
    // odd-n constraint a_1^2 + kt^2 a_2^2 = 1 in terms of the axial amplitude a_2 = r/kt
    EXPECT_NEAR(sol.amps[0] * sol.amps[0] + sol.axial * sol.axial, 1.0, 1e-12);
    for (double r : sol.constraint_residuals) EXPECT_LT(r, 1e-9);
  }
}

TEST(SolveSelfSimilar, ConstraintRelationsForSeveralDimensions) {
  const std::vector<SelfSimilarSpec> specs{spec(4, 1, 0.2, {1.0, 0.7, 0.4}), spec(5, 3, -0.2, {0.9, 0.6, 0.8, 0.5}),
                                           spec(6, 2, 0.0, {0.6, 0.8, 0.5, 0.9, 0.3}),
                                           spec(7, 4, 0.1, {0.9, 0.5, 0.6, 0.8, 0.7, 0.4})};
  for (const auto& s : specs) {
    const auto sol = solve_self_similar(s);
    EXPECT_EQ(static_cast<int>(sol.lambdas.size()), s.dimension / 2);
    for (std::size_t j = 1; j < sol.lambdas.size(); ++j) EXPECT_GT(sol.lambdas[j], sol.lambdas[j - 1]);
    ASSERT_EQ(static_cast<int>(sol.constraint_residuals.size()), s.dimension);
    for (double r : sol.constraint_residuals) EXPECT_LT(r, 1e-9) << s.dimension;
    EXPECT_LT(sol.projection_mismatch, 1e-10);
    // even n: sum a^2 = 1 and sum a^2 lambda^2 = kt_1^2
    if (s.dimension % 2 == 0) {
      double sum = 0.0;
      double moment = 0.0;
      double third = 0.0;
      for (std::size_t j = 0; j < sol.amps.size(); ++j) {
        const double a2 = sol.amps[j] * sol.amps[j];
        const double l2 = sol.lambdas[j] * sol.lambdas[j];
        sum += a2;
        moment += a2 * l2;
        third += a2 * l2 * std::pow(s.kt_j(1) * s.kt_j(1) - l2, 2) / l2;
      }
      EXPECT_NEAR(sum, 1.0, 1e-9);
      EXPECT_NEAR(moment, s.kt_j(1) * s.kt_j(1), 1e-9);
      // <V_3, V_3> = 1 in general form: sum a^2 (kt_1^2 - lambda^2)^2 = kt_1^2 kt_2^2
      EXPECT_NEAR(third, std::pow(s.kt_j(1) * s.kt_j(2), 2), 1e-9);
    }
  }
}

TEST(SolveSelfSimilar, RepeatedEigenvalues) {
  // block-diagonal K: kt_2 = 0 separates two equal rotations
  try {
    solve_self_similar(spec(4, 1, 0.0, {1.0, 1e-30, 1.0}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RepeatedEigenvalue);
  }
}

TEST(SolveSelfSimilar, VanishingAxialAmplitudeHasNoRealSolution) {
  // n = 3 with kt_2 = 0 is a planar spiral; r = 0 so a_{m+1}^2 is not positive
  try {
    solve_self_similar(spec(3, 1, 0.1, {1.0, 0.0}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoRealSolution);
  }
}

// Oracle: n = 2, kt = 0 gives the unit circle, period 2 pi.
TEST(Synthesize, UnitCircleAndItsOracle) {
  const auto s = spec(2, 1, 0.0, {1.0}, 2.0 * pi, 400);
  const auto c = synthesize_self_similar(s);
  for (std::size_t k = 0; k < c.size(); ++k) ASSERT_NEAR(c.point(k).norm(), 1.0, 1e-12);
  EXPECT_LT((c.point(0) - c.point(c.size() - 1)).norm(), 1e-12);
  const auto o = frame_ode_oracle(s);
  EXPECT_LT((o.curve.point(0) - o.curve.point(o.curve.size() - 1)).norm(), 1e-10);
  for (std::size_t k = 0; k < o.curve.size(); ++k) ASSERT_NEAR((o.curve.point(k) - Vector::Unit(2, 1)).norm(), 1.0, 1e-10);
}

TEST(Synthesize, LogSpiralRoundTrip) {
  const auto c = points_only(synthesize_self_similar(spec(2, 1, -0.1, {1.0})));
  const ShapeSignature sig = analyze(c, 1);
  for (std::size_t k = 0; k < sig.size(); ++k) {
    ASSERT_NEAR(sig.kt[k], -0.1, 1e-3);
    ASSERT_NEAR(sig.ktj(static_cast<Eigen::Index>(k), 0), 1.0, 1e-3);
  }
}

TEST(Synthesize, ExactDerivativesAgreeWithPositions) {
  SynthesisOptions opt;
  opt.exact_derivatives = true;
  for (const auto& s : {spec(3, 2, -0.05, {kA, kB}), spec(4, 1, 0.2, {1.0, 0.7, 0.4}), spec(3, 2, 0.0, {kA, kB})}) {
    const auto c = synthesize_self_similar(s, opt);
    const auto o = frame_ode_oracle(s, opt);
    for (int order = 1; order <= 2; ++order) {
      const Matrix num = Differentiator(c.t, order, 5).apply(c.points, order);
      EXPECT_LT((num - c.derivatives[static_cast<std::size_t>(order - 1)]).cwiseAbs().maxCoeff(), 1e-7);
      const Matrix onum = Differentiator(o.curve.t, order, 5).apply(o.curve.points, order);
      EXPECT_LT((onum - o.curve.derivatives[static_cast<std::size_t>(order - 1)]).cwiseAbs().maxCoeff(), 1e-7);
    }
    // |alpha'| = e^{kt sigma}
    for (std::size_t k = 0; k < c.size(); ++k) {
      ASSERT_NEAR(c.derivatives[0].row(static_cast<Eigen::Index>(k)).norm(), std::exp(s.kt * c.t[k]), 1e-12);
    }
  }
}

TEST(Synthesize, NormalizationIdentity) {
  for (const auto& s : {spec(3, 2, -0.05, {kA, kB}), spec(4, 1, 0.2, {1.0, 0.7, 0.4}), spec(3, 3, 0.15, {0.5, 1.0})}) {
    const FrenetData f = frenet_apparatus(points_only(synthesize_self_similar(s)));
    const auto q = indicatrix_speed(f, s.index);
    for (std::size_t k = 0; k < f.size(); ++k) ASSERT_NEAR(q[k], std::exp(-s.kt * f.t[k]), 1e-3);
  }
}

TEST(Oracle, FrameDriftAndSimilarityToClosedForm) {
  for (const auto& s : {spec(3, 2, -0.05, {kA, kB}), spec(4, 1, 0.2, {1.0, 0.7, 0.4}),
                        spec(5, 3, 0.0, {0.9, 0.6, 0.8, 0.5})}) {
    const auto o = frame_ode_oracle(s);
    EXPECT_LT(o.max_frame_drift, 1e-9);
    const MatchResult m = similarity_test(points_only(synthesize_self_similar(s)), o.curve, s.index, 1e-3);
    EXPECT_TRUE(m.is_similar) << m.distance;
  }
}

// Oracle: helix(3,4) has f_1 = 25/3, f_2 = 0 and focal helix radius |3 - 25/3| = 16/3.
TEST(Focal, HelixFocalCurve) {
  const FrenetData f = frenet_apparatus(helix(20.0));
  const FocalData fd = focal_curvatures(f);
  for (std::size_t k = 0; k < fd.s.size(); ++k) {
    ASSERT_NEAR(fd.f(static_cast<Eigen::Index>(k), 0), 25.0 / 3.0, 1e-6);
    ASSERT_NEAR(fd.f(static_cast<Eigen::Index>(k), 1), 0.0, 1e-4);
    const auto c = fd.focal_points.row(static_cast<Eigen::Index>(k));
    ASSERT_NEAR(std::hypot(c(0), c(1)), 16.0 / 3.0, 1e-6);
  }
  try {
    shape_from_focal(fd, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroFocalPivot);
  }
}

TEST(Focal, CircleCenterAndCrossPath) {
  const FrenetData f = frenet_apparatus(points_only(builtin_sample(BuiltinCurve::circle(2.0), 0.0, 5.0, 800)));
  const FocalData fd = focal_curvatures(f);
  for (std::size_t k = 0; k < fd.s.size(); ++k) {
    ASSERT_NEAR(fd.f(static_cast<Eigen::Index>(k), 0), 2.0, 1e-9);
    ASSERT_LT(fd.focal_points.row(static_cast<Eigen::Index>(k)).norm(), 1e-9);
  }
  const FocalShapeSignature fs = shape_from_focal(fd, 1);
  EXPECT_TRUE(fs.boundary_extrapolated);
  EXPECT_LT(signature_deviation(shape_curvatures(f, 1), fs.signature), 1e-6);
}

TEST(Focal, StraightLineHasZeroCurvature) {
  // the frame itself is degenerate, so build one with kappa_1 = 0 directly
  FrenetData f = frenet_apparatus(helix(5.0));
  f.kappas.col(0).setZero();
  try {
    focal_curvatures(f);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroCurvature);
  }
}

TEST(Focal, CrossPathOnSelfSimilarAndPolynomialCurves) {
  std::vector<FrenetData> fixtures;
  fixtures.push_back(frenet_apparatus(points_only(synthesize_self_similar(spec(3, 2, -0.1, {kA, kB})))));
  fixtures.push_back(frenet_apparatus(points_only(synthesize_self_similar(spec(4, 2, 0.15, {0.6, 0.8, 0.5})))));
  Matrix c = Matrix::Zero(3, 4);
  c(0, 1) = 1.0;
  c(1, 2) = 1.0;
  c(2, 3) = 1.0;
  fixtures.push_back(frenet_apparatus(points_only(builtin_sample(BuiltinCurve::custom_poly(c), 0.3, 2.0, 1500))));
  for (const auto& f : fixtures) {
    const FocalData fd = focal_curvatures(f);
    for (std::size_t k = 0; k < fd.s.size(); ++k) ASSERT_NEAR(fd.f(static_cast<Eigen::Index>(k), 0) * f.kappa(k, 1), 1.0, 1e-9);
    for (int i = 1; i <= f.dimension; ++i) {
      const FocalShapeSignature fs = shape_from_focal(fd, i);
      EXPECT_EQ(fs.boundary_extrapolated, i <= 2 || i == f.dimension);
      EXPECT_LT(signature_deviation(shape_curvatures(f, i), fs.signature), 1e-3) << "n=" << f.dimension << " i=" << i;
    }
  }
}

// Oracle: helix(3,4), phi0 = pi/2: m_1 = 25/3, m_2 = (25/3) cot(4s/25 + pi/2).
TEST(Evolute, HelixClosedForm) {
  const FrenetData f = frenet_apparatus(helix());
  const EvoluteData ev = evolute_E3(f);
  for (std::size_t k = 0; k < ev.s.size(); ++k) {
    ASSERT_NEAR(ev.m1[k], 25.0 / 3.0, 1e-6);
    ASSERT_NEAR(ev.m2[k], 25.0 / 3.0 / std::tan(4.0 * ev.s[k] / 25.0 + pi / 2.0), 1e-6);
  }
  const EvoluteReport rep = evolute_invariant_report(f);
  EXPECT_LT(rep.m1_residual, 1e-4);
  EXPECT_LT(rep.m2_residual, 1e-3);
  for (double v : rep.kt2) ASSERT_NEAR(v, 4.0 / 3.0, 1e-6);
}

// The evolute of a helix does not stay at a fixed distance from the axis:
// beta = alpha + m_1 V_2 + m_2 V_3 sits at radius sqrt((16/3)^2 + (4 m_2/5)^2),
// while its tangent is always normal to the helix tangent.
TEST(Evolute, HelixEvoluteGeometry) {
  const FrenetData f = frenet_apparatus(helix());
  const EvoluteData ev = evolute_E3(f);
  const Matrix db = Differentiator(ev.s, 1, 4).apply(ev.beta, 1);
  for (std::size_t k = 0; k < ev.s.size(); ++k) {
    const auto r = static_cast<Eigen::Index>(k);
    ASSERT_NEAR(std::hypot(ev.beta(r, 0), ev.beta(r, 1)), std::hypot(16.0 / 3.0, 0.8 * ev.m2[k]), 1e-6);
    ASSERT_NEAR(db.row(r).dot(f.frames[k].row(0)), 0.0, 1e-6);
  }
}

TEST(Evolute, PlanarCircleAndErrors) {
  const FrenetData helix_frame = frenet_apparatus(helix());
  FrenetData planar = helix_frame;
  planar.kappas.col(1).setZero();
  const EvoluteData ev = evolute_E3(planar);
  for (double v : ev.m2) ASSERT_NEAR(v, 0.0, 1e-12);
  try {
    evolute_E3(planar, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::PlanarCurve);
  }
  try {
    evolute_E3(frenet_apparatus(helix(20.0)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::CotSingularity);
  }
  const FrenetData circle = frenet_apparatus(points_only(builtin_sample(BuiltinCurve::circle(1.0), 0.0, 3.0, 200)));
  EXPECT_THROW(evolute_E3(circle), Error);
}

TEST(Evolute, SelfSimilarCurveResiduals) {
  const FrenetData f = frenet_apparatus(points_only(synthesize_self_similar(spec(3, 2, -0.1, {kA, kB}, 3.0))));
  const EvoluteReport rep = evolute_invariant_report(f, 1.2);
  EXPECT_LT(rep.m1_residual, 1e-3);
  EXPECT_LT(rep.m2_residual, 1e-3);
  EXPECT_GT(max_abs(rep.kt1), 1e-2);  // nonconstant kappa_1
}
