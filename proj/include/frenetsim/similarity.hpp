#pragma once

// Direct similarities F(x) = lambda * A x + b of E^n and the transformation
// laws they induce on arc length and curvatures.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "frenetsim/curve_model.hpp"
#include "frenetsim/error.hpp"
#include "frenetsim/numerics.hpp"

namespace frenetsim {

struct SimilarityTransform {
  double lambda = 1.0;
  Matrix A;
  Vector b;

  int dimension() const { return static_cast<int>(A.rows()); }

  static SimilarityTransform identity(int n) { return {1.0, Matrix::Identity(n, n), Vector::Zero(n)}; }

  /// Throws unless lambda > 0, A is a rotation and b matches A.
  void validate(double tol = 1e-12) const {
    require(lambda > 0.0 && std::isfinite(lambda), ErrorCode::BadParameters, "lambda must be positive");
    require(A.rows() == A.cols() && A.rows() >= 2, ErrorCode::DimensionMismatch, "A must be square");
    require(b.size() == A.rows(), ErrorCode::DimensionMismatch, "b must match A");
    const auto n = A.rows();
    // orthogonality is checked with a size-aware slack on top of `tol`
    const double slack = tol * static_cast<double>(n);
    require((A.transpose() * A - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() <= slack, ErrorCode::BadParameters,
            "A is not orthogonal");
    require(std::abs(A.determinant() - 1.0) <= slack, ErrorCode::BadParameters,
            "det(A) must be +1 (orientation-reversing similarities are not supported)");
  }

  Vector apply(const Vector& x) const { return lambda * (A * x) + b; }
};

/// (second o first)(x) = second(first(x)).
inline SimilarityTransform compose(const SimilarityTransform& second, const SimilarityTransform& first) {
  require(second.dimension() == first.dimension(), ErrorCode::DimensionMismatch, "transform dimensions differ");
  return {second.lambda * first.lambda, second.A * first.A, second.lambda * (second.A * first.b) + second.b};
}

inline SimilarityTransform inverse(const SimilarityTransform& t) {
  const Matrix at = t.A.transpose();
  return {1.0 / t.lambda, at, -(at * t.b) / t.lambda};
}

/// Deterministic random direct similarity: Haar rotation (QR of a Gaussian
/// matrix, sign-corrected to det +1), lambda uniform in [lo, hi], b uniform
/// in [-10, 10]^n.
inline SimilarityTransform random_similarity(std::uint64_t seed, double lambda_lo, double lambda_hi, int dimension) {
  require(lambda_lo > 0.0 && lambda_lo <= lambda_hi, ErrorCode::BadRange, "need 0 < lo <= hi");
  require(dimension >= 2, ErrorCode::DimensionMismatch, "dimension must be at least 2");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  Matrix g(dimension, dimension);
  for (int i = 0; i < dimension; ++i)
    for (int j = 0; j < dimension; ++j) g(i, j) = gauss(rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR();
  for (int j = 0; j < dimension; ++j) {
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  }
  if (q.determinant() < 0.0) q.col(0) *= -1.0;

  SimilarityTransform t;
  t.A = q;
  t.lambda = lambda_lo + (lambda_hi - lambda_lo) * unit(rng);
  t.b.resize(dimension);
  for (int i = 0; i < dimension; ++i) t.b(i) = -10.0 + 20.0 * unit(rng);
  return t;
}

/// Pointwise image lambda*A*x + b. Parameters are unchanged; exact derivative
/// tables are carried along (they transform linearly).
inline SampledCurve apply_similarity(const SimilarityTransform& transform, const SampledCurve& curve) {
  require(transform.dimension() == curve.dimension, ErrorCode::DimensionMismatch,
          "transform and curve dimensions differ");
  transform.validate(1e-9);
  SampledCurve out;
  out.dimension = curve.dimension;
  out.t = curve.t;
  out.param_kind = transform.lambda == 1.0 ? curve.param_kind : ParamKind::Generic;
  out.sigma_index = curve.sigma_index;
  const Matrix la = transform.lambda * transform.A;
  out.points = (curve.points * la.transpose()).rowwise() + transform.b.transpose();
  for (const auto& d : curve.derivatives) out.derivatives.push_back(d * la.transpose());
  return out;
}

struct TransformReport {
  double lambda = 1.0;
  double length_ratio = 0.0;                 // total arc length of the image over that of the original
  std::vector<double> kappa_scaling_error;   // per j: max |lambda*kbar_j - k_j| / max |k_j|
  std::vector<double> kappa_ds_error;        // per j: max |k_j ds - kbar_j dsbar| over sample intervals
};

/// Compares the Frenet apparatus of `curve` and of its image under
/// `transform` at matched arc-length fractions.
inline TransformReport similarity_report(const SampledCurve& curve, const SimilarityTransform& transform) {
  const FrenetData f = frenet_apparatus(curve);
  const FrenetData g = frenet_apparatus(apply_similarity(transform, curve));
  const int n = curve.dimension;

  TransformReport rep;
  rep.lambda = transform.lambda;
  rep.length_ratio = g.total_length / f.total_length;

  const double f_len = f.s.back();
  const double g_len = g.s.back();
  for (int j = 1; j < n; ++j) {
    const std::vector<double> kf = f.kappa_column(j);
    const std::vector<double> kg = g.kappa_column(j);
    const double scale = std::max(sup_norm(kf), 1e-300);
    double worst = 0.0;
    double worst_ds = 0.0;
    double prev_g = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) {
      const double frac = f.s[k] / f_len;
      const double sg = frac * g_len;
      const double kbar = interpolate(g.s, kg, sg);
      worst = std::max(worst, std::abs(transform.lambda * kbar - kf[k]) / scale);
      if (k > 0) {
        // kappa ds over the interval [s_{k-1}, s_k] against its image
        const double ds = f.s[k] - f.s[k - 1];
        const double dsg = sg - prev_g;
        const double lhs = 0.5 * (kf[k] + kf[k - 1]) * ds;
        const double rhs = 0.5 * (kbar + interpolate(g.s, kg, prev_g)) * dsg;
        worst_ds = std::max(worst_ds, std::abs(lhs - rhs));
      }
      prev_g = sg;
    }
    rep.kappa_scaling_error.push_back(worst);
    rep.kappa_ds_error.push_back(worst_ds);
  }
  return rep;
}

}  // namespace frenetsim
