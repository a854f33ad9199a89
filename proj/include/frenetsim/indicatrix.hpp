#pragma once

// Spherical V_i-indicatrices, their arc length sigma_i, the scaled structure
// matrix along sigma_i, and geodesic curvature of indicatrices in E^3.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "frenetsim/curve_model.hpp"
#include "frenetsim/error.hpp"
#include "frenetsim/numerics.hpp"
#include "frenetsim/signature.hpp"
#include "frenetsim/similarity.hpp"

namespace frenetsim {

/// Curve on S^{n-1} traced by V_i, sampled against its arc length sigma.
struct SphericalCurve {
  int dimension = 0;
  int source_index = 0;
  std::vector<double> sigma;
  Matrix gamma;  // rows are unit vectors
  std::vector<double> s;

  std::size_t size() const { return sigma.size(); }
};

struct SabbanData {
  Matrix gamma;
  Matrix tangent;
  Matrix rho;
  std::vector<double> kappa_g;
};

inline void check_index(int dimension, int i) {
  require(i >= 1 && i <= dimension, ErrorCode::BadIndex,
          "indicatrix index " + std::to_string(i) + " outside 1.." + std::to_string(dimension));
}

/// sqrt(kappa_{i-1}^2 + kappa_i^2) per sample (the speed of the V_i-indicatrix
/// in arc length). Throws IndicatrixDegenerate where it vanishes.
inline std::vector<double> indicatrix_speed(const FrenetData& frenet, int i) {
  check_index(frenet.dimension, i);
  std::vector<double> q(frenet.size());
  for (std::size_t k = 0; k < q.size(); ++k) q[k] = std::hypot(frenet.kappa(k, i - 1), frenet.kappa(k, i));
  // dimensionless threshold: speed times the analysed length
  const double length = std::max(frenet.s.back(), 1e-300);
  for (std::size_t k = 0; k < q.size(); ++k) {
    if (!(q[k] * length > 1e-8)) {
      fail(ErrorCode::IndicatrixDegenerate, "V_" + std::to_string(i) + "-indicatrix has zero speed at s = " +
                                                std::to_string(frenet.s[k]) + " (kappa_" + std::to_string(i - 1) +
                                                " and kappa_" + std::to_string(i) + " both vanish)");
    }
  }
  return q;
}

inline SphericalCurve indicatrix_curve(const FrenetData& frenet, int i) {
  const std::vector<double> q = indicatrix_speed(frenet, i);
  SphericalCurve sc;
  sc.dimension = frenet.dimension;
  sc.source_index = i;
  sc.s = frenet.s;
  sc.sigma = cumulative_integral(frenet.s, q);
  sc.gamma.resize(static_cast<Eigen::Index>(frenet.size()), frenet.dimension);
  for (std::size_t k = 0; k < frenet.size(); ++k) sc.gamma.row(static_cast<Eigen::Index>(k)) = frenet.frames[k].row(i - 1);
  return sc;
}

/// max_k |sigma_i(s_k) - sigmabar_i(lambda s_k)| between a curve and its image.
inline double sigma_invariance_check(const SampledCurve& curve, const SimilarityTransform& transform, int i) {
  const FrenetData f = frenet_apparatus(curve);
  const FrenetData g = frenet_apparatus(apply_similarity(transform, curve));
  const SphericalCurve a = indicatrix_curve(f, i);
  const SphericalCurve b = indicatrix_curve(g, i);
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double sbar = std::min(transform.lambda * a.s[k], b.s.back());
    worst = std::max(worst, std::abs(a.sigma[k] - interpolate(b.s, b.sigma, sbar)));
  }
  return worst;
}

/// Structure matrix of the scaled frame (V_1..V_n)/Q along sigma_i at one
/// sample: diagonal d/ds(1/Q), off-diagonals +-kappa_j/Q, where
/// Q = sqrt(kappa_{i-1}^2 + kappa_i^2).
inline Matrix structure_matrix(const FrenetData& frenet, int i, std::size_t sample) {
  require(sample < frenet.size(), ErrorCode::BadParameters, "sample index out of range");
  const std::vector<double> q = indicatrix_speed(frenet, i);
  std::vector<double> inv_q(q.size());
  std::transform(q.begin(), q.end(), inv_q.begin(), [](double v) { return 1.0 / v; });
  const std::vector<double> d_inv_q = differentiate_adaptive(frenet.s, inv_q);
  const int n = frenet.dimension;
  Matrix k = d_inv_q[sample] * Matrix::Identity(n, n);
  for (int j = 1; j < n; ++j) {
    const double v = frenet.kappa(sample, j) / q[sample];
    k(j - 1, j) = v;
    k(j, j - 1) = -v;
  }
  return k;
}

/// Sabban frame and geodesic curvature det(gamma, gamma', gamma'')/|gamma'|^3
/// of a spherical curve in E^3, differentiating along its sigma samples.
inline SabbanData sabban_geodesic_curvature(const SphericalCurve& sc) {
  require(sc.dimension == 3, ErrorCode::NotThreeDimensional, "geodesic curvature is defined here for E^3 only");
  require(sc.size() >= 9, ErrorCode::TooFewSamples, "need at least 9 samples on the sphere");
  require_increasing(sc.sigma, "sigma");
  const Matrix d1 = differentiate_adaptive(sc.sigma, sc.gamma, 1);
  const Matrix d2 = differentiate_adaptive(sc.sigma, sc.gamma, 2);

  SabbanData out;
  const auto n = static_cast<Eigen::Index>(sc.size());
  out.gamma = sc.gamma;
  out.tangent.resize(n, 3);
  out.rho.resize(n, 3);
  out.kappa_g.resize(sc.size());
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Vector3d g = sc.gamma.row(k).transpose();
    const Eigen::Vector3d v = d1.row(k).transpose();
    const Eigen::Vector3d a = d2.row(k).transpose();
    const double speed = v.norm();
    if (!(speed > 1e-8)) fail(ErrorCode::DegenerateSpeed, "spherical curve stalls at sigma = " + std::to_string(sc.sigma[static_cast<std::size_t>(k)]));
    const Eigen::Vector3d t = v / speed;
    out.tangent.row(k) = t.transpose();
    out.rho.row(k) = g.cross(t).transpose();
    out.kappa_g[static_cast<std::size_t>(k)] = g.dot(v.cross(a)) / (speed * speed * speed);
  }
  return out;
}

enum class IndicatrixKind { Tangent = 1, Normal = 2, Binormal = 3 };

/// Geodesic curvature of the tangent, normal or binormal indicatrix from the
/// shape curvatures of the matching index (1, 2 or 3):
///   tangent  kt2/kt1,  normal  kt1^2 d/dsigma_2 (kt2/kt1),  binormal  kt1/kt2.
inline std::vector<double> geodesic_closed_form(const ShapeSignature& sig, IndicatrixKind which) {
  require(sig.dimension == 3, ErrorCode::NotThreeDimensional, "geodesic curvature is defined here for E^3 only");
  const int expected = static_cast<int>(which);
  require(sig.index == expected, ErrorCode::BadIndex,
          "closed form needs the signature along sigma_" + std::to_string(expected));
  const std::vector<double> k1 = sig.ktj_column(1);
  const std::vector<double> k2 = sig.ktj_column(2);
  const std::vector<double>& den = which == IndicatrixKind::Binormal ? k2 : k1;
  for (double v : den) {
    if (!(std::abs(v) > 1e-12)) fail(ErrorCode::DivisionDegenerate, "shape curvature in the denominator vanishes");
  }
  std::vector<double> out(sig.size());
  switch (which) {
    case IndicatrixKind::Tangent:
      for (std::size_t k = 0; k < out.size(); ++k) out[k] = k2[k] / k1[k];
      break;
    case IndicatrixKind::Binormal:
      for (std::size_t k = 0; k < out.size(); ++k) out[k] = k1[k] / k2[k];
      break;
    case IndicatrixKind::Normal: {
      std::vector<double> ratio(out.size());
      for (std::size_t k = 0; k < out.size(); ++k) ratio[k] = k2[k] / k1[k];
      const std::vector<double> d = differentiate_adaptive(sig.sigma, ratio);
      for (std::size_t k = 0; k < out.size(); ++k) out[k] = k1[k] * k1[k] * d[k];
      break;
    }
  }
  return out;
}

}  // namespace frenetsim
