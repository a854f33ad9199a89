#pragma once

// Shape curvatures along sigma_i and signature-based direct-similarity tests.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "frenetsim/curve_model.hpp"
#include "frenetsim/error.hpp"
#include "frenetsim/indicatrix.hpp"
#include "frenetsim/numerics.hpp"
#include "frenetsim/signature.hpp"

namespace frenetsim {

/// kt = -(dQ/dsigma_i)/Q and kt_j = kappa_j/Q with Q = sqrt(kappa_{i-1}^2 + kappa_i^2).
/// sigma_i is anchored at zero on the first retained sample.
inline ShapeSignature shape_curvatures(const FrenetData& frenet, int i) {
  const std::vector<double> q = indicatrix_speed(frenet, i);
  const int n = frenet.dimension;
  ShapeSignature sig;
  sig.dimension = n;
  sig.index = i;
  sig.s = frenet.s;
  sig.t = frenet.t;
  sig.sigma = cumulative_integral(frenet.s, q);
  const std::vector<double> dq = differentiate_adaptive(sig.sigma, q);
  sig.kt.resize(q.size());
  sig.ktj.resize(static_cast<Eigen::Index>(q.size()), n - 1);
  for (std::size_t k = 0; k < q.size(); ++k) {
    sig.kt[k] = -dq[k] / q[k];
    for (int j = 1; j < n; ++j) sig.ktj(static_cast<Eigen::Index>(k), j - 1) = frenet.kappa(k, j) / q[k];
  }
  return sig;
}

inline ShapeSignature analyze(const SampledCurve& curve, int i) {
  check_index(curve.dimension, i);
  return shape_curvatures(frenet_apparatus(curve), i);
}

namespace detail {

inline void check_compatible(const ShapeSignature& a, const ShapeSignature& b) {
  if (a.dimension != b.dimension || a.index != b.index) {
    fail(ErrorCode::IncompatibleSignatures, "signatures differ in dimension or index (" + std::to_string(a.dimension) +
                                                "/" + std::to_string(a.index) + " vs " + std::to_string(b.dimension) +
                                                "/" + std::to_string(b.index) + ")");
  }
}

struct Overlap {
  double lo = 0.0;
  double hi = 0.0;
  bool valid = false;
};

inline Overlap overlap(const ShapeSignature& a, const ShapeSignature& b, double shift) {
  Overlap o;
  o.lo = std::max(a.sigma.front(), b.sigma.front() + shift);
  o.hi = std::min(a.sigma.back(), b.sigma.back() + shift);
  o.valid = o.hi - o.lo >= 0.1 * std::min(a.length(), b.length());
  return o;
}

inline double distance_on_tables(const ShapeSignature& a, const Matrix& ta, const ShapeSignature& b, const Matrix& tb,
                                 double shift) {
  const Overlap o = overlap(a, b, shift);
  if (!o.valid) return std::numeric_limits<double>::infinity();
  double acc = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double sg = a.sigma[k];
    if (sg < o.lo || sg > o.hi) continue;
    const Vector vb = interpolate_rows(b.sigma, tb, sg - shift);
    acc += (ta.row(static_cast<Eigen::Index>(k)).transpose() - vb).squaredNorm();
    ++count;
  }
  if (count == 0) return std::numeric_limits<double>::infinity();
  return std::sqrt(acc / static_cast<double>(count));
}

}  // namespace detail

/// RMS distance between the (kt, kt_1..kt_{n-1}) tuples of `a` and of `b`
/// shifted by `shift` along sigma, over their overlap. +inf when the overlap
/// is shorter than 10% of the shorter signature.
inline double signature_distance(const ShapeSignature& a, const ShapeSignature& b, double shift) {
  detail::check_compatible(a, b);
  return detail::distance_on_tables(a, a.table(), b, b.table(), shift);
}

/// Largest tuple deviation of `b` from `a` at a's samples (no shift).
inline double signature_deviation(const ShapeSignature& a, const ShapeSignature& b) {
  detail::check_compatible(a, b);
  const Matrix ta = a.table();
  const Matrix tb = b.table();
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double sg = a.sigma[k];
    if (sg < b.sigma.front() || sg > b.sigma.back()) continue;
    const Vector vb = interpolate_rows(b.sigma, tb, sg);
    worst = std::max(worst, (ta.row(static_cast<Eigen::Index>(k)).transpose() - vb).cwiseAbs().maxCoeff());
  }
  return worst;
}

struct MatchResult {
  bool is_similar = false;
  double distance = std::numeric_limits<double>::infinity();
  double lambda_est = 0.0;
  double sigma_shift = 0.0;
};

inline constexpr double kDefaultMatchTolerance = 1e-2;

/// Best sigma shift aligning b to a: coarse grid then golden-section refinement.
inline MatchResult match_signatures(const ShapeSignature& a, const ShapeSignature& b, double tol = kDefaultMatchTolerance) {
  detail::check_compatible(a, b);
  require(tol > 0.0, ErrorCode::BadRange, "tolerance must be positive");
  const Matrix ta = a.table();
  const Matrix tb = b.table();
  auto dist = [&](double shift) { return detail::distance_on_tables(a, ta, b, tb, shift); };

  const double min_len = std::min(a.length(), b.length());
  const double lo = a.sigma.front() - b.sigma.back() + 0.1 * min_len;
  const double hi = a.sigma.back() - b.sigma.front() - 0.1 * min_len;
  const double step = std::max(min_len / 400.0, 1e-12);
  const std::size_t count = std::clamp<std::size_t>(static_cast<std::size_t>((hi - lo) / step) + 1, 3, 4000);
  std::vector<double> grid = linspace(lo, hi, count);
  grid.push_back(0.0);
  std::sort(grid.begin(), grid.end());

  // near-ties resolve towards the larger overlap
  auto overlap_len = [&](double shift) {
    const auto o = detail::overlap(a, b, shift);
    return o.hi - o.lo;
  };
  std::size_t best = 0;
  bool found = false;
  std::vector<double> values(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    values[k] = dist(grid[k]);
    if (!std::isfinite(values[k])) continue;
    if (!found) {
      best = k;
      found = true;
      continue;
    }
    const double tie = 1e-9 * std::max(1.0, values[best]);
    if (values[k] < values[best] - tie ||
        (values[k] <= values[best] + tie && overlap_len(grid[k]) > overlap_len(grid[best]))) {
      best = k;
    }
  }

  MatchResult res;
  double shift = grid[best];
  double d = values[best];
  if (std::isfinite(d) && d > 0.0) {
    double x0 = grid[best > 0 ? best - 1 : 0];
    double x3 = grid[std::min(best + 1, grid.size() - 1)];
    constexpr double inv_phi = 0.6180339887498949;
    double x1 = x3 - inv_phi * (x3 - x0);
    double x2 = x0 + inv_phi * (x3 - x0);
    double f1 = dist(x1);
    double f2 = dist(x2);
    for (int it = 0; it < 60 && x3 - x0 > 1e-10 * std::max(1.0, std::abs(x0)); ++it) {
      if (f1 < f2) {
        x3 = x2;
        x2 = x1;
        f2 = f1;
        x1 = x3 - inv_phi * (x3 - x0);
        f1 = dist(x1);
      } else {
        x0 = x1;
        x1 = x2;
        f1 = f2;
        x2 = x0 + inv_phi * (x3 - x0);
        f2 = dist(x2);
      }
    }
    const double xm = f1 < f2 ? x1 : x2;
    const double fm = std::min(f1, f2);
    if (fm < d) {
      shift = xm;
      d = fm;
    }
  }
  res.distance = d;
  res.sigma_shift = shift;
  res.is_similar = std::isfinite(d) && d <= tol;
  if (std::isfinite(d)) {
    const auto o = detail::overlap(a, b, shift);
    const double len_a = interpolate(a.sigma, a.s, o.hi) - interpolate(a.sigma, a.s, o.lo);
    const double len_b = interpolate(b.sigma, b.s, o.hi - shift) - interpolate(b.sigma, b.s, o.lo - shift);
    res.lambda_est = len_b / len_a;
  }
  return res;
}

/// Decides whether two sampled curves are directly similar by comparing
/// their shape signatures along sigma_i.
inline MatchResult similarity_test(const SampledCurve& a, const SampledCurve& b, int i,
                                   double tol = kDefaultMatchTolerance) {
  require(a.dimension == b.dimension, ErrorCode::DimensionMismatch, "curves live in different dimensions");
  return match_signatures(analyze(a, i), analyze(b, i), tol);
}

}  // namespace frenetsim
