#pragma once

// Local polynomial differentiation, integration and interpolation on
// (possibly nonuniform) one-dimensional grids.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "frenetsim/error.hpp"

namespace frenetsim {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Finite-difference weights for derivatives 0..max_order at `z` using the
/// nodes `x` (Fornberg's recursion). Result is x.size() x (max_order + 1);
/// column k holds the weights of the k-th derivative.
inline Matrix fornberg_weights(double z, std::span<const double> x, int max_order) {
  const auto n = static_cast<Eigen::Index>(x.size());
  Matrix c = Matrix::Zero(n, max_order + 1);
  double c1 = 1.0;
  double c4 = x[0] - z;
  c(0, 0) = 1.0;
  for (Eigen::Index i = 1; i < n; ++i) {
    const int mn = static_cast<int>(std::min<Eigen::Index>(i, max_order));
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i] - z;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) {
          c(i, k) = c1 * (k * c(i - 1, k - 1) - c5 * c(i - 1, k)) / c2;
        }
        c(i, 0) = -c1 * c5 * c(i - 1, 0) / c2;
      }
      for (int k = mn; k >= 1; --k) {
        c(j, k) = (c4 * c(j, k) - k * c(j, k - 1)) / c3;
      }
      c(j, 0) = c4 * c(j, 0) / c3;
    }
    c1 = c2;
  }
  return c;
}

inline void require_increasing(std::span<const double> x, const std::string& what) {
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (!(x[i] > x[i - 1])) fail(ErrorCode::BadParameters, what + " must be strictly increasing");
  }
}

/// Precomputed local stencils for derivatives up to `max_order` on a grid.
/// Every node uses 2*half_width+1 nodes taken every `stride` samples; centred
/// in the interior, shifted at the two ends. A stride above one trades
/// truncation error for less roundoff in high-order derivatives.
class Differentiator {
 public:
  Differentiator(std::vector<double> grid, int max_order, int half_width, std::size_t stride = 1)
      : grid_(std::move(grid)),
        max_order_(max_order),
        width_(2 * static_cast<std::size_t>(half_width) + 1),
        stride_(stride) {
    require(max_order >= 1 && half_width >= 1 && stride >= 1, ErrorCode::BadParameters, "bad stencil configuration");
    require(static_cast<int>(width_) > max_order, ErrorCode::BadParameters, "stencil too narrow for derivative order");
    const std::size_t span = (width_ - 1) * stride_;
    require(grid_.size() > span, ErrorCode::TooFewSamples,
            "need more than " + std::to_string(span) + " samples, got " + std::to_string(grid_.size()));
    require_increasing(grid_, "grid");
    const std::size_t n = grid_.size();
    const std::size_t reach = static_cast<std::size_t>(half_width) * stride_;
    starts_.resize(n);
    weights_.resize(n);
    std::vector<double> nodes(width_);
    for (std::size_t i = 0; i < n; ++i) {
      starts_[i] = std::min(i > reach ? i - reach : 0, n - 1 - span);
      for (std::size_t k = 0; k < width_; ++k) nodes[k] = grid_[starts_[i] + k * stride_];
      weights_[i] = fornberg_weights(grid_[i], nodes, max_order);
    }
  }

  std::size_t size() const { return grid_.size(); }
  const std::vector<double>& grid() const { return grid_; }
  int max_order() const { return max_order_; }
  std::size_t stencil_width() const { return width_; }
  std::size_t stride() const { return stride_; }

  std::vector<double> apply(std::span<const double> values, int order) const {
    check(values.size(), order);
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
      double acc = 0.0;
      for (std::size_t k = 0; k < width_; ++k) {
        acc += weights_[i](static_cast<Eigen::Index>(k), order) * values[starts_[i] + k * stride_];
      }
      out[i] = acc;
    }
    return out;
  }

  /// Rows of `values` are samples; returns the row-wise derivative.
  Matrix apply(const Matrix& values, int order) const {
    check(static_cast<std::size_t>(values.rows()), order);
    Matrix out = Matrix::Zero(values.rows(), values.cols());
    for (std::size_t i = 0; i < size(); ++i) {
      const auto row = static_cast<Eigen::Index>(i);
      for (std::size_t k = 0; k < width_; ++k) {
        out.row(row) += weights_[i](static_cast<Eigen::Index>(k), order) *
                        values.row(static_cast<Eigen::Index>(starts_[i] + k * stride_));
      }
    }
    return out;
  }

  /// Sum of |weights| of the stencil used at node i; bounds roundoff amplification.
  double abs_weight_sum(std::size_t i, int order) const { return weights_[i].col(order).cwiseAbs().sum(); }

  std::size_t start(std::size_t i) const { return starts_[i]; }

 private:
  void check(std::size_t n, int order) const {
    require(n == size(), ErrorCode::DimensionMismatch, "value count does not match grid");
    require(order >= 0 && order <= max_order_, ErrorCode::BadParameters, "derivative order out of range");
  }

  std::vector<double> grid_;
  int max_order_;
  std::size_t width_;
  std::size_t stride_;
  std::vector<std::size_t> starts_;
  std::vector<Matrix> weights_;
};

/// Derivative of `values` with respect to `grid` using local stencils.
inline std::vector<double> differentiate(const std::vector<double>& grid, std::span<const double> values,
                                         int order = 1, int half_width = 4) {
  return Differentiator(grid, order, half_width).apply(values, order);
}

/// Derivative of a computed, slightly noisy quantity (rows of `values` are
/// samples). Strides 1, 2, 4, ... are tried while the stencil spans at most an
/// eighth of the grid; the stride whose result agrees best (median row gap)
/// with the next one is kept.
inline Matrix differentiate_adaptive(const std::vector<double>& grid, const Matrix& values, int order = 1,
                                     int half_width = 4) {
  const std::size_t n = grid.size();
  const auto span = [&](std::size_t stride) { return 2 * static_cast<std::size_t>(half_width) * stride; };
  Matrix best = Differentiator(grid, order, half_width).apply(values, order);
  if (8 * span(2) > n) return best;
  Matrix current = best;
  double best_gap = std::numeric_limits<double>::infinity();
  std::vector<double> gap(n);
  for (std::size_t stride = 2; 8 * span(stride) <= n; stride *= 2) {
    Matrix next = Differentiator(grid, order, half_width, stride).apply(values, order);
    for (std::size_t k = 0; k < n; ++k) gap[k] = (next.row(static_cast<Eigen::Index>(k)) - current.row(static_cast<Eigen::Index>(k))).norm();
    std::nth_element(gap.begin(), gap.begin() + static_cast<std::ptrdiff_t>(n / 2), gap.end());
    if (gap[n / 2] < best_gap) {
      best_gap = gap[n / 2];
      best = current;
    }
    current = std::move(next);
  }
  return best;
}

inline std::vector<double> differentiate_adaptive(const std::vector<double>& grid, std::span<const double> values,
                                                  int half_width = 4) {
  const Matrix m = differentiate_adaptive(grid, Matrix(Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()))), 1, half_width);
  return {m.data(), m.data() + m.rows()};
}

/// Running integral of y dx from x[0], using a local degree-5 interpolant on
/// each interval and 3-point Gauss-Legendre quadrature.
inline std::vector<double> cumulative_integral(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size(), ErrorCode::DimensionMismatch, "integrand size mismatch");
  const std::size_t n = x.size();
  std::vector<double> out(n, 0.0);
  if (n < 2) return out;
  const std::size_t width = std::min<std::size_t>(6, n);
  static constexpr std::array<double, 3> gauss_node{-0.7745966692414834, 0.0, 0.7745966692414834};
  static constexpr std::array<double, 3> gauss_weight{5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  for (std::size_t k = 0; k + 1 < n; ++k) {
    // window covering [x_k, x_{k+1}] with the interval as central as possible
    const std::size_t lo = std::min(k > (width - 2) / 2 ? k - (width - 2) / 2 : 0, n - width);
    const auto xs = x.subspan(lo, width);
    const double half = 0.5 * (x[k + 1] - x[k]);
    const double mid = 0.5 * (x[k + 1] + x[k]);
    double acc = 0.0;
    for (std::size_t g = 0; g < 3; ++g) {
      const Matrix w = fornberg_weights(mid + half * gauss_node[g], xs, 0);
      double val = 0.0;
      for (std::size_t j = 0; j < width; ++j) val += w(static_cast<Eigen::Index>(j), 0) * y[lo + j];
      acc += gauss_weight[g] * val;
    }
    out[k + 1] = out[k] + half * acc;
  }
  return out;
}

/// Local Lagrange interpolation weights (nodes start at the returned index).
inline std::pair<std::size_t, Matrix> interpolation_weights(std::span<const double> x, double xq,
                                                            std::size_t points = 6) {
  const std::size_t n = x.size();
  const std::size_t width = std::min(points, n);
  const auto it = std::upper_bound(x.begin(), x.end(), xq);
  std::size_t right = static_cast<std::size_t>(it - x.begin());
  if (right == 0) right = 1;
  if (right >= n) right = n - 1;
  const std::size_t left = right - 1;
  const std::size_t lo = std::min(left > (width - 2) / 2 ? left - (width - 2) / 2 : 0, n - width);
  return {lo, fornberg_weights(xq, x.subspan(lo, width), 0)};
}

inline double interpolate(std::span<const double> x, std::span<const double> y, double xq, std::size_t points = 6) {
  const auto [lo, w] = interpolation_weights(x, xq, points);
  double val = 0.0;
  for (Eigen::Index j = 0; j < w.rows(); ++j) val += w(j, 0) * y[lo + static_cast<std::size_t>(j)];
  return val;
}

/// Rows of `y` are samples.
inline Vector interpolate_rows(std::span<const double> x, const Matrix& y, double xq, std::size_t points = 6) {
  const auto [lo, w] = interpolation_weights(x, xq, points);
  return (w.col(0).transpose() * y.middleRows(static_cast<Eigen::Index>(lo), w.rows())).transpose();
}

inline double sup_norm(std::span<const double> v) {
  double m = 0.0;
  for (double e : v) m = std::max(m, std::abs(e));
  return m;
}

}  // namespace frenetsim
