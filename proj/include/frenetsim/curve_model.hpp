#pragma once

// Sampled and analytic curves in E^n, arc-length reparameterization and the
// numerical Frenet apparatus.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "frenetsim/error.hpp"
#include "frenetsim/numerics.hpp"

namespace frenetsim {

enum class ParamKind { Generic, UnitSpeed, Sigma };

/// Ordered samples (t_k, x_k) of a curve in E^n. Rows of `points` are samples.
///
/// `derivatives` optionally carries exact parameter derivatives (entry k-1
/// holds d^k x / dt^k, one row per sample); analytic fixtures fill it so the
/// Frenet analysis can skip numerical differentiation.
struct SampledCurve {
  int dimension = 0;
  std::vector<double> t;
  Matrix points;
  ParamKind param_kind = ParamKind::Generic;
  int sigma_index = 0;  // meaningful when param_kind == Sigma
  std::vector<Matrix> derivatives;

  std::size_t size() const { return t.size(); }
  Vector point(std::size_t k) const { return points.row(static_cast<Eigen::Index>(k)).transpose(); }
  int exact_derivative_order() const { return static_cast<int>(derivatives.size()); }

  void validate() const {
    require(dimension >= 2, ErrorCode::DimensionMismatch, "curve dimension must be at least 2");
    require(points.cols() == dimension, ErrorCode::DimensionMismatch, "points must have `dimension` coordinates");
    require(static_cast<std::size_t>(points.rows()) == t.size(), ErrorCode::DimensionMismatch,
            "parameter and point counts differ");
    require(t.size() >= 2, ErrorCode::TooFewSamples, "a curve needs at least two samples");
    require_increasing(t, "curve parameter");
    require(points.allFinite(), ErrorCode::BadParameters, "non-finite coordinate");
    for (const auto& d : derivatives) {
      require(d.rows() == points.rows() && d.cols() == points.cols(), ErrorCode::DimensionMismatch,
              "derivative table shape mismatch");
    }
  }
};

inline SampledCurve make_curve(std::vector<double> t, Matrix points, ParamKind kind = ParamKind::Generic) {
  SampledCurve c;
  c.dimension = static_cast<int>(points.cols());
  c.t = std::move(t);
  c.points = std::move(points);
  c.param_kind = kind;
  c.validate();
  return c;
}

/// Copy of `curve` without the exact derivative tables.
inline SampledCurve points_only(SampledCurve curve) {
  curve.derivatives.clear();
  return curve;
}

/// Reversed traversal, parameter mapped t -> -t.
inline SampledCurve reversed(const SampledCurve& curve) {
  SampledCurve r;
  r.dimension = curve.dimension;
  r.param_kind = curve.param_kind == ParamKind::UnitSpeed ? ParamKind::UnitSpeed : ParamKind::Generic;
  r.t.resize(curve.size());
  const auto n = static_cast<Eigen::Index>(curve.size());
  r.points = curve.points.colwise().reverse();
  for (Eigen::Index k = 0; k < n; ++k) r.t[static_cast<std::size_t>(k)] = -curve.t[static_cast<std::size_t>(n - 1 - k)];
  for (std::size_t order = 1; order <= curve.derivatives.size(); ++order) {
    const double sign = order % 2 == 0 ? 1.0 : -1.0;
    r.derivatives.push_back(sign * curve.derivatives[order - 1].colwise().reverse());
  }
  return r;
}

// ---------------------------------------------------------------------------
// Analytic fixtures

struct BuiltinCurve {
  enum class Kind { Circle, Helix, LogSpiral, Line, CustomPoly };

  Kind kind = Kind::Circle;
  int dimension = 2;
  double p1 = 1.0;  // circle: r, helix: a, log spiral: c
  double p2 = 0.0;  // helix: b
  Matrix coeffs;    // custom polynomial: row d holds the coefficients of t^0, t^1, ... for coordinate d

  static BuiltinCurve circle(double r, int dim = 2) { return {Kind::Circle, dim, r, 0.0, {}}; }
  static BuiltinCurve helix(double a, double b, int dim = 3) { return {Kind::Helix, dim, a, b, {}}; }
  static BuiltinCurve log_spiral(double c, int dim = 2) { return {Kind::LogSpiral, dim, c, 0.0, {}}; }
  static BuiltinCurve line(int dim = 3) { return {Kind::Line, dim, 0.0, 0.0, {}}; }
  static BuiltinCurve custom_poly(Matrix c) {
    const int dim = static_cast<int>(c.rows());
    return {Kind::CustomPoly, dim, 0.0, 0.0, std::move(c)};
  }

  void validate() const {
    switch (kind) {
      case Kind::Circle:
        require(dimension >= 2, ErrorCode::BadParameters, "circle needs dimension >= 2");
        require(p1 > 0.0, ErrorCode::BadParameters, "circle radius must be positive");
        break;
      case Kind::Helix:
        require(dimension >= 3, ErrorCode::BadParameters, "helix needs dimension >= 3");
        require(p1 > 0.0, ErrorCode::BadParameters, "helix radius a must be positive");
        require(p1 * p1 + p2 * p2 > 0.0, ErrorCode::BadParameters, "helix needs a^2 + b^2 > 0");
        break;
      case Kind::LogSpiral:
        require(dimension >= 2, ErrorCode::BadParameters, "log spiral needs dimension >= 2");
        require(std::isfinite(p1), ErrorCode::BadParameters, "log spiral rate must be finite");
        break;
      case Kind::Line:
        require(dimension >= 2, ErrorCode::BadParameters, "line needs dimension >= 2");
        break;
      case Kind::CustomPoly:
        require(coeffs.rows() >= 2 && coeffs.cols() >= 1, ErrorCode::BadParameters, "empty polynomial");
        require(coeffs.allFinite(), ErrorCode::BadParameters, "non-finite polynomial coefficient");
        break;
    }
  }

  /// d^order x / dt^order at t (order 0 is the position).
  Vector derivative(double t, int order) const {
    Vector x = Vector::Zero(dimension);
    const double phase = t + order * std::numbers::pi / 2.0;
    switch (kind) {
      case Kind::Circle:
        x(0) = p1 * std::cos(phase);
        x(1) = p1 * std::sin(phase);
        break;
      case Kind::Helix:
        x(0) = p1 * std::cos(phase);
        x(1) = p1 * std::sin(phase);
        x(2) = order == 0 ? p2 * t : (order == 1 ? p2 : 0.0);
        break;
      case Kind::LogSpiral: {
        const std::complex<double> mu(p1, 1.0);
        const std::complex<double> z = std::pow(mu, order) * std::exp(mu * t);
        x(0) = z.real();
        x(1) = z.imag();
        break;
      }
      case Kind::Line:
        x(0) = order == 0 ? t : (order == 1 ? 1.0 : 0.0);
        break;
      case Kind::CustomPoly:
        for (Eigen::Index d = 0; d < coeffs.rows(); ++d) {
          double acc = 0.0;
          for (Eigen::Index p = coeffs.cols() - 1; p >= order; --p) {
            double falling = 1.0;
            for (int q = 0; q < order; ++q) falling *= static_cast<double>(p - q);
            acc = acc * t + coeffs(d, p) * falling;
          }
          x(d) = acc;
        }
        break;
    }
    return x;
  }
};

/// Exact positions at `t_values`, with exact derivatives attached up to
/// `derivative_order` (defaults to the curve dimension).
inline SampledCurve builtin_evaluate(const BuiltinCurve& curve, const std::vector<double>& t_values,
                                     std::optional<int> derivative_order = std::nullopt) {
  curve.validate();
  require_increasing(t_values, "t_values");
  const int orders = derivative_order.value_or(curve.dimension);
  const auto n = static_cast<Eigen::Index>(t_values.size());
  SampledCurve out;
  out.dimension = curve.dimension;
  out.t = t_values;
  out.points.resize(n, curve.dimension);
  out.derivatives.assign(static_cast<std::size_t>(orders), Matrix(n, curve.dimension));
  for (Eigen::Index k = 0; k < n; ++k) {
    const double t = t_values[static_cast<std::size_t>(k)];
    out.points.row(k) = curve.derivative(t, 0).transpose();
    for (int o = 1; o <= orders; ++o) out.derivatives[static_cast<std::size_t>(o - 1)].row(k) = curve.derivative(t, o).transpose();
  }
  return out;
}

inline std::vector<double> linspace(double lo, double hi, std::size_t count) {
  std::vector<double> v(count);
  for (std::size_t k = 0; k < count; ++k) {
    v[k] = count == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count - 1);
  }
  if (count > 1) v.back() = hi;
  return v;
}

inline SampledCurve builtin_sample(const BuiltinCurve& curve, double t0, double t1, std::size_t count,
                                   std::optional<int> derivative_order = std::nullopt) {
  return builtin_evaluate(curve, linspace(t0, t1, count), derivative_order);
}

// ---------------------------------------------------------------------------
// Arc length

inline std::size_t min_frenet_samples(int dimension) { return 2 * static_cast<std::size_t>(dimension + 2); }

/// Half-width of the differentiation stencil used for an n-frame.
inline int frenet_stencil_half_width(int dimension) { return std::max(4, dimension / 2 + 3); }

/// First parameter derivative, exact if available.
inline Matrix first_derivative(const SampledCurve& curve) {
  if (curve.exact_derivative_order() >= 1) return curve.derivatives[0];
  return Differentiator(curve.t, 1, 4).apply(curve.points, 1);
}

/// Running arc length s(t_k) from the first sample.
inline std::vector<double> arc_length(const SampledCurve& curve) {
  const Matrix d1 = first_derivative(curve);
  std::vector<double> speed(curve.size());
  for (std::size_t k = 0; k < speed.size(); ++k) speed[k] = d1.row(static_cast<Eigen::Index>(k)).norm();
  return cumulative_integral(curve.t, speed);
}

inline double total_arc_length(const SampledCurve& curve) { return arc_length(curve).back(); }

namespace detail {

inline void check_regular(const std::vector<double>& speed, const std::vector<double>& t) {
  const double vmax = *std::max_element(speed.begin(), speed.end());
  require(vmax > 0.0, ErrorCode::ZeroSpeed, "curve has zero speed everywhere");
  for (std::size_t k = 0; k < speed.size(); ++k) {
    if (speed[k] <= 1e-10 * vmax) {
      fail(ErrorCode::ZeroSpeed, "speed vanishes near t = " + std::to_string(t[k]));
    }
  }
}

// 5-point Gauss-Legendre on [a, b].
template <typename F>
double gauss5(F&& f, double a, double b) {
  static constexpr std::array<double, 5> x{0.0, -0.5384693101056831, 0.5384693101056831, -0.9061798459386640,
                                           0.9061798459386640};
  static constexpr std::array<double, 5> w{0.5688888888888889, 0.4786286704993665, 0.4786286704993665,
                                           0.2369268850561891, 0.2369268850561891};
  const double h = 0.5 * (b - a);
  const double m = 0.5 * (a + b);
  double acc = 0.0;
  for (std::size_t k = 0; k < 5; ++k) acc += w[k] * f(m + h * x[k]);
  return h * acc;
}

}  // namespace detail

/// Resamples a sampled curve uniformly in arc length (t becomes s).
inline SampledCurve arclength_reparam(const SampledCurve& curve, std::size_t n_samples) {
  curve.validate();
  require(n_samples >= min_frenet_samples(curve.dimension), ErrorCode::TooFewSamples,
          "n_samples must be at least 2(n+2)");
  const Matrix d1 = first_derivative(curve);
  std::vector<double> speed(curve.size());
  for (std::size_t k = 0; k < speed.size(); ++k) speed[k] = d1.row(static_cast<Eigen::Index>(k)).norm();
  detail::check_regular(speed, curve.t);
  const std::vector<double> s = cumulative_integral(curve.t, speed);
  const std::vector<double> targets = linspace(0.0, s.back(), n_samples);
  Matrix pts(static_cast<Eigen::Index>(n_samples), curve.dimension);
  for (std::size_t k = 0; k < n_samples; ++k) {
    const double tk = interpolate(s, curve.t, targets[k]);
    pts.row(static_cast<Eigen::Index>(k)) = interpolate_rows(curve.t, curve.points, tk).transpose();
  }
  return make_curve(targets, std::move(pts), ParamKind::UnitSpeed);
}

/// Unit-speed samples of an analytic curve over [t0, t1]; positions are
/// evaluated exactly at the parameters that hit uniform arc length.
inline SampledCurve arclength_reparam(const BuiltinCurve& curve, double t0, double t1, std::size_t n_samples) {
  curve.validate();
  require(t1 > t0, ErrorCode::BadParameters, "empty parameter interval");
  require(n_samples >= min_frenet_samples(curve.dimension), ErrorCode::TooFewSamples,
          "n_samples must be at least 2(n+2)");
  auto speed = [&](double t) { return curve.derivative(t, 1).norm(); };
  const std::size_t panels = std::max<std::size_t>(256, 4 * n_samples);
  const std::vector<double> edges = linspace(t0, t1, panels + 1);
  std::vector<double> edge_speed(edges.size());
  for (std::size_t k = 0; k < edges.size(); ++k) edge_speed[k] = speed(edges[k]);
  detail::check_regular(edge_speed, edges);
  std::vector<double> cum(edges.size(), 0.0);
  for (std::size_t k = 0; k < panels; ++k) cum[k + 1] = cum[k] + detail::gauss5(speed, edges[k], edges[k + 1]);

  const std::vector<double> targets = linspace(0.0, cum.back(), n_samples);
  Matrix pts(static_cast<Eigen::Index>(n_samples), curve.dimension);
  std::size_t panel = 0;
  for (std::size_t k = 0; k < n_samples; ++k) {
    const double target = targets[k];
    while (panel + 1 < panels && cum[panel + 1] < target) ++panel;
    const double a = edges[panel];
    const double b = edges[panel + 1];
    double t = a + (b - a) * std::clamp((target - cum[panel]) / std::max(cum[panel + 1] - cum[panel], 1e-300), 0.0, 1.0);
    for (int it = 0; it < 50; ++it) {
      const double f = cum[panel] + detail::gauss5(speed, a, t) - target;
      const double step = f / speed(t);
      t = std::clamp(t - step, a, b);
      if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(t))) break;
    }
    if (k == 0) t = t0;
    if (k + 1 == n_samples) t = t1;
    pts.row(static_cast<Eigen::Index>(k)) = curve.derivative(t, 0).transpose();
  }
  return make_curve(targets, std::move(pts), ParamKind::UnitSpeed);
}

// ---------------------------------------------------------------------------
// Frenet apparatus

/// Frenet apparatus at the interior samples of a curve. Rows of each frame
/// are V_1..V_n; column j of `kappas` holds kappa_{j+1}.
struct FrenetData {
  int dimension = 0;
  std::vector<double> t;  // curve parameter at each retained sample
  std::vector<double> s;  // arc length, zero at the first retained sample
  Matrix points;
  std::vector<Matrix> frames;
  Matrix kappas;
  std::size_t first_sample = 0;  // index of the first retained sample in the source curve
  double total_length = 0.0;     // arc length of the whole source curve

  std::size_t size() const { return t.size(); }

  /// kappa_j at sample k with kappa_0 = kappa_n = 0.
  double kappa(std::size_t k, int j) const {
    if (j <= 0 || j >= dimension) return 0.0;
    return kappas(static_cast<Eigen::Index>(k), j - 1);
  }

  Vector frame_vector(std::size_t k, int i) const { return frames[k].row(i - 1).transpose(); }

  std::vector<double> kappa_column(int j) const {
    std::vector<double> v(size());
    for (std::size_t k = 0; k < size(); ++k) v[k] = kappa(k, j);
    return v;
  }
};

struct FrenetOptions {
  double pivot_tolerance = 1e-8;  // relative to the derivative magnitude
  int trim = 2;                   // samples dropped at each end (at least the stencil half-width)
  double roundoff_target = 1e-10;  // acceptable roundoff-to-signal ratio of numeric derivatives
};

namespace detail {

// Widens the stencil spacing (doubling the stride) until the roundoff bound
// eps * sum|w| * max|x| falls below `target` times the typical derivative size.
inline Differentiator choose_stencil(const SampledCurve& curve, int order, int half_width, double target,
                                     std::vector<Matrix>& derivs) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const double scale = curve.points.rowwise().norm().maxCoeff();
  const std::size_t count = curve.size();
  std::size_t stride = 1;
  for (;;) {
    Differentiator diff(curve.t, order, half_width, stride);
    Matrix d = diff.apply(curve.points, order);
    std::vector<double> ratio(count);
    for (std::size_t k = 0; k < count; ++k) {
      ratio[k] = eps * diff.abs_weight_sum(k, order) * scale / std::max(d.row(static_cast<Eigen::Index>(k)).norm(), 1e-300);
    }
    std::nth_element(ratio.begin(), ratio.begin() + static_cast<std::ptrdiff_t>(count / 2), ratio.end());
    const std::size_t next_span = 2 * stride * (diff.stencil_width() - 1);
    if (ratio[count / 2] <= target || 8 * next_span > count) {
      derivs.push_back(std::move(d));
      return diff;
    }
    stride *= 2;
  }
}

}  // namespace detail

inline FrenetData frenet_apparatus(const SampledCurve& curve, const FrenetOptions& options = {}) {
  curve.validate();
  const int n = curve.dimension;
  require(curve.size() >= min_frenet_samples(n), ErrorCode::TooFewSamples,
          "need at least 2(n+2) = " + std::to_string(min_frenet_samples(n)) + " samples");

  const bool exact = curve.exact_derivative_order() >= n;
  std::vector<Matrix> derivs;
  std::vector<Differentiator> diffs;  // one per derivative order on the numeric path
  int trim = std::max(options.trim, 0);
  if (exact) {
    derivs.assign(curve.derivatives.begin(), curve.derivatives.begin() + n);
  } else {
    const int hw = frenet_stencil_half_width(n);
    for (int o = 1; o <= n; ++o) diffs.push_back(detail::choose_stencil(curve, o, hw, options.roundoff_target, derivs));
    trim = std::max(trim, hw);
  }
  const auto count = static_cast<std::size_t>(curve.size());
  require(count > 2 * static_cast<std::size_t>(trim) + 1, ErrorCode::TooFewSamples, "too few samples after trimming");

  std::vector<double> speed(count);
  for (std::size_t k = 0; k < count; ++k) speed[k] = derivs[0].row(static_cast<Eigen::Index>(k)).norm();
  detail::check_regular(speed, curve.t);
  const std::vector<double> s_full = cumulative_integral(curve.t, speed);

  const std::size_t first = static_cast<std::size_t>(trim);
  const std::size_t last = count - static_cast<std::size_t>(trim);  // exclusive
  FrenetData out;
  out.dimension = n;
  out.first_sample = first;
  out.total_length = s_full.back();
  out.points = curve.points.middleRows(static_cast<Eigen::Index>(first), static_cast<Eigen::Index>(last - first));
  out.kappas.resize(static_cast<Eigen::Index>(last - first), n - 1);
  out.frames.reserve(last - first);

  constexpr double eps = std::numeric_limits<double>::epsilon();
  const double scale = curve.points.rowwise().norm().maxCoeff();
  Matrix d(n, n);
  for (std::size_t k = first; k < last; ++k) {
    const auto row = static_cast<Eigen::Index>(k);
    for (int o = 0; o < n; ++o) d.col(o) = derivs[static_cast<std::size_t>(o)].row(row).transpose();
    Eigen::HouseholderQR<Matrix> qr(d);
    Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    Matrix q = qr.householderQ();
    for (int o = 0; o + 1 < n; ++o) {
      if (r(o, o) < 0.0) {
        q.col(o) *= -1.0;
        r.row(o) *= -1.0;
      }
    }
    if (q.determinant() < 0.0) {
      q.col(n - 1) *= -1.0;
      r.row(n - 1) *= -1.0;
    }
    // pivots of d_1..d_{n-1}; a vanishing pivot means some kappa_j is zero
    for (int o = 1; o + 1 < n; ++o) {
      const double mag = d.col(o).norm();
      double floor = options.pivot_tolerance * mag;
      if (!diffs.empty()) {
        floor = std::max(floor, 100.0 * eps * diffs[static_cast<std::size_t>(o)].abs_weight_sum(k, o + 1) * scale);
      }
      if (!(r(o, o) > floor)) {
        fail(ErrorCode::FrameDegenerate, "Gram-Schmidt pivot " + std::to_string(o + 1) + " vanishes at t = " +
                                             std::to_string(curve.t[k]) + " (kappa_" + std::to_string(o) +
                                             " is effectively zero)");
      }
    }
    out.frames.push_back(q.transpose());
    for (int j = 0; j + 1 < n; ++j) {
      out.kappas(static_cast<Eigen::Index>(k - first), j) = r(j + 1, j + 1) / (r(j, j) * r(0, 0));
    }
    out.t.push_back(curve.t[k]);
    out.s.push_back(s_full[k] - s_full[first]);
  }
  return out;
}

}  // namespace frenetsim
