#pragma once

// Self-similar curves (constant shape curvatures), the frame-ODE oracle that
// realizes them independently, focal curvatures and E^3 evolutes.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/numeric/odeint.hpp>

#include "frenetsim/curve_model.hpp"
#include "frenetsim/error.hpp"
#include "frenetsim/indicatrix.hpp"
#include "frenetsim/numerics.hpp"
#include "frenetsim/shape_invariants.hpp"
#include "frenetsim/signature.hpp"

namespace frenetsim {

// ---------------------------------------------------------------------------
// Self-similar curves

struct SelfSimilarSpec {
  int dimension = 3;
  int index = 1;
  double kt = 0.0;
  std::vector<double> ktj;  // kt_1 .. kt_{n-1}
  double sigma_lo = 0.0;
  double sigma_hi = 10.0;
  std::size_t samples = 2000;

  /// Checks the Frenet assumption and the unit-circle constraint that the
  /// definition of the shape curvatures forces on kt_{i-1}, kt_i.
  void validate() const {
    require(dimension >= 2, ErrorCode::BadParameters, "dimension must be at least 2");
    require(index >= 1 && index <= dimension, ErrorCode::BadIndex,
            "index " + std::to_string(index) + " outside 1.." + std::to_string(dimension));
    require(static_cast<int>(ktj.size()) == dimension - 1, ErrorCode::BadParameters,
            "expected " + std::to_string(dimension - 1) + " values of kt_j, got " + std::to_string(ktj.size()));
    require(std::isfinite(kt), ErrorCode::BadParameters, "kt must be finite");
    for (int j = 1; j <= dimension - 2; ++j) {
      require(std::isfinite(kt_j(j)) && kt_j(j) != 0.0, ErrorCode::BadParameters,
              "kt_" + std::to_string(j) + " must be nonzero (Frenet curve)");
    }
    require(std::isfinite(kt_j(dimension - 1)), ErrorCode::BadParameters, "kt_j must be finite");
    const double norm2 = kt_j(index - 1) * kt_j(index - 1) + kt_j(index) * kt_j(index);
    require(std::abs(norm2 - 1.0) <= 1e-9, ErrorCode::BadParameters,
            "constraint kt_" + std::to_string(index - 1) + "^2 + kt_" + std::to_string(index) +
                "^2 = 1 violated (got " + std::to_string(norm2) + ")");
    if (index == 1) {
      require(std::abs(kt_j(1) - 1.0) <= 1e-9, ErrorCode::BadParameters, "constraint kt_1 = 1 violated for index 1");
    }
    require(sigma_hi > sigma_lo, ErrorCode::BadRange, "sigma_range must be increasing");
    require(samples >= min_frenet_samples(dimension), ErrorCode::TooFewSamples, "too few samples");
  }

  /// kt_j with kt_0 = kt_n = 0.
  double kt_j(int j) const {
    if (j <= 0 || j >= dimension) return 0.0;
    return ktj[static_cast<std::size_t>(j - 1)];
  }

  /// Constant skew structure matrix of the frame along sigma_i.
  Matrix structure() const {
    Matrix k = Matrix::Zero(dimension, dimension);
    for (int j = 1; j < dimension; ++j) {
      k(j - 1, j) = kt_j(j);
      k(j, j - 1) = -kt_j(j);
    }
    return k;
  }
};

/// Closed-form data of a self-similar curve.
///
/// In a suitably rotated frame the unit tangent is
///   V_1(sigma) = (a_1 cos w_1 sigma, a_1 sin w_1 sigma, ..., a_m cos w_m sigma, a_m sin w_m sigma [, r])
/// where w_j = `frequencies[j]` are +-lambda_j. lambda_j^2 are the (double)
/// eigenvalues of -K^2; `axial` is the constant component r present for odd n.
struct SelfSimilarSolution {
  int dimension = 0;
  int m = 0;
  double kt = 0.0;
  std::vector<double> lambdas;      // ascending, positive
  std::vector<double> frequencies;  // signed: orientation of each rotation plane
  std::vector<double> amps;         // a_1..a_m
  double axial = 0.0;               // r, odd n only
  std::vector<double> b;            // sqrt(kt^2 + lambda_j^2)
  std::vector<double> theta_offsets;
  std::vector<double> constraint_residuals;  // |<V_k, V_k> - 1| for k = 1..n
  double projection_mismatch = 0.0;          // linear-system amplitudes vs direct eigen-projection

  bool odd() const { return dimension % 2 == 1; }

  /// Amplitude of the last coordinate a_{m+1} e^{kt sigma} (odd n), i.e. r/kt.
  /// NaN when kt = 0, where that coordinate degenerates to r*sigma.
  double axial_amplitude() const {
    return kt != 0.0 ? axial / kt : std::numeric_limits<double>::quiet_NaN();
  }
};

namespace detail {

// |P_k(x)|^2 at x = i*lambda for k = 1..count, where V_k = P_k(d/dsigma) V_1.
inline std::vector<double> frame_gains(const SelfSimilarSpec& spec, double lambda, int count) {
  using C = std::complex<double>;
  const C x(0.0, lambda);
  std::vector<C> p;
  p.reserve(static_cast<std::size_t>(count));
  p.push_back(1.0);
  if (count >= 2) p.push_back(x / spec.kt_j(1));
  for (int k = 2; k < count; ++k) {
    const C next = (x * p[static_cast<std::size_t>(k - 1)] + spec.kt_j(k - 1) * p[static_cast<std::size_t>(k - 2)]) / spec.kt_j(k);
    p.push_back(next);
  }
  std::vector<double> g(p.size());
  for (std::size_t k = 0; k < p.size(); ++k) g[k] = std::norm(p[k]);
  return g;
}

}  // namespace detail

inline SelfSimilarSolution solve_self_similar(const SelfSimilarSpec& spec) {
  spec.validate();
  const int n = spec.dimension;
  const bool odd = n % 2 == 1;
  const int m = n / 2;
  const Matrix k = spec.structure();
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(k.transpose() * k);
  const Vector mu = eig.eigenvalues();  // lambda^2, each twice (plus a single 0 for odd n)
  const Matrix vecs = eig.eigenvectors();
  const double scale = std::max(1.0, mu.maxCoeff());
  const double tol = 1e-8 * scale;

  const int offset = odd ? 1 : 0;
  if (odd && std::abs(mu(0)) > tol) fail(ErrorCode::NoRealSolution, "structure matrix has no null direction");
  std::vector<double> lambdas;
  for (int j = 0; j < m; ++j) {
    const double a = mu(offset + 2 * j);
    const double b = mu(offset + 2 * j + 1);
    if (std::abs(a - b) > tol) fail(ErrorCode::RepeatedEigenvalue, "eigenvalues of K^2 are not paired");
    const double l2 = 0.5 * (a + b);
    if (!(l2 > tol)) fail(ErrorCode::RepeatedEigenvalue, "zero frequency in the normal form");
    if (!lambdas.empty() && std::abs(l2 - lambdas.back() * lambdas.back()) <= tol) {
      fail(ErrorCode::RepeatedEigenvalue, "lambda_j are not distinct");
    }
    lambdas.push_back(std::sqrt(l2));
  }

  // invariant planes (u_j, w_j) of exp(-K sigma) with -K u = lambda w, -K w = -lambda u
  Matrix basis(n, n);
  std::vector<double> freq(lambdas);
  std::vector<double> proj_sq(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    const Vector u = vecs.col(offset + 2 * j);
    const Vector w = -(k * u) / lambdas[static_cast<std::size_t>(j)];
    basis.col(2 * j) = u;
    basis.col(2 * j + 1) = w;
    proj_sq[static_cast<std::size_t>(j)] = u(0) * u(0) + w(0) * w(0);
  }
  double axial = 0.0;
  if (odd) {
    basis.col(n - 1) = vecs.col(0);
    axial = vecs(0, 0);
  }
  if (basis.determinant() < 0.0) {
    if (odd) {
      axial = -axial;
    } else {
      freq[0] = -freq[0];
    }
  }

  // amplitudes from <V_k, V_k> = 1, linear in a_j^2 (and r^2 for odd n)
  const int unknowns = odd ? m + 1 : m;
  Matrix sys(unknowns, unknowns);
  for (int j = 0; j < m; ++j) {
    const auto g = detail::frame_gains(spec, lambdas[static_cast<std::size_t>(j)], unknowns);
    for (int row = 0; row < unknowns; ++row) sys(row, j) = g[static_cast<std::size_t>(row)];
  }
  if (odd) {
    const auto g = detail::frame_gains(spec, 0.0, unknowns);
    for (int row = 0; row < unknowns; ++row) sys(row, m) = g[static_cast<std::size_t>(row)];
  }
  const Vector sq = sys.colPivHouseholderQr().solve(Vector::Ones(unknowns));
  for (int j = 0; j < unknowns; ++j) {
    if (!(sq(j) > 0.0) || !std::isfinite(sq(j))) {
      fail(ErrorCode::NoRealSolution, "squared amplitude " + std::to_string(j + 1) + " is not positive (" +
                                          std::to_string(sq(j)) + ")");
    }
  }

  SelfSimilarSolution sol;
  sol.dimension = n;
  sol.m = m;
  sol.kt = spec.kt;
  sol.lambdas = lambdas;
  sol.frequencies = freq;
  for (int j = 0; j < m; ++j) {
    sol.amps.push_back(std::sqrt(sq(j)));
    sol.projection_mismatch = std::max(sol.projection_mismatch, std::abs(sq(j) - proj_sq[static_cast<std::size_t>(j)]));
    sol.b.push_back(std::hypot(spec.kt, lambdas[static_cast<std::size_t>(j)]));
    sol.theta_offsets.push_back(std::atan2(spec.kt, freq[static_cast<std::size_t>(j)]));
  }
  if (odd) {
    sol.axial = std::copysign(std::sqrt(sq(m)), axial);
    sol.projection_mismatch = std::max(sol.projection_mismatch, std::abs(sq(m) - axial * axial));
  }

  // every frame vector must be a unit vector, not only the ones used to solve
  int usable = 1;
  while (usable < n && spec.kt_j(usable) != 0.0) ++usable;
  std::vector<double> lhs(static_cast<std::size_t>(usable), 0.0);
  for (int j = 0; j < m; ++j) {
    const auto g = detail::frame_gains(spec, lambdas[static_cast<std::size_t>(j)], usable);
    for (int row = 0; row < usable; ++row) lhs[static_cast<std::size_t>(row)] += sq(j) * g[static_cast<std::size_t>(row)];
  }
  if (odd) {
    const auto g = detail::frame_gains(spec, 0.0, usable);
    for (int row = 0; row < usable; ++row) lhs[static_cast<std::size_t>(row)] += sq(m) * g[static_cast<std::size_t>(row)];
  }
  for (double v : lhs) sol.constraint_residuals.push_back(std::abs(v - 1.0));
  return sol;
}

struct SynthesisOptions {
  bool exact_derivatives = false;  // attach d^k alpha / dsigma^k tables
};

/// Samples the closed-form self-similar curve on spec.sigma_range; sigma is
/// the arc length of the V_i-indicatrix and sqrt(kappa_{i-1}^2+kappa_i^2) = e^{-kt sigma}.
inline SampledCurve synthesize_self_similar(const SelfSimilarSpec& spec, const SelfSimilarSolution& sol,
                                            const SynthesisOptions& options = {}) {
  const int n = spec.dimension;
  const auto count = static_cast<Eigen::Index>(spec.samples);
  SampledCurve out;
  out.dimension = n;
  out.t = linspace(spec.sigma_lo, spec.sigma_hi, spec.samples);
  out.param_kind = ParamKind::Sigma;
  out.sigma_index = spec.index;
  out.points.resize(count, n);
  if (options.exact_derivatives) out.derivatives.assign(static_cast<std::size_t>(n), Matrix(count, n));

  const double kt = spec.kt;
  for (Eigen::Index row = 0; row < count; ++row) {
    const double s = out.t[static_cast<std::size_t>(row)];
    const double grow = std::exp(kt * s);
    for (int j = 0; j < sol.m; ++j) {
      const auto ju = static_cast<std::size_t>(j);
      const double theta = sol.frequencies[ju] * s + sol.theta_offsets[ju];
      const double amp = sol.amps[ju] / sol.b[ju];
      out.points(row, 2 * j) = amp * grow * std::sin(theta);
      out.points(row, 2 * j + 1) = -amp * grow * std::cos(theta);
      if (options.exact_derivatives) {
        // d^k/dsigma^k of the plane coordinate pair is a_j mu^{k-1} e^{mu sigma}, mu = kt + i w_j
        const std::complex<double> mu(kt, sol.frequencies[ju]);
        std::complex<double> z = sol.amps[ju] * std::exp(mu * s);
        for (int o = 1; o <= n; ++o) {
          out.derivatives[static_cast<std::size_t>(o - 1)](row, 2 * j) = z.real();
          out.derivatives[static_cast<std::size_t>(o - 1)](row, 2 * j + 1) = z.imag();
          z *= mu;
        }
      }
    }
    if (sol.odd()) {
      out.points(row, n - 1) = kt != 0.0 ? sol.axial / kt * grow : sol.axial * s;
      if (options.exact_derivatives) {
        double v = sol.axial * grow;
        for (int o = 1; o <= n; ++o) {
          out.derivatives[static_cast<std::size_t>(o - 1)](row, n - 1) = v;
          v *= kt;
        }
      }
    }
  }
  out.validate();
  return out;
}

inline SampledCurve synthesize_self_similar(const SelfSimilarSpec& spec, const SynthesisOptions& options = {}) {
  return synthesize_self_similar(spec, solve_self_similar(spec), options);
}

struct OracleResult {
  SampledCurve curve;
  double max_frame_drift = 0.0;  // orthonormality defect per unit sigma before each re-orthonormalization
};

/// Integrates dPhi/dsigma = K Phi (Phi(0) = I, rows are V_1..V_n) together
/// with dalpha/dsigma = e^{kt sigma} V_1 with an adaptive Dormand-Prince
/// stepper, re-orthonormalizing the frame at every output sample.
inline OracleResult frame_ode_oracle(const SelfSimilarSpec& spec, const SynthesisOptions& options = {}) {
  spec.validate();
  namespace ode = boost::numeric::odeint;
  using State = std::vector<double>;
  const int n = spec.dimension;
  const auto nn = static_cast<std::size_t>(n * n);
  const Matrix k = spec.structure();
  const double kt = spec.kt;

  auto rhs = [&](const State& x, State& dxdt, double s) {
    const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> phi(x.data(), n, n);
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> dphi(dxdt.data(), n, n);
    dphi = k * phi;
    const double g = std::exp(kt * s);
    for (int c = 0; c < n; ++c) dxdt[nn + static_cast<std::size_t>(c)] = g * phi(0, c);
  };

  State x(nn + static_cast<std::size_t>(n), 0.0);
  for (int d = 0; d < n; ++d) x[static_cast<std::size_t>(d * n + d)] = 1.0;

  auto stepper = ode::make_controlled(1e-13, 1e-13, ode::runge_kutta_dopri5<State>());
  auto advance = [&](double from, double to) {
    if (from == to) return;
    const double dt = (to - from) / 16.0;
    try {
      ode::integrate_adaptive(stepper, rhs, x, from, to, dt);
    } catch (const std::exception& e) {
      fail(ErrorCode::IntegrationFailure, e.what());
    }
    for (double v : x) {
      if (!std::isfinite(v)) fail(ErrorCode::IntegrationFailure, "non-finite state");
    }
  };

  OracleResult res;
  auto reorthonormalize = [&](double span) {
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> phi(x.data(), n, n);
    const double drift = (phi * phi.transpose() - Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
    if (span > 0.0) res.max_frame_drift = std::max(res.max_frame_drift, drift / span);
    // Gram-Schmidt on the rows keeps V_1 pointing the same way
    for (int r = 0; r < n; ++r) {
      for (int q = 0; q < r; ++q) phi.row(r) -= phi.row(r).dot(phi.row(q)) * phi.row(q);
      phi.row(r).normalize();
    }
  };

  advance(0.0, spec.sigma_lo);
  reorthonormalize(std::abs(spec.sigma_lo));

  SampledCurve& out = res.curve;
  out.dimension = n;
  out.t = linspace(spec.sigma_lo, spec.sigma_hi, spec.samples);
  out.param_kind = ParamKind::Sigma;
  out.sigma_index = spec.index;
  const auto count = static_cast<Eigen::Index>(spec.samples);
  out.points.resize(count, n);
  if (options.exact_derivatives) out.derivatives.assign(static_cast<std::size_t>(n), Matrix(count, n));
  const Matrix shift = kt * Matrix::Identity(n, n) + k;

  for (Eigen::Index row = 0; row < count; ++row) {
    const double s = out.t[static_cast<std::size_t>(row)];
    if (row > 0) {
      const double prev = out.t[static_cast<std::size_t>(row - 1)];
      advance(prev, s);
      reorthonormalize(s - prev);
    }
    for (int c = 0; c < n; ++c) out.points(row, c) = x[nn + static_cast<std::size_t>(c)];
    if (options.exact_derivatives) {
      // d^k alpha/dsigma^k = e^{kt sigma} e_1^T (kt I + K)^{k-1} Phi
      const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> phi(x.data(), n, n);
      Eigen::RowVectorXd c = Eigen::RowVectorXd::Unit(n, 0) * std::exp(kt * s);
      for (int o = 1; o <= n; ++o) {
        out.derivatives[static_cast<std::size_t>(o - 1)].row(row) = c * phi;
        c = c * shift;
      }
    }
  }
  out.validate();
  return res;
}

// ---------------------------------------------------------------------------
// Focal curves

/// Focal curvatures f_1..f_{n-1} (column j-1 holds f_j) and the focal curve
/// alpha + f_1 V_2 + ... + f_{n-1} V_n.
struct FocalData {
  int dimension = 0;
  std::vector<double> s;
  Matrix f;
  Matrix focal_points;

  std::vector<double> column(int j) const {
    std::vector<double> v(s.size());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = f(static_cast<Eigen::Index>(k), j - 1);
    return v;
  }
};

namespace detail {

inline void check_focal_pivot(const std::vector<double>& f, double scale, int j) {
  for (double v : f) {
    if (!(std::abs(v) > 1e-5 * scale)) {
      fail(ErrorCode::ZeroFocalPivot, "focal curvature f_" + std::to_string(j) + " vanishes along the curve");
    }
  }
}

}  // namespace detail

/// f_1 = 1/kappa_1, f_i = (f_1 f_1' + ... + f_{i-1} f_{i-1}') / (kappa_i f_{i-1}).
inline FocalData focal_curvatures(const FrenetData& frenet) {
  const int n = frenet.dimension;
  const double length = std::max(frenet.s.back(), 1e-300);
  for (int j = 1; j < n; ++j) {
    for (std::size_t k = 0; k < frenet.size(); ++k) {
      if (!(std::abs(frenet.kappa(k, j)) * length > 1e-8)) {
        fail(ErrorCode::ZeroCurvature, "kappa_" + std::to_string(j) + " vanishes at s = " + std::to_string(frenet.s[k]));
      }
    }
  }
  const std::size_t count = frenet.size();
  FocalData out;
  out.dimension = n;
  out.s = frenet.s;
  out.f.resize(static_cast<Eigen::Index>(count), n - 1);
  std::vector<double> prev(count);
  for (std::size_t k = 0; k < count; ++k) prev[k] = 1.0 / frenet.kappa(k, 1);
  const double scale = sup_norm(prev);
  std::vector<double> running(count, 0.0);  // f_1 f_1' + ... + f_{i-1} f_{i-1}'
  for (std::size_t k = 0; k < count; ++k) out.f(static_cast<Eigen::Index>(k), 0) = prev[k];
  for (int i = 2; i < n; ++i) {
    const std::vector<double> dprev = differentiate_adaptive(frenet.s, prev);
    for (std::size_t k = 0; k < count; ++k) running[k] += prev[k] * dprev[k];
    detail::check_focal_pivot(prev, scale, i - 1);
    std::vector<double> next(count);
    for (std::size_t k = 0; k < count; ++k) next[k] = running[k] / (frenet.kappa(k, i) * prev[k]);
    for (std::size_t k = 0; k < count; ++k) out.f(static_cast<Eigen::Index>(k), i - 1) = next[k];
    prev = std::move(next);
  }
  out.focal_points = frenet.points;
  for (std::size_t k = 0; k < count; ++k) {
    for (int j = 1; j < n; ++j) {
      out.focal_points.row(static_cast<Eigen::Index>(k)) += out.f(static_cast<Eigen::Index>(k), j - 1) * frenet.frames[k].row(j);
    }
  }
  return out;
}

struct FocalShapeSignature {
  ShapeSignature signature;
  bool boundary_extrapolated = false;  // index touched f_{-1}, f_0 or f_n, which the focal formula leaves undefined
};

/// Shape curvatures along sigma_i expressed through the focal curvatures:
///   1/Q = f_{i-2} f_{i-1} f_i / sqrt((S_{i-2} f_i)^2 + (S_{i-1} f_{i-2})^2),  S_j = sum_{l<=j} f_l f_l',
///   kt = d/ds(1/Q),  kt_j = S_{j-1}/(f_{j-1} f_j) * (1/Q).
/// Out-of-range terms use f_{-1} = f_0 = f_n = 1, S_{-1} = 0, S_0 = 1 and
/// drop S_{n-1} at i = n, which reproduces kappa_0 = kappa_n = 0.
inline FocalShapeSignature shape_from_focal(const FocalData& focal, int i) {
  const int n = focal.dimension;
  check_index(n, i);
  const std::size_t count = focal.s.size();
  const double scale = sup_norm(focal.column(1));

  // f[j] and S[j] for j = -1..n, stored with an offset of 1
  std::vector<std::vector<double>> f(static_cast<std::size_t>(n + 2), std::vector<double>(count, 1.0));
  std::vector<std::vector<double>> sums(static_cast<std::size_t>(n + 2), std::vector<double>(count, 0.0));
  auto fi = [&](int j) -> std::vector<double>& { return f[static_cast<std::size_t>(j + 1)]; };
  auto si = [&](int j) -> std::vector<double>& { return sums[static_cast<std::size_t>(j + 1)]; };
  si(0).assign(count, 1.0);
  std::vector<double> running(count, 0.0);
  for (int j = 1; j < n; ++j) {
    fi(j) = focal.column(j);
    const std::vector<double> d = differentiate_adaptive(focal.s, fi(j));
    for (std::size_t k = 0; k < count; ++k) running[k] += fi(j)[k] * d[k];
    si(j) = running;
  }
  for (int j = 1; j < n; ++j) detail::check_focal_pivot(fi(j), scale, j);

  FocalShapeSignature out;
  out.boundary_extrapolated = i <= 2 || i == n;
  std::vector<double> inv_q(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double num = fi(i - 2)[k] * fi(i - 1)[k] * fi(i)[k];
    const double upper = si(i - 2)[k] * fi(i)[k];
    const double lower = i == n ? 0.0 : si(i - 1)[k] * fi(i - 2)[k];
    const double den = std::hypot(upper, lower);
    if (!(den > 0.0) || !std::isfinite(num / den)) {
      fail(ErrorCode::ZeroFocalPivot, "denominator of the focal expression vanishes");
    }
    inv_q[k] = std::abs(num) / den;
  }
  const std::vector<double> d_inv_q = differentiate_adaptive(focal.s, inv_q);
  std::vector<double> q(count);
  for (std::size_t k = 0; k < count; ++k) q[k] = 1.0 / inv_q[k];

  ShapeSignature& sig = out.signature;
  sig.dimension = n;
  sig.index = i;
  sig.s = focal.s;
  sig.t = focal.s;
  sig.sigma = cumulative_integral(focal.s, q);
  sig.kt = d_inv_q;
  sig.ktj.resize(static_cast<Eigen::Index>(count), n - 1);
  for (std::size_t k = 0; k < count; ++k) {
    for (int j = 1; j < n; ++j) {
      const double kappa = si(j - 1)[k] / (fi(j - 1)[k] * fi(j)[k]);
      sig.ktj(static_cast<Eigen::Index>(k), j - 1) = kappa * inv_q[k];
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Evolutes in E^3

struct EvoluteData {
  std::vector<double> s;
  std::vector<double> m1;
  std::vector<double> m2;
  std::vector<double> angle;  // integral of kappa_2 ds + phi0
  Matrix beta;
  double phi0 = 0.0;
};

/// beta = alpha + m_1 V_2 + m_2 V_3 with m_1 = 1/kappa_1 and
/// m_2 = cot(int kappa_2 ds + phi0) / kappa_1, the integral starting at the
/// first retained sample.
inline EvoluteData evolute_E3(const FrenetData& frenet, double phi0 = std::numbers::pi / 2.0) {
  require(frenet.dimension == 3, ErrorCode::NotThreeDimensional, "evolutes are implemented for E^3");
  const std::size_t count = frenet.size();
  const std::vector<double> k2 = frenet.kappa_column(2);
  const std::vector<double> turn = cumulative_integral(frenet.s, k2);
  const double length = std::max(frenet.s.back(), 1e-300);
  const bool planar = sup_norm(k2) * length <= 1e-8;

  EvoluteData out;
  out.phi0 = phi0;
  out.s = frenet.s;
  out.m1.resize(count);
  out.m2.resize(count);
  out.angle.resize(count);
  out.beta.resize(static_cast<Eigen::Index>(count), 3);
  for (std::size_t k = 0; k < count; ++k) {
    const double k1 = frenet.kappa(k, 1);
    require(k1 > 0.0, ErrorCode::ZeroCurvature, "kappa_1 must be positive");
    const double angle = turn[k] + phi0;
    const double sn = std::sin(angle);
    const bool crossed = k > 0 && std::floor(angle / std::numbers::pi) != std::floor(out.angle[k - 1] / std::numbers::pi);
    if (std::abs(sn) < 1e-3 || crossed) {
      if (planar) fail(ErrorCode::PlanarCurve, "kappa_2 vanishes and cot(phi0) is undefined; choose phi0 away from k*pi");
      fail(ErrorCode::CotSingularity, "int kappa_2 ds + phi0 reaches a multiple of pi at s = " + std::to_string(frenet.s[k]));
    }
    out.angle[k] = angle;
    out.m1[k] = 1.0 / k1;
    out.m2[k] = out.m1[k] * std::cos(angle) / sn;
    out.beta.row(static_cast<Eigen::Index>(k)) =
        frenet.points.row(static_cast<Eigen::Index>(k)) + out.m1[k] * frenet.frames[k].row(1) + out.m2[k] * frenet.frames[k].row(2);
  }
  return out;
}

struct EvoluteReport {
  double m1_residual = 0.0;  // sup |kt_1 - m_1'|
  double m2_residual = 0.0;  // sup |kt_2 - m_1 (m_1' m_2 - m_1 m_2') / (m_1^2 + m_2^2)|
  std::vector<double> kt1;
  std::vector<double> kt2;
  std::vector<double> from_m1;
  std::vector<double> from_m2;
};

/// Compares the index-1 shape curvatures (kt_1 = d/ds(1/kappa_1) computed
/// along sigma_1, kt_2 = kappa_2/kappa_1) with their expressions through m_1, m_2.
inline EvoluteReport evolute_invariant_report(const FrenetData& frenet, double phi0 = std::numbers::pi / 2.0) {
  const EvoluteData ev = evolute_E3(frenet, phi0);
  const ShapeSignature sig = shape_curvatures(frenet, 1);
  const std::vector<double> dm1 = differentiate_adaptive(ev.s, ev.m1);
  const std::vector<double> dm2 = differentiate_adaptive(ev.s, ev.m2);
  EvoluteReport rep;
  rep.kt1 = sig.kt;
  rep.kt2 = sig.ktj_column(2);
  rep.from_m1 = dm1;
  rep.from_m2.resize(ev.s.size());
  for (std::size_t k = 0; k < ev.s.size(); ++k) {
    const double m1 = ev.m1[k];
    const double m2 = ev.m2[k];
    rep.from_m2[k] = m1 * (dm1[k] * m2 - m1 * dm2[k]) / (m1 * m1 + m2 * m2);
    rep.m1_residual = std::max(rep.m1_residual, std::abs(rep.kt1[k] - dm1[k]));
    rep.m2_residual = std::max(rep.m2_residual, std::abs(rep.kt2[k] - rep.from_m2[k]));
  }
  return rep;
}

}  // namespace frenetsim
