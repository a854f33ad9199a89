#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "frenetsim/error.hpp"
#include "frenetsim/numerics.hpp"

namespace frenetsim {

/// Shape curvatures sampled along sigma_i, the arc length of the
/// V_i-indicatrix. Column j-1 of `ktj` holds kt_j. `s` and `t` record the
/// arc length and curve parameter of each sample; they are not invariant and
/// are only used to estimate scale when matching.
struct ShapeSignature {
  int dimension = 0;
  int index = 0;
  std::vector<double> sigma;
  std::vector<double> kt;
  Matrix ktj;
  std::vector<double> s;
  std::vector<double> t;

  std::size_t size() const { return sigma.size(); }
  double length() const { return sigma.empty() ? 0.0 : sigma.back() - sigma.front(); }

  /// (kt, kt_1, ..., kt_{n-1}) at sample k.
  Vector tuple(std::size_t k) const {
    Vector v(dimension);
    v(0) = kt[k];
    v.tail(dimension - 1) = ktj.row(static_cast<Eigen::Index>(k)).transpose();
    return v;
  }

  /// Rows are samples, columns (kt, kt_1, ..., kt_{n-1}).
  Matrix table() const {
    Matrix m(static_cast<Eigen::Index>(size()), dimension);
    for (std::size_t k = 0; k < size(); ++k) m.row(static_cast<Eigen::Index>(k)) = tuple(k).transpose();
    return m;
  }

  std::vector<double> ktj_column(int j) const {
    std::vector<double> v(size());
    for (std::size_t k = 0; k < size(); ++k) v[k] = ktj(static_cast<Eigen::Index>(k), j - 1);
    return v;
  }

  void validate() const {
    require(dimension >= 2, ErrorCode::DimensionMismatch, "signature dimension must be at least 2");
    require(index >= 1 && index <= dimension, ErrorCode::BadIndex, "signature index out of range");
    require(kt.size() == size() && static_cast<std::size_t>(ktj.rows()) == size() && ktj.cols() == dimension - 1,
            ErrorCode::DimensionMismatch, "signature table shape mismatch");
    require(size() >= 2, ErrorCode::TooFewSamples, "signature needs at least two samples");
    require_increasing(sigma, "sigma");
    for (double v : kt) require(std::isfinite(v), ErrorCode::BadParameters, "non-finite shape curvature");
    require(ktj.allFinite(), ErrorCode::BadParameters, "non-finite shape curvature");
  }
};

}  // namespace frenetsim
