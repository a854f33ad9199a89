#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace frenetsim {

enum class ErrorCode {
  // usage / input
  BadParameters,
  BadRange,
  BadIndex,
  DimensionMismatch,
  TooFewSamples,
  ParseError,
  IncompatibleSignatures,
  NotThreeDimensional,
  // geometric degeneracy
  ZeroSpeed,
  FrameDegenerate,
  IndicatrixDegenerate,
  DegenerateSpeed,
  DivisionDegenerate,
  NoRealSolution,
  RepeatedEigenvalue,
  ZeroKt,
  IntegrationFailure,
  ZeroCurvature,
  ZeroFocalPivot,
  PlanarCurve,
  CotSingularity,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::BadParameters: return "BadParameters";
    case ErrorCode::BadRange: return "BadRange";
    case ErrorCode::BadIndex: return "BadIndex";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IncompatibleSignatures: return "IncompatibleSignatures";
    case ErrorCode::NotThreeDimensional: return "NotThreeDimensional";
    case ErrorCode::ZeroSpeed: return "ZeroSpeed";
    case ErrorCode::FrameDegenerate: return "FrameDegenerate";
    case ErrorCode::IndicatrixDegenerate: return "IndicatrixDegenerate";
    case ErrorCode::DegenerateSpeed: return "DegenerateSpeed";
    case ErrorCode::DivisionDegenerate: return "DivisionDegenerate";
    case ErrorCode::NoRealSolution: return "NoRealSolution";
    case ErrorCode::RepeatedEigenvalue: return "RepeatedEigenvalue";
    case ErrorCode::ZeroKt: return "ZeroKt";
    case ErrorCode::IntegrationFailure: return "IntegrationFailure";
    case ErrorCode::ZeroCurvature: return "ZeroCurvature";
    case ErrorCode::ZeroFocalPivot: return "ZeroFocalPivot";
    case ErrorCode::PlanarCurve: return "PlanarCurve";
    case ErrorCode::CotSingularity: return "CotSingularity";
  }
  return "Unknown";
}

/// True for errors caused by the geometry of the input rather than by how
/// the caller invoked the library.
constexpr bool is_geometric(ErrorCode code) {
  switch (code) {
    case ErrorCode::BadParameters:
    case ErrorCode::BadRange:
    case ErrorCode::BadIndex:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::TooFewSamples:
    case ErrorCode::ParseError:
    case ErrorCode::IncompatibleSignatures:
    case ErrorCode::NotThreeDimensional:
      return false;
    default:
      return true;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace frenetsim
