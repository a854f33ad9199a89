#pragma once

// CSV and JSON formats used by the command-line tool.

#include <charconv>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include "json.hpp"

#include "frenetsim/curve_model.hpp"
#include "frenetsim/error.hpp"
#include "frenetsim/signature.hpp"
#include "frenetsim/similarity.hpp"
#include "frenetsim/special_curves.hpp"

namespace frenetsim::io {

using nlohmann::json;

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  for (;;) {
    const std::size_t next = line.find(',', pos);
    out.push_back(trim(line.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos)));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

inline double parse_number(std::string_view field, std::size_t line_no) {
  double v = 0.0;
  const char* end = field.data() + field.size();
  const char* first = field.data();
  if (first != end && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, end, v);
  if (ec != std::errc() || ptr != end || field.empty()) {
    fail(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": '" + std::string(field) + "' is not a number");
  }
  return v;
}

}  // namespace detail

/// Reads `t,x1,...,xn` with a header row; the dimension is the column count minus one.
inline SampledCurve read_curve_csv(std::istream& in, const std::string& name = "<input>") {
  std::string line;
  std::size_t line_no = 0;
  std::size_t columns = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (!detail::trim(line).empty()) break;
  }
  const auto header = detail::split(line);
  if (header.empty() || header[0] != "t") fail(ErrorCode::ParseError, name + ": header must start with 't'");
  columns = header.size();
  if (columns < 3) fail(ErrorCode::ParseError, name + ": need at least two coordinate columns");

  std::vector<double> t;
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split(line);
    if (fields.size() != columns) {
      fail(ErrorCode::ParseError, name + ": line " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                                      " fields, expected " + std::to_string(columns));
    }
    t.push_back(detail::parse_number(fields[0], line_no));
    for (std::size_t c = 1; c < columns; ++c) values.push_back(detail::parse_number(fields[c], line_no));
  }
  const int n = static_cast<int>(columns - 1);
  Matrix points(static_cast<Eigen::Index>(t.size()), n);
  for (std::size_t r = 0; r < t.size(); ++r) {
    for (int c = 0; c < n; ++c) points(static_cast<Eigen::Index>(r), c) = values[r * static_cast<std::size_t>(n) + static_cast<std::size_t>(c)];
  }
  return make_curve(std::move(t), std::move(points));
}

inline SampledCurve read_curve_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ParseError, "cannot open " + path);
  return read_curve_csv(in, path);
}

/// Writes a table with a header; every value with 17 significant digits.
inline void write_table(std::ostream& out, const std::vector<std::string>& header, const Matrix& rows) {
  for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
  out << '\n';
  out << std::setprecision(17);
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    for (Eigen::Index c = 0; c < rows.cols(); ++c) out << (c ? "," : "") << rows(r, c);
    out << '\n';
  }
}

inline void write_curve_csv(std::ostream& out, const SampledCurve& curve) {
  std::vector<std::string> header{"t"};
  for (int c = 1; c <= curve.dimension; ++c) header.push_back("x" + std::to_string(c));
  Matrix rows(static_cast<Eigen::Index>(curve.size()), curve.dimension + 1);
  rows.col(0) = Eigen::Map<const Vector>(curve.t.data(), static_cast<Eigen::Index>(curve.size()));
  rows.rightCols(curve.dimension) = curve.points;
  write_table(out, header, rows);
}

inline std::vector<std::vector<double>> to_rows(const Matrix& m) {
  std::vector<std::vector<double>> out(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    out[static_cast<std::size_t>(r)].resize(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index c = 0; c < m.cols(); ++c) out[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = m(r, c);
  }
  return out;
}

inline Matrix from_rows(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) fail(ErrorCode::ParseError, what + " must be a nested array");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) fail(ErrorCode::ParseError, what + " is ragged");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

inline json parse_json(std::istream& in, const std::string& name) {
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorCode::ParseError, name + ": " + e.what());
  }
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ParseError, "cannot open " + path);
  return parse_json(in, path);
}

// Wraps nlohmann type errors (wrong field types, missing keys) as ParseError.
template <class F>
auto guarded(const std::string& what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    fail(ErrorCode::ParseError, what + ": " + e.what());
  }
}

inline json transform_to_json(const SimilarityTransform& t) {
  return {{"lambda", t.lambda}, {"A", to_rows(t.A)}, {"b", std::vector<double>(t.b.data(), t.b.data() + t.b.size())}};
}

inline SimilarityTransform transform_from_json(const json& j) {
  return guarded("transform", [&] {
    SimilarityTransform t;
    t.lambda = j.at("lambda").get<double>();
    t.A = from_rows(j.at("A"), "A");
    const auto b = j.at("b").get<std::vector<double>>();
    t.b = Eigen::Map<const Vector>(b.data(), static_cast<Eigen::Index>(b.size()));
    t.validate(1e-9);
    return t;
  });
}

inline json signature_to_json(const ShapeSignature& sig) {
  return {{"dimension", sig.dimension}, {"index", sig.index}, {"sigma", sig.sigma}, {"kt", sig.kt}, {"ktj", to_rows(sig.ktj)}};
}

inline ShapeSignature signature_from_json(const json& j) {
  return guarded("signature", [&] {
    ShapeSignature sig;
    sig.dimension = j.at("dimension").get<int>();
    sig.index = j.at("index").get<int>();
    sig.sigma = j.at("sigma").get<std::vector<double>>();
    sig.kt = j.at("kt").get<std::vector<double>>();
    sig.ktj = from_rows(j.at("ktj"), "ktj");
    sig.s = sig.sigma;
    sig.t = sig.sigma;
    sig.validate();
    return sig;
  });
}

inline SelfSimilarSpec spec_from_json(const json& j, std::size_t default_samples = 2000) {
  return guarded("spec", [&] {
    SelfSimilarSpec spec;
    spec.dimension = j.at("dimension").get<int>();
    spec.index = j.at("index").get<int>();
    spec.kt = j.at("kt").get<double>();
    spec.ktj = j.at("ktj").get<std::vector<double>>();
    const auto range = j.at("sigma_range").get<std::vector<double>>();
    if (range.size() != 2) fail(ErrorCode::ParseError, "sigma_range must have two entries");
    spec.sigma_lo = range[0];
    spec.sigma_hi = range[1];
    spec.samples = j.contains("samples") ? j.at("samples").get<std::size_t>() : default_samples;
    return spec;
  });
}

inline json spec_to_json(const SelfSimilarSpec& spec) {
  return {{"dimension", spec.dimension}, {"index", spec.index}, {"kt", spec.kt}, {"ktj", spec.ktj},
          {"sigma_range", {spec.sigma_lo, spec.sigma_hi}}, {"samples", spec.samples}};
}

inline json solution_to_json(const SelfSimilarSolution& sol) {
  json j{{"dimension", sol.dimension},
         {"lambdas", sol.lambdas},
         {"lambda_squared", json::array()},
         {"frequencies", sol.frequencies},
         {"amps", sol.amps},
         {"b", sol.b},
         {"theta_offsets", sol.theta_offsets},
         {"constraint_residuals", sol.constraint_residuals},
         {"projection_mismatch", sol.projection_mismatch}};
  for (double l : sol.lambdas) j["lambda_squared"].push_back(l * l);
  if (sol.odd()) {
    j["axial"] = sol.axial;
    j["axial_amplitude"] = sol.axial_amplitude();  // null when kt = 0
  }
  return j;
}

inline void write_json(std::ostream& out, const json& j) { out << j.dump(2) << '\n'; }

}  // namespace frenetsim::io
