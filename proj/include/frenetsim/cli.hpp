#pragma once

// Command-line front end. `run` is the whole program so that tests can drive
// it in-process; tools/frenetsim.cpp only forwards argv.
//
// Exit codes: 0 ok / similar, 1 not similar / property failed,
// 2 usage or parse error, 3 geometric degeneracy.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "frenetsim/curve_model.hpp"
#include "frenetsim/error.hpp"
#include "frenetsim/indicatrix.hpp"
#include "frenetsim/io.hpp"
#include "frenetsim/shape_invariants.hpp"
#include "frenetsim/similarity.hpp"
#include "frenetsim/special_curves.hpp"

namespace frenetsim::cli {

enum ExitCode : int { kOk = 0, kNegative = 1, kUsage = 2, kDegenerate = 3 };

enum class LogLevel { Quiet = 0, Error, Warn, Info, Debug };

/// FRENETSIM_LOG = quiet | error | warn | info | debug (default warn).
inline LogLevel log_level_from_env() {
  const char* v = std::getenv("FRENETSIM_LOG");
  if (!v) return LogLevel::Warn;
  const std::string s(v);
  if (s == "quiet" || s == "0") return LogLevel::Quiet;
  if (s == "error") return LogLevel::Error;
  if (s == "info") return LogLevel::Info;
  if (s == "debug") return LogLevel::Debug;
  return LogLevel::Warn;
}

struct RunConfig {
  std::string command;
  std::string input;
  std::string input_b;
  std::string output;
  std::string oracle;
  std::string transform;
  std::string transform_output;
  std::string solution_output;
  std::string csv_output;
  std::string indicatrix_output;
  int index = 1;
  bool index_given = false;  // verify checks every regular index otherwise
  std::size_t samples = 2000;
  double tol = kDefaultMatchTolerance;
  std::uint64_t seed = 0;
  int trials = 20;
  double phi0 = std::numbers::pi / 2.0;
};

class Runner {
 public:
  Runner(std::ostream& out, std::ostream& err) : out_(out), err_(err), level_(log_level_from_env()) {}

  int run(const RunConfig& cfg) {
    require(cfg.tol > 0.0, ErrorCode::BadRange, "--tol must be positive");
    if (cfg.command == "analyze") return analyze(cfg);
    if (cfg.command == "transform") return transform(cfg);
    if (cfg.command == "match") return match(cfg);
    if (cfg.command == "synthesize") return synthesize(cfg);
    if (cfg.command == "focal") return focal(cfg);
    if (cfg.command == "evolute") return evolute(cfg);
    if (cfg.command == "verify") return verify(cfg);
    fail(ErrorCode::BadParameters, "unknown command " + cfg.command);
  }

  void log(LogLevel level, const std::string& msg) const {
    if (level <= level_) err_ << "frenetsim: " << msg << '\n';
  }

 private:
  // Writes to `path`, or to stdout when empty.
  template <class F>
  void emit(const std::string& path, F&& write) {
    if (path.empty()) {
      write(out_);
      return;
    }
    std::ofstream f(path);
    if (!f) fail(ErrorCode::ParseError, "cannot write " + path);
    write(f);
    log(LogLevel::Info, "wrote " + path);
  }

  static SampledCurve load(const std::string& path) {
    require(!path.empty(), ErrorCode::BadParameters, "--input is required");
    return io::read_curve_csv(path);
  }

  int analyze(const RunConfig& cfg) {
    const SampledCurve curve = load(cfg.input);
    check_index(curve.dimension, cfg.index);
    const FrenetData frenet = frenet_apparatus(curve);
    const ShapeSignature sig = shape_curvatures(frenet, cfg.index);
    const int n = curve.dimension;
    log(LogLevel::Info, "analyzed " + std::to_string(frenet.size()) + " interior samples, length " +
                            std::to_string(frenet.s.back()));

    std::optional<SabbanData> sabban;
    const SphericalCurve sc = indicatrix_curve(frenet, cfg.index);
    if (n == 3) sabban = sabban_geodesic_curvature(sc);

    emit(cfg.output, [&](std::ostream& o) { io::write_json(o, io::signature_to_json(sig)); });

    std::string csv = cfg.csv_output;
    if (csv.empty() && !cfg.output.empty()) csv = std::filesystem::path(cfg.output).replace_extension(".csv").string();
    if (!csv.empty()) {
      std::vector<std::string> header{"s", "sigma"};
      for (int j = 1; j < n; ++j) header.push_back("kappa" + std::to_string(j));
      header.push_back("kt");
      for (int j = 1; j < n; ++j) header.push_back("kt" + std::to_string(j));
      if (sabban) header.push_back("kappa_g");
      Matrix rows(static_cast<Eigen::Index>(sig.size()), static_cast<Eigen::Index>(header.size()));
      for (std::size_t k = 0; k < sig.size(); ++k) {
        const auto r = static_cast<Eigen::Index>(k);
        Eigen::Index c = 0;
        rows(r, c++) = sig.s[k];
        rows(r, c++) = sig.sigma[k];
        for (int j = 1; j < n; ++j) rows(r, c++) = frenet.kappa(k, j);
        rows(r, c++) = sig.kt[k];
        for (int j = 1; j < n; ++j) rows(r, c++) = sig.ktj(r, j - 1);
        if (sabban) rows(r, c++) = sabban->kappa_g[k];
      }
      emit(csv, [&](std::ostream& o) { io::write_table(o, header, rows); });
    }
    if (!cfg.indicatrix_output.empty()) {
      std::vector<std::string> header{"sigma"};
      for (int j = 1; j <= n; ++j) header.push_back("g" + std::to_string(j));
      if (sabban) header.push_back("kappa_g");
      Matrix rows(static_cast<Eigen::Index>(sc.size()), static_cast<Eigen::Index>(header.size()));
      for (std::size_t k = 0; k < sc.size(); ++k) {
        const auto r = static_cast<Eigen::Index>(k);
        rows(r, 0) = sc.sigma[k];
        rows.block(r, 1, 1, n) = sc.gamma.row(r);
        if (sabban) rows(r, n + 1) = sabban->kappa_g[k];
      }
      emit(cfg.indicatrix_output, [&](std::ostream& o) { io::write_table(o, header, rows); });
    }
    return kOk;
  }

  int transform(const RunConfig& cfg) {
    const SampledCurve curve = load(cfg.input);
    const SimilarityTransform t = cfg.transform.empty() ? random_similarity(cfg.seed, 0.5, 2.0, curve.dimension)
                                                        : io::transform_from_json(io::read_json_file(cfg.transform));
    const SampledCurve image = apply_similarity(t, curve);
    emit(cfg.output, [&](std::ostream& o) { io::write_curve_csv(o, image); });
    if (!cfg.transform_output.empty()) {
      emit(cfg.transform_output, [&](std::ostream& o) { io::write_json(o, io::transform_to_json(t)); });
    }
    return kOk;
  }

  int match(const RunConfig& cfg) {
    require(!cfg.input_b.empty(), ErrorCode::BadParameters, "--input-b is required");
    const SampledCurve a = load(cfg.input);
    const SampledCurve b = load(cfg.input_b);
    const MatchResult r = similarity_test(a, b, cfg.index, cfg.tol);
    io::json j{{"is_similar", r.is_similar},
               {"distance", r.distance},
               {"lambda_est", r.lambda_est},
               {"sigma_shift", r.sigma_shift},
               {"index", cfg.index},
               {"tol", cfg.tol}};
    emit(cfg.output, [&](std::ostream& o) { io::write_json(o, j); });
    return r.is_similar ? kOk : kNegative;
  }

  int synthesize(const RunConfig& cfg) {
    require(!cfg.input.empty(), ErrorCode::BadParameters, "--input (spec JSON) is required");
    const SelfSimilarSpec spec = io::spec_from_json(io::read_json_file(cfg.input), cfg.samples);
    const SelfSimilarSolution sol = solve_self_similar(spec);
    const SampledCurve curve = synthesize_self_similar(spec, sol);
    emit(cfg.output, [&](std::ostream& o) { io::write_curve_csv(o, curve); });

    io::json report = io::solution_to_json(sol);
    report["spec"] = io::spec_to_json(spec);
    if (!cfg.oracle.empty()) {
      const OracleResult oracle = frame_ode_oracle(spec);
      emit(cfg.oracle, [&](std::ostream& o) { io::write_curve_csv(o, oracle.curve); });
      report["oracle_max_frame_drift"] = oracle.max_frame_drift;
    }
    if (!cfg.solution_output.empty()) {
      emit(cfg.solution_output, [&](std::ostream& o) { io::write_json(o, report); });
    } else if (!cfg.output.empty()) {
      io::write_json(out_, report);
    }
    return kOk;
  }

  int focal(const RunConfig& cfg) {
    const SampledCurve curve = load(cfg.input);
    const FrenetData frenet = frenet_apparatus(curve);
    const FocalData fd = focal_curvatures(frenet);
    const int n = curve.dimension;
    if (!cfg.output.empty()) {
      std::vector<std::string> header{"s"};
      for (int j = 1; j < n; ++j) header.push_back("f" + std::to_string(j));
      for (int j = 1; j <= n; ++j) header.push_back("c" + std::to_string(j));
      Matrix rows(static_cast<Eigen::Index>(fd.s.size()), 2 * n);
      rows.col(0) = Eigen::Map<const Vector>(fd.s.data(), static_cast<Eigen::Index>(fd.s.size()));
      rows.middleCols(1, n - 1) = fd.f;
      rows.rightCols(n) = fd.focal_points;
      emit(cfg.output, [&](std::ostream& o) { io::write_table(o, header, rows); });
    }
    io::json report{{"dimension", n}, {"samples", fd.s.size()}};
    for (int j = 1; j < n; ++j) {
      const auto col = fd.column(j);
      report["f" + std::to_string(j)] = {{"min", *std::min_element(col.begin(), col.end())},
                                          {"max", *std::max_element(col.begin(), col.end())}};
    }
    // the focal route to the shape curvatures, checked against the direct one
    try {
      const FocalShapeSignature fs = shape_from_focal(fd, cfg.index);
      const ShapeSignature direct = shape_curvatures(frenet, cfg.index);
      report["shape_from_focal"] = {{"index", cfg.index},
                                    {"max_deviation", signature_deviation(direct, fs.signature)},
                                    {"boundary_extrapolated", fs.boundary_extrapolated}};
    } catch (const Error& e) {
      report["shape_from_focal"] = {{"index", cfg.index}, {"error", e.what()}};
    }
    io::write_json(out_, report);
    return kOk;
  }

  int evolute(const RunConfig& cfg) {
    const SampledCurve curve = load(cfg.input);
    const FrenetData frenet = frenet_apparatus(curve);
    const EvoluteData ev = evolute_E3(frenet, cfg.phi0);
    const EvoluteReport rep = evolute_invariant_report(frenet, cfg.phi0);
    if (!cfg.output.empty()) {
      Matrix rows(static_cast<Eigen::Index>(ev.s.size()), 6);
      for (std::size_t k = 0; k < ev.s.size(); ++k) {
        const auto r = static_cast<Eigen::Index>(k);
        rows(r, 0) = ev.s[k];
        rows(r, 1) = ev.m1[k];
        rows(r, 2) = ev.m2[k];
        rows.block(r, 3, 1, 3) = ev.beta.row(r);
      }
      emit(cfg.output, [&](std::ostream& o) { io::write_table(o, {"s", "m1", "m2", "b1", "b2", "b3"}, rows); });
    }
    io::write_json(out_, {{"phi0", cfg.phi0}, {"m1_residual", rep.m1_residual}, {"m2_residual", rep.m2_residual}});
    return kOk;
  }

  int verify(const RunConfig& cfg) {
    require(cfg.trials > 0, ErrorCode::BadRange, "--trials must be positive");
    const SampledCurve curve = load(cfg.input);
    const int n = curve.dimension;
    if (cfg.index_given) check_index(n, cfg.index);
    const FrenetData base = frenet_apparatus(curve);

    // indices whose indicatrix is regular on this curve
    std::vector<int> indices;
    std::vector<ShapeSignature> base_sig;
    std::vector<SphericalCurve> base_sc;
    io::json skipped = io::json::array();
    for (int i = 1; i <= n; ++i) {
      if (cfg.index_given && i != cfg.index) continue;
      try {
        base_sig.push_back(shape_curvatures(base, i));
        base_sc.push_back(indicatrix_curve(base, i));
        indices.push_back(i);
      } catch (const Error& e) {
        skipped.push_back({{"index", i}, {"reason", e.what()}});
        log(LogLevel::Info, "skipping index " + std::to_string(i) + ": " + e.what());
      }
    }
    require(!indices.empty(), ErrorCode::IndicatrixDegenerate, "no regular indicatrix on this curve");

    std::map<std::string, double> worst;
    auto record = [&](const std::string& name, double v) {
      auto& w = worst[name];
      w = std::max(w, std::isfinite(v) ? v : std::numeric_limits<double>::infinity());
    };
    for (int trial = 0; trial < cfg.trials; ++trial) {
      const SimilarityTransform t = random_similarity(cfg.seed + static_cast<std::uint64_t>(trial), 0.5, 2.0, n);
      const FrenetData image = frenet_apparatus(apply_similarity(t, curve));
      record("length_ratio", std::abs(image.total_length / base.total_length - t.lambda) / t.lambda);
      for (int j = 1; j < n; ++j) {
        const auto kf = base.kappa_column(j);
        const auto kg = image.kappa_column(j);
        const double scale = std::max(sup_norm(kf), 1e-300);
        double dev = 0.0;
        for (std::size_t k = 0; k < kf.size(); ++k) dev = std::max(dev, std::abs(t.lambda * kg[k] - kf[k]) / scale);
        record("kappa_scaling", dev);
      }
      for (std::size_t q = 0; q < indices.size(); ++q) {
        const int i = indices[q];
        const std::string tag = "_" + std::to_string(i);
        const SphericalCurve sc = indicatrix_curve(image, i);
        double dev = 0.0;
        for (std::size_t k = 0; k < sc.size(); ++k) dev = std::max(dev, std::abs(sc.sigma[k] - base_sc[q].sigma[k]));
        record("sigma" + tag, dev);
        record("shape_curvatures" + tag, signature_deviation(base_sig[q], shape_curvatures(image, i)));
        if (n == 3) {
          const auto g0 = sabban_geodesic_curvature(base_sc[q]).kappa_g;
          const auto g1 = sabban_geodesic_curvature(sc).kappa_g;
          double dg = 0.0;
          for (std::size_t k = 0; k < g0.size(); ++k) dg = std::max(dg, std::abs(g0[k] - g1[k]));
          record("kappa_g" + tag, dg);
        }
      }
    }

    io::json failing = io::json::array();
    io::json props = io::json::object();
    for (const auto& [name, v] : worst) {
      props[name] = v;
      if (!(v <= cfg.tol)) failing.push_back(name);
    }
    io::json report{{"trials", cfg.trials}, {"seed", cfg.seed}, {"tol", cfg.tol},
                    {"max_deviation", props}, {"failing", failing}, {"skipped", skipped}};
    emit(cfg.output, [&](std::ostream& o) { io::write_json(o, report); });
    for (const auto& name : failing) log(LogLevel::Error, "property " + name.get<std::string>() + " exceeds tolerance");
    return failing.empty() ? kOk : kNegative;
  }

  std::ostream& out_;
  std::ostream& err_;
  LogLevel level_;
};

/// Parses argv and runs one command; never throws.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Similarity invariants of Frenet curves"};
  app.require_subcommand(1);
  RunConfig cfg;

  std::vector<CLI::Option*> index_options;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--input", cfg.input, "input curve CSV (spec JSON for synthesize)");
    sub->add_option("--output", cfg.output, "output path (stdout when omitted)");
    index_options.push_back(sub->add_option("--index", cfg.index, "indicatrix index i"));
    sub->add_option("--samples", cfg.samples, "sample count when a spec does not give one");
    sub->add_option("--tol", cfg.tol, "tolerance");
    sub->add_option("--seed", cfg.seed, "random seed");
    return sub;
  };

  auto* analyze = add_common(app.add_subcommand("analyze", "shape signature of a curve"));
  analyze->add_option("--csv", cfg.csv_output, "per-sample CSV (defaults next to --output)");
  analyze->add_option("--indicatrix-output", cfg.indicatrix_output, "indicatrix CSV sigma,g1..gn[,kappa_g]");

  auto* transform = add_common(app.add_subcommand("transform", "apply a direct similarity to a curve"));
  transform->add_option("--transform", cfg.transform, "transform JSON (random from --seed when omitted)");
  transform->add_option("--transform-output", cfg.transform_output, "write the transform used");

  auto* match = add_common(app.add_subcommand("match", "test two curves for direct similarity"));
  match->add_option("--input-b", cfg.input_b, "second curve CSV");

  auto* synth = add_common(app.add_subcommand("synthesize", "self-similar curve from a spec JSON"));
  synth->add_option("--oracle", cfg.oracle, "also integrate the frame ODE and write that curve here");
  synth->add_option("--solution-output", cfg.solution_output, "solution JSON path");

  add_common(app.add_subcommand("focal", "focal curvatures and focal curve"));
  auto* evolute = add_common(app.add_subcommand("evolute", "evolute of an E^3 curve"));
  evolute->add_option("--phi0", cfg.phi0, "integration constant of the kappa_2 integral");

  auto* verify = add_common(app.add_subcommand("verify", "invariance checks under random similarities"));
  verify->add_option("--trials", cfg.trials, "number of random similarities");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "frenetsim: " << e.what() << '\n';
    return kUsage;
  }
  cfg.command = app.get_subcommands().front()->get_name();
  for (const auto* opt : index_options) cfg.index_given = cfg.index_given || opt->count() > 0;

  Runner runner(out, err);
  try {
    return runner.run(cfg);
  } catch (const Error& e) {
    runner.log(LogLevel::Error, e.what());
    return is_geometric(e.code()) ? kDegenerate : kUsage;
  } catch (const std::exception& e) {
    runner.log(LogLevel::Error, e.what());
    return kUsage;
  }
}

}  // namespace frenetsim::cli
