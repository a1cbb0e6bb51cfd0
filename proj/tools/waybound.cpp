/*
 * This code is part of Waybound.
 *
 * (C) Copyright Waybound Contributors 2026.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license in the LICENSE.txt file in the root directory
 * of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.
 *
 * Any modifications or derivative works of this code must retain this
 * copyright notice, and modified files need to carry a notice indicating
 * that they have been altered from the originals.
 */

// Command-line front end. Subcommands: verify, example, optimize, scaling,
// tripartite. Configuration comes from an optional JSON document plus flags;
// a flag always overrides the config field of the same (kebab-case) name.
// Exit codes: 0 success, 1 inequality violation found, 2 configuration or
// usage error. Output files are byte-identical for identical config + seed,
// regardless of --threads; wall time goes to stdout only.

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "waybound/config.hpp"
#include "waybound/conservation.hpp"
#include "waybound/linops.hpp"
#include "waybound/optimize.hpp"
#include "waybound/reporting.hpp"
#include "waybound/scaling.hpp"
#include "waybound/scenarios.hpp"
#include "waybound/states.hpp"
#include "waybound/way.hpp"

namespace {

using namespace waybound;
using Clock = std::chrono::steady_clock;

double elapsed_seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Seed precedence: explicit flag, then config field, then the WAYBOUND_SEED
// environment variable, then 0.
std::uint64_t resolve_seed(bool flag_given, std::uint64_t flag_value,
                           const Json& cfg) {
  if (flag_given) return flag_value;
  if (cfg.contains("seed")) {
    if (!cfg["seed"].is_number_integer())
      throw ConfigError("seed", "expected an integer");
    return cfg["seed"].get<std::uint64_t>();
  }
  if (const char* env = std::getenv("WAYBOUND_SEED")) {
    try {
      std::size_t used = 0;
      const std::string text(env);
      const std::uint64_t v = std::stoull(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      return v;
    } catch (const std::exception&) {
      throw ConfigError("WAYBOUND_SEED", "expected an unsigned integer");
    }
  }
  return 0;
}

int resolve_threads(bool flag_given, int flag_value, const Json& cfg) {
  long value = flag_given ? flag_value : cfg_long(cfg, "threads", 0);
  if (value == 0) {
    const unsigned hw = std::thread::hardware_concurrency();
    value = hw == 0 ? 1 : static_cast<long>(hw);
  }
  if (value < 1) throw ConfigError("threads", "must be positive");
  return static_cast<int>(value);
}

Complex resolve_amplitude(bool flag_given, const std::string& flag_value,
                          const Json& cfg, const std::string& field,
                          Complex fallback) {
  if (flag_given) return parse_complex(flag_value, field);
  if (cfg.contains(field)) {
    if (cfg[field].is_string())
      return parse_complex(cfg[field].get<std::string>(), field);
    return complex_from_json(cfg[field], field);
  }
  return fallback;
}

SigmaMode parse_sigma_mode(const std::string& text) {
  if (text == "pure-random") return SigmaMode::kPureRandom;
  if (text == "mixed-random") return SigmaMode::kMixedRandom;
  if (text == "fixed") return SigmaMode::kFixed;
  throw ConfigError("sigma_mode", "expected pure-random, mixed-random or "
                                  "fixed, got '" + text + "'");
}

UnitaryMode parse_unitary_mode(const std::string& text) {
  if (text == "conserving-block") return UnitaryMode::kConservingBlock;
  if (text == "haar-full") return UnitaryMode::kHaarFull;
  throw ConfigError("unitary_mode",
                    "expected conserving-block or haar-full, got '" + text +
                        "'");
}

PureState plus_chain(Index dim) {
  ComplexVector v =
      ComplexVector::Constant(dim, Complex(1.0 / std::sqrt(double(dim))));
  return PureState(std::move(v), {dim});
}

// The measured pair and the conserved charges, either from the spin-half
// preset (alpha, beta, apparatus spins) or from explicit l_sys / l_app /
// psi0 / psi1 literals in the config document.
struct ResolvedProblem {
  ConservedPair charges;
  PureState psi0;
  PureState psi1;
};

ResolvedProblem resolve_problem(const Json& cfg, const std::string& scenario,
                                Complex alpha, Complex beta, int n_spins) {
  const bool explicit_ops = cfg.contains("l_sys") || cfg.contains("l_app") ||
                            cfg.contains("psi0") || cfg.contains("psi1");
  if (explicit_ops) {
    for (const char* field : {"l_sys", "l_app", "psi0", "psi1"})
      if (!cfg.contains(field))
        throw ConfigError(field, "required when any of l_sys, l_app, psi0, "
                                 "psi1 is given explicitly");
    const ComplexMatrix l_sys = observable_from_json(cfg["l_sys"], "l_sys");
    const ComplexMatrix l_app = observable_from_json(cfg["l_app"], "l_app");
    ConservedPair charges = build_sectors(l_sys, l_app);
    ComplexVector v0 = state_from_json(cfg["psi0"], "psi0");
    ComplexVector v1 = state_from_json(cfg["psi1"], "psi1");
    if (v0.size() != charges.d_sys() || v1.size() != charges.d_sys())
      throw ConfigError("psi0", "state dimension does not match l_sys");
    return ResolvedProblem{std::move(charges),
                           PureState(std::move(v0), {l_sys.rows()}),
                           PureState(std::move(v1), {l_sys.rows()})};
  }
  if (scenario != "spin-half")
    throw ConfigError("scenario",
                      "unknown preset '" + scenario + "' (only spin-half)");
  SpinScenarioParts parts = build_spin_scenario(
      SpinHalfScenario{alpha, beta, n_spins, 0});
  return ResolvedProblem{std::move(parts.charges), std::move(parts.psi0),
                         std::move(parts.psi1)};
}

std::optional<DensityOperator> resolve_sigma(const Json& cfg, Index d_app) {
  if (!cfg.contains("sigma")) return std::nullopt;
  const ComplexMatrix m = matrix_from_json(cfg["sigma"], "sigma");
  if (m.rows() != d_app)
    throw ConfigError("sigma", "dimension does not match the apparatus");
  try {
    return DensityOperator(m, {d_app});
  } catch (const std::exception& e) {
    throw ConfigError("sigma", e.what());
  }
}

struct VerifyArgs {
  std::string config_path;
  std::string scenario = "spin-half";
  std::string alpha, beta;
  int apparatus_spins = 1;
  long trials = 0;
  std::uint64_t seed = 0;
  double tolerance = 1e-9;
  std::string sigma_mode, unitary_mode;
  int threads = 0;
  std::string out_csv, out_json;
};

int run_verify(const VerifyArgs& a, const CLI::App& sub) {
  const auto start = Clock::now();
  const Json cfg = a.config_path.empty() ? Json::object()
                                         : load_config_file(a.config_path);
  const Complex alpha =
      resolve_amplitude(sub.count("--alpha") > 0, a.alpha, cfg, "alpha",
                        Complex(1.0 / std::sqrt(2.0)));
  const Complex beta =
      resolve_amplitude(sub.count("--beta") > 0, a.beta, cfg, "beta",
                        Complex(1.0 / std::sqrt(2.0)));
  const int n_spins = static_cast<int>(
      sub.count("--apparatus-spins") > 0
          ? a.apparatus_spins
          : cfg_long(cfg, "apparatus_spins", 1));
  const std::string scenario =
      sub.count("--scenario") > 0 ? a.scenario
                                  : cfg_string(cfg, "scenario", "spin-half");
  ResolvedProblem problem =
      resolve_problem(cfg, scenario, alpha, beta, n_spins);

  SweepOptions options;
  options.n_trials = sub.count("--trials") > 0 ? a.trials
                                               : cfg_long(cfg, "trials", 0);
  if (options.n_trials < 1) throw ConfigError("trials", "must be positive");
  options.seed = resolve_seed(sub.count("--seed") > 0, a.seed, cfg);
  options.tol = sub.count("--tolerance") > 0
                    ? a.tolerance
                    : cfg_double(cfg, "tolerance", 1e-9);
  if (options.tol < 0) throw ConfigError("tolerance", "must be nonnegative");
  options.sigma_mode = parse_sigma_mode(
      sub.count("--sigma-mode") > 0
          ? a.sigma_mode
          : cfg_string(cfg, "sigma_mode", "pure-random"));
  options.unitary_mode = parse_unitary_mode(
      sub.count("--unitary-mode") > 0
          ? a.unitary_mode
          : cfg_string(cfg, "unitary_mode", "conserving-block"));
  options.fixed_sigma = resolve_sigma(cfg, problem.charges.d_app());
  if (options.sigma_mode == SigmaMode::kFixed && !options.fixed_sigma)
    throw ConfigError("sigma", "required when sigma_mode is fixed");
  options.threads = resolve_threads(sub.count("--threads") > 0, a.threads, cfg);

  const std::vector<TradeoffReport> reports =
      sweep(problem.charges, problem.psi0, problem.psi1, options);
  const ViolationCounts counts = count_violations(reports, options.tol);

  const std::string out_csv =
      sub.count("--out-csv") > 0 ? a.out_csv : cfg_string(cfg, "out_csv", "");
  const std::string out_json = sub.count("--out-json") > 0
                                   ? a.out_json
                                   : cfg_string(cfg, "out_json", "");
  if (!out_csv.empty())
    write_csv_file(out_csv,
                   [&](std::ostream& o) { write_sweep_csv(o, reports); });
  if (!out_json.empty()) {
    JsonObject summary;
    summary.add_number("min_slack", counts.min_slack);
    summary.add_int("n_trials", counts.n_trials);
    summary.add_int("n_violations", counts.n_violations);
    summary.add_int("n_violations_nonconserving",
                    counts.n_violations_nonconserving);
    summary.add_uint("seed", options.seed);
    summary.add_number("tolerance", options.tol);
    write_text_file(out_json, summary.dump() + "\n");
  }

  std::cout << "trials " << counts.n_trials << "\n"
            << "min_slack " << format_double(counts.min_slack) << "\n"
            << "violations " << counts.n_violations << "\n"
            << "violations_nonconserving "
            << counts.n_violations_nonconserving << "\n"
            << "wall_time_seconds " << format_double(elapsed_seconds(start))
            << "\n";
  return counts.n_violations == 0 ? 0 : 1;
}

struct ExampleArgs {
  std::string config_path;
  std::string alpha, beta;
  std::uint64_t seed = 0;
  std::string out_json;
};

int run_example(const ExampleArgs& a, const CLI::App& sub) {
  const auto start = Clock::now();
  const Json cfg = a.config_path.empty() ? Json::object()
                                         : load_config_file(a.config_path);
  const Complex alpha =
      resolve_amplitude(sub.count("--alpha") > 0, a.alpha, cfg, "alpha",
                        Complex(1.0 / std::sqrt(2.0)));
  const Complex beta =
      resolve_amplitude(sub.count("--beta") > 0, a.beta, cfg, "beta",
                        Complex(1.0 / std::sqrt(2.0)));

  TradeoffReport report;
  try {
    report = evaluate_tradeoff(ohira_pearle_scheme(alpha, beta));
  } catch (const std::invalid_argument& e) {
    throw ConfigError("alpha", e.what());
  }

  std::cout << "lhs " << format_double(report.lhs) << "\n"
            << "f_sys " << format_double(report.f_sys) << "\n"
            << "f_app " << format_double(report.f_app) << "\n"
            << "norm_l_sys " << format_double(report.norm_l_sys) << "\n"
            << "norm_l_app " << format_double(report.norm_l_app) << "\n"
            << "rhs " << format_double(report.rhs) << "\n"
            << "slack " << format_double(report.slack) << "\n"
            << "conservation_residual "
            << format_double(report.conservation_residual) << "\n"
            << "satisfied " << (report.satisfied ? 1 : 0) << "\n";

  const std::string out_json = sub.count("--out-json") > 0
                                   ? a.out_json
                                   : cfg_string(cfg, "out_json", "");
  if (!out_json.empty())
    write_text_file(out_json, report_to_json(report).dump() + "\n");

  std::cout << "wall_time_seconds " << format_double(elapsed_seconds(start))
            << "\n";
  // The reflection scheme saturates the bound; anything else is a defect.
  return std::abs(report.slack) <= 1e-9 ? 0 : 1;
}

struct OptimizeArgs {
  std::string config_path;
  std::string scenario = "spin-half";
  std::string alpha, beta;
  int apparatus_spins = 1;
  std::string objective = "slack";
  double w_sys = 1.0, w_app = 1.0;
  int restarts = 32;
  long max_evaluations = 5000;
  double simplex_tol = 1e-9;
  int pareto_points = 0;
  std::uint64_t seed = 0;
  int threads = 0;
  std::string out_csv, out_json, trace_csv;
};

Objective parse_objective(const std::string& kind, double w_sys,
                          double w_app) {
  Objective obj;
  obj.w_sys = w_sys;
  obj.w_app = w_app;
  if (kind == "weighted-fidelity")
    obj.kind = ObjectiveKind::kWeightedFidelity;
  else if (kind == "max-fidelity")
    obj.kind = ObjectiveKind::kMaxFidelity;
  else if (kind == "slack")
    obj.kind = ObjectiveKind::kSlack;
  else
    throw ConfigError("objective", "expected weighted-fidelity, max-fidelity "
                                   "or slack, got '" + kind + "'");
  return obj;
}

int run_optimize(const OptimizeArgs& a, const CLI::App& sub) {
  const auto start = Clock::now();
  const Json cfg = a.config_path.empty() ? Json::object()
                                         : load_config_file(a.config_path);
  const Complex alpha =
      resolve_amplitude(sub.count("--alpha") > 0, a.alpha, cfg, "alpha",
                        Complex(1.0 / std::sqrt(2.0)));
  const Complex beta =
      resolve_amplitude(sub.count("--beta") > 0, a.beta, cfg, "beta",
                        Complex(1.0 / std::sqrt(2.0)));
  const int n_spins = static_cast<int>(
      sub.count("--apparatus-spins") > 0
          ? a.apparatus_spins
          : cfg_long(cfg, "apparatus_spins", 1));
  const std::string scenario =
      sub.count("--scenario") > 0 ? a.scenario
                                  : cfg_string(cfg, "scenario", "spin-half");
  ResolvedProblem problem =
      resolve_problem(cfg, scenario, alpha, beta, n_spins);

  std::optional<DensityOperator> sigma =
      resolve_sigma(cfg, problem.charges.d_app());
  if (!sigma) sigma = to_density(plus_chain(problem.charges.d_app()));

  OptimizeOptions options;
  options.restarts = static_cast<int>(
      sub.count("--restarts") > 0 ? a.restarts
                                  : cfg_long(cfg, "restarts", 32));
  options.max_evaluations =
      sub.count("--max-evaluations") > 0
          ? a.max_evaluations
          : cfg_long(cfg, "max_evaluations", 5000);
  options.simplex_tol = sub.count("--simplex-tol") > 0
                            ? a.simplex_tol
                            : cfg_double(cfg, "simplex_tol", 1e-9);
  options.threads = resolve_threads(sub.count("--threads") > 0, a.threads, cfg);
  const std::string trace_csv = sub.count("--trace-csv") > 0
                                    ? a.trace_csv
                                    : cfg_string(cfg, "trace_csv", "");
  options.record_trace = !trace_csv.empty();
  const std::uint64_t seed = resolve_seed(sub.count("--seed") > 0, a.seed, cfg);

  const int pareto_points = static_cast<int>(
      sub.count("--pareto-points") > 0
          ? a.pareto_points
          : cfg_long(cfg, "pareto_points", 0));
  const std::string out_csv =
      sub.count("--out-csv") > 0 ? a.out_csv : cfg_string(cfg, "out_csv", "");
  const std::string out_json = sub.count("--out-json") > 0
                                   ? a.out_json
                                   : cfg_string(cfg, "out_json", "");

  if (pareto_points > 0) {
    const std::vector<ParetoPoint> points =
        pareto_scan(problem.charges, problem.psi0, problem.psi1, *sigma,
                    pareto_points, seed, options);
    double min_slack = points.front().slack;
    for (const ParetoPoint& p : points)
      min_slack = std::min(min_slack, p.slack);
    if (!out_csv.empty())
      write_csv_file(out_csv,
                     [&](std::ostream& o) { write_pareto_csv(o, points); });
    if (!out_json.empty()) {
      JsonObject summary;
      summary.add_number("min_slack", min_slack);
      summary.add_int("n_points", static_cast<long>(points.size()));
      summary.add_uint("seed", seed);
      write_text_file(out_json, summary.dump() + "\n");
    }
    std::cout << "pareto_points " << points.size() << "\n"
              << "min_slack " << format_double(min_slack) << "\n"
              << "wall_time_seconds "
              << format_double(elapsed_seconds(start)) << "\n";
    return min_slack >= -1e-9 ? 0 : 1;
  }

  const Objective objective = parse_objective(
      sub.count("--objective") > 0 ? a.objective
                                   : cfg_string(cfg, "objective", "slack"),
      sub.count("--w-sys") > 0 ? a.w_sys : cfg_double(cfg, "w_sys", 1.0),
      sub.count("--w-app") > 0 ? a.w_app : cfg_double(cfg, "w_app", 1.0));
  const OptimizationResult result =
      optimize_unitary(problem.charges, problem.psi0, problem.psi1, *sigma,
                       objective, options, seed);

  if (!out_json.empty()) {
    JsonObject doc;
    std::vector<double> params(result.best_params.data(),
                               result.best_params.data() +
                                   result.best_params.size());
    doc.add_numbers("best_params", params);
    doc.add_object("best_report", report_to_json(result.best_report));
    doc.add_int("evaluations", result.evaluations);
    doc.add_number("objective", result.objective);
    doc.add_int("restarts_used", result.restarts_used);
    doc.add_uint("seed", seed);
    write_text_file(out_json, doc.dump() + "\n");
  }
  if (!trace_csv.empty())
    write_csv_file(trace_csv, [&](std::ostream& o) {
      write_trace_csv(o, result.trace);
    });

  std::cout << "objective " << format_double(result.objective) << "\n"
            << "evaluations " << result.evaluations << "\n"
            << "slack " << format_double(result.best_report.slack) << "\n"
            << "f_sys " << format_double(result.best_report.f_sys) << "\n"
            << "f_app " << format_double(result.best_report.f_app) << "\n"
            << "wall_time_seconds " << format_double(elapsed_seconds(start))
            << "\n";
  return result.best_report.slack >= -1e-9 ? 0 : 1;
}

struct ScalingArgs {
  std::string config_path;
  std::string alpha, beta;
  int max_spins = 0;
  int restarts = 8;
  long max_evaluations = 2000;
  std::uint64_t seed = 0;
  int threads = 0;
  std::string out_csv;
};

int run_scaling(const ScalingArgs& a, const CLI::App& sub) {
  const auto start = Clock::now();
  const Json cfg = a.config_path.empty() ? Json::object()
                                         : load_config_file(a.config_path);
  const Complex alpha =
      resolve_amplitude(sub.count("--alpha") > 0, a.alpha, cfg, "alpha",
                        Complex(1.0 / std::sqrt(2.0)));
  const Complex beta =
      resolve_amplitude(sub.count("--beta") > 0, a.beta, cfg, "beta",
                        Complex(1.0 / std::sqrt(2.0)));
  const int max_spins = static_cast<int>(
      sub.count("--max-spins") > 0 ? a.max_spins
                                   : cfg_long(cfg, "max_spins", 0));
  if (max_spins < 1 || max_spins > 6)
    throw ConfigError("max_spins", "must be between 1 and 6");

  OptimizeOptions options;
  options.restarts = static_cast<int>(
      sub.count("--restarts") > 0 ? a.restarts : cfg_long(cfg, "restarts", 8));
  options.max_evaluations =
      sub.count("--max-evaluations") > 0
          ? a.max_evaluations
          : cfg_long(cfg, "max_evaluations", 2000);
  options.threads = resolve_threads(sub.count("--threads") > 0, a.threads, cfg);
  const std::uint64_t seed = resolve_seed(sub.count("--seed") > 0, a.seed, cfg);

  const std::vector<ScalingRow> rows =
      apparatus_scaling_study(alpha, beta, max_spins, options, seed);

  const std::string out_csv =
      sub.count("--out-csv") > 0 ? a.out_csv : cfg_string(cfg, "out_csv", "");
  if (!out_csv.empty())
    write_csv_file(out_csv,
                   [&](std::ostream& o) { write_scaling_csv(o, rows); });

  for (const ScalingRow& r : rows)
    std::cout << "n " << r.n << " bound_floor "
              << format_double(r.bound_floor) << " best_f_sys "
              << format_double(r.best_f_sys) << " best_f_app "
              << format_double(r.best_f_app) << "\n";
  std::cout << "wall_time_seconds " << format_double(elapsed_seconds(start))
            << "\n";

  for (const ScalingRow& r : rows)
    if (r.best_f_sys < r.bound_floor - r.best_f_app / r.n - 1e-9) return 1;
  return 0;
}

struct TripartiteArgs {
  std::string config_path;
  std::string alpha, beta;
  int apparatus_spins = 1;
  int environment_spins = 1;
  long trials = 0;
  std::uint64_t seed = 0;
  double tolerance = 1e-9;
  std::string sigma_mode, unitary_mode;
  int threads = 0;
  std::string out_csv, out_json;
};

int run_tripartite(const TripartiteArgs& a, const CLI::App& sub) {
  const auto start = Clock::now();
  const Json cfg = a.config_path.empty() ? Json::object()
                                         : load_config_file(a.config_path);
  const Complex alpha =
      resolve_amplitude(sub.count("--alpha") > 0, a.alpha, cfg, "alpha",
                        Complex(1.0 / std::sqrt(2.0)));
  const Complex beta =
      resolve_amplitude(sub.count("--beta") > 0, a.beta, cfg, "beta",
                        Complex(1.0 / std::sqrt(2.0)));

  ComplexMatrix l_sys, l_app, l_env;
  PureState psi0(ComplexVector::Unit(2, 0), {2});
  PureState psi1(ComplexVector::Unit(2, 1), {2});
  if (cfg.contains("l_env") || cfg.contains("l_sys")) {
    for (const char* field : {"l_sys", "l_app", "l_env", "psi0", "psi1"})
      if (!cfg.contains(field))
        throw ConfigError(field,
                          "required for an explicit tripartite problem");
    l_sys = observable_from_json(cfg["l_sys"], "l_sys");
    l_app = observable_from_json(cfg["l_app"], "l_app");
    l_env = observable_from_json(cfg["l_env"], "l_env");
    ComplexVector v0 = state_from_json(cfg["psi0"], "psi0");
    ComplexVector v1 = state_from_json(cfg["psi1"], "psi1");
    if (v0.size() != l_sys.rows() || v1.size() != l_sys.rows())
      throw ConfigError("psi0", "state dimension does not match l_sys");
    psi0 = PureState(std::move(v0), {l_sys.rows()});
    psi1 = PureState(std::move(v1), {l_sys.rows()});
  } else {
    const int n_app = static_cast<int>(
        sub.count("--apparatus-spins") > 0
            ? a.apparatus_spins
            : cfg_long(cfg, "apparatus_spins", 1));
    const int n_env = static_cast<int>(
        sub.count("--environment-spins") > 0
            ? a.environment_spins
            : cfg_long(cfg, "environment_spins", 1));
    SpinScenarioParts parts = build_spin_scenario(
        SpinHalfScenario{alpha, beta, n_app, n_env});
    l_sys = half_spin_z();
    l_app = spin_z(n_app);
    l_env = spin_z(n_env);
    psi0 = std::move(parts.psi0);
    psi1 = std::move(parts.psi1);
  }

  SweepOptions options;
  options.n_trials = sub.count("--trials") > 0 ? a.trials
                                               : cfg_long(cfg, "trials", 0);
  if (options.n_trials < 1) throw ConfigError("trials", "must be positive");
  options.seed = resolve_seed(sub.count("--seed") > 0, a.seed, cfg);
  options.tol = sub.count("--tolerance") > 0
                    ? a.tolerance
                    : cfg_double(cfg, "tolerance", 1e-9);
  options.sigma_mode = parse_sigma_mode(
      sub.count("--sigma-mode") > 0
          ? a.sigma_mode
          : cfg_string(cfg, "sigma_mode", "pure-random"));
  options.unitary_mode = parse_unitary_mode(
      sub.count("--unitary-mode") > 0
          ? a.unitary_mode
          : cfg_string(cfg, "unitary_mode", "conserving-block"));
  options.threads = resolve_threads(sub.count("--threads") > 0, a.threads, cfg);
  if (cfg.contains("sigma")) {
    const ComplexMatrix m = matrix_from_json(cfg["sigma"], "sigma");
    if (m.rows() != l_app.rows() * l_env.rows())
      throw ConfigError("sigma", "dimension does not match apparatus ⊗ "
                                 "environment");
    options.fixed_sigma = DensityOperator(m, {l_app.rows(), l_env.rows()});
  }
  if (options.sigma_mode == SigmaMode::kFixed && !options.fixed_sigma)
    throw ConfigError("sigma", "required when sigma_mode is fixed");

  const std::vector<TripartiteReport> reports =
      tripartite_sweep(l_sys, l_app, l_env, psi0, psi1, options);
  const ViolationCounts counts = count_violations(reports, options.tol);

  const std::string out_csv =
      sub.count("--out-csv") > 0 ? a.out_csv : cfg_string(cfg, "out_csv", "");
  const std::string out_json = sub.count("--out-json") > 0
                                   ? a.out_json
                                   : cfg_string(cfg, "out_json", "");
  if (!out_csv.empty())
    write_csv_file(out_csv,
                   [&](std::ostream& o) { write_tripartite_csv(o, reports); });
  if (!out_json.empty()) {
    JsonObject summary;
    summary.add_number("min_slack", counts.min_slack);
    summary.add_int("n_trials", counts.n_trials);
    summary.add_int("n_violations", counts.n_violations);
    summary.add_int("n_violations_nonconserving",
                    counts.n_violations_nonconserving);
    summary.add_uint("seed", options.seed);
    summary.add_number("tolerance", options.tol);
    write_text_file(out_json, summary.dump() + "\n");
  }

  std::cout << "trials " << counts.n_trials << "\n"
            << "min_slack " << format_double(counts.min_slack) << "\n"
            << "violations " << counts.n_violations << "\n"
            << "violations_nonconserving "
            << counts.n_violations_nonconserving << "\n"
            << "wall_time_seconds " << format_double(elapsed_seconds(start))
            << "\n";
  return counts.n_violations == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical toolkit for the measurement distinguishability "
               "trade-off under an additive conservation law"};
  app.require_subcommand(1);

  VerifyArgs va;
  CLI::App* verify = app.add_subcommand(
      "verify", "Monte Carlo sweep of the trade-off inequality");
  verify->add_option("--config", va.config_path, "JSON config file");
  verify->add_option("--scenario", va.scenario, "Problem preset (spin-half)");
  verify->add_option("--alpha", va.alpha, "Amplitude of |1> ('re' or 're,im')");
  verify->add_option("--beta", va.beta, "Amplitude of |-1>");
  verify->add_option("--apparatus-spins", va.apparatus_spins,
                     "Apparatus size for the spin-half preset");
  verify->add_option("--trials", va.trials, "Number of random schemes");
  verify->add_option("--seed", va.seed, "RNG seed");
  verify->add_option("--tolerance", va.tolerance, "Slack tolerance");
  verify->add_option("--sigma-mode", va.sigma_mode,
                     "pure-random | mixed-random | fixed");
  verify->add_option("--unitary-mode", va.unitary_mode,
                     "conserving-block | haar-full");
  verify->add_option("--threads", va.threads, "Worker threads (0 = auto)");
  verify->add_option("--out-csv", va.out_csv, "Per-trial report CSV");
  verify->add_option("--out-json", va.out_json, "Summary JSON");

  ExampleArgs ea;
  CLI::App* example = app.add_subcommand(
      "example", "Evaluate the saturating reflection interaction");
  example->add_option("--config", ea.config_path, "JSON config file");
  example->add_option("--alpha", ea.alpha, "Amplitude of |1>");
  example->add_option("--beta", ea.beta, "Amplitude of |-1>");
  example->add_option("--out-json", ea.out_json, "Report JSON");

  OptimizeArgs oa;
  CLI::App* optimize = app.add_subcommand(
      "optimize", "Search conserving unitaries / scan the frontier");
  optimize->add_option("--config", oa.config_path, "JSON config file");
  optimize->add_option("--scenario", oa.scenario, "Problem preset");
  optimize->add_option("--alpha", oa.alpha, "Amplitude of |1>");
  optimize->add_option("--beta", oa.beta, "Amplitude of |-1>");
  optimize->add_option("--apparatus-spins", oa.apparatus_spins,
                       "Apparatus size for the spin-half preset");
  optimize->add_option("--objective", oa.objective,
                       "weighted-fidelity | max-fidelity | slack");
  optimize->add_option("--w-sys", oa.w_sys, "System fidelity weight");
  optimize->add_option("--w-app", oa.w_app, "Apparatus fidelity weight");
  optimize->add_option("--restarts", oa.restarts, "Local search restarts");
  optimize->add_option("--max-evaluations", oa.max_evaluations,
                       "Objective evaluation budget per restart");
  optimize->add_option("--simplex-tol", oa.simplex_tol,
                       "Simplex convergence tolerance");
  optimize->add_option("--pareto-points", oa.pareto_points,
                       "Frontier scan size (0 = single optimization)");
  optimize->add_option("--seed", oa.seed, "RNG seed");
  optimize->add_option("--threads", oa.threads, "Worker threads (0 = auto)");
  optimize->add_option("--out-csv", oa.out_csv, "Frontier CSV (pareto mode)");
  optimize->add_option("--out-json", oa.out_json, "Result JSON");
  optimize->add_option("--trace-csv", oa.trace_csv, "Optimization trace CSV");

  ScalingArgs sa;
  CLI::App* scaling = app.add_subcommand(
      "scaling", "Apparatus-size scaling study");
  scaling->add_option("--config", sa.config_path, "JSON config file");
  scaling->add_option("--alpha", sa.alpha, "Amplitude of |1>");
  scaling->add_option("--beta", sa.beta, "Amplitude of |-1>");
  scaling->add_option("--max-spins", sa.max_spins, "Largest apparatus (<= 6)");
  scaling->add_option("--restarts", sa.restarts, "Local search restarts");
  scaling->add_option("--max-evaluations", sa.max_evaluations,
                      "Objective evaluation budget per restart");
  scaling->add_option("--seed", sa.seed, "RNG seed");
  scaling->add_option("--threads", sa.threads, "Worker threads (0 = auto)");
  scaling->add_option("--out-csv", sa.out_csv, "Study CSV");

  TripartiteArgs ta;
  CLI::App* tripartite = app.add_subcommand(
      "tripartite", "Pointer/environment split sweep");
  tripartite->add_option("--config", ta.config_path, "JSON config file");
  tripartite->add_option("--alpha", ta.alpha, "Amplitude of |1>");
  tripartite->add_option("--beta", ta.beta, "Amplitude of |-1>");
  tripartite->add_option("--apparatus-spins", ta.apparatus_spins,
                         "Pointer size for the spin-half preset");
  tripartite->add_option("--environment-spins", ta.environment_spins,
                         "Environment size for the spin-half preset");
  tripartite->add_option("--trials", ta.trials, "Number of random schemes");
  tripartite->add_option("--seed", ta.seed, "RNG seed");
  tripartite->add_option("--tolerance", ta.tolerance, "Slack tolerance");
  tripartite->add_option("--sigma-mode", ta.sigma_mode,
                         "pure-random | mixed-random | fixed");
  tripartite->add_option("--unitary-mode", ta.unitary_mode,
                         "conserving-block | haar-full");
  tripartite->add_option("--threads", ta.threads, "Worker threads (0 = auto)");
  tripartite->add_option("--out-csv", ta.out_csv, "Per-trial report CSV");
  tripartite->add_option("--out-json", ta.out_json, "Summary JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (verify->parsed()) return run_verify(va, *verify);
    if (example->parsed()) return run_example(ea, *example);
    if (optimize->parsed()) return run_optimize(oa, *optimize);
    if (scaling->parsed()) return run_scaling(sa, *scaling);
    if (tripartite->parsed()) return run_tripartite(ta, *tripartite);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
