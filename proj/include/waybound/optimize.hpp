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

#ifndef WAYBOUND_OPTIMIZE_HPP
#define WAYBOUND_OPTIMIZE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "conservation.hpp"
#include "linops.hpp"
#include "parallel.hpp"
#include "rng.hpp"
#include "scenarios.hpp"
#include "states.hpp"
#include "way.hpp"

namespace waybound {

enum class ObjectiveKind { kWeightedFidelity, kMaxFidelity, kSlack };

/// What the search minimizes. Weighted fidelity pushes both reduced-state
/// fidelities down with the given weights; max-fidelity minimizes the worse
/// of the two; slack drives the scheme toward the equality case.
struct Objective {
  ObjectiveKind kind = ObjectiveKind::kWeightedFidelity;
  double w_sys = 1.0;
  double w_app = 1.0;
};

inline void validate(const Objective& obj) {
  if (obj.kind == ObjectiveKind::kWeightedFidelity) {
    if (obj.w_sys < 0.0 || obj.w_app < 0.0)
      throw std::invalid_argument("objective: weights must be nonnegative");
    if (obj.w_sys + obj.w_app <= 0.0)
      throw std::invalid_argument("objective: weights must not both vanish");
  }
}

inline double objective_value(const Objective& obj, const TradeoffReport& r) {
  switch (obj.kind) {
    case ObjectiveKind::kWeightedFidelity:
      return obj.w_sys * r.f_sys + obj.w_app * r.f_app;
    case ObjectiveKind::kMaxFidelity:
      return std::max(r.f_sys, r.f_app);
    case ObjectiveKind::kSlack:
      return r.slack;
  }
  throw std::logic_error("objective: unknown kind");
}

struct TraceEntry {
  int restart = 0;
  long evaluation = 0;
  double objective = 0.0;
};

struct OptimizeOptions {
  int restarts = 32;
  long max_evaluations = 5000;  // per restart
  double simplex_tol = 1e-9;
  int threads = 1;
  bool record_trace = false;
};

struct OptimizationResult {
  RealVector best_params;
  TradeoffReport best_report;
  double objective = 0.0;
  int restarts_used = 0;
  long evaluations = 0;  // summed over restarts
  std::vector<TraceEntry> trace;
};

namespace detail {

struct SimplexOutcome {
  RealVector x;
  double value = 0.0;
  long evaluations = 0;
};

/// Nelder-Mead downhill simplex with standard coefficients (reflect 1,
/// expand 2, contract 1/2, shrink 1/2). Stops when the simplex diameter in
/// the max norm falls below `tol` or the evaluation budget is exhausted.
/// `on_improve` fires whenever the best value so far drops.
inline SimplexOutcome nelder_mead(
    const std::function<double(const RealVector&)>& f, const RealVector& x0,
    double initial_step, long max_evaluations, double tol,
    const std::function<void(long, double)>& on_improve) {
  const Index n = x0.size();
  SimplexOutcome out;
  double best_seen = std::numeric_limits<double>::infinity();
  auto eval = [&](const RealVector& x) {
    ++out.evaluations;
    const double v = f(x);
    if (v < best_seen) {
      best_seen = v;
      if (on_improve) on_improve(out.evaluations, v);
    }
    return v;
  };

  std::vector<RealVector> xs;
  std::vector<double> fs;
  xs.reserve(static_cast<std::size_t>(n) + 1);
  xs.push_back(x0);
  fs.push_back(eval(x0));
  for (Index i = 0; i < n && out.evaluations < max_evaluations; ++i) {
    RealVector xi = x0;
    xi(i) += initial_step;
    xs.push_back(std::move(xi));
    fs.push_back(eval(xs.back()));
  }

  const std::size_t m = xs.size();  // n + 1 when the budget allowed it
  auto order = [&] {
    std::vector<std::size_t> idx(m);
    for (std::size_t i = 0; i < m; ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
    std::vector<RealVector> nxs(m);
    std::vector<double> nfs(m);
    for (std::size_t i = 0; i < m; ++i) {
      nxs[i] = std::move(xs[idx[i]]);
      nfs[i] = fs[idx[i]];
    }
    xs = std::move(nxs);
    fs = std::move(nfs);
  };

  const auto budget_left = [&] { return out.evaluations < max_evaluations; };
  while (m == static_cast<std::size_t>(n) + 1 && budget_left()) {
    order();
    double diameter = 0.0;
    for (std::size_t i = 1; i < m; ++i)
      diameter = std::max(diameter, (xs[i] - xs[0]).cwiseAbs().maxCoeff());
    if (diameter < tol) break;

    RealVector centroid = RealVector::Zero(n);
    for (std::size_t i = 0; i + 1 < m; ++i) centroid += xs[i];
    centroid /= static_cast<double>(m - 1);

    const RealVector reflected = centroid + (centroid - xs[m - 1]);
    const double fr = eval(reflected);
    if (fr < fs[0]) {
      if (!budget_left()) {
        xs[m - 1] = reflected;
        fs[m - 1] = fr;
        break;
      }
      const RealVector expanded = centroid + 2.0 * (centroid - xs[m - 1]);
      const double fe = eval(expanded);
      if (fe < fr) {
        xs[m - 1] = expanded;
        fs[m - 1] = fe;
      } else {
        xs[m - 1] = reflected;
        fs[m - 1] = fr;
      }
    } else if (fr < fs[m - 2]) {
      xs[m - 1] = reflected;
      fs[m - 1] = fr;
    } else {
      if (!budget_left()) break;
      const bool outside = fr < fs[m - 1];
      const RealVector base = outside ? reflected : xs[m - 1];
      const RealVector contracted = centroid + 0.5 * (base - centroid);
      const double fc = eval(contracted);
      if (fc < (outside ? fr : fs[m - 1])) {
        xs[m - 1] = contracted;
        fs[m - 1] = fc;
      } else {
        // Shrink all vertices toward the best one.
        for (std::size_t i = 1; i < m && budget_left(); ++i) {
          xs[i] = xs[0] + 0.5 * (xs[i] - xs[0]);
          fs[i] = eval(xs[i]);
        }
      }
    }
  }
  order();
  out.x = xs[0];
  out.value = fs[0];
  return out;
}

/// Generator coordinates of the known equality construction, offered as a
/// restart seed when the problem has the single-spin shape (sector layout
/// 1-2-1 with a zero middle charge and a fully supported psi1).
inline std::optional<RealVector> equality_seed(const ConservedPair& cp,
                                               const PureState& psi1) {
  if (cp.d_sys() != 2 || cp.d_app() != 2 || cp.sectors.size() != 3)
    return std::nullopt;
  if (cp.sectors[0].dim() != 1 || cp.sectors[1].dim() != 2 ||
      cp.sectors[2].dim() != 1)
    return std::nullopt;
  const Complex a = psi1.amplitudes()(0);
  const Complex b = psi1.amplitudes()(1);
  if (std::abs(a) < 1e-12 || std::abs(b) < 1e-12) return std::nullopt;
  try {
    return ohira_pearle_generator_params(cp, a, b);
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
}

}  // namespace detail

/// Minimizes the objective over conserving unitaries, parameterized through
/// exp_generator so every evaluated point respects the conservation law by
/// construction. Runs `options.restarts` independent simplex descents from
/// the zero vector, the equality-construction seed when the shape admits
/// one, and uniform draws in [-pi, pi]; ties between restarts break toward
/// the lowest restart index, so the result is deterministic for a given
/// seed and independent of the thread count.
inline OptimizationResult optimize_unitary(const ConservedPair& cp,
                                           const PureState& psi0,
                                           const PureState& psi1,
                                           const DensityOperator& sigma,
                                           const Objective& objective,
                                           const OptimizeOptions& options,
                                           std::uint64_t seed) {
  validate(objective);
  if (options.restarts < 1)
    throw std::invalid_argument("optimize: need at least one restart");
  if (options.max_evaluations < 2)
    throw std::invalid_argument("optimize: evaluation budget too small");

  const Index n_params = generator_param_count(cp);
  auto make_report = [&](const RealVector& p) {
    return evaluate_tradeoff(MeasurementScheme{
        psi0, psi1, sigma, assemble(exp_generator(cp, p), cp), cp});
  };
  // Fail fast on malformed scheme components before spending the budget.
  make_report(RealVector::Zero(n_params));

  const std::function<double(const RealVector&)> f =
      [&](const RealVector& p) { return objective_value(objective, make_report(p)); };
  const std::optional<RealVector> known_seed = detail::equality_seed(cp, psi1);

  struct Local {
    detail::SimplexOutcome outcome;
    std::vector<TraceEntry> trace;
  };
  std::vector<Local> locals(static_cast<std::size_t>(options.restarts));
  parallel_for(options.restarts, options.threads, [&](long k) {
    RealVector x0 = RealVector::Zero(n_params);
    if (k == 1 && known_seed) {
      x0 = *known_seed;
    } else if (k > 0) {
      CounterRng rng(derive_seed(seed, static_cast<std::uint64_t>(k), 3), 0);
      for (Index i = 0; i < n_params; ++i) x0(i) = rng.uniform(-M_PI, M_PI);
    }
    Local& local = locals[static_cast<std::size_t>(k)];
    std::function<void(long, double)> on_improve;
    if (options.record_trace) {
      on_improve = [&local, k](long evaluation, double value) {
        local.trace.push_back(TraceEntry{static_cast<int>(k), evaluation, value});
      };
    }
    local.outcome = detail::nelder_mead(f, x0, 0.5, options.max_evaluations,
                                        options.simplex_tol, on_improve);
  });

  std::size_t best = 0;
  for (std::size_t k = 1; k < locals.size(); ++k)
    if (locals[k].outcome.value < locals[best].outcome.value) best = k;

  OptimizationResult result;
  result.best_params = locals[best].outcome.x;
  result.best_report = make_report(result.best_params);
  result.objective = objective_value(objective, result.best_report);
  result.restarts_used = options.restarts;
  for (const Local& l : locals) result.evaluations += l.outcome.evaluations;
  if (options.record_trace)
    for (Local& l : locals)
      result.trace.insert(result.trace.end(), l.trace.begin(), l.trace.end());
  return result;
}

struct ParetoPoint {
  double f_app = 0.0;
  double f_sys = 0.0;
  double weight_ratio = 0.0;  // w_app / w_sys used for this point
  double slack = 0.0;
};

/// Traces the empirical distinguishability frontier: for weight ratios
/// w_app/w_sys on a logarithmic grid over [1e-3, 1e3], minimizes the
/// weighted fidelity and records the achieved (f_app, f_sys) pair, sorted by
/// f_app. Points run concurrently; each takes a derived seed, so the scan is
/// reproducible and thread-count independent.
inline std::vector<ParetoPoint> pareto_scan(const ConservedPair& cp,
                                            const PureState& psi0,
                                            const PureState& psi1,
                                            const DensityOperator& sigma,
                                            int n_points, std::uint64_t seed,
                                            OptimizeOptions options = {}) {
  if (n_points < 2)
    throw std::invalid_argument("pareto_scan: need at least two points");
  std::vector<ParetoPoint> points(static_cast<std::size_t>(n_points));
  OptimizeOptions inner = options;
  inner.threads = 1;
  inner.record_trace = false;
  parallel_for(n_points, options.threads, [&](long i) {
    const double exponent =
        -3.0 + 6.0 * static_cast<double>(i) / (n_points - 1);
    const double ratio = std::pow(10.0, exponent);
    Objective obj{ObjectiveKind::kWeightedFidelity, 1.0 / (1.0 + ratio),
                  ratio / (1.0 + ratio)};
    const OptimizationResult r =
        optimize_unitary(cp, psi0, psi1, sigma, obj, inner,
                         derive_seed(seed, static_cast<std::uint64_t>(i), 4));
    points[static_cast<std::size_t>(i)] =
        ParetoPoint{r.best_report.f_app, r.best_report.f_sys, ratio,
                    r.best_report.slack};
  });
  std::stable_sort(points.begin(), points.end(),
                   [](const ParetoPoint& a, const ParetoPoint& b) {
                     if (a.f_app != b.f_app) return a.f_app < b.f_app;
                     return a.f_sys < b.f_sys;
                   });
  return points;
}

}  // namespace waybound

#endif  // WAYBOUND_OPTIMIZE_HPP
