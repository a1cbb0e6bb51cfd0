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

#ifndef WAYBOUND_SCALING_HPP
#define WAYBOUND_SCALING_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "optimize.hpp"
#include "parallel.hpp"
#include "scenarios.hpp"

namespace waybound {

struct ScalingRow {
  int n = 0;                 // apparatus spin count
  double norm_l_app = 0.0;   // n / 2
  double bound_floor = 0.0;  // 2|alpha·beta| / n, the minimum f_sys at f_app = 0
  double best_f_sys = 0.0;
  double best_f_app = 0.0;
};

/// How the distinguishability floor decays with apparatus size: for each
/// n = 1..max_spins, searches for the smallest system fidelity subject to a
/// vanishing apparatus fidelity (penalty formulation, minimize
/// f_sys + 1e6 · f_app). The apparatus starts in |+>^n so the n = 1 row can
/// reach the known equality point exactly. Rows run concurrently and are
/// reported in order of n.
inline std::vector<ScalingRow> apparatus_scaling_study(
    Complex alpha, Complex beta, int max_spins, const OptimizeOptions& options,
    std::uint64_t seed) {
  if (max_spins < 1)
    throw std::invalid_argument("scaling study: max_spins must be positive");
  if (max_spins > 6)
    throw std::invalid_argument("scaling study: apparatus larger than 6 spins");

  std::vector<ScalingRow> rows(static_cast<std::size_t>(max_spins));
  OptimizeOptions inner = options;
  inner.threads = 1;
  inner.record_trace = false;
  parallel_for(max_spins, options.threads, [&](long i) {
    const int n = static_cast<int>(i) + 1;
    const SpinScenarioParts parts =
        build_spin_scenario(SpinHalfScenario{alpha, beta, n, 0});
    const Index d_app = Index{1} << n;
    ComplexVector plus_n =
        ComplexVector::Constant(d_app, Complex(1.0 / std::sqrt(double(d_app))));
    const DensityOperator sigma = to_density(PureState(std::move(plus_n), {d_app}));

    const Objective penalty{ObjectiveKind::kWeightedFidelity, 1.0, 1e6};
    const OptimizationResult r = optimize_unitary(
        parts.charges, parts.psi0, parts.psi1, sigma, penalty, inner,
        derive_seed(seed, static_cast<std::uint64_t>(n), 5));

    ScalingRow& row = rows[static_cast<std::size_t>(i)];
    row.n = n;
    row.norm_l_app = 0.5 * n;
    row.bound_floor = 2.0 * std::abs(alpha * beta) / n;
    row.best_f_sys = r.best_report.f_sys;
    row.best_f_app = r.best_report.f_app;
  });
  return rows;
}

}  // namespace waybound

#endif  // WAYBOUND_SCALING_HPP
