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

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "test_support.hpp"
#include "waybound/scenarios.hpp"
#include "waybound/way.hpp"

using namespace waybound;
using waybound::testing::matrix_near;

namespace {

/// Scheme for the qubit pair (0.6, 0.8) with an n-spin apparatus and a
/// conserving unitary drawn from the given seed.
MeasurementScheme spin_block_scheme(int n_spins, std::uint64_t seed,
                                    const DensityOperator& sigma) {
  SpinScenarioParts parts = build_spin_scenario(
      SpinHalfScenario{Complex(0.6), Complex(0.8), n_spins, 0});
  ComplexMatrix u =
      assemble(haar_random_block_unitary(parts.charges, seed), parts.charges);
  return MeasurementScheme{std::move(parts.psi0), std::move(parts.psi1), sigma,
                           std::move(u), std::move(parts.charges)};
}

DensityOperator pure_sigma(Index d, std::uint64_t seed) {
  CounterRng rng(seed, 0);
  return to_density(sample_pure_state({d}, rng));
}

DensityOperator mixed_sigma(Index d, std::uint64_t seed) {
  CounterRng rng(seed, 0);
  return sample_mixed_density({d}, rng);
}

}  // namespace

TEST_CASE("identity interaction leaves the apparatus ignorant") {
  SpinScenarioParts parts = build_spin_scenario(
      SpinHalfScenario{Complex(0.6), Complex(0.8), 1, 0});
  MeasurementScheme s{parts.psi0, parts.psi1, pure_sigma(2, 3), identity(4),
                      parts.charges};
  const TradeoffReport r = evaluate_tradeoff(s);
  CHECK(r.lhs == Catch::Approx(0.48).margin(1e-12));
  CHECK(r.f_sys == Catch::Approx(0.0).margin(1e-9));
  CHECK(r.f_app == Catch::Approx(1.0).margin(1e-12));
  CHECK(r.norm_l_sys == Catch::Approx(0.5).margin(1e-12));
  CHECK(r.norm_l_app == Catch::Approx(0.5).margin(1e-12));
  CHECK(r.rhs == Catch::Approx(0.5).margin(1e-9));
  CHECK(r.conservation_residual < 1e-12);
  CHECK(r.satisfied);
}

TEST_CASE("basis-copying interaction breaks the conservation law and the bound") {
  // U = |psi0><psi0| ⊗ 1 + |psi1><psi1| ⊗ X copies the psi-basis onto the
  // apparatus: both reduced pairs stay orthogonal, so the right-hand side
  // vanishes while the matrix element does not. Such a U cannot conserve the
  // additive charge, and the report must say so rather than raise.
  SpinScenarioParts parts = build_spin_scenario(
      SpinHalfScenario{Complex(0.6), Complex(0.8), 1, 0});
  ComplexMatrix x(2, 2);
  x << Complex(0.0), Complex(1.0), Complex(1.0), Complex(0.0);
  const ComplexMatrix u = tensor(parts.psi0.projector(), identity(2)) +
                          tensor(parts.psi1.projector(), x);
  ComplexVector omega = ComplexVector::Zero(2);
  omega(0) = 1.0;
  MeasurementScheme s{parts.psi0, parts.psi1,
                      to_density(PureState(omega, {2})), u, parts.charges};
  const TradeoffReport r = evaluate_tradeoff(s);
  CHECK(r.lhs == Catch::Approx(0.48).margin(1e-12));
  CHECK(r.f_sys == Catch::Approx(0.0).margin(1e-9));
  CHECK(r.f_app == Catch::Approx(0.0).margin(1e-9));
  CHECK(r.rhs == Catch::Approx(0.0).margin(1e-8));
  CHECK_FALSE(r.satisfied);
  CHECK(r.conservation_residual > 1e-2);
}

TEST_CASE("scheme validation rejects malformed input") {
  SpinScenarioParts parts = build_spin_scenario(
      SpinHalfScenario{Complex(0.6), Complex(0.8), 1, 0});
  const DensityOperator sigma = pure_sigma(2, 4);

  // Non-orthogonal pair.
  MeasurementScheme bad_pair{parts.psi1, parts.psi1, sigma, identity(4),
                             parts.charges};
  CHECK_THROWS_AS(evaluate_tradeoff(bad_pair), std::invalid_argument);

  // Non-unitary interaction.
  MeasurementScheme bad_u{parts.psi0, parts.psi1, sigma, 0.5 * identity(4),
                          parts.charges};
  CHECK_THROWS_AS(evaluate_tradeoff(bad_u), std::invalid_argument);

  // Apparatus state of the wrong dimension.
  MeasurementScheme bad_sigma{parts.psi0, parts.psi1, pure_sigma(3, 4),
                              identity(4), parts.charges};
  CHECK_THROWS_AS(evaluate_tradeoff(bad_sigma), std::invalid_argument);

  // Unitary on the wrong space.
  MeasurementScheme bad_dim{parts.psi0, parts.psi1, sigma, identity(6),
                            parts.charges};
  CHECK_THROWS_AS(evaluate_tradeoff(bad_dim), std::invalid_argument);
}

TEST_CASE("report fields are algebraically consistent") {
  const MeasurementScheme s = spin_block_scheme(2, 17, pure_sigma(4, 5));
  const TradeoffReport r = evaluate_tradeoff(s);
  CHECK(r.rhs == r.norm_l_app * r.f_sys + r.norm_l_sys * r.f_app);
  CHECK(r.slack == r.rhs - r.lhs);
  CHECK(r.satisfied == (r.slack >= -1e-9));
  CHECK(std::abs((r.rhs - r.slack) - r.lhs) < 1e-12);
}

TEST_CASE("conserving sweeps always satisfy the bound") {
  SpinScenarioParts parts = build_spin_scenario(
      SpinHalfScenario{Complex(0.6), Complex(0.8), 2, 0});
  for (SigmaMode mode : {SigmaMode::kPureRandom, SigmaMode::kMixedRandom}) {
    SweepOptions opt;
    opt.n_trials = 300;
    opt.seed = 99;
    opt.sigma_mode = mode;
    const std::vector<TradeoffReport> reports =
        sweep(parts.charges, parts.psi0, parts.psi1, opt);
    REQUIRE(reports.size() == 300);
    for (const TradeoffReport& r : reports) {
      CHECK(r.satisfied);
      CHECK(r.conservation_residual < 1e-10);
      CHECK(r.f_sys >= 0.0);
      CHECK(r.f_sys <= 1.0);
      CHECK(r.f_app >= 0.0);
      CHECK(r.f_app <= 1.0);
    }
  }
}

TEST_CASE("sweep results are deterministic and thread-count independent") {
  SpinScenarioParts parts = build_spin_scenario(
      SpinHalfScenario{Complex(0.6), Complex(0.8), 1, 0});
  SweepOptions opt;
  opt.n_trials = 64;
  opt.seed = 12345;
  opt.sigma_mode = SigmaMode::kFixed;
  opt.fixed_sigma = pure_sigma(2, 8);

  const auto a = sweep(parts.charges, parts.psi0, parts.psi1, opt);
  const auto b = sweep(parts.charges, parts.psi0, parts.psi1, opt);
  opt.threads = 4;
  const auto c = sweep(parts.charges, parts.psi0, parts.psi1, opt);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].slack == b[i].slack);
    CHECK(a[i].slack == c[i].slack);
    CHECK(a[i].f_sys == c[i].f_sys);
    CHECK(a[i].f_app == c[i].f_app);
  }

  opt.seed = 54321;
  const auto d = sweep(parts.charges, parts.psi0, parts.psi1, opt);
  CHECK(a[0].slack != d[0].slack);
}

TEST_CASE("minimum sweep slack approaches the equality point from above") {
  SpinScenarioParts parts = build_spin_scenario(
      SpinHalfScenario{Complex(0.6), Complex(0.8), 1, 0});
  SweepOptions opt;
  opt.n_trials = 1000;
  opt.seed = 7;
  opt.sigma_mode = SigmaMode::kPureRandom;
  const auto reports = sweep(parts.charges, parts.psi0, parts.psi1, opt);
  double min_slack = 1e30;
  for (const TradeoffReport& r : reports) min_slack = std::min(min_slack, r.slack);
  CHECK(min_slack >= -1e-9);
  CHECK(min_slack < 0.08);
}

TEST_CASE("unconstrained unitaries do violate the bound") {
  SpinScenarioParts parts = build_spin_scenario(
      SpinHalfScenario{Complex(0.6), Complex(0.8), 1, 0});
  SweepOptions opt;
  opt.n_trials = 100;
  opt.seed = 21;
  opt.unitary_mode = UnitaryMode::kHaarFull;
  const auto reports = sweep(parts.charges, parts.psi0, parts.psi1, opt);
  int violations = 0;
  for (const TradeoffReport& r : reports) {
    if (!r.satisfied) {
      ++violations;
      CHECK(r.conservation_residual > 1e-3);
    }
  }
  CHECK(violations > 0);
}

TEST_CASE("matrix-element conservation identity holds on purified schemes") {
  for (std::uint64_t seed : {101u, 102u, 103u}) {
    const MeasurementScheme pure_s = spin_block_scheme(1, seed, pure_sigma(2, seed));
    CHECK(eq2_residual(pure_s) < 1e-9);
    const MeasurementScheme mixed_s =
        spin_block_scheme(2, seed, mixed_sigma(4, seed));
    CHECK(eq2_residual(mixed_s) < 1e-9);
  }

  // A generic full-space unitary breaks the identity.
  SpinScenarioParts parts = build_spin_scenario(
      SpinHalfScenario{Complex(0.6), Complex(0.8), 1, 0});
  CounterRng rng(44, 0);
  MeasurementScheme generic{parts.psi0, parts.psi1, pure_sigma(2, 9),
                            haar_unitary(4, rng), parts.charges};
  CHECK(eq2_residual(generic) > 1e-3);
}

TEST_CASE("direct and purified evolution agree on mixed apparatus states") {
  // The evaluator evolves sigma directly. As a cross-check, purify sigma,
  // evolve the pure dilation with U ⊗ 1, and trace the ancilla; both routes
  // must give the same reduced fidelities.
  const MeasurementScheme s = spin_block_scheme(2, 55, mixed_sigma(4, 6));
  const TradeoffReport r = evaluate_tradeoff(s);

  const Index d_sys = 2, d_app = 4;
  const PureState omega = purify(s.sigma);
  const ComplexMatrix u_dil = tensor(s.u, identity(d_app));
  std::vector<ComplexMatrix> sys_red, app_red;
  for (const PureState* psi : {&s.psi0, &s.psi1}) {
    const ComplexVector big =
        u_dil * tensor(psi->amplitudes(), omega.amplitudes());
    const ComplexMatrix rho = big * big.adjoint();
    sys_red.push_back(partial_trace(rho, {d_sys, d_app, d_app}, {0}));
    app_red.push_back(partial_trace(rho, {d_sys, d_app, d_app}, {1}));
  }
  const double f_sys_pur =
      fidelity(DensityOperator::unchecked(sys_red[0], {d_sys}),
               DensityOperator::unchecked(sys_red[1], {d_sys}));
  const double f_app_pur =
      fidelity(DensityOperator::unchecked(app_red[0], {d_app}),
               DensityOperator::unchecked(app_red[1], {d_app}));
  CHECK(r.f_sys == Catch::Approx(f_sys_pur).margin(1e-9));
  CHECK(r.f_app == Catch::Approx(f_app_pur).margin(1e-9));
}

TEST_CASE("repeatability holds for the identity and fails for active schemes") {
  SpinScenarioParts parts = build_spin_scenario(
      SpinHalfScenario{Complex(0.6), Complex(0.8), 1, 0});
  MeasurementScheme idle{parts.psi0, parts.psi1, pure_sigma(2, 10), identity(4),
                         parts.charges};
  const RepeatabilityResult idle_r = check_repeatability(idle);
  CHECK(idle_r.repeatable);
  CHECK(idle_r.apparatus_overlap == Catch::Approx(1.0).margin(1e-10));

  // A repeatable conserving scheme with nonzero matrix element leaves the
  // apparatus unable to distinguish the two runs.
  const TradeoffReport idle_report = evaluate_tradeoff(idle);
  CHECK(idle_report.lhs > 0.0);
  CHECK(idle_report.conservation_residual < 1e-10);

  const RepeatabilityResult op_r =
      check_repeatability(ohira_pearle_scheme(Complex(0.6), Complex(0.8)));
  CHECK_FALSE(op_r.repeatable);

  MeasurementScheme mixed{parts.psi0, parts.psi1, mixed_sigma(2, 11),
                          identity(4), parts.charges};
  CHECK_THROWS_AS(check_repeatability(mixed), std::invalid_argument);
}

TEST_CASE("low apparatus distinguishability forces system disturbance") {
  // Whenever f_app <= eps and the matrix element is nonzero, the bound forces
  // f_sys >= (lhs - ||L_S|| eps) / ||L_A||.
  const TradeoffReport r =
      evaluate_tradeoff(ohira_pearle_scheme(Complex(0.6), Complex(0.8)));
  const double eps = std::max(r.f_app, 0.0);
  CHECK(r.lhs > 0.0);
  CHECK(r.f_sys >= (r.lhs - r.norm_l_sys * eps) / r.norm_l_app - 1e-9);
}

TEST_CASE("a trivial environment reduces the tripartite report to the bipartite one") {
  const MeasurementScheme s = spin_block_scheme(2, 77, mixed_sigma(4, 12));
  const TradeoffReport base = evaluate_tradeoff(s);

  TripartiteScheme t{s.psi0,
                     s.psi1,
                     DensityOperator::unchecked(s.sigma.matrix(), {4, 1}),
                     s.u,
                     s.charges.l_sys,
                     s.charges.l_app,
                     ComplexMatrix::Zero(1, 1)};
  const TripartiteReport r = evaluate_tripartite(t);
  CHECK(r.lhs == Catch::Approx(base.lhs).margin(1e-12));
  CHECK(r.f_sys == Catch::Approx(base.f_sys).margin(1e-10));
  CHECK(r.f_app == Catch::Approx(base.f_app).margin(1e-10));
  CHECK(r.f_ae == Catch::Approx(base.f_app).margin(1e-10));
  CHECK(r.norm_l_env == 0.0);
  CHECK(r.rhs_traced == Catch::Approx(base.rhs).margin(1e-10));
  CHECK(r.conservation_residual == Catch::Approx(base.conservation_residual).margin(1e-10));
  CHECK(r.monotone_ok);
  CHECK(r.satisfied == base.satisfied);
}

TEST_CASE("random conserving tripartite schemes satisfy both inequalities") {
  // Conservation of the three-term charge is arranged by block-sampling with
  // respect to the sectors of L_S against L_A ⊗ 1 + 1 ⊗ L_E.
  const ComplexMatrix l_half = half_spin_z();
  const ComplexMatrix l_ae =
      tensor(l_half, identity(2)) + tensor(identity(2), l_half);
  const ConservedPair cp3 = build_sectors(l_half, l_ae);
  SpinScenarioParts parts = build_spin_scenario(
      SpinHalfScenario{Complex(0.6), Complex(0.8), 1, 1});

  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const ComplexMatrix u = assemble(haar_random_block_unitary(cp3, seed), cp3);
    CounterRng rng(seed, 3);
    TripartiteScheme t{parts.psi0,
                       parts.psi1,
                       sample_mixed_density({2, 2}, rng),
                       u,
                       l_half,
                       l_half,
                       l_half};
    const TripartiteReport r = evaluate_tripartite(t);
    CHECK(r.satisfied);
    CHECK(r.monotone_ok);
    CHECK(r.f_ae <= r.f_app + 1e-9);
    CHECK(r.conservation_residual < 1e-10);
    CHECK(r.slack_joint <= r.slack_traced + 1e-12);
  }
}

TEST_CASE("tripartite validation rejects malformed input") {
  SpinScenarioParts parts = build_spin_scenario(
      SpinHalfScenario{Complex(0.6), Complex(0.8), 1, 1});
  const ComplexMatrix l_half = half_spin_z();
  CounterRng rng(5, 0);
  const DensityOperator sigma = sample_mixed_density({2, 2}, rng);

  ComplexMatrix bad_l(2, 2);
  bad_l << Complex(0.0), Complex(1.0), Complex(0.0), Complex(0.0);
  TripartiteScheme bad_env{parts.psi0, parts.psi1, sigma, identity(8),
                           l_half, l_half, bad_l};
  CHECK_THROWS_AS(evaluate_tripartite(bad_env), std::invalid_argument);

  TripartiteScheme bad_u{parts.psi0, parts.psi1, sigma, identity(4),
                         l_half, l_half, l_half};
  CHECK_THROWS_AS(evaluate_tripartite(bad_u), std::invalid_argument);

  TripartiteScheme bad_pair{parts.psi1, parts.psi1, sigma, identity(8),
                            l_half, l_half, l_half};
  CHECK_THROWS_AS(evaluate_tripartite(bad_pair), std::invalid_argument);
}
