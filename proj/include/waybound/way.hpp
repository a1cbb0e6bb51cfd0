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

#ifndef WAYBOUND_WAY_HPP
#define WAYBOUND_WAY_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "conservation.hpp"
#include "linops.hpp"
#include "parallel.hpp"
#include "rng.hpp"
#include "states.hpp"

namespace waybound {

/// One run of the distinguishability bound: the measured system pair
/// (psi0, psi1), the apparatus state sigma, the interaction unitary u on
/// system⊗apparatus, and the additive conserved quantity.
struct MeasurementScheme {
  PureState psi0;
  PureState psi1;
  DensityOperator sigma;
  ComplexMatrix u;
  ConservedPair charges;
};

/// All quantities entering the trade-off
///
///   |<psi0| L_S |psi1>|  <=  ||L_A|| F(rho0_S, rho1_S) + ||L_S|| F(rho0_A, rho1_A)
///
/// where rho_i are the post-interaction states of U (|psi_i><psi_i| ⊗ sigma) U†
/// reduced to the system (f_sys) or the apparatus (f_app).
struct TradeoffReport {
  double lhs = 0.0;
  double f_sys = 0.0;
  double f_app = 0.0;
  double norm_l_sys = 0.0;
  double norm_l_app = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  double conservation_residual = 0.0;
  bool satisfied = false;
};

inline void validate_scheme(const MeasurementScheme& s,
                            double ortho_tol = 1e-10,
                            double unitary_tol = 1e-9) {
  const Index d_sys = s.charges.d_sys();
  const Index d_app = s.charges.d_app();
  if (s.psi0.dim() != d_sys || s.psi1.dim() != d_sys)
    throw std::invalid_argument("scheme: system states do not match L_S");
  if (s.sigma.dim() != d_app)
    throw std::invalid_argument("scheme: apparatus state does not match L_A");
  if (s.u.rows() != d_sys * d_app || s.u.cols() != d_sys * d_app)
    throw std::invalid_argument("scheme: unitary does not act on system⊗apparatus");
  const double overlap =
      std::abs((s.psi0.amplitudes().adjoint() * s.psi1.amplitudes())(0));
  if (overlap > ortho_tol)
    throw std::invalid_argument("scheme: psi0 and psi1 must be orthogonal");
  if (!is_unitary(s.u, unitary_tol))
    throw std::invalid_argument("scheme: u is not unitary");
}

/// Evaluates every term of the bound for one scheme. `satisfied` means
/// slack = rhs - lhs >= -tol; for non-conserving u the bound can fail, which
/// is reported through a large conservation_residual together with negative
/// slack rather than as an error.
inline TradeoffReport evaluate_tradeoff(const MeasurementScheme& s,
                                        double tol = 1e-9) {
  validate_scheme(s);
  const Index d_sys = s.charges.d_sys();
  const Index d_app = s.charges.d_app();

  TradeoffReport r;
  r.lhs = std::abs(
      (s.psi0.amplitudes().adjoint() * s.charges.l_sys * s.psi1.amplitudes())(0));
  r.norm_l_sys = op_norm(s.charges.l_sys);
  r.norm_l_app = op_norm(s.charges.l_app);

  const std::vector<Index> dims = {d_sys, d_app};
  if (s.sigma.purity() >= 1.0 - 1e-12) {
    // Pure apparatus: evolve state vectors and take the reduction fidelities
    // from the coefficient-matrix overlap, which stays exact at the F = 0
    // corner probed by the saturating schemes.
    const ComplexVector omega = principal_eigenvector(s.sigma);
    const ComplexVector phi0 = s.u * tensor(s.psi0.amplitudes(), omega);
    const ComplexVector phi1 = s.u * tensor(s.psi1.amplitudes(), omega);
    r.f_sys = pure_reduced_fidelity(phi0, phi1, dims, {0});
    r.f_app = pure_reduced_fidelity(phi0, phi1, dims, {1});
  } else {
    std::vector<DensityOperator> sys_states, app_states;
    for (const PureState* psi : {&s.psi0, &s.psi1}) {
      const ComplexMatrix joint = tensor(psi->projector(), s.sigma.matrix());
      ComplexMatrix evolved = s.u * joint * s.u.adjoint();
      evolved = Complex(0.5) * (evolved + ComplexMatrix(evolved.adjoint()));
      sys_states.push_back(DensityOperator::unchecked(
          partial_trace(evolved, dims, {0}), {d_sys}));
      app_states.push_back(DensityOperator::unchecked(
          partial_trace(evolved, dims, {1}), {d_app}));
    }
    r.f_sys = fidelity(sys_states[0], sys_states[1]);
    r.f_app = fidelity(app_states[0], app_states[1]);
  }
  r.rhs = r.norm_l_app * r.f_sys + r.norm_l_sys * r.f_app;
  r.slack = r.rhs - r.lhs;
  r.conservation_residual = commutator_norm(s.u, s.charges.total);
  r.satisfied = r.slack >= -tol;
  return r;
}

enum class SigmaMode { kPureRandom, kMixedRandom, kFixed };
enum class UnitaryMode { kConservingBlock, kHaarFull };

struct SweepOptions {
  long n_trials = 1;
  std::uint64_t seed = 0;
  SigmaMode sigma_mode = SigmaMode::kPureRandom;
  std::optional<DensityOperator> fixed_sigma;
  UnitaryMode unitary_mode = UnitaryMode::kConservingBlock;
  double tol = 1e-9;
  int threads = 1;
};

/// Builds trial number `trial` of a sweep. Each trial derives its own RNG
/// streams from (seed, trial), so any subset of trials can be reproduced in
/// any order.
inline MeasurementScheme make_sweep_scheme(const ConservedPair& charges,
                                           const PureState& psi0,
                                           const PureState& psi1,
                                           long trial,
                                           const SweepOptions& options) {
  const std::uint64_t u_seed =
      derive_seed(options.seed, static_cast<std::uint64_t>(trial), 1);
  ComplexMatrix u;
  if (options.unitary_mode == UnitaryMode::kConservingBlock) {
    u = assemble(haar_random_block_unitary(charges, u_seed), charges);
  } else {
    CounterRng rng(u_seed, 0);
    u = haar_unitary(charges.d_total(), rng);
  }

  const std::uint64_t s_seed =
      derive_seed(options.seed, static_cast<std::uint64_t>(trial), 2);
  CounterRng srng(s_seed, 0);
  DensityOperator sigma = [&]() -> DensityOperator {
    switch (options.sigma_mode) {
      case SigmaMode::kPureRandom:
        return to_density(sample_pure_state({charges.d_app()}, srng));
      case SigmaMode::kMixedRandom:
        return sample_mixed_density({charges.d_app()}, srng);
      case SigmaMode::kFixed:
        if (!options.fixed_sigma)
          throw std::invalid_argument("sweep: fixed sigma mode without a state");
        return *options.fixed_sigma;
    }
    throw std::logic_error("sweep: unknown sigma mode");
  }();

  return MeasurementScheme{psi0, psi1, std::move(sigma), std::move(u), charges};
}

/// Evaluates n_trials independent random schemes. The result vector is
/// ordered by trial index and is independent of the thread count.
inline std::vector<TradeoffReport> sweep(const ConservedPair& charges,
                                         const PureState& psi0,
                                         const PureState& psi1,
                                         const SweepOptions& options) {
  if (options.n_trials < 1)
    throw std::invalid_argument("sweep: n_trials must be positive");
  std::vector<TradeoffReport> reports(static_cast<std::size_t>(options.n_trials));
  parallel_for(options.n_trials, options.threads, [&](long i) {
    reports[static_cast<std::size_t>(i)] = evaluate_tradeoff(
        make_sweep_scheme(charges, psi0, psi1, i, options), options.tol);
  });
  return reports;
}

struct RepeatabilityResult {
  bool repeatable = false;
  double apparatus_overlap = 0.0;
};

/// Checks whether the interaction measures {psi0, psi1} repeatably: after the
/// interaction the system must still be in the measured state (pure, overlap
/// 1 with psi_i within tol). Requires a pure apparatus state; the apparatus
/// overlap F(rho0_A, rho1_A) quantifies how well the pointer distinguishes.
inline RepeatabilityResult check_repeatability(const MeasurementScheme& s,
                                               double tol = 1e-9) {
  validate_scheme(s);
  if (s.sigma.purity() < 1.0 - 1e-9)
    throw std::invalid_argument("check_repeatability: sigma must be pure");
  const Index d_sys = s.charges.d_sys();
  const Index d_app = s.charges.d_app();
  const std::vector<Index> dims = {d_sys, d_app};

  RepeatabilityResult result;
  result.repeatable = true;
  const ComplexVector omega = principal_eigenvector(s.sigma);
  std::vector<ComplexVector> evolved;
  for (const PureState* psi : {&s.psi0, &s.psi1}) {
    const ComplexVector phi = s.u * tensor(psi->amplitudes(), omega);
    const ComplexMatrix joint = phi * phi.adjoint();
    const ComplexMatrix sys = partial_trace(joint, dims, {0});
    const double purity = (sys * sys).trace().real();
    const double overlap =
        (psi->amplitudes().adjoint() * sys * psi->amplitudes())(0).real();
    if (purity < 1.0 - tol || overlap < 1.0 - tol) result.repeatable = false;
    evolved.push_back(phi);
  }
  result.apparatus_overlap =
      pure_reduced_fidelity(evolved[0], evolved[1], dims, {1});
  return result;
}

/// Residual of the matrix-element conservation identity on the purified
/// scheme: with |Psi_i> = |psi_i> ⊗ |Omega>, Omega a purification of sigma,
/// and the interaction dilated by the identity on the purifying ancilla,
///
///   <Psi0| U† (L_S + L_A) U |Psi1> = <psi0| L_S |psi1>.
///
/// Holds exactly when [U, L_S + L_A] = 0; generically fails otherwise.
inline double eq2_residual(const MeasurementScheme& s) {
  validate_scheme(s);
  const Index d_app = s.charges.d_app();
  const PureState omega = purify(s.sigma);
  const ComplexVector big0 = tensor(s.psi0.amplitudes(), omega.amplitudes());
  const ComplexVector big1 = tensor(s.psi1.amplitudes(), omega.amplitudes());
  const ComplexMatrix u_dilated = tensor(s.u, identity(d_app));
  const ComplexMatrix l_dilated = tensor(s.charges.total, identity(d_app));
  const Complex evolved_element =
      (big0.adjoint() * u_dilated.adjoint() * l_dilated * u_dilated * big1)(0);
  const Complex bare_element =
      (s.psi0.amplitudes().adjoint() * s.charges.l_sys * s.psi1.amplitudes())(0);
  return std::abs(evolved_element - bare_element);
}

/// Three-party refinement: the apparatus is split into a pointer A and an
/// environment E, with charges L_S + L_A + L_E conserved. The bound holds in
/// two strengths, against the joint AE fidelity and against the reduced
/// pointer fidelity, with F(AE) <= F(A) by monotonicity.
struct TripartiteScheme {
  PureState psi0;
  PureState psi1;
  DensityOperator sigma;  // on A ⊗ E
  ComplexMatrix u;        // on S ⊗ A ⊗ E
  ComplexMatrix l_sys;
  ComplexMatrix l_app;
  ComplexMatrix l_env;
};

struct TripartiteReport {
  double lhs = 0.0;
  double f_sys = 0.0;
  double f_app = 0.0;
  double f_ae = 0.0;
  double norm_l_sys = 0.0;
  double norm_l_app = 0.0;
  double norm_l_env = 0.0;
  double rhs_joint = 0.0;    // (||L_A|| + ||L_E||) f_sys + ||L_S|| f_ae
  double slack_joint = 0.0;
  double rhs_traced = 0.0;   // (||L_A|| + ||L_E||) f_sys + ||L_S|| f_app
  double slack_traced = 0.0;
  double conservation_residual = 0.0;
  bool monotone_ok = false;  // f_ae <= f_app within tolerance
  bool satisfied = false;
};

inline TripartiteReport evaluate_tripartite(const TripartiteScheme& t,
                                            double tol = 1e-9) {
  const Index d_sys = t.l_sys.rows();
  const Index d_app = t.l_app.rows();
  const Index d_env = t.l_env.rows();
  if (!is_hermitian(t.l_sys) || !is_hermitian(t.l_app) || !is_hermitian(t.l_env))
    throw std::invalid_argument("tripartite: observables must be Hermitian");
  if (t.psi0.dim() != d_sys || t.psi1.dim() != d_sys)
    throw std::invalid_argument("tripartite: system states do not match L_S");
  if (t.sigma.dim() != d_app * d_env)
    throw std::invalid_argument("tripartite: sigma does not match L_A⊗L_E");
  const Index d = d_sys * d_app * d_env;
  if (t.u.rows() != d || t.u.cols() != d)
    throw std::invalid_argument("tripartite: unitary has the wrong dimension");
  const double overlap =
      std::abs((t.psi0.amplitudes().adjoint() * t.psi1.amplitudes())(0));
  if (overlap > 1e-10)
    throw std::invalid_argument("tripartite: psi0 and psi1 must be orthogonal");
  if (!is_unitary(t.u, 1e-9))
    throw std::invalid_argument("tripartite: u is not unitary");

  TripartiteReport r;
  r.lhs = std::abs(
      (t.psi0.amplitudes().adjoint() * t.l_sys * t.psi1.amplitudes())(0));
  r.norm_l_sys = op_norm(t.l_sys);
  r.norm_l_app = op_norm(t.l_app);
  r.norm_l_env = op_norm(t.l_env);

  const std::vector<Index> dims = {d_sys, d_app, d_env};
  if (t.sigma.purity() >= 1.0 - 1e-12) {
    const ComplexVector omega = principal_eigenvector(t.sigma);
    const ComplexVector phi0 = t.u * tensor(t.psi0.amplitudes(), omega);
    const ComplexVector phi1 = t.u * tensor(t.psi1.amplitudes(), omega);
    r.f_sys = pure_reduced_fidelity(phi0, phi1, dims, {0});
    r.f_app = pure_reduced_fidelity(phi0, phi1, dims, {1});
    r.f_ae = pure_reduced_fidelity(phi0, phi1, dims, {1, 2});
  } else {
    std::vector<DensityOperator> sys_states, app_states, ae_states;
    for (const PureState* psi : {&t.psi0, &t.psi1}) {
      const ComplexMatrix joint = tensor(psi->projector(), t.sigma.matrix());
      ComplexMatrix evolved = t.u * joint * t.u.adjoint();
      evolved = Complex(0.5) * (evolved + ComplexMatrix(evolved.adjoint()));
      sys_states.push_back(DensityOperator::unchecked(
          partial_trace(evolved, dims, {0}), {d_sys}));
      app_states.push_back(DensityOperator::unchecked(
          partial_trace(evolved, dims, {1}), {d_app}));
      ae_states.push_back(DensityOperator::unchecked(
          partial_trace(evolved, dims, {1, 2}), {d_app, d_env}));
    }
    r.f_sys = fidelity(sys_states[0], sys_states[1]);
    r.f_app = fidelity(app_states[0], app_states[1]);
    r.f_ae = fidelity(ae_states[0], ae_states[1]);
  }

  r.rhs_joint = (r.norm_l_app + r.norm_l_env) * r.f_sys + r.norm_l_sys * r.f_ae;
  r.slack_joint = r.rhs_joint - r.lhs;
  r.rhs_traced = (r.norm_l_app + r.norm_l_env) * r.f_sys + r.norm_l_sys * r.f_app;
  r.slack_traced = r.rhs_traced - r.lhs;

  const ComplexMatrix total =
      tensor(t.l_sys, identity(d_app * d_env)) +
      tensor(identity(d_sys), tensor(t.l_app, identity(d_env))) +
      tensor(identity(d_sys * d_app), t.l_env);
  r.conservation_residual = commutator_norm(t.u, total);
  r.monotone_ok = r.f_ae <= r.f_app + 1e-9;
  r.satisfied = r.slack_joint >= -tol && r.slack_traced >= -tol;
  return r;
}

/// Builds trial `trial` of a tripartite sweep. `charges` must hold the
/// sector decomposition of L_S against L_A ⊗ 1 + 1 ⊗ L_E, so the conserving
/// mode draws block unitaries of the full three-party symmetry. Seeds follow
/// the bipartite sweep convention: stream (seed, trial, 1) for the unitary
/// and (seed, trial, 2) for sigma.
inline TripartiteScheme make_tripartite_sweep_scheme(
    const ComplexMatrix& l_sys, const ComplexMatrix& l_app,
    const ComplexMatrix& l_env, const ConservedPair& charges,
    const PureState& psi0, const PureState& psi1, long trial,
    const SweepOptions& options) {
  const Index d_app = l_app.rows();
  const Index d_env = l_env.rows();
  if (charges.d_app() != d_app * d_env)
    throw std::invalid_argument("tripartite sweep: charges do not match A⊗E");

  const std::uint64_t u_seed =
      derive_seed(options.seed, static_cast<std::uint64_t>(trial), 1);
  ComplexMatrix u;
  if (options.unitary_mode == UnitaryMode::kConservingBlock) {
    u = assemble(haar_random_block_unitary(charges, u_seed), charges);
  } else {
    CounterRng rng(u_seed, 0);
    u = haar_unitary(charges.d_total(), rng);
  }

  const std::uint64_t s_seed =
      derive_seed(options.seed, static_cast<std::uint64_t>(trial), 2);
  CounterRng srng(s_seed, 0);
  DensityOperator sigma = [&]() -> DensityOperator {
    switch (options.sigma_mode) {
      case SigmaMode::kPureRandom:
        return to_density(sample_pure_state({d_app, d_env}, srng));
      case SigmaMode::kMixedRandom:
        return sample_mixed_density({d_app, d_env}, srng);
      case SigmaMode::kFixed:
        if (!options.fixed_sigma)
          throw std::invalid_argument(
              "tripartite sweep: fixed sigma mode without a state");
        return *options.fixed_sigma;
    }
    throw std::logic_error("tripartite sweep: unknown sigma mode");
  }();

  return TripartiteScheme{psi0,  psi1,  std::move(sigma), std::move(u),
                          l_sys, l_app, l_env};
}

/// Evaluates n_trials random tripartite schemes; ordering and values are
/// independent of the thread count.
inline std::vector<TripartiteReport> tripartite_sweep(
    const ComplexMatrix& l_sys, const ComplexMatrix& l_app,
    const ComplexMatrix& l_env, const PureState& psi0, const PureState& psi1,
    const SweepOptions& options) {
  if (options.n_trials < 1)
    throw std::invalid_argument("tripartite sweep: n_trials must be positive");
  const ComplexMatrix l_ae = tensor(l_app, identity(l_env.rows())) +
                             tensor(identity(l_app.rows()), l_env);
  const ConservedPair charges = build_sectors(l_sys, l_ae);
  std::vector<TripartiteReport> reports(
      static_cast<std::size_t>(options.n_trials));
  parallel_for(options.n_trials, options.threads, [&](long i) {
    reports[static_cast<std::size_t>(i)] = evaluate_tripartite(
        make_tripartite_sweep_scheme(l_sys, l_app, l_env, charges, psi0, psi1,
                                     i, options),
        options.tol);
  });
  return reports;
}

}  // namespace waybound

#endif  // WAYBOUND_WAY_HPP
