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

#ifndef WAYBOUND_SCENARIOS_HPP
#define WAYBOUND_SCENARIOS_HPP

#include <bit>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "conservation.hpp"
#include "linops.hpp"
#include "states.hpp"
#include "way.hpp"

namespace waybound {

/// z component of a single spin-1/2, in units with hbar = 1. Basis
/// convention: the spin-up eigenstate |1> is e0 and spin-down |-1> is e1.
inline ComplexMatrix half_spin_z() {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 0) = 0.5;
  m(1, 1) = -0.5;
  return m;
}

/// Collective z component of n spin-1/2 particles: diagonal with entries
/// (n - 2 popcount(b)) / 2 and operator norm n/2.
inline ComplexMatrix spin_z(int n) {
  if (n < 1 || n > 20)
    throw std::invalid_argument("spin_z: spin count out of range");
  const Index d = Index{1} << n;
  ComplexMatrix m = ComplexMatrix::Zero(d, d);
  for (Index b = 0; b < d; ++b)
    m(b, b) = 0.5 * (n - 2 * std::popcount(static_cast<unsigned long long>(b)));
  return m;
}

/// The canonical spin benchmark: measure the orthogonal qubit pair
///
///   psi1 = alpha |1> + beta |-1>,   psi0 = conj(beta) |1> - conj(alpha) |-1>
///
/// under conservation of the z component, with a collective-spin apparatus
/// (and optionally an environment of further spins).
struct SpinHalfScenario {
  Complex alpha;
  Complex beta;
  int n_apparatus_spins = 1;
  int n_environment_spins = 0;
};

inline void validate(const SpinHalfScenario& s) {
  if (std::abs(std::norm(s.alpha) + std::norm(s.beta) - 1.0) > 1e-12)
    throw std::invalid_argument("spin scenario: |alpha|^2 + |beta|^2 must be 1");
  if (std::abs(s.alpha) < 1e-12 || std::abs(s.beta) < 1e-12)
    throw std::invalid_argument("spin scenario: both amplitudes must be nonzero");
  if (s.n_apparatus_spins < 1)
    throw std::invalid_argument("spin scenario: need at least one apparatus spin");
  if (s.n_environment_spins < 0)
    throw std::invalid_argument("spin scenario: negative environment size");
}

struct SpinScenarioParts {
  PureState psi0;
  PureState psi1;
  ConservedPair charges;
};

/// Assembles L_S = diag(1,-1)/2, the collective apparatus charge, and the
/// state pair. The matrix element <psi0| L_S |psi1> equals alpha·beta, which
/// is asserted as an internal consistency check.
inline SpinScenarioParts build_spin_scenario(const SpinHalfScenario& s) {
  validate(s);
  ConservedPair charges =
      build_sectors(half_spin_z(), spin_z(s.n_apparatus_spins));
  ComplexVector v1(2), v0(2);
  v1 << s.alpha, s.beta;
  v0 << std::conj(s.beta), -std::conj(s.alpha);
  PureState psi0(std::move(v0), {2});
  PureState psi1(std::move(v1), {2});
  const Complex element =
      (psi0.amplitudes().adjoint() * charges.l_sys * psi1.amplitudes())(0);
  if (std::abs(element - s.alpha * s.beta) > 1e-12)
    throw std::logic_error("spin scenario: matrix element check failed");
  return SpinScenarioParts{std::move(psi0), std::move(psi1), std::move(charges)};
}

namespace detail {

/// Index of the unique zero-charge sector, where the exchange dynamics of a
/// single-spin apparatus lives.
inline std::size_t zero_charge_sector(const ConservedPair& cp) {
  for (std::size_t k = 0; k < cp.sectors.size(); ++k)
    if (std::abs(cp.sectors[k].charge) < 1e-9) return k;
  throw std::invalid_argument("scenario: no zero-charge sector");
}

/// The reflection axis w = alpha |1,-1> + beta |-1,1> in the coordinates of
/// the stored zero-sector basis.
inline ComplexVector reflection_axis(const ConservedPair& cp, Complex alpha,
                                     Complex beta) {
  if (cp.d_sys() != 2 || cp.d_app() != 2)
    throw std::invalid_argument("scenario: reflection model needs two qubits");
  ComplexVector w = ComplexVector::Zero(4);
  w(1) = alpha;  // |1, -1>
  w(2) = beta;   // |-1, 1>
  const ComplexMatrix& v0 = cp.sectors[zero_charge_sector(cp)].basis;
  ComplexVector wt = v0.adjoint() * w;
  if (std::abs(wt.norm() - 1.0) > 1e-9)
    throw std::invalid_argument("scenario: reflection axis left the zero sector");
  return wt;
}

}  // namespace detail

struct OhiraPearleModel {
  BlockUnitary unitary;
  DensityOperator sigma;
};

/// The Ohira–Pearle interaction for a single-spin apparatus prepared in
/// |+> = (|1> + |-1>)/sqrt(2): identity on the charge ±1 sectors and the
/// reflection 2P - 1 on the zero-charge sector, with P projecting onto
/// w = alpha |1,-1> + beta |-1,1>. It fixes psi1 ⊗ |+> and moves psi0 ⊗ |+>
/// to a state with an orthogonal apparatus marginal, so f_app = 0 while
/// f_sys = 2|alpha·beta| saturates the trade-off with equality.
inline OhiraPearleModel ohira_pearle_unitary(Complex alpha, Complex beta) {
  if (std::abs(std::norm(alpha) + std::norm(beta) - 1.0) > 1e-12)
    throw std::invalid_argument("ohira_pearle_unitary: amplitudes not normalized");
  if (std::abs(alpha) < 1e-12 || std::abs(beta) < 1e-12)
    throw std::invalid_argument("ohira_pearle_unitary: degenerate amplitudes");
  const ConservedPair cp = build_sectors(half_spin_z(), spin_z(1));
  const ComplexVector wt = detail::reflection_axis(cp, alpha, beta);
  const std::size_t zero = detail::zero_charge_sector(cp);
  BlockUnitary bu;
  for (std::size_t k = 0; k < cp.sectors.size(); ++k) {
    if (k == zero)
      bu.blocks.push_back(2.0 * (wt * wt.adjoint()) - identity(wt.size()));
    else
      bu.blocks.push_back(identity(cp.sectors[k].dim()));
  }
  ComplexVector plus(2);
  plus << Complex(1.0 / std::sqrt(2.0)), Complex(1.0 / std::sqrt(2.0));
  return OhiraPearleModel{std::move(bu),
                          to_density(PureState(std::move(plus), {2}))};
}

/// Complete measurement scheme for the Ohira–Pearle model.
inline MeasurementScheme ohira_pearle_scheme(Complex alpha, Complex beta) {
  SpinScenarioParts parts =
      build_spin_scenario(SpinHalfScenario{alpha, beta, 1, 0});
  OhiraPearleModel model = ohira_pearle_unitary(alpha, beta);
  ComplexMatrix u = assemble(model.unitary, parts.charges);
  return MeasurementScheme{std::move(parts.psi0), std::move(parts.psi1),
                           std::move(model.sigma), std::move(u),
                           std::move(parts.charges)};
}

/// Generator-chart coordinates of the Ohira–Pearle reflection: pi (1 - P)
/// on the zero sector and zero elsewhere, since exp(i pi (1 - P)) = 2P - 1.
/// Useful as an optimizer seed sitting exactly on the known equality point.
inline RealVector ohira_pearle_generator_params(const ConservedPair& cp,
                                                Complex alpha, Complex beta) {
  const ComplexVector wt = detail::reflection_axis(cp, alpha, beta);
  const std::size_t zero = detail::zero_charge_sector(cp);
  RealVector params = RealVector::Zero(generator_param_count(cp));
  Index pos = 0;
  for (std::size_t k = 0; k < cp.sectors.size(); ++k) {
    const Index d = cp.sectors[k].dim();
    if (k == zero) {
      const ComplexMatrix h =
          M_PI * (identity(d) - ComplexMatrix(wt * wt.adjoint()));
      Index p = pos;
      for (Index i = 0; i < d; ++i) params(p++) = h(i, i).real();
      for (Index i = 0; i < d; ++i) {
        for (Index j = i + 1; j < d; ++j) {
          params(p++) = h(i, j).real();
          params(p++) = h(i, j).imag();
        }
      }
    }
    pos += d * d;
  }
  return params;
}

}  // namespace waybound

#endif  // WAYBOUND_SCENARIOS_HPP
