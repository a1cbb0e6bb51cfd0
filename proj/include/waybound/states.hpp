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

#ifndef WAYBOUND_STATES_HPP
#define WAYBOUND_STATES_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "conservation.hpp"
#include "linops.hpp"
#include "rng.hpp"

namespace waybound {

constexpr double kStateTol = 1e-10;
constexpr double kPovmSumTol = 1e-9;

namespace detail {

inline Index dims_product(const std::vector<Index>& dims) {
  Index n = 1;
  for (Index d : dims) {
    if (d <= 0) throw std::invalid_argument("state: factor dimensions must be positive");
    n *= d;
  }
  return n;
}

}  // namespace detail

/// Unit vector on a tensor product of finite-dimensional factors.
class PureState {
 public:
  PureState(ComplexVector amplitudes, std::vector<Index> dims)
      : amplitudes_(std::move(amplitudes)), dims_(std::move(dims)) {
    if (detail::dims_product(dims_) != amplitudes_.size())
      throw std::invalid_argument("PureState: dimensions do not match amplitude count");
    if (!amplitudes_.allFinite())
      throw std::invalid_argument("PureState: non-finite amplitude");
    if (std::abs(amplitudes_.norm() - 1.0) > kStateTol)
      throw std::invalid_argument("PureState: vector is not normalized");
  }

  const ComplexVector& amplitudes() const { return amplitudes_; }
  const std::vector<Index>& dims() const { return dims_; }
  Index dim() const { return amplitudes_.size(); }

  ComplexMatrix projector() const {
    return amplitudes_ * amplitudes_.adjoint();
  }

 private:
  ComplexVector amplitudes_;
  std::vector<Index> dims_;
};

/// Density operator: Hermitian, unit trace, spectrum ≥ -1e-10. The checked
/// constructor guards external input; `unchecked` skips the eigensolve for
/// matrices produced internally from already-valid states.
class DensityOperator {
 public:
  DensityOperator(ComplexMatrix matrix, std::vector<Index> dims)
      : matrix_(std::move(matrix)), dims_(std::move(dims)) {
    if (matrix_.rows() != matrix_.cols())
      throw std::invalid_argument("DensityOperator: matrix must be square");
    if (detail::dims_product(dims_) != matrix_.rows())
      throw std::invalid_argument("DensityOperator: dimensions do not match matrix side");
    if (!all_finite(matrix_))
      throw std::invalid_argument("DensityOperator: non-finite entry");
    if (!is_hermitian(matrix_, kStateTol))
      throw std::invalid_argument("DensityOperator: matrix is not Hermitian");
    if (std::abs(matrix_.trace().real() - 1.0) > kStateTol ||
        std::abs(matrix_.trace().imag()) > kStateTol)
      throw std::invalid_argument("DensityOperator: trace is not 1");
    const EighResult es = eigh(matrix_, kStateTol);
    if (es.eigenvalues(0) < -kEigenClampTol)
      throw std::invalid_argument("DensityOperator: negative eigenvalue");
  }

  static DensityOperator unchecked(ComplexMatrix matrix, std::vector<Index> dims) {
    return DensityOperator(std::move(matrix), std::move(dims), 0);
  }

  const ComplexMatrix& matrix() const { return matrix_; }
  const std::vector<Index>& dims() const { return dims_; }
  Index dim() const { return matrix_.rows(); }

  double purity() const { return (matrix_ * matrix_).trace().real(); }

 private:
  DensityOperator(ComplexMatrix matrix, std::vector<Index> dims, int)
      : matrix_(std::move(matrix)), dims_(std::move(dims)) {}

  ComplexMatrix matrix_;
  std::vector<Index> dims_;
};

inline DensityOperator to_density(const PureState& psi) {
  return DensityOperator::unchecked(psi.projector(), psi.dims());
}

/// Canonical purification on a doubled space: σ = Σ λ_k |v_k⟩⟨v_k| maps to
/// Σ √λ_k |v_k⟩⊗|e_k⟩ with eigenvalues taken in descending order (ties keep
/// the eigensolver's order) and zero-eigenvalue terms dropped.
inline PureState purify(const DensityOperator& sigma) {
  const Index d = sigma.dim();
  const EighResult es = eigh(sigma.matrix(), kStateTol);
  std::vector<Index> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return es.eigenvalues(a) > es.eigenvalues(b);
  });

  ComplexVector amps = ComplexVector::Zero(d * d);
  Index slot = 0;
  for (Index k : order) {
    const double lam = es.eigenvalues(k);
    if (lam <= kEigenClampTol) continue;
    const double w = std::sqrt(lam);
    for (Index i = 0; i < d; ++i)
      amps(i * d + slot) = w * es.eigenvectors(i, k);
    ++slot;
  }
  amps /= amps.norm();
  return PureState(std::move(amps), {d, d});
}

namespace detail {

/// Square root for the fidelity path: negative round-off eigenvalues clamp
/// to zero but nothing else is filtered, so genuinely tiny eigenvalues keep
/// their square roots.
inline ComplexMatrix raw_psd_sqrt(const ComplexMatrix& m) {
  const EighResult es = eigh(m, kStateTol);
  const RealVector lam = es.eigenvalues.cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors * lam.asDiagonal() * es.eigenvectors.adjoint();
}

}  // namespace detail

/// Uhlmann fidelity F(ρ0, ρ1) = tr √(√ρ0 ρ1 √ρ0), in the amplitude (not
/// squared) convention. Evaluated as the nuclear norm ‖√ρ1 √ρ0‖₁, which is
/// the same quantity but avoids squaring small singular values and keeps
/// the absolute error at round-off level even when the fidelity is nearly
/// 0; this matters because the trade-off bound is checked against slack
/// tolerances of 1e-9 right at that corner. Round-off excursions within
/// 1e-9 of [0, 1] are clipped back onto the interval.
inline double fidelity(const DensityOperator& rho0, const DensityOperator& rho1) {
  if (rho0.dim() != rho1.dim())
    throw std::invalid_argument("fidelity: dimension mismatch");
  const ComplexMatrix a =
      detail::raw_psd_sqrt(rho1.matrix()) * detail::raw_psd_sqrt(rho0.matrix());
  const Eigen::JacobiSVD<ComplexMatrix> svd(a);
  double f = svd.singularValues().sum();
  if (f > 1.0 && f < 1.0 + 1e-9) f = 1.0;
  return f;
}

/// Unit eigenvector for the largest eigenvalue. For a state that is pure up
/// to numerical noise this recovers the underlying vector; the global phase
/// is whatever the eigensolver returns.
inline ComplexVector principal_eigenvector(const DensityOperator& rho) {
  const EighResult es = eigh(rho.matrix(), kStateTol);
  return es.eigenvectors.col(rho.dim() - 1);
}

/// Fidelity between the reductions of two pure states onto the `keep`
/// factors. With coefficient matrices X_i (kept indices as rows, traced
/// indices as columns), Uhlmann's theorem turns the fidelity into the
/// nuclear norm of X0† X1. The nuclear norm is 1-Lipschitz in the entries,
/// so the result is accurate to round-off even at the F = 0 corner where
/// the eigenvalue-based route loses half the digits; the trade-off slack is
/// checked against 1e-9 tolerances exactly at that corner.
inline double pure_reduced_fidelity(const ComplexVector& phi0,
                                    const ComplexVector& phi1,
                                    const std::vector<Index>& dims,
                                    const std::vector<std::size_t>& keep) {
  const Index total = detail::dims_product(dims);
  if (phi0.size() != total || phi1.size() != total)
    throw std::invalid_argument("pure_reduced_fidelity: state size mismatch");
  std::vector<bool> kept(dims.size(), false);
  for (std::size_t f : keep) {
    if (f >= dims.size() || kept[f])
      throw std::invalid_argument("pure_reduced_fidelity: bad factor index");
    kept[f] = true;
  }
  Index d_keep = 1, d_rest = 1;
  for (std::size_t f = 0; f < dims.size(); ++f)
    (kept[f] ? d_keep : d_rest) *= dims[f];

  ComplexMatrix x0(d_keep, d_rest), x1(d_keep, d_rest);
  std::vector<Index> strides(dims.size());
  {
    Index acc = 1;
    for (std::size_t f = dims.size(); f-- > 0;) {
      strides[f] = acc;
      acc *= dims[f];
    }
  }
  for (Index idx = 0; idx < total; ++idx) {
    Index k = 0, r = 0;
    for (std::size_t f = 0; f < dims.size(); ++f) {
      const Index digit = (idx / strides[f]) % dims[f];
      if (kept[f])
        k = k * dims[f] + digit;
      else
        r = r * dims[f] + digit;
    }
    x0(k, r) = phi0(idx);
    x1(k, r) = phi1(idx);
  }
  const Eigen::JacobiSVD<ComplexMatrix> svd(x0.adjoint() * x1);
  double f = svd.singularValues().sum();
  if (f > 1.0 && f < 1.0 + 1e-9) f = 1.0;
  return f;
}

/// Generalized measurement. Elements must be Hermitian, positive within
/// 1e-10 and sum to the identity within 1e-9 in max-entry norm. With
/// `projective` set, elements must additionally be mutually orthogonal
/// projectors within 1e-9.
class Povm {
 public:
  explicit Povm(std::vector<ComplexMatrix> elements, bool projective = false)
      : elements_(std::move(elements)), projective_(projective) {
    if (elements_.empty())
      throw std::invalid_argument("Povm: no elements");
    const Index d = elements_[0].rows();
    ComplexMatrix sum = ComplexMatrix::Zero(d, d);
    for (const ComplexMatrix& e : elements_) {
      if (e.rows() != d || e.cols() != d)
        throw std::invalid_argument("Povm: elements differ in shape");
      if (!is_hermitian(e, kStateTol))
        throw std::invalid_argument("Povm: element is not Hermitian");
      const EighResult es = eigh(e, kStateTol);
      if (es.eigenvalues(0) < -kEigenClampTol)
        throw std::invalid_argument("Povm: element is not positive");
      sum += e;
    }
    if (max_abs(sum - identity(d)) > kPovmSumTol)
      throw std::invalid_argument("Povm: elements do not sum to identity");
    if (projective_) {
      for (std::size_t i = 0; i < elements_.size(); ++i) {
        if (max_abs(elements_[i] * elements_[i] - elements_[i]) > kPovmSumTol)
          throw std::invalid_argument("Povm: projective element is not idempotent");
        for (std::size_t j = i + 1; j < elements_.size(); ++j)
          if (max_abs(elements_[i] * elements_[j]) > kPovmSumTol)
            throw std::invalid_argument("Povm: projective elements overlap");
      }
    }
  }

  const std::vector<ComplexMatrix>& elements() const { return elements_; }
  bool projective() const { return projective_; }
  std::size_t size() const { return elements_.size(); }
  Index dim() const { return elements_[0].rows(); }

 private:
  std::vector<ComplexMatrix> elements_;
  bool projective_;
};

/// Classical-fidelity overlap Σ_α √(p0(α) p1(α)) of the two outcome
/// distributions. Tiny negative probabilities (≥ -1e-12) are clamped to 0.
inline double povm_overlap(const DensityOperator& rho0,
                           const DensityOperator& rho1, const Povm& povm) {
  if (rho0.dim() != rho1.dim() || rho0.dim() != povm.dim())
    throw std::invalid_argument("povm_overlap: dimension mismatch");
  double total = 0.0;
  for (const ComplexMatrix& e : povm.elements()) {
    double p0 = (e * rho0.matrix()).trace().real();
    double p1 = (e * rho1.matrix()).trace().real();
    if (p0 < -1e-12 || p1 < -1e-12)
      throw std::invalid_argument("povm_overlap: negative outcome probability");
    p0 = std::max(p0, 0.0);
    p1 = std::max(p1, 0.0);
    total += std::sqrt(p0 * p1);
  }
  return total;
}

namespace detail {

/// Extends the orthonormal columns of `basis` to a full orthonormal basis by
/// Gram-Schmidt over the canonical basis, in canonical order. Deterministic:
/// no pivoting, candidates below 1e-6 residual norm are skipped.
inline ComplexMatrix complete_basis(const ComplexMatrix& basis) {
  const Index d = basis.rows();
  ComplexMatrix full(d, d);
  Index count = basis.cols();
  full.leftCols(count) = basis;
  for (Index j = 0; j < d && count < d; ++j) {
    ComplexVector w = ComplexVector::Zero(d);
    w(j) = 1.0;
    for (int pass = 0; pass < 2; ++pass)
      w -= full.leftCols(count) * (full.leftCols(count).adjoint() * w);
    const double n = w.norm();
    if (n > 1e-6) full.col(count++) = w / n;
  }
  if (count < d)
    throw std::runtime_error("complete_basis: failed to complete the basis");
  return full;
}

}  // namespace detail

/// Rank-one projective measurement attaining the fidelity in Σ √(p0 p1):
/// the eigenbasis of M = ρ0^{-1/2} √(√ρ0 ρ1 √ρ0) ρ0^{-1/2} on the support
/// of ρ0 (support cut at eigenvalue 1e-10), completed deterministically on
/// the kernel, where both distributions vanish for ρ0 and cannot raise the
/// overlap.
inline Povm optimal_pvm(const DensityOperator& rho0, const DensityOperator& rho1) {
  if (rho0.dim() != rho1.dim())
    throw std::invalid_argument("optimal_pvm: dimension mismatch");
  const Index d = rho0.dim();
  const EighResult e0 = eigh(rho0.matrix(), kStateTol);

  std::vector<Index> support;
  for (Index k = 0; k < d; ++k)
    if (e0.eigenvalues(k) >= 1e-10) support.push_back(k);
  if (support.empty())
    throw std::invalid_argument("optimal_pvm: rho0 has empty support");

  const Index r = static_cast<Index>(support.size());
  ComplexMatrix vs(d, r);
  RealVector inv_sqrt(r);
  for (Index c = 0; c < r; ++c) {
    vs.col(c) = e0.eigenvectors.col(support[static_cast<std::size_t>(c)]);
    inv_sqrt(c) = 1.0 / std::sqrt(e0.eigenvalues(support[static_cast<std::size_t>(c)]));
  }

  const ComplexMatrix s = psd_sqrt(rho0.matrix());
  ComplexMatrix inner = s * rho1.matrix() * s;
  inner = Complex(0.5) * (inner + ComplexMatrix(inner.adjoint()));
  const ComplexMatrix g = psd_sqrt(inner);

  // M restricted to the support, in support coordinates.
  ComplexMatrix m = inv_sqrt.asDiagonal() *
                    ComplexMatrix(vs.adjoint() * g * vs) *
                    inv_sqrt.asDiagonal();
  m = Complex(0.5) * (m + ComplexMatrix(m.adjoint()));
  const EighResult em = eigh(m, 1e-6);

  const ComplexMatrix basis = detail::complete_basis(vs * em.eigenvectors);
  std::vector<ComplexMatrix> elements;
  elements.reserve(static_cast<std::size_t>(d));
  for (Index k = 0; k < d; ++k)
    elements.push_back(basis.col(k) * basis.col(k).adjoint());
  return Povm(std::move(elements), true);
}

/// Haar-random pure state.
inline PureState sample_pure_state(const std::vector<Index>& dims, CounterRng& rng) {
  const Index d = detail::dims_product(dims);
  ComplexVector v(d);
  for (Index i = 0; i < d; ++i) v(i) = rng.complex_normal();
  v /= v.norm();
  return PureState(std::move(v), dims);
}

/// Full-rank random density operator G G† / tr(G G†), G complex Ginibre.
inline DensityOperator sample_mixed_density(const std::vector<Index>& dims,
                                            CounterRng& rng) {
  const Index d = detail::dims_product(dims);
  ComplexMatrix g(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) g(i, j) = rng.complex_normal();
  ComplexMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  rho = Complex(0.5) * (rho + ComplexMatrix(rho.adjoint()));
  return DensityOperator::unchecked(std::move(rho), dims);
}

/// Rank-one PVM from the columns of a Haar unitary.
inline Povm sample_rank1_pvm(Index d, CounterRng& rng) {
  const ComplexMatrix u = haar_unitary(d, rng);
  std::vector<ComplexMatrix> elements;
  elements.reserve(static_cast<std::size_t>(d));
  for (Index k = 0; k < d; ++k)
    elements.push_back(u.col(k) * u.col(k).adjoint());
  return Povm(std::move(elements), true);
}

/// Random POVM with `outcomes` elements: Wishart matrices A_i normalized by
/// S = Σ A_i via E_i = S^{-1/2} A_i S^{-1/2}.
inline Povm sample_random_povm(Index d, int outcomes, CounterRng& rng) {
  if (outcomes < 1)
    throw std::invalid_argument("sample_random_povm: need at least one outcome");
  std::vector<ComplexMatrix> a;
  a.reserve(static_cast<std::size_t>(outcomes));
  ComplexMatrix sum = ComplexMatrix::Zero(d, d);
  for (int k = 0; k < outcomes; ++k) {
    ComplexMatrix g(d, d);
    for (Index i = 0; i < d; ++i)
      for (Index j = 0; j < d; ++j) g(i, j) = rng.complex_normal();
    ComplexMatrix w = g * g.adjoint();
    sum += w;
    a.push_back(std::move(w));
  }
  const EighResult es = eigh(sum, kStateTol);
  ComplexVector scale(d);
  for (Index i = 0; i < d; ++i) scale(i) = 1.0 / std::sqrt(es.eigenvalues(i));
  const ComplexMatrix s_inv_sqrt =
      es.eigenvectors * scale.asDiagonal() * es.eigenvectors.adjoint();
  std::vector<ComplexMatrix> elements;
  elements.reserve(a.size());
  for (ComplexMatrix& w : a) {
    ComplexMatrix e = s_inv_sqrt * w * s_inv_sqrt;
    e = Complex(0.5) * (e + ComplexMatrix(e.adjoint()));
    elements.push_back(std::move(e));
  }
  return Povm(std::move(elements), false);
}

}  // namespace waybound

#endif  // WAYBOUND_STATES_HPP
