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

#ifndef WAYBOUND_CONSERVATION_HPP
#define WAYBOUND_CONSERVATION_HPP

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "linops.hpp"
#include "rng.hpp"

namespace waybound {

/// One eigenspace of the total conserved observable. `basis` holds an
/// orthonormal eigenbasis of the eigenspace as full-space column vectors.
struct ChargeSector {
  double charge = 0.0;
  ComplexMatrix basis;

  Index dim() const { return basis.cols(); }
};

/// An additive conserved quantity (L_S, L_A) together with the charge-sector
/// decomposition of L = L_S⊗1 + 1⊗L_A. Unitaries commuting with L are
/// exactly the ones block-diagonal across the sectors.
struct ConservedPair {
  ComplexMatrix l_sys;
  ComplexMatrix l_app;
  std::vector<ChargeSector> sectors;
  ComplexMatrix total;  // L_S⊗1 + 1⊗L_A

  Index d_sys() const { return l_sys.rows(); }
  Index d_app() const { return l_app.rows(); }
  Index d_total() const { return l_sys.rows() * l_app.rows(); }
};

/// Diagonalizes L = L_S⊗1 + 1⊗L_A and groups eigenvalues into charge
/// sectors. Consecutive eigenvalues closer than grouping_tol·(1 + max|λ|)
/// land in the same sector; merging is deliberately conservative since
/// over-merging enlarges the admissible unitary family.
inline ConservedPair build_sectors(const ComplexMatrix& l_sys,
                                   const ComplexMatrix& l_app,
                                   double grouping_tol = 1e-9) {
  if (!is_hermitian(l_sys) || !is_hermitian(l_app))
    throw std::invalid_argument("build_sectors: observables must be Hermitian");
  ConservedPair cp;
  cp.l_sys = l_sys;
  cp.l_app = l_app;
  cp.total = tensor(l_sys, identity(l_app.rows())) +
             tensor(identity(l_sys.rows()), l_app);

  const EighResult es = eigh(cp.total);
  const Index d = cp.total.rows();
  const double scale = 1.0 + std::max(std::abs(es.eigenvalues(0)),
                                      std::abs(es.eigenvalues(d - 1)));
  const double gap_tol = grouping_tol * scale;

  Index start = 0;
  for (Index i = 1; i <= d; ++i) {
    if (i == d || es.eigenvalues(i) - es.eigenvalues(i - 1) > gap_tol) {
      ChargeSector sector;
      sector.charge =
          es.eigenvalues.segment(start, i - start).mean();
      sector.basis = es.eigenvectors.middleCols(start, i - start);
      cp.sectors.push_back(std::move(sector));
      start = i;
    }
  }
  return cp;
}

/// A conservation-respecting unitary, stored as one unitary block per
/// charge sector in sector order.
struct BlockUnitary {
  std::vector<ComplexMatrix> blocks;
};

/// Embeds the blocks back into the full space: U = Σ_k V_k B_k V_k†.
inline ComplexMatrix assemble(const BlockUnitary& bu, const ConservedPair& cp) {
  if (bu.blocks.size() != cp.sectors.size())
    throw std::invalid_argument("assemble: block count does not match sector count");
  const Index d = cp.d_total();
  ComplexMatrix u = ComplexMatrix::Zero(d, d);
  for (std::size_t k = 0; k < bu.blocks.size(); ++k) {
    const ComplexMatrix& b = bu.blocks[k];
    const ComplexMatrix& v = cp.sectors[k].basis;
    if (b.rows() != b.cols() || b.rows() != v.cols())
      throw std::invalid_argument("assemble: block " + std::to_string(k) +
                                  " does not match sector dimension");
    u += v * b * v.adjoint();
  }
  return u;
}

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the R-phase
/// correction that removes the QR gauge bias.
inline ComplexMatrix haar_unitary(Index d, CounterRng& rng) {
  ComplexMatrix g(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) g(i, j) = rng.complex_normal();
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ();
  for (Index j = 0; j < d; ++j) {
    const Complex r = qr.matrixQR()(j, j);
    const double a = std::abs(r);
    q.col(j) *= (a == 0.0) ? Complex(1.0) : r / a;
  }
  return q;
}

/// Independent Haar block per sector. Block k draws from the stream
/// (seed, k), so the result does not depend on evaluation order.
inline BlockUnitary haar_random_block_unitary(const ConservedPair& cp,
                                              std::uint64_t seed) {
  BlockUnitary bu;
  bu.blocks.reserve(cp.sectors.size());
  for (std::size_t k = 0; k < cp.sectors.size(); ++k) {
    CounterRng rng(seed, k);
    bu.blocks.push_back(haar_unitary(cp.sectors[k].dim(), rng));
  }
  return bu;
}

/// Number of real parameters of the block-generator chart: d_k² per sector.
inline Index generator_param_count(const ConservedPair& cp) {
  Index n = 0;
  for (const auto& s : cp.sectors) n += s.dim() * s.dim();
  return n;
}

/// Smooth chart over the conserving unitaries: per sector, d_k² reals encode
/// a Hermitian generator H_k (diagonal first, then re/im pairs of the strict
/// upper triangle in row-major order) and the block is exp(i H_k). The zero
/// vector maps to the identity.
inline BlockUnitary exp_generator(const ConservedPair& cp, const RealVector& params) {
  if (params.size() != generator_param_count(cp))
    throw std::invalid_argument(
        "exp_generator: expected " + std::to_string(generator_param_count(cp)) +
        " parameters, got " + std::to_string(params.size()));
  BlockUnitary bu;
  bu.blocks.reserve(cp.sectors.size());
  Index pos = 0;
  for (const auto& sector : cp.sectors) {
    const Index d = sector.dim();
    ComplexMatrix h = ComplexMatrix::Zero(d, d);
    for (Index i = 0; i < d; ++i) h(i, i) = params(pos++);
    for (Index i = 0; i < d; ++i) {
      for (Index j = i + 1; j < d; ++j) {
        const double re = params(pos++);
        const double im = params(pos++);
        h(i, j) = Complex(re, im);
        h(j, i) = Complex(re, -im);
      }
    }
    const EighResult es = eigh(h);
    ComplexVector phases(d);
    for (Index i = 0; i < d; ++i)
      phases(i) = std::exp(Complex(0.0, es.eigenvalues(i)));
    bu.blocks.push_back(es.eigenvectors * phases.asDiagonal() *
                        es.eigenvectors.adjoint());
  }
  return bu;
}

}  // namespace waybound

#endif  // WAYBOUND_CONSERVATION_HPP
