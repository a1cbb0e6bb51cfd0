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

#ifndef WAYBOUND_LINOPS_HPP
#define WAYBOUND_LINOPS_HPP

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

namespace waybound {

using Complex = std::complex<double>;
// Row-major dense storage throughout; target dimensions stay small enough
// that density is never a concern.
using ComplexMatrix =
    Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

// Hermiticity tolerance in max-entry norm. Inputs within this tolerance are
// symmetrized instead of rejected, so round-off from products of unitaries
// does not trip hard errors.
inline constexpr double kHermitianTol = 1e-10;
// Eigenvalues in [-kEigenClampTol, 0) are clamped to 0 by the PSD operations.
inline constexpr double kEigenClampTol = 1e-10;

//------------------------------------------------------------------------------
// Small helpers
//------------------------------------------------------------------------------

inline ComplexMatrix identity(Index d) { return ComplexMatrix::Identity(d, d); }

inline ComplexMatrix dagger(const ComplexMatrix& m) { return m.adjoint(); }

inline double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline bool all_finite(const ComplexMatrix& m) {
  return m.allFinite();
}

inline bool is_hermitian(const ComplexMatrix& m, double tol = kHermitianTol) {
  if (m.rows() != m.cols()) return false;
  return max_abs(ComplexMatrix(m - m.adjoint())) <= tol;
}

inline bool is_unitary(const ComplexMatrix& m, double tol = 1e-9) {
  if (m.rows() != m.cols()) return false;
  return max_abs(ComplexMatrix(m.adjoint() * m - identity(m.rows()))) <= tol;
}

//------------------------------------------------------------------------------
// Core operations
//------------------------------------------------------------------------------

/// Kronecker product; realizes composite spaces, dimensions multiply.
inline ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
  return Eigen::kroneckerProduct(a, b);
}

inline ComplexVector tensor(const ComplexVector& a, const ComplexVector& b) {
  ComplexVector out(a.size() * b.size());
  for (Index i = 0; i < a.size(); ++i)
    out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

/// Trace over the factors of a multipartite operator that are not in `keep`.
/// `dims` lists the factor dimensions in tensor order; `keep` holds the
/// factor indices to retain, in ascending order. The result acts on the kept
/// factors in their original order.
inline ComplexMatrix partial_trace(const ComplexMatrix& m,
                                   const std::vector<Index>& dims,
                                   const std::vector<std::size_t>& keep) {
  Index side = 1;
  for (Index d : dims) side *= d;
  if (m.rows() != m.cols() || m.rows() != side)
    throw std::invalid_argument(
        "partial_trace: matrix side " + std::to_string(m.rows()) +
        " does not match product of factor dimensions " + std::to_string(side));
  const std::size_t n = dims.size();
  std::vector<bool> kept(n, false);
  for (std::size_t f : keep) {
    if (f >= n) throw std::invalid_argument("partial_trace: factor index out of range");
    if (kept[f]) throw std::invalid_argument("partial_trace: duplicate factor index");
    kept[f] = true;
  }

  // Strides of each factor in the flattened index.
  std::vector<Index> stride(n, 1);
  for (std::size_t f = n; f-- > 1;) stride[f - 1] = stride[f] * dims[f];

  std::vector<std::size_t> keep_f, trace_f;
  for (std::size_t f = 0; f < n; ++f) (kept[f] ? keep_f : trace_f).push_back(f);

  Index d_keep = 1, d_trace = 1;
  for (std::size_t f : keep_f) d_keep *= dims[f];
  for (std::size_t f : trace_f) d_trace *= dims[f];

  // Maps a flat index over the listed factors to a flat full-space index.
  auto expand = [&](Index flat, const std::vector<std::size_t>& factors) {
    Index full = 0;
    for (std::size_t i = factors.size(); i-- > 0;) {
      const std::size_t f = factors[i];
      full += (flat % dims[f]) * stride[f];
      flat /= dims[f];
    }
    return full;
  };

  ComplexMatrix out = ComplexMatrix::Zero(d_keep, d_keep);
  for (Index r = 0; r < d_keep; ++r) {
    const Index row_base = expand(r, keep_f);
    for (Index c = 0; c < d_keep; ++c) {
      const Index col_base = expand(c, keep_f);
      Complex acc = 0.0;
      for (Index t = 0; t < d_trace; ++t) {
        const Index off = expand(t, trace_f);
        acc += m(row_base + off, col_base + off);
      }
      out(r, c) = acc;
    }
  }
  return out;
}

struct EighResult {
  RealVector eigenvalues;     // ascending
  ComplexMatrix eigenvectors; // columns, unitary
};

/// Hermitian eigendecomposition. The input must be Hermitian within the
/// max-entry tolerance; it is symmetrized before factorization.
inline EighResult eigh(const ComplexMatrix& m, double tol = kHermitianTol) {
  if (m.rows() != m.cols())
    throw std::invalid_argument("eigh: matrix is not square");
  if (!is_hermitian(m, tol))
    throw std::invalid_argument("eigh: matrix is not Hermitian within tolerance");
  const ComplexMatrix sym = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eigh: eigensolver failed to converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

/// Square root of a positive semidefinite matrix. Eigenvalues inside the
/// clamp window are treated as exact zeros; anything more negative is an
/// error rather than noise. Positive round-off dust is snapped to zero as
/// well, since sqrt would otherwise amplify it far above working precision.
inline ComplexMatrix psd_sqrt(const ComplexMatrix& m) {
  EighResult es = eigh(m);
  RealVector lam = es.eigenvalues;
  const double snap = 1e-13 * std::max(1.0, lam.cwiseAbs().maxCoeff());
  for (Index i = 0; i < lam.size(); ++i) {
    if (lam(i) < -kEigenClampTol)
      throw std::invalid_argument(
          "psd_sqrt: eigenvalue " + std::to_string(lam(i)) + " below clamp window");
    lam(i) = lam(i) < snap ? 0.0 : std::sqrt(lam(i));
  }
  ComplexMatrix r = es.eigenvectors * lam.cast<Complex>().asDiagonal() *
                    es.eigenvectors.adjoint();
  return 0.5 * (r + r.adjoint());
}

/// Operator norm (largest singular value).
inline double op_norm(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  return svd.singularValues()(0);
}

/// ||ab - ba||; zero exactly when the operators commute.
inline double commutator_norm(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
    throw std::invalid_argument("commutator_norm: operands must be square with equal shape");
  return op_norm(a * b - b * a);
}

}  // namespace waybound

#endif  // WAYBOUND_LINOPS_HPP
