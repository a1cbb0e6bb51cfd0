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

#include <bit>
#include <cmath>
#include <vector>

#include "test_support.hpp"
#include "waybound/conservation.hpp"

using namespace waybound;
using waybound::testing::matrix_near;

namespace {

// Collective z component of n spin-1/2 particles, diagonal in the
// computational basis with entries (n - 2 popcount(b)) / 2.
ComplexMatrix collective_sz(int n) {
  const Index d = Index{1} << n;
  ComplexMatrix m = ComplexMatrix::Zero(d, d);
  for (Index b = 0; b < d; ++b)
    m(b, b) = 0.5 * (n - 2 * std::popcount(static_cast<unsigned>(b)));
  return m;
}

ComplexMatrix half_sigma_z() { return collective_sz(1); }

}  // namespace

TEST_CASE("two spin-1/2 charges split into sectors of dimension 1, 2, 1") {
  const ConservedPair cp = build_sectors(half_sigma_z(), half_sigma_z());
  REQUIRE(cp.sectors.size() == 3);
  CHECK(cp.sectors[0].charge == Catch::Approx(-1.0).margin(1e-12));
  CHECK(cp.sectors[1].charge == Catch::Approx(0.0).margin(1e-12));
  CHECK(cp.sectors[2].charge == Catch::Approx(1.0).margin(1e-12));
  CHECK(cp.sectors[0].dim() == 1);
  CHECK(cp.sectors[1].dim() == 2);
  CHECK(cp.sectors[2].dim() == 1);
}

TEST_CASE("spin-1/2 against three collective spins gives binomial sector sizes") {
  const ConservedPair cp = build_sectors(half_sigma_z(), collective_sz(3));
  REQUIRE(cp.sectors.size() == 5);
  const std::vector<Index> expected_dims = {1, 4, 6, 4, 1};
  for (std::size_t k = 0; k < 5; ++k) {
    CHECK(cp.sectors[k].dim() == expected_dims[k]);
    CHECK(cp.sectors[k].charge ==
          Catch::Approx(-2.0 + static_cast<double>(k)).margin(1e-12));
  }
}

TEST_CASE("sector bases are orthonormal and jointly complete") {
  const ConservedPair cp = build_sectors(half_sigma_z(), collective_sz(2));
  const Index d = cp.d_total();
  ComplexMatrix resolution = ComplexMatrix::Zero(d, d);
  for (std::size_t j = 0; j < cp.sectors.size(); ++j) {
    const ComplexMatrix& vj = cp.sectors[j].basis;
    CHECK(matrix_near(vj.adjoint() * vj, identity(vj.cols()), 1e-12));
    resolution += vj * vj.adjoint();
    for (std::size_t k = j + 1; k < cp.sectors.size(); ++k)
      CHECK(max_abs(vj.adjoint() * cp.sectors[k].basis) < 1e-12);
  }
  CHECK(matrix_near(resolution, identity(d), 1e-12));
}

TEST_CASE("charges and bases reconstruct the total observable") {
  CounterRng rng(31, 0);
  const ComplexMatrix l_sys = waybound::testing::random_hermitian(2, rng);
  const ComplexMatrix l_app = waybound::testing::random_hermitian(3, rng);
  const ConservedPair cp = build_sectors(l_sys, l_app);
  ComplexMatrix rebuilt = ComplexMatrix::Zero(6, 6);
  for (const auto& s : cp.sectors)
    rebuilt += s.charge * s.basis * s.basis.adjoint();
  CHECK(matrix_near(rebuilt, cp.total, 1e-9));
}

TEST_CASE("eigenvalue grouping merges only near-degenerate charges") {
  ComplexMatrix trivial = ComplexMatrix::Zero(1, 1);
  ComplexMatrix split(2, 2), fused(2, 2);
  split << Complex(0.0), Complex(0.0), Complex(0.0), Complex(1.0);
  fused << Complex(0.0), Complex(0.0), Complex(0.0), Complex(1e-12);
  CHECK(build_sectors(trivial, split).sectors.size() == 2);
  CHECK(build_sectors(trivial, fused).sectors.size() == 1);
}

TEST_CASE("build_sectors rejects non-Hermitian input") {
  ComplexMatrix bad(2, 2);
  bad << Complex(0.0), Complex(1.0), Complex(0.0), Complex(0.0);
  CHECK_THROWS_AS(build_sectors(bad, identity(2)), std::invalid_argument);
  CHECK_THROWS_AS(build_sectors(identity(2), bad), std::invalid_argument);
}

TEST_CASE("assembling identity blocks yields the identity") {
  const ConservedPair cp = build_sectors(half_sigma_z(), half_sigma_z());
  BlockUnitary bu;
  for (const auto& s : cp.sectors) bu.blocks.push_back(identity(s.dim()));
  CHECK(matrix_near(assemble(bu, cp), identity(4), 1e-12));
}

TEST_CASE("assembled random blocks give a conserving unitary") {
  CounterRng rng(32, 0);
  const ComplexMatrix l_sys = waybound::testing::random_hermitian(2, rng);
  const ComplexMatrix l_app = waybound::testing::random_hermitian(3, rng);
  const ConservedPair cp = build_sectors(l_sys, l_app);
  for (std::uint64_t seed : {7u, 8u, 9u}) {
    const ComplexMatrix u = assemble(haar_random_block_unitary(cp, seed), cp);
    CHECK(is_unitary(u, 1e-10));
    CHECK(commutator_norm(u, cp.total) < 1e-10);
  }
}

TEST_CASE("a generic full-space unitary violates the conservation law") {
  const ConservedPair cp = build_sectors(half_sigma_z(), half_sigma_z());
  CounterRng rng(33, 0);
  const ComplexMatrix u = haar_unitary(4, rng);
  CHECK(commutator_norm(u, cp.total) > 1e-3);
}

TEST_CASE("assemble validates block shapes") {
  const ConservedPair cp = build_sectors(half_sigma_z(), half_sigma_z());
  BlockUnitary wrong_count;
  wrong_count.blocks = {identity(1), identity(2)};
  CHECK_THROWS_AS(assemble(wrong_count, cp), std::invalid_argument);
  BlockUnitary wrong_dims;
  wrong_dims.blocks = {identity(1), identity(3), identity(1)};
  CHECK_THROWS_AS(assemble(wrong_dims, cp), std::invalid_argument);
}

TEST_CASE("haar_unitary is unitary and seed-reproducible") {
  CounterRng a(34, 5), b(34, 5), c(34, 6);
  const ComplexMatrix u1 = haar_unitary(5, a);
  const ComplexMatrix u2 = haar_unitary(5, b);
  const ComplexMatrix u3 = haar_unitary(5, c);
  CHECK(is_unitary(u1, 1e-10));
  CHECK(matrix_near(u1, u2, 0.0));
  CHECK(max_abs(u1 - u3) > 1e-3);
}

TEST_CASE("haar_unitary first-entry moments match the invariant measure") {
  // For Haar on U(d), |u_00|^2 is Beta(1, d-1): mean 1/d and variance
  // (d-1) / (d^2 (d+1)). The sample mean over n draws must land within a
  // few standard errors.
  const Index d = 3;
  const int n = 10000;
  CounterRng rng(35, 0);
  double sum = 0.0;
  Complex linear_sum = 0.0;
  for (int t = 0; t < n; ++t) {
    const ComplexMatrix u = haar_unitary(d, rng);
    sum += std::norm(u(0, 0));
    linear_sum += u(0, 0);
  }
  const double mean = sum / n;
  const double variance = (d - 1.0) / (d * d * (d + 1.0));
  const double se = std::sqrt(variance / n);
  CHECK(std::abs(mean - 1.0 / d) < 4.0 * se);
  CHECK(std::abs(linear_sum) / n < 0.02);
}

TEST_CASE("generator chart has one real parameter per block matrix entry") {
  const ConservedPair cp = build_sectors(half_sigma_z(), collective_sz(3));
  CHECK(generator_param_count(cp) == 1 + 16 + 36 + 16 + 1);
}

TEST_CASE("zero generator parameters map to the identity") {
  const ConservedPair cp = build_sectors(half_sigma_z(), half_sigma_z());
  const RealVector zero = RealVector::Zero(generator_param_count(cp));
  const BlockUnitary bu = exp_generator(cp, zero);
  CHECK(matrix_near(assemble(bu, cp), identity(4), 1e-12));
}

TEST_CASE("generator chart reproduces a closed-form rotation") {
  // Sector layout (1, 2, 1); parameters (a, b, c, re, im, d) with the middle
  // block generator [[b, re + i im], [re - i im, c]]. With b = c = im = 0 the
  // middle block is exp(i theta sigma_x).
  const ConservedPair cp = build_sectors(half_sigma_z(), half_sigma_z());
  const double theta = 0.731;
  RealVector params = RealVector::Zero(6);
  params(3) = theta;
  const BlockUnitary bu = exp_generator(cp, params);
  REQUIRE(bu.blocks.size() == 3);
  ComplexMatrix expected(2, 2);
  expected << Complex(std::cos(theta)), Complex(0.0, std::sin(theta)),
      Complex(0.0, std::sin(theta)), Complex(std::cos(theta));
  CHECK(matrix_near(bu.blocks[1], expected, 1e-12));
  CHECK(matrix_near(bu.blocks[0], identity(1), 1e-12));
  CHECK(matrix_near(bu.blocks[2], identity(1), 1e-12));

  const ComplexMatrix u = assemble(bu, cp);
  CHECK(is_unitary(u, 1e-10));
  CHECK(commutator_norm(u, cp.total) < 1e-10);
}

TEST_CASE("exp_generator validates the parameter count") {
  const ConservedPair cp = build_sectors(half_sigma_z(), half_sigma_z());
  CHECK_THROWS_AS(exp_generator(cp, RealVector::Zero(5)), std::invalid_argument);
}

TEST_CASE("generator parameters cover non-commuting directions") {
  // Two different parameter points produce unitaries that do not commute,
  // confirming the chart is not stuck in a diagonal subgroup.
  const ConservedPair cp = build_sectors(half_sigma_z(), half_sigma_z());
  RealVector p1 = RealVector::Zero(6), p2 = RealVector::Zero(6);
  p1(3) = 1.0;  // sigma_x direction in the middle block
  p2(4) = 1.0;  // sigma_y direction in the middle block
  const ComplexMatrix u1 = assemble(exp_generator(cp, p1), cp);
  const ComplexMatrix u2 = assemble(exp_generator(cp, p2), cp);
  CHECK(max_abs(u1 * u2 - u2 * u1) > 1e-2);
}
