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

#include <cmath>

#include "test_support.hpp"
#include "waybound/scenarios.hpp"

using namespace waybound;
using waybound::testing::matrix_near;
using waybound::testing::vector_near;

TEST_CASE("collective spin-z diagonal and norm") {
  const ComplexMatrix m = spin_z(3);
  REQUIRE(m.rows() == 8);
  // b = 0 has all spins up; each set bit lowers the charge by 1.
  CHECK(m(0, 0).real() == Catch::Approx(1.5));
  CHECK(m(1, 1).real() == Catch::Approx(0.5));
  CHECK(m(3, 3).real() == Catch::Approx(-0.5));
  CHECK(m(7, 7).real() == Catch::Approx(-1.5));
  CHECK(op_norm(m) == Catch::Approx(1.5).margin(1e-12));
  CHECK(op_norm(spin_z(4)) == Catch::Approx(2.0).margin(1e-12));
  CHECK_THROWS_AS(spin_z(0), std::invalid_argument);
  CHECK_THROWS_AS(spin_z(21), std::invalid_argument);
}

TEST_CASE("spin scenario validation") {
  CHECK_THROWS_AS(validate(SpinHalfScenario{Complex(1.0), Complex(0.0), 1, 0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(validate(SpinHalfScenario{Complex(0.7), Complex(0.8), 1, 0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(validate(SpinHalfScenario{Complex(0.6), Complex(0.8), 0, 0}),
                  std::invalid_argument);
  CHECK_NOTHROW(validate(SpinHalfScenario{Complex(0.6), Complex(0.8), 3, 2}));
}

TEST_CASE("spin scenario matrix element equals alpha times beta") {
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (auto [alpha, beta] : {std::pair{Complex(inv_sqrt2), Complex(inv_sqrt2)},
                             std::pair{Complex(0.6), Complex(0.8)},
                             std::pair{Complex(0.48, 0.36), Complex(0.0, 0.8)}}) {
    const SpinScenarioParts parts =
        build_spin_scenario(SpinHalfScenario{alpha, beta, 1, 0});
    const Complex element = (parts.psi0.amplitudes().adjoint() *
                             parts.charges.l_sys * parts.psi1.amplitudes())(0);
    CHECK(std::abs(element - alpha * beta) < 1e-12);
    const Complex overlap =
        (parts.psi0.amplitudes().adjoint() * parts.psi1.amplitudes())(0);
    CHECK(std::abs(overlap) < 1e-12);
  }
}

TEST_CASE("spin scenario exposes the expected charges") {
  const SpinScenarioParts parts = build_spin_scenario(
      SpinHalfScenario{Complex(0.6), Complex(0.8), 2, 0});
  CHECK(op_norm(parts.charges.l_sys) == Catch::Approx(0.5).margin(1e-12));
  CHECK(op_norm(parts.charges.l_app) == Catch::Approx(1.0).margin(1e-12));
  CHECK(parts.charges.d_total() == 8);
}

TEST_CASE("reflection model is conserving and unitary") {
  const OhiraPearleModel model =
      ohira_pearle_unitary(Complex(0.6), Complex(0.8));
  const ConservedPair cp = build_sectors(half_spin_z(), spin_z(1));
  const ComplexMatrix u = assemble(model.unitary, cp);
  CHECK(is_unitary(u, 1e-12));
  CHECK(commutator_norm(u, cp.total) < 1e-10);

  ComplexMatrix plus(2, 2);
  plus << Complex(0.5), Complex(0.5), Complex(0.5), Complex(0.5);
  CHECK(matrix_near(model.sigma.matrix(), plus, 1e-12));

  CHECK_THROWS_AS(ohira_pearle_unitary(Complex(1.0), Complex(0.0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(ohira_pearle_unitary(Complex(0.9), Complex(0.8)),
                  std::invalid_argument);
}

TEST_CASE("reflection model reproduces both displayed mappings") {
  const Complex alpha(0.6), beta(0.8);
  const SpinScenarioParts parts =
      build_spin_scenario(SpinHalfScenario{alpha, beta, 1, 0});
  const OhiraPearleModel model = ohira_pearle_unitary(alpha, beta);
  const ComplexMatrix u = assemble(model.unitary, parts.charges);

  ComplexVector plus(2);
  plus << Complex(1.0 / std::sqrt(2.0)), Complex(1.0 / std::sqrt(2.0));
  ComplexVector minus(2);
  minus << Complex(1.0 / std::sqrt(2.0)), Complex(-1.0 / std::sqrt(2.0));

  // psi1 ⊗ |+> is a fixed point.
  const ComplexVector in1 = tensor(parts.psi1.amplitudes(), plus);
  CHECK(vector_near(u * in1, in1, 1e-10));

  // psi0 ⊗ |+> maps to (conj(beta)|1> + conj(alpha)|-1>) ⊗ (|1> - |-1>)/sqrt(2),
  // phase included.
  const ComplexVector in0 = tensor(parts.psi0.amplitudes(), plus);
  ComplexVector rotated(2);
  rotated << std::conj(beta), std::conj(alpha);
  const ComplexVector expected = tensor(ComplexVector(rotated), minus);
  CHECK(vector_near(u * in0, expected, 1e-10));
}

TEST_CASE("reflection scheme saturates the trade-off with equality") {
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

  const TradeoffReport symmetric = evaluate_tradeoff(
      ohira_pearle_scheme(Complex(inv_sqrt2), Complex(inv_sqrt2)));
  CHECK(symmetric.lhs == Catch::Approx(0.5).margin(1e-10));
  CHECK(symmetric.f_app == Catch::Approx(0.0).margin(1e-10));
  CHECK(symmetric.f_sys == Catch::Approx(1.0).margin(1e-10));
  CHECK(symmetric.rhs == Catch::Approx(0.5).margin(1e-10));
  CHECK(std::abs(symmetric.slack) < 1e-10);
  CHECK(symmetric.satisfied);
  CHECK(symmetric.conservation_residual < 1e-10);

  const TradeoffReport skewed =
      evaluate_tradeoff(ohira_pearle_scheme(Complex(0.6), Complex(0.8)));
  CHECK(skewed.lhs == Catch::Approx(0.48).margin(1e-10));
  CHECK(skewed.f_sys == Catch::Approx(0.96).margin(1e-10));
  CHECK(skewed.f_app == Catch::Approx(0.0).margin(1e-10));
  CHECK(std::abs(skewed.lhs - skewed.norm_l_app * skewed.f_sys) < 1e-10);
  CHECK(std::abs(skewed.slack) < 1e-10);
}

TEST_CASE("generator coordinates of the reflection land on the same unitary") {
  const Complex alpha(0.6), beta(0.8);
  const SpinScenarioParts parts =
      build_spin_scenario(SpinHalfScenario{alpha, beta, 1, 0});
  const RealVector params =
      ohira_pearle_generator_params(parts.charges, alpha, beta);
  REQUIRE(params.size() == generator_param_count(parts.charges));

  const ComplexMatrix via_chart =
      assemble(exp_generator(parts.charges, params), parts.charges);
  const ComplexMatrix direct =
      assemble(ohira_pearle_unitary(alpha, beta).unitary, parts.charges);
  CHECK(matrix_near(via_chart, direct, 1e-10));
}
