// tests/test_linalg.cpp

// Copyright 2026  rtflab authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "rtflab/linalg.hpp"
#include "testutil.hpp"

using namespace rtflab;
namespace tu = rtflab::testutil;

TEST_CASE("cholesky of identity is identity", "[linalg]") {
  ComplexMatrix l = hermitian_cholesky(ComplexMatrix::identity(3));
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      CHECK(std::abs(l(i, j) - Complex(i == j ? 1.0 : 0.0)) < 1e-15);
}

TEST_CASE("cholesky of diagonal takes square roots", "[linalg]") {
  ComplexMatrix l = hermitian_cholesky(ComplexMatrix::diagonal({4.0, 9.0}));
  CHECK(std::abs(l(0, 0) - Complex(2.0)) < 1e-15);
  CHECK(std::abs(l(1, 1) - Complex(3.0)) < 1e-15);
  CHECK(std::abs(l(0, 1)) == 0.0);
  CHECK(std::abs(l(1, 0)) == 0.0);
}

TEST_CASE("cholesky reconstructs random Hermitian PD matrices", "[linalg]") {
  std::mt19937_64 rng(1234);
  for (int trial = 0; trial < 50; ++trial) {
    ComplexMatrix m = tu::random_hermitian_pd(rng, 4);
    ComplexMatrix l = hermitian_cholesky(m);
    ComplexMatrix rec = l * conj_transpose(l);
    CHECK((rec - m).frobenius_norm() / m.frobenius_norm() < 1e-10);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = i + 1; j < 4; ++j) CHECK(std::abs(l(i, j)) == 0.0);
  }
}

TEST_CASE("cholesky rejects indefinite input", "[linalg]") {
  ComplexMatrix m = ComplexMatrix::diagonal({1.0, -2.0});
  CHECK_THROWS_AS(hermitian_cholesky(m), NotPositiveDefinite);
}

TEST_CASE("solve_hermitian identity and diagonal cases", "[linalg]") {
  ComplexVector b{Complex(1.0, 2.0), Complex(-3.0, 0.5)};
  ComplexVector x = solve_hermitian(ComplexMatrix::identity(2), b);
  CHECK(std::abs(x[0] - b[0]) < 1e-15);
  CHECK(std::abs(x[1] - b[1]) < 1e-15);

  ComplexVector x2 = solve_hermitian(ComplexMatrix::diagonal({2.0, 4.0}), {2.0, 4.0});
  CHECK(std::abs(x2[0] - Complex(1.0)) < 1e-14);
  CHECK(std::abs(x2[1] - Complex(1.0)) < 1e-14);
}

TEST_CASE("solve_hermitian residual on random PD systems", "[linalg]") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    ComplexMatrix m = tu::random_hermitian_pd(rng, 6);
    ComplexVector b = tu::random_vector(rng, 6);
    ComplexVector x = solve_hermitian(m, b);
    ComplexVector r = m * x - b;
    CHECK(r.norm() / b.norm() < 1e-10);
  }
}

TEST_CASE("hermitian_eig diagonal case", "[linalg]") {
  EigResult e = hermitian_eig(ComplexMatrix::diagonal({2.0, 1.0}));
  REQUIRE(e.values.size() == 2);
  CHECK(e.values[0] == Catch::Approx(1.0).margin(1e-12));
  CHECK(e.values[1] == Catch::Approx(2.0).margin(1e-12));
  // Eigenvectors are the canonical basis up to phase; phase convention makes
  // them exactly real positive.
  CHECK(std::abs(e.vectors(1, 0) - Complex(1.0)) < 1e-12);
  CHECK(std::abs(e.vectors(0, 1) - Complex(1.0)) < 1e-12);
}

TEST_CASE("hermitian_eig 2x2 exchange matrix", "[linalg]") {
  // [[0,1],[1,0]] has characteristic polynomial l^2 - 1: eigenvalues -1, 1.
  ComplexMatrix m(2, 2);
  m(0, 1) = 1.0;
  m(1, 0) = 1.0;
  EigResult e = hermitian_eig(m);
  CHECK(e.values[0] == Catch::Approx(-1.0).margin(1e-12));
  CHECK(e.values[1] == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("hermitian_eig satisfies residual, orthonormality and trace identities", "[linalg]") {
  std::mt19937_64 rng(4242);
  for (int trial = 0; trial < 40; ++trial) {
    std::size_t n = 2 + static_cast<std::size_t>(trial % 7);
    ComplexMatrix m = tu::random_hermitian(rng, n);
    EigResult e = hermitian_eig(m);

    double trace = 0.0;
    for (double v : e.values) trace += v;
    CHECK(std::abs(trace - m.trace().real()) < 1e-9 * std::max(1.0, std::abs(trace)));

    for (std::size_t j = 0; j < n; ++j) {
      ComplexVector v = e.vectors.column(j);
      ComplexVector r = m * v - Complex(e.values[j]) * v;
      CHECK(r.norm() < 1e-9 * std::max(1.0, m.frobenius_norm()));
      for (std::size_t k = 0; k <= j; ++k) {
        Complex g = dot(e.vectors.column(k), v);
        double expected = (k == j) ? 1.0 : 0.0;
        CHECK(std::abs(g - Complex(expected)) < 1e-9);
      }
    }
    for (std::size_t j = 0; j + 1 < n; ++j) CHECK(e.values[j] <= e.values[j + 1] + 1e-12);
  }
}

TEST_CASE("hermitian_eig handles repeated eigenvalues", "[linalg]") {
  std::mt19937_64 rng(99);
  // Scalar matrix: fully degenerate spectrum.
  ComplexMatrix m = ComplexMatrix::diagonal({3.0, 3.0, 3.0});
  EigResult e = hermitian_eig(m);
  for (double v : e.values) CHECK(v == Catch::Approx(3.0).margin(1e-12));
  for (std::size_t j = 0; j < 3; ++j)
    for (std::size_t k = 0; k < j; ++k)
      CHECK(std::abs(dot(e.vectors.column(k), e.vectors.column(j))) < 1e-9);

  // Unitary conjugation of a degenerate diagonal.
  ComplexMatrix d = ComplexMatrix::diagonal({1.0, 1.0, 5.0, 5.0});
  ComplexMatrix g = tu::random_hermitian_pd(rng, 4);
  EigResult gq = hermitian_eig(g);
  ComplexMatrix u = gq.vectors;  // unitary
  ComplexMatrix md = u * d * conj_transpose(u);
  md.symmetrize();
  EigResult e2 = hermitian_eig(md);
  CHECK(e2.values[0] == Catch::Approx(1.0).margin(1e-9));
  CHECK(e2.values[1] == Catch::Approx(1.0).margin(1e-9));
  CHECK(e2.values[2] == Catch::Approx(5.0).margin(1e-9));
  CHECK(e2.values[3] == Catch::Approx(5.0).margin(1e-9));
  for (std::size_t j = 0; j < 4; ++j) {
    ComplexVector v = e2.vectors.column(j);
    CHECK((md * v - Complex(e2.values[j]) * v).norm() < 1e-9 * md.frobenius_norm());
  }
}

TEST_CASE("gevd_principal with identity B matches top eigenvector", "[linalg]") {
  std::mt19937_64 rng(5150);
  ComplexMatrix a = tu::random_hermitian(rng, 5);
  GevdResult g = gevd_principal(a, ComplexMatrix::identity(5));
  EigResult e = hermitian_eig(a);
  ComplexVector top = e.vectors.column(4);
  // Same vector up to complex phase; both use the same phase convention so
  // they should agree directly.
  CHECK((g.vector - top).norm() < 1e-8);
  CHECK(g.eigenvalue == Catch::Approx(e.values[4]).margin(1e-9));
}

TEST_CASE("gevd_principal diagonal pencil", "[linalg]") {
  // A = diag(2, 1), B = I: principal direction e1.
  GevdResult g1 = gevd_principal(ComplexMatrix::diagonal({2.0, 1.0}), ComplexMatrix::identity(2));
  CHECK(std::abs(g1.vector[0]) == Catch::Approx(1.0).margin(1e-12));
  CHECK(std::abs(g1.vector[1]) < 1e-12);
  CHECK_FALSE(g1.degenerate_spectrum);

  // A = I, B = diag(1, 4): generalized eigenvalues 1 and 0.25.
  GevdResult g2 = gevd_principal(ComplexMatrix::identity(2), ComplexMatrix::diagonal({1.0, 4.0}));
  CHECK(std::abs(g2.vector[0]) == Catch::Approx(1.0).margin(1e-12));
  CHECK(std::abs(g2.vector[1]) < 1e-12);
  CHECK(g2.eigenvalue == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("gevd_principal flags degenerate pencils", "[linalg]") {
  GevdResult g = gevd_principal(ComplexMatrix::identity(3), ComplexMatrix::identity(3));
  CHECK(g.degenerate_spectrum);
  CHECK(g.eigenvalue == Catch::Approx(1.0).margin(1e-12));
  // Tie-break keeps the candidate with the largest |1^T v|.
  CHECK(std::abs(g.vector.sum()) > 0.5);
}

TEST_CASE("gevd_principal rejects non-PD B", "[linalg]") {
  CHECK_THROWS_AS(
      gevd_principal(ComplexMatrix::identity(2), ComplexMatrix::diagonal({1.0, -1.0})),
      NotPositiveDefinite);
}

TEST_CASE("gevd_principal matches brute-force eigensolve of B^{-1}A", "[linalg]") {
  std::mt19937_64 rng(31337);
  for (int trial = 0; trial < 25; ++trial) {
    std::size_t n = 2 + static_cast<std::size_t>(trial % 4);
    ComplexMatrix a = tu::random_hermitian(rng, n);
    ComplexMatrix b = tu::random_hermitian_pd(rng, n, 0.5);
    GevdResult g = gevd_principal(a, b);

    // Oracle: Gauss-Jordan inverse + shifted power iteration on B^{-1}A.
    ComplexMatrix binv_a = tu::gauss_jordan_inverse(b) * a;
    double oracle_top = tu::power_iteration_top_eigenvalue(binv_a, rng);

    double rq = rayleigh_quotient(g.vector, a, b);
    CHECK(std::abs(rq - oracle_top) < 1e-8 * std::max(1.0, std::abs(oracle_top)));
    CHECK(std::abs(g.eigenvalue - oracle_top) < 1e-8 * std::max(1.0, std::abs(oracle_top)));
  }
}

TEST_CASE("gevd_principal maximizes the generalized Rayleigh quotient", "[linalg]") {
  std::mt19937_64 rng(2025);
  ComplexMatrix a = tu::random_hermitian(rng, 4);
  ComplexMatrix b = tu::random_hermitian_pd(rng, 4, 0.5);
  GevdResult g = gevd_principal(a, b);
  double best = rayleigh_quotient(g.vector, a, b);
  for (int i = 0; i < 1000; ++i) {
    ComplexVector v = tu::random_unit_vector(rng, 4);
    CHECK(rayleigh_quotient(v, a, b) <= best + 1e-10 * std::max(1.0, std::abs(best)));
  }
  // The canonical basis vectors never beat it either.
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(rayleigh_quotient(ComplexVector::unit(4, i), a, b) <=
          best + 1e-10 * std::max(1.0, std::abs(best)));
  }
}

TEST_CASE("cholesky round-trip property over random sizes", "[linalg]") {
  std::mt19937_64 rng(808);
  for (int trial = 0; trial < 30; ++trial) {
    std::size_t n = 1 + static_cast<std::size_t>(trial % 8);
    ComplexMatrix m = tu::random_hermitian_pd(rng, n, 0.05);
    ComplexMatrix l = hermitian_cholesky(m);
    CHECK((l * conj_transpose(l) - m).frobenius_norm() / m.frobenius_norm() < 1e-10);
  }
}
