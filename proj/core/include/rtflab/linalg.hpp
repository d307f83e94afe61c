// core/include/rtflab/linalg.hpp

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

#ifndef RTFLAB_LINALG_HPP_
#define RTFLAB_LINALG_HPP_

#include <vector>

#include "rtflab/complex_matrix.hpp"

namespace rtflab {

// Lower-triangular L with L L^H = m. Only the lower triangle of m is read.
// Throws NotPositiveDefinite on a nonpositive pivot.
ComplexMatrix hermitian_cholesky(const ComplexMatrix& m);

// Solves L y = b for lower-triangular L.
ComplexVector forward_substitute(const ComplexMatrix& lower, const ComplexVector& b);

// Solves L^H x = b for lower-triangular L.
ComplexVector adjoint_back_substitute(const ComplexMatrix& lower, const ComplexVector& b);

// Solves (L L^H) x = b given the Cholesky factor.
ComplexVector cholesky_solve(const ComplexMatrix& lower, const ComplexVector& b);

// Columnwise (L L^H)^{-1} X given the Cholesky factor.
ComplexMatrix cholesky_solve_matrix(const ComplexMatrix& lower, const ComplexMatrix& x);

// Solves m x = b for Hermitian positive definite m.
ComplexVector solve_hermitian(const ComplexMatrix& m, const ComplexVector& b);

struct EigResult {
  std::vector<double> values;  // ascending
  ComplexMatrix vectors;       // column i pairs with values[i]; unit norm
};

// Full eigendecomposition of a Hermitian matrix via Householder
// tridiagonalization and implicit-shift QL. Iteration cap of 30 sweeps per
// eigenvalue; throws ConvergenceFailure beyond it. Eigenvector phases are
// fixed so the largest-magnitude entry of each column is real positive.
EigResult hermitian_eig(const ComplexMatrix& m);

struct GevdResult {
  ComplexVector vector;  // unit norm
  double eigenvalue = 0.0;
  // Top two generalized eigenvalues coincide within 1e-10 relative. The
  // returned candidate is the tied vector with the largest |1^T v|, which
  // keeps the downstream sum-to-one normalization away from blowup.
  bool degenerate_spectrum = false;
};

// Principal generalized eigenvector of the pencil (a, b): the eigenvector of
// b^{-1} a with the algebraically largest eigenvalue. a Hermitian, b Hermitian
// positive definite. Computed by the Cholesky reduction b = L L^H, a standard
// Hermitian eigenproblem on L^{-1} a L^{-H}, and back-substitution.
GevdResult gevd_principal(const ComplexMatrix& a, const ComplexMatrix& b);

// Generalized Rayleigh quotient x^H a x / x^H b x.
double rayleigh_quotient(const ComplexVector& x, const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace rtflab

#endif  // RTFLAB_LINALG_HPP_
