// core/include/rtflab/rtf.hpp

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

#ifndef RTFLAB_RTF_HPP_
#define RTFLAB_RTF_HPP_

#include <cstddef>
#include <vector>

#include "rtflab/complex_matrix.hpp"

namespace rtflab {

// All operations here act on a single frequency bin. Microphone index 0 is
// the reference; the first `ma` channels belong to the local array and the
// remaining `me` channels are the external microphones.

enum class WeightKind { Gevd, Model, Uniform };

// Combination weights for the externally-derived RTF estimates. The entries
// sum to one so the combined estimate keeps a unit reference entry.
struct WeightVector {
  ComplexVector alpha;
  WeightKind kind = WeightKind::Uniform;
  bool fallback = false;            // degenerate input, uniform weights substituted
  bool degenerate_spectrum = false; // GEVD top eigenvalues tied
};

struct CostDecomposition {
  double a1 = 0.0;          // h^H Rn^{-1} Ry Rn^{-1} h
  double b1 = 0.0;          // h^H Rn^{-1} h
  double b2 = 0.0;          // 1 / phi_x at the reference
  double c_of_alpha = 0.0;  // b2 * alpha^H S alpha
  double j_direct = 0.0;    // alpha^H A alpha / alpha^H B alpha, matrices in full
  double j_reduced = 0.0;   // (a + c) / (b + c) with a, b reduced to scalars
};

// RTF vector estimate from the column of the noisy covariance matrix
// belonging to external microphone `me_index`, normalized by its reference
// entry. Entry 0 of the result is pinned to exactly one. Throws
// NearZeroNormalizer when the normalizing entry has magnitude below
// eps_rel * trace/M.
ComplexVector sc_estimate(const ComplexMatrix& ry, std::size_t ma, std::size_t me_index,
                          double eps_rel = 1e-12);

// Multiplicative bias on the external entry of an SC estimate: 1 + 1/SNR.
// Saturating: infinite SNR maps to 1, zero SNR to +infinity.
double predicted_bias_sc(double snr_e);

// M x Me matrix whose column me is sc_estimate(ry, ma, me). Row 0 is all
// ones. A NearZeroNormalizer from any column propagates with its index.
ComplexMatrix build_estimate_matrix(const ComplexMatrix& ry, std::size_t ma, std::size_t me_count,
                                    double eps_rel = 1e-12);

// Combination weights maximizing the biased MVDR output SNR:
// A = H^H Rn^{-1} Ry Rn^{-1} H, B = H^H Rn^{-1} H, alpha proportional to
// the principal generalized eigenvector of (A, B), normalized to sum one.
// Falls back to uniform weights (flagged) when that normalization is
// numerically void.
WeightVector gevd_weights(const ComplexMatrix& estimates, const ComplexMatrix& ry,
                          const ComplexMatrix& rn);

// Same computation with a precomputed Cholesky factor of the (already
// loaded) noise covariance; lets callers share one factorization per bin.
WeightVector gevd_weights_with_factor(const ComplexMatrix& estimates, const ComplexMatrix& ry,
                                      const ComplexMatrix& rn_factor);

// Closed-form weights under the diffuse-noise model: input SNRs of the
// external microphones, normalized to sum one. Real-valued. All-zero input
// falls back to uniform weights (flagged).
WeightVector model_weights(const std::vector<double>& snr_e);

// Linear combination of the SC estimates: h = estimates * alpha, reference
// entry re-pinned to exactly one.
ComplexVector combine(const ComplexMatrix& estimates, const WeightVector& weights);

// M x Me bias matrix: zero rows for the local array, and the external block
// diagonal with entries h_e / SNR_e. A zero SNR produces an infinite entry
// (sentinel); callers floor their SNRs upstream.
ComplexMatrix bias_matrix(const ComplexVector& h, const std::vector<double>& snr_e,
                          std::size_t ma);

// Scalar decomposition of the biased-output-SNR cost on exact-model inputs
// (rank-1 speech covariance, spatially-uncorrelated external noise). Checks
// the h^H Rn^{-1} E = (1/phi_x) 1^T identity to 1e-9 relative and throws
// ModelViolation when the inputs do not conform.
CostDecomposition cost_decomposition(const ComplexVector& h, const ComplexMatrix& rn,
                                     const ComplexMatrix& ry, const ComplexMatrix& e,
                                     const ComplexVector& alpha);

// Shared bias of every external entry after mSNR combination with model
// weights: 1 + 1/sum(SNR). Saturating like predicted_bias_sc.
double predicted_bias_msnr(const std::vector<double>& snr_e);

}  // namespace rtflab

#endif  // RTFLAB_RTF_HPP_
