// core/include/rtflab/identities.hpp

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

#ifndef RTFLAB_IDENTITIES_HPP_
#define RTFLAB_IDENTITIES_HPP_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "rtflab/complex_matrix.hpp"

namespace rtflab {

// One-bin covariance instance conforming exactly to the analysis model:
// rank-1 speech covariance phi_x h h^H and a noise covariance whose external
// rows and columns are zero off the diagonal.
struct ExactModelInstance {
  std::size_t ma = 0;
  std::size_t me = 0;
  ComplexVector h;            // h[0] = 1
  double phi_x = 0.0;         // speech PSD at the reference
  ComplexMatrix rn;           // Hermitian PD, model-conforming
  ComplexMatrix ry;           // phi_x h h^H + rn
  std::vector<double> snr_e;  // phi_x |h_e|^2 / phi_n_e per external mic
};

// Random instance with |h| entries in [0.3, 2], phi_x in [0.5, 2], a dense
// Hermitian PD local-noise block and external SNRs log-uniform in
// [0.25, 16].
ExactModelInstance make_exact_model_instance(std::mt19937_64& rng, std::size_t ma,
                                             std::size_t me);

// Same construction, then a coherence `rho` injected between external
// microphone 0 and the reference, breaking the uncorrelated-noise
// assumption. Diagonals (and hence the nominal SNRs) are unchanged.
ExactModelInstance make_coherent_noise_instance(std::mt19937_64& rng, std::size_t ma,
                                                std::size_t me, double rho);

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

// Constructed-covariance test battery for the bias and weight identities:
// SC and mSNR bias factors, GEVD-equals-model weights, the two-route cost
// evaluation, model-weight optimality, bias dominance, MVDR identities, and
// the coherent-noise negative control. Failures are results, not exceptions.
std::vector<CheckResult> verify_identities(std::uint64_t seed = 1, std::size_t trials = 200);

}  // namespace rtflab

#endif  // RTFLAB_IDENTITIES_HPP_
