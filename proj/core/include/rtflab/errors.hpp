// core/include/rtflab/errors.hpp

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

#ifndef RTFLAB_ERRORS_HPP_
#define RTFLAB_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace rtflab {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Factorization hit a nonpositive pivot; the matrix is not usable as a
// noise covariance (degenerate or indefinite).
struct NotPositiveDefinite : Error {
  using Error::Error;
};

// Eigensolver exceeded its iteration cap.
struct ConvergenceFailure : Error {
  using Error::Error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

struct SignalTooShort : Error {
  using Error::Error;
};

struct ConfigMismatch : Error {
  using Error::Error;
};

struct CoincidentSourceMic : Error {
  using Error::Error;
};

struct SilentNoise : Error {
  using Error::Error;
};

struct SilentSpeech : Error {
  using Error::Error;
};

struct NonpositiveInput : Error {
  using Error::Error;
};

struct NoActiveFrames : Error {
  using Error::Error;
};

// The covariance column used to normalize an RTF estimate is too small;
// signals speech absence or an orthogonal RTF entry.
struct NearZeroNormalizer : Error {
  using Error::Error;
};

// Inputs do not conform to the rank-1 speech / uncorrelated-external-noise
// model assumed by the cost decomposition.
struct ModelViolation : Error {
  using Error::Error;
};

struct ZeroNoisePower : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace rtflab

#endif  // RTFLAB_ERRORS_HPP_
