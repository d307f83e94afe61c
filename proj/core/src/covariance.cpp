// core/src/covariance.cpp

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

#include "rtflab/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace rtflab {

double smoothing_factor(double time_constant, double hop_duration, SmoothingMap map) {
  if (!(time_constant > 0.0) || !(hop_duration > 0.0))
    throw NonpositiveInput("smoothing_factor: time constant and hop duration must be positive");
  double lambda;
  switch (map) {
    case SmoothingMap::Exponential:
      lambda = std::exp(-hop_duration / time_constant);
      break;
    case SmoothingMap::Linear:
      lambda = 1.0 - hop_duration / time_constant;
      break;
    default:
      lambda = 0.0;
  }
  return std::clamp(lambda, 1e-12, 1.0);
}

namespace {

// r <- lambda r + (1 - lambda) v v^H, writing the upper triangle and
// mirroring so the stored matrix is exactly Hermitian.
void smoothed_rank_one(ComplexMatrix& r, const Complex* v, std::size_t m, double lambda) {
  const double w = 1.0 - lambda;
  for (std::size_t i = 0; i < m; ++i) {
    r(i, i) = Complex(lambda * r(i, i).real() + w * std::norm(v[i]), 0.0);
    for (std::size_t j = i + 1; j < m; ++j) {
      Complex upd = lambda * r(i, j) + w * v[i] * std::conj(v[j]);
      r(i, j) = upd;
      r(j, i) = std::conj(upd);
    }
  }
}

void accumulate_rank_one(ComplexMatrix& r, const Complex* v, std::size_t m) {
  for (std::size_t i = 0; i < m; ++i) {
    r(i, i) += std::norm(v[i]);
    for (std::size_t j = i + 1; j < m; ++j) {
      Complex upd = v[i] * std::conj(v[j]);
      r(i, j) += upd;
      r(j, i) += std::conj(upd);
    }
  }
}

}  // namespace

CovarianceState::CovarianceState(std::size_t bins, std::size_t channels,
                                 CovarianceSmoothing smoothing, TrackingMode mode)
    : bins_(bins),
      channels_(channels),
      smoothing_(smoothing),
      mode_(mode),
      ry_(bins, ComplexMatrix(channels, channels)),
      rx_(bins, ComplexMatrix(channels, channels)),
      rn_(bins, ComplexMatrix(channels, channels)) {
  for (double l : {smoothing.lambda_y, smoothing.lambda_x, smoothing.lambda_n})
    if (!(l > 0.0) || !(l < 1.0))
      throw NonpositiveInput("CovarianceState: smoothing factors must lie in (0, 1)");
}

void CovarianceState::update(const FrameView& y, bool vad) {
  if (y.bins != bins_ || y.channels != channels_)
    throw DimensionMismatch("CovarianceState::update: frame shape mismatch");
  if (vad) {
    for (std::size_t k = 0; k < bins_; ++k)
      smoothed_rank_one(ry_[k], y.bin(k), channels_, smoothing_.lambda_y);
    ++frames_y_;
  } else {
    for (std::size_t k = 0; k < bins_; ++k)
      smoothed_rank_one(rn_[k], y.bin(k), channels_, smoothing_.lambda_n);
    ++frames_n_;
  }
}

void CovarianceState::update(const FrameView& y, const FrameView& x, const FrameView& n,
                             bool vad) {
  if (y.bins != bins_ || y.channels != channels_ || x.bins != bins_ || x.channels != channels_ ||
      n.bins != bins_ || n.channels != channels_)
    throw DimensionMismatch("CovarianceState::update: frame shape mismatch");
  for (std::size_t k = 0; k < bins_; ++k)
    smoothed_rank_one(rn_[k], n.bin(k), channels_, smoothing_.lambda_n);
  ++frames_n_;
  if (vad) {
    for (std::size_t k = 0; k < bins_; ++k) {
      smoothed_rank_one(rx_[k], x.bin(k), channels_, smoothing_.lambda_x);
      if (mode_ == TrackingMode::Independent)
        smoothed_rank_one(ry_[k], y.bin(k), channels_, smoothing_.lambda_y);
    }
    ++frames_x_;
    ++frames_y_;
  }
  if (mode_ == TrackingMode::ConsistentSum) {
    for (std::size_t k = 0; k < bins_; ++k) ry_[k] = rx_[k] + rn_[k];
  }
}

OracleCovariances oracle_covariances(const Spectrogram& x_frames, const Spectrogram& n_frames,
                                     const std::vector<bool>& vad) {
  if (x_frames.frames() != n_frames.frames() || x_frames.bins() != n_frames.bins() ||
      x_frames.channels() != n_frames.channels())
    throw DimensionMismatch("oracle_covariances: component spectrograms differ in shape");
  if (!vad.empty() && vad.size() != x_frames.frames())
    throw DimensionMismatch("oracle_covariances: vad length mismatch");

  const std::size_t bins = x_frames.bins();
  const std::size_t m = x_frames.channels();
  const std::size_t frames = x_frames.frames();

  std::size_t active = 0;
  for (std::size_t l = 0; l < frames; ++l)
    if (vad.empty() || vad[l]) ++active;
  if (active == 0) throw NoActiveFrames("oracle_covariances: VAD never active");

  OracleCovariances out;
  out.rx.assign(bins, ComplexMatrix(m, m));
  out.rn.assign(bins, ComplexMatrix(m, m));
  out.ry.assign(bins, ComplexMatrix(m, m));

  for (std::size_t l = 0; l < frames; ++l) {
    const bool is_active = vad.empty() || vad[l];
    for (std::size_t k = 0; k < bins; ++k) {
      accumulate_rank_one(out.rn[k], n_frames.bin_data(l, k), m);
      if (is_active) accumulate_rank_one(out.rx[k], x_frames.bin_data(l, k), m);
    }
  }
  const Complex inv_frames(1.0 / static_cast<double>(frames));
  const Complex inv_active(1.0 / static_cast<double>(active));
  for (std::size_t k = 0; k < bins; ++k) {
    out.rn[k] = inv_frames * out.rn[k];
    out.rx[k] = inv_active * out.rx[k];
    out.ry[k] = out.rx[k] + out.rn[k];
  }
  return out;
}

ComplexMatrix diagonal_loaded(const ComplexMatrix& m, double rel) {
  ComplexMatrix out = m;
  const double load = rel * m.trace().real() / static_cast<double>(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) out(i, i) += load;
  return out;
}

void write_covariance_csv(std::ostream& out, const std::vector<ComplexMatrix>& per_bin) {
  out << "bin,row,col,re,im\n";
  char line[128];
  for (std::size_t k = 0; k < per_bin.size(); ++k) {
    const ComplexMatrix& m = per_bin[k];
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = 0; j < m.cols(); ++j) {
        std::snprintf(line, sizeof(line), "%zu,%zu,%zu,%.17g,%.17g\n", k, i, j, m(i, j).real(),
                      m(i, j).imag());
        out << line;
      }
  }
}

}  // namespace rtflab
