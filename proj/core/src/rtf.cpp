// core/src/rtf.cpp

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

#include "rtflab/rtf.hpp"

#include <cmath>
#include <limits>

#include "rtflab/linalg.hpp"

namespace rtflab {

ComplexVector sc_estimate(const ComplexMatrix& ry, std::size_t ma, std::size_t me_index,
                          double eps_rel) {
  const std::size_t m = ry.rows();
  const std::size_t col = ma + me_index;
  if (col >= m) throw DimensionMismatch("sc_estimate: external index out of range");

  const Complex normalizer = ry(0, col);
  const double floor = eps_rel * ry.trace().real() / static_cast<double>(m);
  if (std::abs(normalizer) <= floor)
    throw NearZeroNormalizer("sc_estimate: reference entry of column " + std::to_string(col) +
                             " is near zero");
  ComplexVector h(m);
  for (std::size_t i = 0; i < m; ++i) h[i] = ry(i, col) / normalizer;
  h[0] = 1.0;
  return h;
}

double predicted_bias_sc(double snr_e) {
  if (snr_e < 0.0) throw NonpositiveInput("predicted_bias_sc: negative SNR");
  if (snr_e == 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 + 1.0 / snr_e;
}

ComplexMatrix build_estimate_matrix(const ComplexMatrix& ry, std::size_t ma,
                                    std::size_t me_count, double eps_rel) {
  if (me_count == 0) throw DimensionMismatch("build_estimate_matrix: need at least one column");
  const std::size_t m = ry.rows();
  ComplexMatrix estimates(m, me_count);
  for (std::size_t me = 0; me < me_count; ++me) {
    ComplexVector h;
    try {
      h = sc_estimate(ry, ma, me, eps_rel);
    } catch (const NearZeroNormalizer&) {
      throw NearZeroNormalizer("build_estimate_matrix: degenerate normalizer in column " +
                               std::to_string(me));
    }
    for (std::size_t i = 0; i < m; ++i) estimates(i, me) = h[i];
  }
  return estimates;
}

namespace {

WeightVector uniform_weights(std::size_t me, bool fallback) {
  WeightVector w;
  w.alpha = ComplexVector(me);
  for (std::size_t i = 0; i < me; ++i) w.alpha[i] = 1.0 / static_cast<double>(me);
  w.kind = WeightKind::Uniform;
  w.fallback = fallback;
  return w;
}

}  // namespace

WeightVector gevd_weights(const ComplexMatrix& estimates, const ComplexMatrix& ry,
                          const ComplexMatrix& rn) {
  if (rn.rows() != estimates.rows())
    throw DimensionMismatch("gevd_weights: covariance dimensions differ from estimates");
  return gevd_weights_with_factor(estimates, ry, hermitian_cholesky(rn));
}

WeightVector gevd_weights_with_factor(const ComplexMatrix& estimates, const ComplexMatrix& ry,
                                      const ComplexMatrix& rn_factor) {
  const std::size_t m = estimates.rows();
  const std::size_t me = estimates.cols();
  if (ry.rows() != m || rn_factor.rows() != m)
    throw DimensionMismatch("gevd_weights: covariance dimensions differ from estimates");
  const ComplexMatrix& l = rn_factor;

  // p = Rn^{-1} H, columnwise through the factor.
  ComplexMatrix p = cholesky_solve_matrix(l, estimates);

  // B = H^H Rn^{-1} H = H^H p;  A = (Rn^{-1} H)^H Ry (Rn^{-1} H) = p^H Ry p.
  ComplexMatrix b(me, me), a(me, me);
  {
    ComplexMatrix ph = conj_transpose(p);
    b = ph * estimates;
    // p^H (Ry p)
    a = ph * (ry * p);
  }
  // B as computed is (H^H Rn^{-1} H)^H; both are Hermitian in exact
  // arithmetic, so symmetrization settles the rounding residue.
  a.symmetrize();
  b.symmetrize();

  GevdResult g = gevd_principal(a, b);
  const Complex ones_sum = g.vector.sum();
  WeightVector w;
  if (std::abs(ones_sum) < 1e-10 * g.vector.norm()) {
    w = uniform_weights(me, true);
    w.degenerate_spectrum = g.degenerate_spectrum;
    return w;
  }
  w.alpha = ComplexVector(me);
  for (std::size_t i = 0; i < me; ++i) w.alpha[i] = g.vector[i] / ones_sum;
  w.kind = WeightKind::Gevd;
  w.degenerate_spectrum = g.degenerate_spectrum;
  return w;
}

WeightVector model_weights(const std::vector<double>& snr_e) {
  const std::size_t me = snr_e.size();
  if (me == 0) throw DimensionMismatch("model_weights: empty SNR vector");
  double sum = 0.0;
  for (double s : snr_e) {
    if (s < 0.0) throw NonpositiveInput("model_weights: negative SNR entry");
    sum += s;
  }
  if (!(sum > 0.0)) return uniform_weights(me, true);
  WeightVector w;
  w.alpha = ComplexVector(me);
  for (std::size_t i = 0; i < me; ++i) w.alpha[i] = snr_e[i] / sum;
  w.kind = WeightKind::Model;
  return w;
}

ComplexVector combine(const ComplexMatrix& estimates, const WeightVector& weights) {
  if (estimates.cols() != weights.alpha.size())
    throw DimensionMismatch("combine: weight count differs from estimate columns");
  ComplexVector h = estimates * weights.alpha;
  h[0] = 1.0;
  return h;
}

ComplexMatrix bias_matrix(const ComplexVector& h, const std::vector<double>& snr_e,
                          std::size_t ma) {
  const std::size_t m = h.size();
  const std::size_t me = snr_e.size();
  if (ma + me != m) throw DimensionMismatch("bias_matrix: ma + me must equal the channel count");
  ComplexMatrix e(m, me);
  for (std::size_t j = 0; j < me; ++j) {
    if (snr_e[j] < 0.0) throw NonpositiveInput("bias_matrix: negative SNR entry");
    e(ma + j, j) = (snr_e[j] == 0.0)
                       ? Complex(std::numeric_limits<double>::infinity(), 0.0)
                       : h[ma + j] / snr_e[j];
  }
  return e;
}

CostDecomposition cost_decomposition(const ComplexVector& h, const ComplexMatrix& rn,
                                     const ComplexMatrix& ry, const ComplexMatrix& e,
                                     const ComplexVector& alpha) {
  const std::size_t m = h.size();
  const std::size_t me = e.cols();
  if (rn.rows() != m || ry.rows() != m || e.rows() != m || alpha.size() != me)
    throw DimensionMismatch("cost_decomposition: inconsistent dimensions");
  const std::size_t ma = m - me;

  const ComplexMatrix l = hermitian_cholesky(rn);
  const ComplexVector rni_h = cholesky_solve(l, h);

  CostDecomposition out;
  out.b1 = dot(h, rni_h).real();
  out.a1 = quadratic_form(rni_h, ry);

  const double phi_x1 = (ry(0, 0) - rn(0, 0)).real();
  if (!(phi_x1 > 0.0))
    throw ModelViolation("cost_decomposition: nonpositive speech PSD at the reference");
  out.b2 = 1.0 / phi_x1;

  // Model identity: h^H Rn^{-1} E must equal (1/phi_x) 1^T. Anything else
  // means the noise field couples an external microphone to the rest.
  const ComplexMatrix rni_e = cholesky_solve_matrix(l, e);
  for (std::size_t j = 0; j < me; ++j) {
    Complex entry = 0.0;
    for (std::size_t i = 0; i < m; ++i) entry += std::conj(h[i]) * rni_e(i, j);
    if (std::abs(entry - Complex(out.b2)) > 1e-9 * out.b2)
      throw ModelViolation("cost_decomposition: h^H Rn^{-1} E deviates from (1/phi_x) 1^T at column " +
                           std::to_string(j));
  }

  // S holds the inverse external input SNRs on its diagonal.
  std::vector<double> s_diag(me);
  for (std::size_t j = 0; j < me; ++j) {
    const std::size_t idx = ma + j;
    const double phi_n = rn(idx, idx).real();
    const double phi_x = (ry(idx, idx) - rn(idx, idx)).real();
    if (!(phi_x > 0.0) || !(phi_n > 0.0))
      throw ModelViolation("cost_decomposition: nonpositive PSD at external microphone " +
                           std::to_string(j));
    s_diag[j] = phi_n / phi_x;
  }
  double c = 0.0;
  for (std::size_t j = 0; j < me; ++j) c += s_diag[j] * std::norm(alpha[j]);
  out.c_of_alpha = out.b2 * c;

  // Direct route: the cost evaluated on the full matrices built from
  // H = h 1^T + E.
  ComplexMatrix estimates(m, me);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < me; ++j) estimates(i, j) = h[i] + e(i, j);
  {
    ComplexMatrix p = cholesky_solve_matrix(l, estimates);
    ComplexMatrix ph = conj_transpose(p);
    ComplexMatrix amat = ph * (ry * p);
    ComplexMatrix bmat = ph * estimates;
    amat.symmetrize();
    bmat.symmetrize();
    out.j_direct = quadratic_form(alpha, amat) / quadratic_form(alpha, bmat);
  }

  // Reduced route: scalars only.
  const double a = out.a1 + 2.0 * (out.b1 + out.b2) + out.b2;
  const double b = out.b1 + 2.0 * out.b2;
  out.j_reduced = (a + out.c_of_alpha) / (b + out.c_of_alpha);
  return out;
}

double predicted_bias_msnr(const std::vector<double>& snr_e) {
  if (snr_e.empty()) throw DimensionMismatch("predicted_bias_msnr: empty SNR vector");
  double sum = 0.0;
  for (double s : snr_e) {
    if (s < 0.0) throw NonpositiveInput("predicted_bias_msnr: negative SNR entry");
    sum += s;
  }
  if (!(sum > 0.0)) return std::numeric_limits<double>::infinity();
  return 1.0 + 1.0 / sum;
}

}  // namespace rtflab
