// core/src/identities.cpp

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

#include "rtflab/identities.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "rtflab/beamform.hpp"
#include "rtflab/covariance.hpp"
#include "rtflab/linalg.hpp"
#include "rtflab/rtf.hpp"

namespace rtflab {

namespace {

Complex random_phase_complex(std::mt19937_64& rng, double mag_lo, double mag_hi) {
  std::uniform_real_distribution<double> mag(mag_lo, mag_hi);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * 3.14159265358979323846);
  return std::polar(mag(rng), phase(rng));
}

}  // namespace

ExactModelInstance make_exact_model_instance(std::mt19937_64& rng, std::size_t ma,
                                             std::size_t me) {
  const std::size_t m = ma + me;
  ExactModelInstance inst;
  inst.ma = ma;
  inst.me = me;

  inst.h = ComplexVector(m);
  inst.h[0] = 1.0;
  for (std::size_t i = 1; i < m; ++i) inst.h[i] = random_phase_complex(rng, 0.3, 2.0);

  std::uniform_real_distribution<double> phi_dist(0.5, 2.0);
  inst.phi_x = phi_dist(rng);

  // Local block: dense Hermitian PD. External rows/columns: diagonal only.
  inst.rn = ComplexMatrix(m, m);
  {
    ComplexMatrix g(ma, ma);
    std::normal_distribution<double> n(0.0, 1.0);
    for (std::size_t i = 0; i < ma; ++i)
      for (std::size_t j = 0; j < ma; ++j) g(i, j) = Complex(n(rng), n(rng));
    ComplexMatrix block = g * conj_transpose(g);
    for (std::size_t i = 0; i < ma; ++i) block(i, i) += 0.25;
    block.symmetrize();
    for (std::size_t i = 0; i < ma; ++i)
      for (std::size_t j = 0; j < ma; ++j) inst.rn(i, j) = block(i, j);
  }
  std::uniform_real_distribution<double> log_snr(std::log(0.25), std::log(16.0));
  inst.snr_e.resize(me);
  for (std::size_t j = 0; j < me; ++j) {
    inst.snr_e[j] = std::exp(log_snr(rng));
    const std::size_t idx = ma + j;
    inst.rn(idx, idx) = inst.phi_x * std::norm(inst.h[idx]) / inst.snr_e[j];
  }

  inst.ry = inst.rn + Complex(inst.phi_x) * outer(inst.h, inst.h);
  inst.ry.symmetrize();
  return inst;
}

ExactModelInstance make_coherent_noise_instance(std::mt19937_64& rng, std::size_t ma,
                                                std::size_t me, double rho) {
  ExactModelInstance inst = make_exact_model_instance(rng, ma, me);
  const std::size_t idx = inst.ma;  // first external microphone
  // The dense local block already couples mic 0 to its neighbours, so too
  // strong an injected coherence can push the matrix indefinite; halve rho
  // until the factorization goes through.
  for (int attempt = 0; attempt < 8; ++attempt) {
    const double coupling =
        rho * std::sqrt(inst.rn(0, 0).real() * inst.rn(idx, idx).real());
    inst.rn(0, idx) = coupling;
    inst.rn(idx, 0) = coupling;
    try {
      hermitian_cholesky(inst.rn);
      break;
    } catch (const NotPositiveDefinite&) {
      rho *= 0.5;
    }
  }
  inst.ry = inst.rn + Complex(inst.phi_x) * outer(inst.h, inst.h);
  inst.ry.symmetrize();
  return inst;
}

namespace {

using Check = CheckResult;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3e", v);
  return buf;
}

Check check_sc_bias() {
  // M = 3, Ma = 2, h = [1, 0.5, 2], Rn = diag(1, 1, 0.5), phi_x = 1:
  // the external input SNR is 1 * |2|^2 / 0.5 = 8 and the SC estimate must
  // come out as [1, 0.5, (1 + 1/8) * 2] = [1, 0.5, 2.25].
  ComplexVector h{1.0, 0.5, 2.0};
  ComplexMatrix rn = ComplexMatrix::diagonal({1.0, 1.0, 0.5});
  ComplexMatrix ry = rn + outer(h, h);
  ComplexVector est = sc_estimate(ry, 2, 0);
  double err = std::max({std::abs(est[0] - Complex(1.0)), std::abs(est[1] - Complex(0.5)),
                         std::abs(est[2] - Complex(2.25))});
  return {"sc-bias-factor", err < 1e-10, "max entry error " + fmt(err)};
}

Check check_msnr_bias(std::mt19937_64& rng) {
  // Exact model, Me = 2, both external SNRs 8: every external entry of the
  // model-weight combination is biased by exactly 1 + 1/16.
  double worst_ext = 0.0, worst_lma = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    ExactModelInstance inst = make_exact_model_instance(rng, 2, 2);
    for (std::size_t j = 0; j < 2; ++j) {
      inst.snr_e[j] = 8.0;
      const std::size_t idx = inst.ma + j;
      inst.rn(idx, idx) = inst.phi_x * std::norm(inst.h[idx]) / 8.0;
    }
    inst.ry = inst.rn + Complex(inst.phi_x) * outer(inst.h, inst.h);
    inst.ry.symmetrize();

    ComplexMatrix estimates = build_estimate_matrix(inst.ry, inst.ma, inst.me);
    ComplexVector combined = combine(estimates, model_weights(inst.snr_e));
    for (std::size_t i = 1; i < inst.ma; ++i)
      worst_lma = std::max(worst_lma, std::abs(combined[i] - inst.h[i]));
    for (std::size_t j = 0; j < inst.me; ++j) {
      const std::size_t idx = inst.ma + j;
      worst_ext = std::max(worst_ext, std::abs(combined[idx] - Complex(1.0625) * inst.h[idx]));
    }
  }
  return {"msnr-bias-factor", worst_ext < 1e-10 && worst_lma < 1e-12,
          "external " + fmt(worst_ext) + ", local " + fmt(worst_lma)};
}

Check check_gevd_equals_model(std::mt19937_64& rng, std::size_t trials) {
  double worst = 0.0, worst_imag = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t me = 2 + t % 3;
    const std::size_t ma = 2 + t % 3;
    ExactModelInstance inst = make_exact_model_instance(rng, ma, me);
    ComplexMatrix estimates = build_estimate_matrix(inst.ry, inst.ma, inst.me);
    WeightVector gevd = gevd_weights(estimates, inst.ry, inst.rn);
    WeightVector model = model_weights(inst.snr_e);
    for (std::size_t j = 0; j < me; ++j) {
      worst = std::max(worst, std::abs(gevd.alpha[j] - model.alpha[j]));
      worst_imag = std::max(worst_imag, std::abs(gevd.alpha[j].imag()));
    }
  }
  return {"gevd-equals-model", worst < 1e-8 && worst_imag < 1e-8,
          "max entry deviation " + fmt(worst) + ", max imag " + fmt(worst_imag)};
}

Check check_cost_reduction(std::mt19937_64& rng, std::size_t trials) {
  double worst = 0.0;
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t me = 2 + t % 3;
    ExactModelInstance inst = make_exact_model_instance(rng, 3, me);
    ComplexMatrix e = bias_matrix(inst.h, inst.snr_e, inst.ma);
    // Random constraint-satisfying weights.
    ComplexVector alpha(me);
    Complex sum = 0.0;
    for (std::size_t j = 0; j < me; ++j) {
      alpha[j] = Complex(u(rng), u(rng));
      sum += alpha[j];
    }
    if (std::abs(sum) < 0.1) {
      alpha[0] += 1.0;
      sum += 1.0;
    }
    for (std::size_t j = 0; j < me; ++j) alpha[j] /= sum;

    CostDecomposition cost = cost_decomposition(inst.h, inst.rn, inst.ry, e, alpha);
    worst = std::max(worst,
                     std::abs(cost.j_direct - cost.j_reduced) / std::abs(cost.j_direct));
  }
  return {"cost-two-route-agreement", worst < 1e-8, "max relative gap " + fmt(worst)};
}

Check check_model_minimizes_cost(std::mt19937_64& rng, std::size_t trials) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t me = 2 + t % 3;
    ExactModelInstance inst = make_exact_model_instance(rng, 2, me);
    ComplexMatrix e = bias_matrix(inst.h, inst.snr_e, inst.ma);
    WeightVector model = model_weights(inst.snr_e);
    CostDecomposition best =
        cost_decomposition(inst.h, inst.rn, inst.ry, e, model.alpha);
    for (int probe = 0; probe < 200; ++probe) {
      ComplexVector alpha(me);
      Complex sum = 0.0;
      for (std::size_t j = 0; j < me; ++j) {
        alpha[j] = Complex(u(rng), u(rng));
        sum += alpha[j];
      }
      if (std::abs(sum) < 0.1) {
        alpha[0] += 1.0;
        sum += 1.0;
      }
      for (std::size_t j = 0; j < me; ++j) alpha[j] /= sum;
      CostDecomposition probe_cost =
          cost_decomposition(inst.h, inst.rn, inst.ry, e, alpha);
      if (probe_cost.c_of_alpha + 1e-12 < best.c_of_alpha)
        return {"model-weights-minimize-cost", false,
                "random competitor beat the model weights by " +
                    fmt(best.c_of_alpha - probe_cost.c_of_alpha)};
    }
  }
  return {"model-weights-minimize-cost", true, "no competitor beat the closed form"};
}

Check check_bias_dominance(std::mt19937_64& rng, std::size_t trials) {
  std::uniform_real_distribution<double> log_snr(std::log(0.05), std::log(100.0));
  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t me = 2 + t % 4;
    std::vector<double> snr(me);
    for (double& s : snr) s = std::exp(log_snr(rng));
    double combined = predicted_bias_msnr(snr);
    for (double s : snr)
      if (combined >= predicted_bias_sc(s))
        return {"msnr-bias-dominance", false, "combined factor not below individual"};
  }
  return {"msnr-bias-dominance", true, "combined bias below every single-mic bias"};
}

Check check_mvdr_identities(std::mt19937_64& rng, std::size_t trials) {
  double worst_distortion = 0.0, worst_gap = 0.0;
  std::normal_distribution<double> n(0.0, 1.0);
  for (std::size_t t = 0; t < trials; ++t) {
    ExactModelInstance inst = make_exact_model_instance(rng, 3, 2);
    ComplexVector w = mvdr_weights(inst.rn, inst.h);
    worst_distortion = std::max(worst_distortion, std::abs(dot(w, inst.h) - Complex(1.0)));

    ComplexMatrix rx = Complex(inst.phi_x) * outer(inst.h, inst.h);
    rx.symmetrize();
    NarrowbandSnr snr = narrowband_output_snr(w, rx, inst.rn);
    worst_gap = std::max(worst_gap, std::abs(snr.biased - snr.unbiased - 1.0));

    const double noise_power = quadratic_form(w, inst.rn);
    const double hh = dot(inst.h, inst.h).real();
    for (int probe = 0; probe < 100; ++probe) {
      ComplexVector v(inst.h.size());
      for (std::size_t i = 0; i < v.size(); ++i) v[i] = Complex(n(rng), n(rng));
      const Complex overlap = dot(inst.h, v);
      ComplexVector candidate = w;
      for (std::size_t i = 0; i < v.size(); ++i)
        candidate[i] += v[i] - overlap / hh * inst.h[i];
      if (quadratic_form(candidate, inst.rn) + 1e-12 < noise_power)
        return {"mvdr-identities", false, "distortionless competitor with lower noise power"};
    }
  }
  return {"mvdr-identities", worst_distortion < 1e-10 && worst_gap < 1e-12,
          "distortion " + fmt(worst_distortion) + ", biased-unbiased gap " + fmt(worst_gap)};
}

Check check_estimate_decomposition(std::mt19937_64& rng, std::size_t trials) {
  // The estimate matrix built from the covariance column must equal
  // h 1^T + E entrywise on exact-model inputs.
  double worst = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t me = 1 + t % 4;
    ExactModelInstance inst = make_exact_model_instance(rng, 2 + t % 2, me);
    ComplexMatrix estimates = build_estimate_matrix(inst.ry, inst.ma, inst.me);
    ComplexMatrix e = bias_matrix(inst.h, inst.snr_e, inst.ma);
    for (std::size_t i = 0; i < estimates.rows(); ++i)
      for (std::size_t j = 0; j < me; ++j)
        worst = std::max(worst, std::abs(estimates(i, j) - (inst.h[i] + e(i, j))));
  }
  return {"estimate-matrix-decomposition", worst < 1e-12, "max entry gap " + fmt(worst)};
}

Check check_negative_control(std::mt19937_64& rng) {
  // Coherent noise between an external microphone and the reference must
  // trip the model check and pull the GEVD weights away from the closed
  // form.
  bool violation_raised = false;
  double worst_dev = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    ExactModelInstance inst = make_coherent_noise_instance(rng, 3, 2, 0.6);
    ComplexMatrix e = bias_matrix(inst.h, inst.snr_e, inst.ma);
    WeightVector model = model_weights(inst.snr_e);
    try {
      cost_decomposition(inst.h, inst.rn, inst.ry, e, model.alpha);
    } catch (const ModelViolation&) {
      violation_raised = true;
    }
    ComplexMatrix estimates = build_estimate_matrix(inst.ry, inst.ma, inst.me);
    WeightVector gevd = gevd_weights(estimates, inst.ry, inst.rn);
    double dev = 0.0;
    for (std::size_t j = 0; j < inst.me; ++j)
      dev = std::max(dev, std::abs(gevd.alpha[j] - model.alpha[j]));
    worst_dev = std::max(worst_dev, dev);
  }
  return {"coherent-noise-negative-control", violation_raised && worst_dev > 1e-3,
          std::string(violation_raised ? "violation raised" : "violation missed") +
              ", max weight deviation " + fmt(worst_dev)};
}

}  // namespace

std::vector<CheckResult> verify_identities(std::uint64_t seed, std::size_t trials) {
  std::mt19937_64 rng(seed);
  std::vector<CheckResult> results;
  results.push_back(check_sc_bias());
  results.push_back(check_msnr_bias(rng));
  results.push_back(check_gevd_equals_model(rng, trials));
  results.push_back(check_cost_reduction(rng, trials));
  results.push_back(check_model_minimizes_cost(rng, std::max<std::size_t>(trials / 10, 5)));
  results.push_back(check_bias_dominance(rng, trials));
  results.push_back(check_mvdr_identities(rng, std::max<std::size_t>(trials / 4, 10)));
  results.push_back(check_estimate_decomposition(rng, trials));
  results.push_back(check_negative_control(rng));
  return results;
}

}  // namespace rtflab
