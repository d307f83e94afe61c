// tests/test_rtf.cpp

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
#include <limits>
#include <random>

#include "rtflab/identities.hpp"
#include "rtflab/linalg.hpp"
#include "rtflab/rtf.hpp"
#include "testutil.hpp"

using namespace rtflab;
namespace tu = rtflab::testutil;

TEST_CASE("sc_estimate recovers the RTF exactly without noise", "[rtf]") {
  // Noise-free: ry is rank one, every column is proportional to h.
  ComplexVector h{1.0, 0.5, 2.0};
  ComplexMatrix ry = Complex(0.7) * outer(h, h);
  ComplexVector est = sc_estimate(ry, 2, 0);
  for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(est[i] - h[i]) < 1e-14);
}

TEST_CASE("sc_estimate reproduces the constructed bias instance", "[rtf]") {
  // h = [1, 0.5, 2], Rn = diag(1, 1, 0.5), phi = 1. Column 3 of ry is
  // [2, 1, 4.5]; normalizing by its first entry gives [1, 0.5, 2.25], i.e.
  // the external entry is biased by 1 + 1/8 with SNR_e = 1*|2|^2/0.5 = 8.
  ComplexVector h{1.0, 0.5, 2.0};
  ComplexMatrix ry = ComplexMatrix::diagonal({1.0, 1.0, 0.5}) + outer(h, h);
  ComplexVector est = sc_estimate(ry, 2, 0);
  CHECK(std::abs(est[0] - Complex(1.0)) < 1e-12);
  CHECK(std::abs(est[1] - Complex(0.5)) < 1e-12);
  CHECK(std::abs(est[2] - Complex(2.25)) < 1e-12);
}

TEST_CASE("sc_estimate local entries stay unbiased on exact-model inputs", "[rtf]") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 50; ++trial) {
    ExactModelInstance inst = make_exact_model_instance(rng, 3, 2);
    for (std::size_t me = 0; me < inst.me; ++me) {
      ComplexVector est = sc_estimate(inst.ry, inst.ma, me);
      for (std::size_t i = 0; i < inst.ma; ++i)
        CHECK(std::abs(est[i] - inst.h[i]) < 1e-12 * std::max(1.0, std::abs(inst.h[i])));
      // And the external entry carries exactly the predicted factor.
      const std::size_t idx = inst.ma + me;
      const Complex expected = Complex(predicted_bias_sc(inst.snr_e[me])) * inst.h[idx];
      CHECK(std::abs(est[idx] - expected) < 1e-10 * std::abs(expected));
    }
  }
}

TEST_CASE("sc_estimate rejects a near-zero normalizer", "[rtf]") {
  ComplexMatrix ry = ComplexMatrix::diagonal({1.0, 1.0, 1.0});  // column 3 has zero top entry
  CHECK_THROWS_AS(sc_estimate(ry, 2, 0), NearZeroNormalizer);
}

TEST_CASE("predicted_bias_sc evaluates the single-mic factor", "[rtf]") {
  CHECK(predicted_bias_sc(8.0) == Catch::Approx(1.125).epsilon(1e-15));
  CHECK(predicted_bias_sc(1.0) == Catch::Approx(2.0).epsilon(1e-15));
  CHECK(predicted_bias_sc(std::numeric_limits<double>::infinity()) == 1.0);
  CHECK(std::isinf(predicted_bias_sc(0.0)));
}

TEST_CASE("build_estimate_matrix stacks SC estimates columnwise", "[rtf]") {
  std::mt19937_64 rng(202);
  ExactModelInstance inst = make_exact_model_instance(rng, 2, 2);
  ComplexMatrix estimates = build_estimate_matrix(inst.ry, inst.ma, inst.me);
  REQUIRE(estimates.cols() == 2);
  // Row 0 is all ones.
  CHECK(std::abs(estimates(0, 0) - Complex(1.0)) == 0.0);
  CHECK(std::abs(estimates(0, 1) - Complex(1.0)) == 0.0);
  // Columns agree with sc_estimate, and the local rows agree across columns.
  for (std::size_t me = 0; me < 2; ++me) {
    ComplexVector col = sc_estimate(inst.ry, inst.ma, me);
    for (std::size_t i = 0; i < estimates.rows(); ++i)
      CHECK(std::abs(estimates(i, me) - col[i]) == 0.0);
  }
  for (std::size_t i = 0; i < inst.ma; ++i)
    CHECK(std::abs(estimates(i, 0) - estimates(i, 1)) < 1e-12);
}

TEST_CASE("model_weights normalizes the input SNRs", "[rtf]") {
  WeightVector w = model_weights({2.0, 6.0});
  CHECK(w.kind == WeightKind::Model);
  CHECK(std::abs(w.alpha[0] - Complex(0.25)) < 1e-15);
  CHECK(std::abs(w.alpha[1] - Complex(0.75)) < 1e-15);

  WeightVector equal = model_weights({3.3, 3.3, 3.3});
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(std::abs(equal.alpha[i] - Complex(1.0 / 3.0)) < 1e-15);

  WeightVector dominant = model_weights({1e9, 1.0});
  CHECK(std::abs(dominant.alpha[0].real() - 1.0) < 1e-8);
  CHECK(dominant.alpha[1].real() == Catch::Approx(1e-9).epsilon(1e-6));

  WeightVector zero = model_weights({0.0, 0.0});
  CHECK(zero.fallback);
  CHECK(std::abs(zero.alpha[0] - Complex(0.5)) < 1e-15);
}

TEST_CASE("weight vectors sum to one", "[rtf]") {
  std::mt19937_64 rng(303);
  for (int trial = 0; trial < 100; ++trial) {
    ExactModelInstance inst = make_exact_model_instance(rng, 2 + trial % 3, 2 + trial % 3);
    ComplexMatrix estimates = build_estimate_matrix(inst.ry, inst.ma, inst.me);
    WeightVector gevd = gevd_weights(estimates, inst.ry, inst.rn);
    WeightVector model = model_weights(inst.snr_e);
    CHECK(std::abs(gevd.alpha.sum() - Complex(1.0)) < 1e-10);
    CHECK(std::abs(model.alpha.sum() - Complex(1.0)) < 1e-10);
  }
}

TEST_CASE("gevd_weights with one external microphone is forced to [1]", "[rtf]") {
  std::mt19937_64 rng(404);
  ExactModelInstance inst = make_exact_model_instance(rng, 3, 1);
  ComplexMatrix estimates = build_estimate_matrix(inst.ry, inst.ma, inst.me);
  WeightVector w = gevd_weights(estimates, inst.ry, inst.rn);
  CHECK(std::abs(w.alpha[0] - Complex(1.0)) < 1e-12);
}

TEST_CASE("gevd_weights equals model_weights on exact-model inputs", "[rtf]") {
  std::mt19937_64 rng(505);
  for (int trial = 0; trial < 100; ++trial) {
    ExactModelInstance inst = make_exact_model_instance(rng, 2 + trial % 2, 2 + trial % 3);
    ComplexMatrix estimates = build_estimate_matrix(inst.ry, inst.ma, inst.me);
    WeightVector gevd = gevd_weights(estimates, inst.ry, inst.rn);
    WeightVector model = model_weights(inst.snr_e);
    for (std::size_t j = 0; j < inst.me; ++j) {
      CHECK(std::abs(gevd.alpha[j] - model.alpha[j]) < 1e-8);
      CHECK(std::abs(gevd.alpha[j].imag()) < 1e-8);
    }
  }
}

TEST_CASE("gevd weights maximize the biased-output-SNR cost", "[rtf]") {
  std::mt19937_64 rng(606);
  ExactModelInstance inst = make_exact_model_instance(rng, 3, 3);
  ComplexMatrix estimates = build_estimate_matrix(inst.ry, inst.ma, inst.me);
  const ComplexMatrix l = hermitian_cholesky(inst.rn);
  ComplexMatrix p = cholesky_solve_matrix(l, estimates);
  ComplexMatrix ph = conj_transpose(p);
  ComplexMatrix a = ph * (inst.ry * p);
  ComplexMatrix b = ph * estimates;
  a.symmetrize();
  b.symmetrize();

  WeightVector gevd = gevd_weights(estimates, inst.ry, inst.rn);
  const double best = quadratic_form(gevd.alpha, a) / quadratic_form(gevd.alpha, b);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int probe = 0; probe < 1000; ++probe) {
    ComplexVector alpha(inst.me);
    Complex sum = 0.0;
    for (std::size_t j = 0; j < inst.me; ++j) {
      alpha[j] = Complex(u(rng), u(rng));
      sum += alpha[j];
    }
    if (std::abs(sum) < 0.1) continue;
    for (std::size_t j = 0; j < inst.me; ++j) alpha[j] /= sum;
    const double probe_cost = quadratic_form(alpha, a) / quadratic_form(alpha, b);
    CHECK(probe_cost <= best + 1e-9 * std::abs(best));
  }
}

TEST_CASE("combine selects and mixes estimate columns", "[rtf]") {
  std::mt19937_64 rng(707);
  ExactModelInstance inst = make_exact_model_instance(rng, 2, 2);
  ComplexMatrix estimates = build_estimate_matrix(inst.ry, inst.ma, inst.me);

  WeightVector select;
  select.alpha = ComplexVector{1.0, 0.0};
  ComplexVector h1 = combine(estimates, select);
  for (std::size_t i = 0; i < estimates.rows(); ++i)
    CHECK(std::abs(h1[i] - estimates(i, 0)) < 1e-15);

  // Local entries equal the true RTF for any valid weights.
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int probe = 0; probe < 50; ++probe) {
    WeightVector w;
    w.alpha = ComplexVector(2);
    w.alpha[0] = Complex(u(rng), u(rng));
    w.alpha[1] = Complex(1.0) - w.alpha[0];
    ComplexVector h = combine(estimates, w);
    CHECK(std::abs(h[0] - Complex(1.0)) == 0.0);
    for (std::size_t i = 1; i < inst.ma; ++i) CHECK(std::abs(h[i] - inst.h[i]) < 1e-10);
  }
}

TEST_CASE("msnr combination carries the shared external bias", "[rtf]") {
  // SNRs {8, 8}: every external entry biased by exactly 1 + 1/16.
  std::mt19937_64 rng(808);
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
  for (std::size_t j = 0; j < 2; ++j) {
    const std::size_t idx = inst.ma + j;
    CHECK(std::abs(combined[idx] - Complex(1.0625) * inst.h[idx]) < 1e-10);
  }
  for (std::size_t i = 1; i < inst.ma; ++i) CHECK(std::abs(combined[i] - inst.h[i]) < 1e-12);
}

TEST_CASE("bias_matrix lays out the external diagonal", "[rtf]") {
  ComplexVector h{1.0, 0.5, 2.0};
  ComplexMatrix e = bias_matrix(h, {8.0}, 2);
  REQUIRE(e.rows() == 3);
  REQUIRE(e.cols() == 1);
  CHECK(std::abs(e(0, 0)) == 0.0);
  CHECK(std::abs(e(1, 0)) == 0.0);
  CHECK(std::abs(e(2, 0) - Complex(0.25)) < 1e-15);

  // Infinite SNR: no bias at all.
  ComplexMatrix zero = bias_matrix(h, {std::numeric_limits<double>::infinity()}, 2);
  CHECK(zero.frobenius_norm() == 0.0);
}

TEST_CASE("estimate matrix equals h 1^T + E on exact-model inputs", "[rtf]") {
  std::mt19937_64 rng(909);
  for (int trial = 0; trial < 30; ++trial) {
    ExactModelInstance inst = make_exact_model_instance(rng, 2, 1 + trial % 3);
    ComplexMatrix estimates = build_estimate_matrix(inst.ry, inst.ma, inst.me);
    ComplexMatrix e = bias_matrix(inst.h, inst.snr_e, inst.ma);
    for (std::size_t i = 0; i < estimates.rows(); ++i)
      for (std::size_t j = 0; j < inst.me; ++j)
        CHECK(std::abs(estimates(i, j) - (inst.h[i] + e(i, j))) < 1e-12);
  }
}

TEST_CASE("cost_decomposition: two routes agree and S holds inverse SNRs", "[rtf]") {
  std::mt19937_64 rng(1010);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    ExactModelInstance inst = make_exact_model_instance(rng, 3, 2 + trial % 2);
    ComplexMatrix e = bias_matrix(inst.h, inst.snr_e, inst.ma);
    ComplexVector alpha(inst.me);
    Complex sum = 0.0;
    for (std::size_t j = 0; j < inst.me; ++j) {
      alpha[j] = Complex(u(rng), u(rng));
      sum += alpha[j];
    }
    if (std::abs(sum) < 0.1) {
      alpha[0] += 1.0;
      sum += 1.0;
    }
    for (std::size_t j = 0; j < inst.me; ++j) alpha[j] /= sum;

    CostDecomposition cost = cost_decomposition(inst.h, inst.rn, inst.ry, e, alpha);
    CHECK(std::abs(cost.j_direct - cost.j_reduced) < 1e-8 * std::abs(cost.j_direct));
    CHECK(cost.a1 > 0.0);
    CHECK(cost.b1 > 0.0);
    CHECK(cost.b2 == Catch::Approx(1.0 / inst.phi_x).epsilon(1e-9));

    // c(alpha) = b2 * alpha^H S alpha with S = diag(1/SNR).
    double expected_c = 0.0;
    for (std::size_t j = 0; j < inst.me; ++j)
      expected_c += std::norm(alpha[j]) / inst.snr_e[j];
    expected_c /= inst.phi_x;
    CHECK(cost.c_of_alpha == Catch::Approx(expected_c).epsilon(1e-8));
  }
}

TEST_CASE("cost_decomposition minimal at the model weights", "[rtf]") {
  std::mt19937_64 rng(1111);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ExactModelInstance inst = make_exact_model_instance(rng, 2, 3);
  ComplexMatrix e = bias_matrix(inst.h, inst.snr_e, inst.ma);
  WeightVector model = model_weights(inst.snr_e);
  CostDecomposition best = cost_decomposition(inst.h, inst.rn, inst.ry, e, model.alpha);
  for (int probe = 0; probe < 1000; ++probe) {
    ComplexVector alpha(3);
    Complex sum = 0.0;
    for (std::size_t j = 0; j < 3; ++j) {
      alpha[j] = Complex(u(rng), u(rng));
      sum += alpha[j];
    }
    if (std::abs(sum) < 0.1) continue;
    for (std::size_t j = 0; j < 3; ++j) alpha[j] /= sum;
    CostDecomposition probe_cost = cost_decomposition(inst.h, inst.rn, inst.ry, e, alpha);
    CHECK(best.c_of_alpha <= probe_cost.c_of_alpha + 1e-12);
  }
}

TEST_CASE("cost_decomposition raises ModelViolation on coherent noise", "[rtf]") {
  std::mt19937_64 rng(1212);
  ExactModelInstance inst = make_coherent_noise_instance(rng, 3, 2, 0.6);
  ComplexMatrix e = bias_matrix(inst.h, inst.snr_e, inst.ma);
  WeightVector model = model_weights(inst.snr_e);
  CHECK_THROWS_AS(cost_decomposition(inst.h, inst.rn, inst.ry, e, model.alpha), ModelViolation);
}

TEST_CASE("predicted_bias_msnr and dominance over single-mic factors", "[rtf]") {
  CHECK(predicted_bias_msnr({8.0, 8.0}) == Catch::Approx(1.0625).epsilon(1e-15));
  CHECK(predicted_bias_msnr({8.0}) == Catch::Approx(predicted_bias_sc(8.0)).epsilon(1e-15));
  CHECK(std::isinf(predicted_bias_msnr({0.0, 0.0})));

  std::mt19937_64 rng(1313);
  std::uniform_real_distribution<double> u(0.01, 100.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> snr(2 + trial % 3);
    for (double& s : snr) s = u(rng);
    const double combined = predicted_bias_msnr(snr);
    for (double s : snr) CHECK(combined < predicted_bias_sc(s));
  }
}

TEST_CASE("identity battery passes end to end", "[rtf]") {
  for (const CheckResult& r : verify_identities(42, 60)) {
    INFO(r.name << ": " << r.detail);
    CHECK(r.pass);
  }
}
