// core/src/linalg.cpp

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

#include "rtflab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace rtflab {

namespace {

void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() != m.cols()) throw DimensionMismatch(std::string(what) + ": matrix not square");
}

}  // namespace

ComplexMatrix hermitian_cholesky(const ComplexMatrix& m) {
  require_square(m, "hermitian_cholesky");
  const std::size_t n = m.rows();
  ComplexMatrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double diag = m(j, j).real();
    for (std::size_t k = 0; k < j; ++k) diag -= std::norm(l(j, k));
    if (!(diag > 0.0) || !std::isfinite(diag))
      throw NotPositiveDefinite("hermitian_cholesky: nonpositive pivot at index " +
                                std::to_string(j));
    const double ljj = std::sqrt(diag);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      Complex s = m(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * std::conj(l(j, k));
      l(i, j) = s / ljj;
    }
  }
  return l;
}

ComplexVector forward_substitute(const ComplexMatrix& lower, const ComplexVector& b) {
  const std::size_t n = lower.rows();
  if (b.size() != n) throw DimensionMismatch("forward_substitute: size mismatch");
  ComplexVector y(n);
  for (std::size_t i = 0; i < n; ++i) {
    Complex s = b[i];
    const Complex* row = lower.row(i);
    for (std::size_t k = 0; k < i; ++k) s -= row[k] * y[k];
    y[i] = s / row[i];
  }
  return y;
}

ComplexVector adjoint_back_substitute(const ComplexMatrix& lower, const ComplexVector& b) {
  const std::size_t n = lower.rows();
  if (b.size() != n) throw DimensionMismatch("adjoint_back_substitute: size mismatch");
  ComplexVector x(n);
  for (std::size_t ii = n; ii-- > 0;) {
    Complex s = b[ii];
    // (L^H)(ii, k) = conj(L(k, ii)) for k > ii
    for (std::size_t k = ii + 1; k < n; ++k) s -= std::conj(lower(k, ii)) * x[k];
    x[ii] = s / std::conj(lower(ii, ii));
  }
  return x;
}

ComplexVector cholesky_solve(const ComplexMatrix& lower, const ComplexVector& b) {
  return adjoint_back_substitute(lower, forward_substitute(lower, b));
}

ComplexMatrix cholesky_solve_matrix(const ComplexMatrix& lower, const ComplexMatrix& x) {
  if (lower.rows() != x.rows()) throw DimensionMismatch("cholesky_solve_matrix: size mismatch");
  ComplexMatrix r(x.rows(), x.cols());
  ComplexVector col(x.rows());
  for (std::size_t j = 0; j < x.cols(); ++j) {
    for (std::size_t i = 0; i < x.rows(); ++i) col[i] = x(i, j);
    ComplexVector sol = cholesky_solve(lower, col);
    for (std::size_t i = 0; i < x.rows(); ++i) r(i, j) = sol[i];
  }
  return r;
}

ComplexVector solve_hermitian(const ComplexMatrix& m, const ComplexVector& b) {
  return cholesky_solve(hermitian_cholesky(m), b);
}

namespace {

// Rotates each column so its largest-magnitude entry is real positive.
// Deterministic output for golden tests; downstream normalizations cancel it.
void fix_column_phases(ComplexMatrix& q) {
  const std::size_t n = q.rows();
  for (std::size_t j = 0; j < q.cols(); ++j) {
    std::size_t imax = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      double a = std::abs(q(i, j));
      if (a > best) {
        best = a;
        imax = i;
      }
    }
    if (best <= 0.0) continue;
    Complex rot = std::conj(q(imax, j)) / best;
    double nrm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      q(i, j) *= rot;
      nrm += std::norm(q(i, j));
    }
    nrm = std::sqrt(nrm);
    if (nrm > 0.0)
      for (std::size_t i = 0; i < n; ++i) q(i, j) /= nrm;
  }
}

// Householder reduction of a Hermitian matrix to real symmetric tridiagonal
// form, accumulating the unitary transform into q. On return d holds the
// diagonal and e the n-1 subdiagonal entries of T with a = q T q^H.
void tridiagonalize(ComplexMatrix a, std::vector<double>& d, std::vector<double>& e,
                    ComplexMatrix& q) {
  const std::size_t n = a.rows();
  q = ComplexMatrix::identity(n);
  d.assign(n, 0.0);
  e.assign(n > 0 ? n - 1 : 0, 0.0);
  if (n == 0) return;

  std::vector<Complex> u(n), p(n), w(n), qu(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    const std::size_t m = n - k - 1;  // active column length below the diagonal
    double sigma2 = 0.0;
    for (std::size_t i = 0; i < m; ++i) sigma2 += std::norm(a(k + 1 + i, k));
    if (sigma2 <= 0.0) continue;
    const double sigma = std::sqrt(sigma2);

    Complex alpha = a(k + 1, k);
    Complex phase = (std::abs(alpha) > 0.0) ? alpha / std::abs(alpha) : Complex(1.0);
    Complex beta = -phase * sigma;  // subdiagonal value after reflection

    double unorm2 = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      u[i] = a(k + 1 + i, k);
      if (i == 0) u[i] -= beta;
      unorm2 += std::norm(u[i]);
    }
    if (unorm2 <= 0.0) continue;
    const double inv = 2.0 / unorm2;

    // p = (2/u^H u) B u over the trailing block B = a[k+1.., k+1..]
    for (std::size_t i = 0; i < m; ++i) {
      Complex s = 0.0;
      for (std::size_t j = 0; j < m; ++j) s += a(k + 1 + i, k + 1 + j) * u[j];
      p[i] = s * inv;
    }
    Complex upc = 0.0;
    for (std::size_t i = 0; i < m; ++i) upc += std::conj(u[i]) * p[i];
    const double kappa = 0.5 * inv * upc.real();  // u^H p / u^H u, real for Hermitian B
    for (std::size_t i = 0; i < m; ++i) w[i] = p[i] - kappa * u[i];

    // B <- B - w u^H - u w^H
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j)
        a(k + 1 + i, k + 1 + j) -= w[i] * std::conj(u[j]) + u[i] * std::conj(w[j]);

    a(k + 1, k) = beta;
    a(k, k + 1) = std::conj(beta);
    for (std::size_t i = 1; i < m; ++i) {
      a(k + 1 + i, k) = 0.0;
      a(k, k + 1 + i) = 0.0;
    }

    // q <- q P with P = I - (2/u^H u) u u^H acting on columns k+1..n-1
    for (std::size_t r = 0; r < n; ++r) {
      Complex s = 0.0;
      for (std::size_t j = 0; j < m; ++j) s += q(r, k + 1 + j) * u[j];
      qu[r] = s * inv;
    }
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t j = 0; j < m; ++j) q(r, k + 1 + j) -= qu[r] * std::conj(u[j]);
  }

  // Diagonal phase similarity making every subdiagonal real nonnegative.
  std::vector<Complex> dp(n, Complex(1.0));
  for (std::size_t k = 0; k + 1 < n; ++k) {
    Complex t = a(k + 1, k);
    double mag = std::abs(t);
    if (mag > 0.0) {
      dp[k + 1] = dp[k] * (mag / t);
      e[k] = mag;
    } else {
      dp[k + 1] = dp[k];
      e[k] = 0.0;
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    Complex scale = std::conj(dp[j]);
    for (std::size_t i = 0; i < n; ++i) q(i, j) *= scale;
  }
  for (std::size_t i = 0; i < n; ++i) d[i] = a(i, i).real();
}

// Implicit-shift QL on a real symmetric tridiagonal (d, e), rotating the
// columns of q in step. 30-sweep cap per eigenvalue.
void tridiagonal_ql(std::vector<double>& d, std::vector<double>& e, ComplexMatrix& q) {
  const std::size_t n = d.size();
  if (n <= 1) return;
  std::vector<double> sub(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) sub[i] = e[i];

  for (std::size_t l = 0; l < n; ++l) {
    int iter = 0;
    std::size_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(sub[m]) <= std::numeric_limits<double>::epsilon() * dd) break;
      }
      if (m != l) {
        if (iter++ == 30)
          throw ConvergenceFailure("hermitian_eig: QL exceeded 30 sweeps at eigenvalue " +
                                   std::to_string(l));
        double g = (d[l + 1] - d[l]) / (2.0 * sub[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + sub[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        bool underflow = false;
        for (std::size_t ii = m; ii-- > l;) {
          double f = s * sub[ii];
          double b = c * sub[ii];
          r = std::hypot(f, g);
          sub[ii + 1] = r;
          if (r == 0.0) {
            d[ii + 1] -= p;
            sub[m] = 0.0;
            underflow = true;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[ii + 1] - p;
          r = (d[ii] - g) * s + 2.0 * c * b;
          p = s * r;
          d[ii + 1] = g + p;
          g = c * r - b;
          for (std::size_t k = 0; k < q.rows(); ++k) {
            Complex fk = q(k, ii + 1);
            q(k, ii + 1) = s * q(k, ii) + c * fk;
            q(k, ii) = c * q(k, ii) - s * fk;
          }
        }
        if (underflow) continue;
        d[l] -= p;
        sub[l] = g;
        sub[m] = 0.0;
      }
    } while (m != l);
  }
}

}  // namespace

EigResult hermitian_eig(const ComplexMatrix& m) {
  require_square(m, "hermitian_eig");
  const std::size_t n = m.rows();

  // Work on the exact Hermitian part; inputs are Hermitian by contract and
  // this removes rounding-level asymmetry.
  ComplexMatrix a = m;
  a.symmetrize();

  std::vector<double> d, e;
  ComplexMatrix q;
  tridiagonalize(std::move(a), d, e, q);
  tridiagonal_ql(d, e, q);

  // Sort ascending, permuting eigenvector columns along.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return d[i] < d[j]; });

  EigResult out;
  out.values.resize(n);
  out.vectors = ComplexMatrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    out.values[j] = d[order[j]];
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = q(i, order[j]);
  }
  fix_column_phases(out.vectors);
  return out;
}

double rayleigh_quotient(const ComplexVector& x, const ComplexMatrix& a, const ComplexMatrix& b) {
  return quadratic_form(x, a) / quadratic_form(x, b);
}

GevdResult gevd_principal(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_square(a, "gevd_principal");
  require_square(b, "gevd_principal");
  if (a.rows() != b.rows()) throw DimensionMismatch("gevd_principal: pencil dimensions differ");
  const std::size_t n = a.rows();

  const ComplexMatrix l = hermitian_cholesky(b);

  // c = L^{-1} a L^{-H}, formed as Z^H with Z = L^{-1} (L^{-1} a)^H.
  ComplexMatrix la(n, n);  // L^{-1} a, columnwise forward substitution
  {
    ComplexVector col(n);
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < n; ++i) col[i] = a(i, j);
      ComplexVector y = forward_substitute(l, col);
      for (std::size_t i = 0; i < n; ++i) la(i, j) = y[i];
    }
  }
  ComplexMatrix z(n, n);  // L^{-1} (L^{-1} a)^H
  {
    ComplexMatrix lah = conj_transpose(la);
    ComplexVector col(n);
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < n; ++i) col[i] = lah(i, j);
      ComplexVector y = forward_substitute(l, col);
      for (std::size_t i = 0; i < n; ++i) z(i, j) = y[i];
    }
  }
  ComplexMatrix c = conj_transpose(z);
  c.symmetrize();

  EigResult eig = hermitian_eig(c);
  const double top = eig.values[n - 1];
  double scale = 0.0;
  for (double v : eig.values) scale = std::max(scale, std::abs(v));

  // Gather all eigenvalues tied with the top within 1e-10 relative.
  std::vector<std::size_t> candidates;
  for (std::size_t i = n; i-- > 0;) {
    if (top - eig.values[i] <= 1e-10 * std::max(scale, 1e-300))
      candidates.push_back(i);
    else
      break;
  }

  GevdResult result;
  result.eigenvalue = top;
  result.degenerate_spectrum = candidates.size() > 1;

  double best_ones = -1.0;
  for (std::size_t idx : candidates) {
    ComplexVector y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = eig.vectors(i, idx);
    ComplexVector x = adjoint_back_substitute(l, y);
    double nrm = x.norm();
    if (nrm <= 0.0) continue;
    for (std::size_t i = 0; i < n; ++i) x[i] /= nrm;
    double ones = std::abs(x.sum());
    if (ones > best_ones) {
      best_ones = ones;
      result.vector = x;
    }
  }

  // Deterministic phase, matching the eigenvector convention.
  std::size_t imax = 0;
  double best = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    double v = std::abs(result.vector[i]);
    if (v > best) {
      best = v;
      imax = i;
    }
  }
  if (best > 0.0) {
    Complex rot = std::conj(result.vector[imax]) / best;
    for (std::size_t i = 0; i < n; ++i) result.vector[i] *= rot;
  }
  return result;
}

}  // namespace rtflab
