// core/include/rtflab/complex_matrix.hpp

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

#ifndef RTFLAB_COMPLEX_MATRIX_HPP_
#define RTFLAB_COMPLEX_MATRIX_HPP_

#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <vector>

#include "rtflab/errors.hpp"

namespace rtflab {

using Complex = std::complex<double>;

class ComplexVector {
 public:
  ComplexVector() = default;
  explicit ComplexVector(std::size_t n) : data_(n) {}
  ComplexVector(std::initializer_list<Complex> init) : data_(init) {}

  std::size_t size() const { return data_.size(); }
  Complex& operator[](std::size_t i) { return data_[i]; }
  const Complex& operator[](std::size_t i) const { return data_[i]; }
  Complex* data() { return data_.data(); }
  const Complex* data() const { return data_.data(); }

  double norm() const {
    double s = 0.0;
    for (const Complex& v : data_) s += std::norm(v);
    return std::sqrt(s);
  }

  Complex sum() const {
    Complex s = 0.0;
    for (const Complex& v : data_) s += v;
    return s;
  }

  static ComplexVector unit(std::size_t n, std::size_t index) {
    ComplexVector e(n);
    e[index] = 1.0;
    return e;
  }

 private:
  std::vector<Complex> data_;
};

// Dense row-major complex matrix. Hermitian structure is a caller-side
// contract, not tracked by the type.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Complex& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Complex& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  Complex* data() { return data_.data(); }
  const Complex* data() const { return data_.data(); }
  Complex* row(std::size_t i) { return data_.data() + i * cols_; }
  const Complex* row(std::size_t i) const { return data_.data() + i * cols_; }

  static ComplexMatrix identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static ComplexMatrix diagonal(const std::vector<double>& d) {
    ComplexMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  ComplexVector column(std::size_t j) const {
    ComplexVector c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (const Complex& v : data_) s += std::norm(v);
    return std::sqrt(s);
  }

  Complex trace() const {
    Complex t = 0.0;
    for (std::size_t i = 0; i < rows_ && i < cols_; ++i) t += (*this)(i, i);
    return t;
  }

  bool is_hermitian(double rel_tol = 1e-12) const {
    if (rows_ != cols_) return false;
    double scale = frobenius_norm();
    if (scale == 0.0) return true;
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = i; j < cols_; ++j)
        if (std::abs((*this)(i, j) - std::conj((*this)(j, i))) > rel_tol * scale) return false;
    return true;
  }

  // (M + M^H)/2; removes rounding-level asymmetry.
  void symmetrize() {
    for (std::size_t i = 0; i < rows_; ++i) {
      (*this)(i, i) = Complex((*this)(i, i).real(), 0.0);
      for (std::size_t j = i + 1; j < cols_; ++j) {
        Complex avg = 0.5 * ((*this)(i, j) + std::conj((*this)(j, i)));
        (*this)(i, j) = avg;
        (*this)(j, i) = std::conj(avg);
      }
    }
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> data_;
};

inline ComplexMatrix conj_transpose(const ComplexMatrix& m) {
  ComplexMatrix r(m.cols(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) r(j, i) = std::conj(m(i, j));
  return r;
}

inline ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) throw DimensionMismatch("matrix product: inner dimensions differ");
  ComplexMatrix r(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      Complex aik = a(i, k);
      if (aik == Complex(0.0)) continue;
      const Complex* brow = b.row(k);
      Complex* rrow = r.row(i);
      for (std::size_t j = 0; j < b.cols(); ++j) rrow[j] += aik * brow[j];
    }
  }
  return r;
}

inline ComplexVector operator*(const ComplexMatrix& a, const ComplexVector& x) {
  if (a.cols() != x.size()) throw DimensionMismatch("matrix-vector product: dimensions differ");
  ComplexVector r(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    Complex s = 0.0;
    const Complex* arow = a.row(i);
    for (std::size_t j = 0; j < a.cols(); ++j) s += arow[j] * x[j];
    r[i] = s;
  }
  return r;
}

inline ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionMismatch("matrix sum: shapes differ");
  ComplexMatrix r(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows() * a.cols(); ++i) r.data()[i] = a.data()[i] + b.data()[i];
  return r;
}

inline ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionMismatch("matrix difference: shapes differ");
  ComplexMatrix r(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows() * a.cols(); ++i) r.data()[i] = a.data()[i] - b.data()[i];
  return r;
}

inline ComplexMatrix operator*(Complex s, const ComplexMatrix& a) {
  ComplexMatrix r(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows() * a.cols(); ++i) r.data()[i] = s * a.data()[i];
  return r;
}

inline ComplexVector operator*(Complex s, const ComplexVector& x) {
  ComplexVector r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = s * x[i];
  return r;
}

inline ComplexVector operator+(const ComplexVector& a, const ComplexVector& b) {
  if (a.size() != b.size()) throw DimensionMismatch("vector sum: sizes differ");
  ComplexVector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline ComplexVector operator-(const ComplexVector& a, const ComplexVector& b) {
  if (a.size() != b.size()) throw DimensionMismatch("vector difference: sizes differ");
  ComplexVector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

// Inner product with the first argument conjugated: dot(x, y) = x^H y.
inline Complex dot(const ComplexVector& x, const ComplexVector& y) {
  if (x.size() != y.size()) throw DimensionMismatch("dot: sizes differ");
  Complex s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += std::conj(x[i]) * y[i];
  return s;
}

// Outer product x y^H.
inline ComplexMatrix outer(const ComplexVector& x, const ComplexVector& y) {
  ComplexMatrix r(x.size(), y.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j) r(i, j) = x[i] * std::conj(y[j]);
  return r;
}

// Quadratic form x^H M x, real part (exact for Hermitian M).
inline double quadratic_form(const ComplexVector& x, const ComplexMatrix& m) {
  return dot(x, m * x).real();
}

}  // namespace rtflab

#endif  // RTFLAB_COMPLEX_MATRIX_HPP_
