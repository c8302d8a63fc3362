// Copyright 2026 The rsde Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>

#include "rsde/error.hpp"

namespace rsde {

// Largest spatial (and noise) dimension supported by the fixed-capacity
// point and matrix types.
inline constexpr int kMaxDim = 4;

// A point or displacement in R^d, d <= kMaxDim, stored inline.
class Vec {
 public:
  Vec() = default;

  explicit Vec(int dim) : dim_(dim) {
    if (dim < 1 || dim > kMaxDim) throw InvalidArgument("Vec: dimension out of range");
  }

  Vec(std::initializer_list<double> values) : Vec(static_cast<int>(values.size())) {
    int i = 0;
    for (double v : values) v_[i++] = v;
  }

  static Vec from_span(std::span<const double> values) {
    Vec out(static_cast<int>(values.size()));
    for (int i = 0; i < out.dim_; ++i) out.v_[i] = values[i];
    return out;
  }

  static Vec filled(int dim, double value) {
    Vec out(dim);
    for (int i = 0; i < dim; ++i) out.v_[i] = value;
    return out;
  }

  static Vec unit(int dim, int axis) {
    Vec out(dim);
    out.v_[axis] = 1.0;
    return out;
  }

  int dim() const { return dim_; }
  double operator[](int i) const { return v_[i]; }
  double& operator[](int i) { return v_[i]; }

  std::span<const double> span() const { return {v_.data(), static_cast<std::size_t>(dim_)}; }
  const double* begin() const { return v_.data(); }
  const double* end() const { return v_.data() + dim_; }

  Vec& operator+=(const Vec& o) {
    for (int i = 0; i < dim_; ++i) v_[i] += o.v_[i];
    return *this;
  }
  Vec& operator-=(const Vec& o) {
    for (int i = 0; i < dim_; ++i) v_[i] -= o.v_[i];
    return *this;
  }
  Vec& operator*=(double s) {
    for (int i = 0; i < dim_; ++i) v_[i] *= s;
    return *this;
  }
  Vec& operator/=(double s) {
    for (int i = 0; i < dim_; ++i) v_[i] /= s;
    return *this;
  }

  bool all_finite() const {
    for (int i = 0; i < dim_; ++i)
      if (!std::isfinite(v_[i])) return false;
    return true;
  }

  friend bool operator==(const Vec& a, const Vec& b) {
    if (a.dim_ != b.dim_) return false;
    for (int i = 0; i < a.dim_; ++i)
      if (a.v_[i] != b.v_[i]) return false;
    return true;
  }

 private:
  std::array<double, kMaxDim> v_{};
  int dim_ = 0;
};

inline Vec operator+(Vec a, const Vec& b) { return a += b; }
inline Vec operator-(Vec a, const Vec& b) { return a -= b; }
inline Vec operator-(Vec a) { return a *= -1.0; }
inline Vec operator*(Vec a, double s) { return a *= s; }
inline Vec operator*(double s, Vec a) { return a *= s; }
inline Vec operator/(Vec a, double s) { return a /= s; }

inline double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (int i = 0; i < a.dim(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const Vec& a) { return dot(a, a); }
inline double norm(const Vec& a) { return std::sqrt(norm2(a)); }

// Row-major dense matrix with inline storage, rows, cols <= kMaxDim.
class Mat {
 public:
  Mat() = default;
  Mat(int rows, int cols) : rows_(rows), cols_(cols) {
    if (rows < 1 || rows > kMaxDim || cols < 1 || cols > kMaxDim)
      throw InvalidArgument("Mat: shape out of range");
  }

  static Mat identity(int n, double scale = 1.0) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = scale;
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double operator()(int i, int j) const { return a_[i * kMaxDim + j]; }
  double& operator()(int i, int j) { return a_[i * kMaxDim + j]; }

  Mat transposed() const {
    Mat t(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  bool is_zero() const {
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j)
        if ((*this)(i, j) != 0.0) return false;
    return true;
  }

 private:
  std::array<double, kMaxDim * kMaxDim> a_{};
  int rows_ = 0;
  int cols_ = 0;
};

Vec operator*(const Mat& m, const Vec& v);
Mat operator*(const Mat& a, const Mat& b);

// a = m m^T.
Mat gram(const Mat& m);

// Cholesky factor of a symmetric matrix; returns false when the matrix is
// not positive definite (pivot <= tol * max diagonal).
bool cholesky(const Mat& a, Mat& lower, double tol = 1e-12);

// Solves a x = b for symmetric positive definite a.
Vec solve_spd(const Mat& a, const Vec& b);

}  // namespace rsde
