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

#include <algorithm>
#include <cmath>

#include "rsde/vec.hpp"

namespace rsde {

Vec operator*(const Mat& m, const Vec& v) {
  if (m.cols() != v.dim()) throw InvalidArgument("Mat*Vec: shape mismatch");
  Vec out(m.rows());
  for (int i = 0; i < m.rows(); ++i) {
    double s = 0.0;
    for (int j = 0; j < m.cols(); ++j) s += m(i, j) * v[j];
    out[i] = s;
  }
  return out;
}

Mat operator*(const Mat& a, const Mat& b) {
  if (a.cols() != b.rows()) throw InvalidArgument("Mat*Mat: shape mismatch");
  Mat out(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (int k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      out(i, j) = s;
    }
  return out;
}

Mat gram(const Mat& m) { return m * m.transposed(); }

bool cholesky(const Mat& a, Mat& lower, double tol) {
  const int n = a.rows();
  if (a.cols() != n) return false;
  double max_diag = 0.0;
  for (int i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(a(i, i)));
  if (max_diag == 0.0) return false;
  lower = Mat(n, n);
  for (int j = 0; j < n; ++j) {
    double d = a(j, j);
    for (int k = 0; k < j; ++k) d -= lower(j, k) * lower(j, k);
    if (!(d > tol * max_diag)) return false;
    const double ljj = std::sqrt(d);
    lower(j, j) = ljj;
    for (int i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (int k = 0; k < j; ++k) s -= lower(i, k) * lower(j, k);
      lower(i, j) = s / ljj;
    }
  }
  return true;
}

Vec solve_spd(const Mat& a, const Vec& b) {
  Mat l;
  if (!cholesky(a, l)) throw NumericalError("solve_spd: matrix is not positive definite");
  const int n = a.rows();
  Vec y(n);
  for (int i = 0; i < n; ++i) {
    double s = b[i];
    for (int k = 0; k < i; ++k) s -= l(i, k) * y[k];
    y[i] = s / l(i, i);
  }
  Vec x(n);
  for (int i = n - 1; i >= 0; --i) {
    double s = y[i];
    for (int k = i + 1; k < n; ++k) s -= l(k, i) * x[k];
    x[i] = s / l(i, i);
  }
  return x;
}

}  // namespace rsde
