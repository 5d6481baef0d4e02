// Copyright 2026 The hxnn Authors
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

// Independent reference implementations used only by tests. Nothing here
// calls into the library's arithmetic.

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

#include "hxnn/algebra.hpp"
#include "hxnn/tensor.hpp"

namespace oracle {

// Printed left-multiplication matrices, +-(k+1) for +-W_k and 0 for a zero block.
inline const std::vector<int> kComplex = {1, -2, 2, 1};
inline const std::vector<int> kQuaternion = {1, -2, -3, -4, 2, 1, -4, 3,
                                             3, 4,  1,  -2, 4, -3, 2, 1};
inline const std::vector<int> kTessarine = {1, -2, 3, -4, 2, 1, 4, 3,
                                            3, -4, 1, -2, 4, 3, 2, 1};
inline const std::vector<int> kDualQuaternion = {
    1, -2, -3, -4, 0, 0,  0,  0,  2, 1, -4, 3,  0, 0,  0,  0,
    3, 4,  1,  -2, 0, 0,  0,  0,  4, -3, 2, 1,  0, 0,  0,  0,
    5, -6, -7, -8, 1, -2, -3, -4, 6, 5, -8, 7,  2, 1,  -4, 3,
    7, 8,  5,  -6, 3, 4,  1,  -2, 8, -7, 6, 5,  4, -3, 2,  1};
inline const std::vector<int> kOctonion = {
    1, -2, -3, -4, -5, -6, -7, -8,  //
    2, 1,  -4, 3,  -6, 5,  8,  -7,  //
    3, 4,  1,  -2, -7, -8, 5,  6,  //
    4, -3, 2,  1,  -8, 7,  -6, 5,  //
    5, 6,  7,  8,  1,  -2, -3, -4,  //
    6, -5, 8,  -7, 2,  1,  4,  -3,  //
    7, -8, -5, 6,  3,  -4, 1,  2,  //
    8, 7,  -6, -5, 4,  3,  -2, 1};

inline std::vector<int> encode_pattern(const hxnn::LeftMatrixPattern& p) {
  std::vector<int> out;
  for (const auto& cell : p.cells) {
    out.push_back(cell.sign * static_cast<int>(cell.weight_index + 1));
  }
  return out;
}

// z_k = sum over (i, j) with e_i e_j = s e_k of s x_i y_j.
inline std::vector<double> naive_multiply(const hxnn::Algebra& a, const std::vector<double>& x,
                                          const std::vector<double>& y) {
  const std::size_t n = a.dim();
  std::vector<double> z(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const auto p = a.product(i, j);
      z[p.index] += p.sign * x[i] * y[j];
    }
  }
  return z;
}

inline std::vector<double> uniform_vector(std::mt19937_64& rng, std::size_t n, double lo = -1.0,
                                          double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = d(rng);
  return v;
}

inline hxnn::Tensor uniform_tensor(std::mt19937_64& rng, hxnn::Shape shape, double lo = -1.0,
                                   double hi = 1.0) {
  const std::size_t n = hxnn::shape_size(shape);
  return hxnn::Tensor(std::move(shape), uniform_vector(rng, n, lo, hi));
}

// Direct six-loop convolution, NCHW, symmetric zero padding.
inline hxnn::Tensor naive_conv2d(const hxnn::Tensor& x, const hxnn::Tensor& w, std::size_t stride,
                                 std::size_t pad) {
  const std::size_t n = x.dim(0), c = x.dim(1), h = x.dim(2), wd = x.dim(3);
  const std::size_t o = w.dim(0), kh = w.dim(2), kw = w.dim(3);
  const std::size_t oh = (h + 2 * pad - kh) / stride + 1, ow = (wd + 2 * pad - kw) / stride + 1;
  hxnn::Tensor out({n, o, oh, ow});
  for (std::size_t b = 0; b < n; ++b)
    for (std::size_t oc = 0; oc < o; ++oc)
      for (std::size_t i = 0; i < oh; ++i)
        for (std::size_t j = 0; j < ow; ++j) {
          double s = 0.0;
          for (std::size_t ic = 0; ic < c; ++ic)
            for (std::size_t u = 0; u < kh; ++u)
              for (std::size_t v = 0; v < kw; ++v) {
                const long r = static_cast<long>(i * stride + u) - static_cast<long>(pad);
                const long q = static_cast<long>(j * stride + v) - static_cast<long>(pad);
                if (r < 0 || q < 0 || r >= static_cast<long>(h) || q >= static_cast<long>(wd))
                  continue;
                s += x[((b * c + ic) * h + r) * wd + q] * w[((oc * c + ic) * kh + u) * kw + v];
              }
          out[((b * o + oc) * oh + i) * ow + j] = s;
        }
  return out;
}

inline hxnn::Tensor naive_matmul(const hxnn::Tensor& a, const hxnn::Tensor& b) {
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  hxnn::Tensor out({m, n});
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t t = 0; t < k; ++t) s += a[i * k + t] * b[t * n + j];
      out[i * n + j] = s;
    }
  return out;
}

// Standard unit-quaternion (w, x, y, z) to rotation matrix conversion.
inline std::array<std::array<double, 3>, 3> rotation_matrix(const std::array<double, 4>& q) {
  const double w = q[0], x = q[1], y = q[2], z = q[3];
  return {{{1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)},
           {2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)},
           {2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)}}};
}

inline std::array<double, 3> apply3(const std::array<std::array<double, 3>, 3>& r,
                                    const std::array<double, 3>& v) {
  std::array<double, 3> out{};
  for (int i = 0; i < 3; ++i) out[i] = r[i][0] * v[0] + r[i][1] * v[1] + r[i][2] * v[2];
  return out;
}

// Rigid motion as a 4x4 homogeneous matrix [R t; 0 1].
inline std::array<std::array<double, 4>, 4> homogeneous(const std::array<double, 4>& q,
                                                        const std::array<double, 3>& t) {
  const auto r = rotation_matrix(q);
  std::array<std::array<double, 4>, 4> m{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) m[i][j] = r[i][j];
    m[i][3] = t[i];
  }
  m[3][3] = 1.0;
  return m;
}

inline std::array<double, 3> apply_h(const std::array<std::array<double, 4>, 4>& m,
                                     const std::array<double, 3>& p) {
  std::array<double, 3> out{};
  for (int i = 0; i < 3; ++i) out[i] = m[i][0] * p[0] + m[i][1] * p[1] + m[i][2] * p[2] + m[i][3];
  return out;
}

inline std::array<std::array<double, 4>, 4> compose_h(const std::array<std::array<double, 4>, 4>& a,
                                                      const std::array<std::array<double, 4>, 4>& b) {
  std::array<std::array<double, 4>, 4> m{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) m[i][j] += a[i][k] * b[k][j];
  return m;
}

}  // namespace oracle
