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

#include "hxnn/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "hxnn/error.hpp"

namespace hxnn {

std::string shape_str(const Shape& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

std::size_t shape_size(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

namespace {

void check_shape(const Shape& shape) {
  for (std::size_t d : shape) {
    if (d == 0) throw ShapeError("tensor dimensions must be positive, got " + shape_str(shape));
  }
}

[[noreturn]] void mismatch(const char* op, const Shape& a, const Shape& b) {
  throw ShapeError(std::string(op) + ": incompatible shapes " + shape_str(a) +
                   " and " + shape_str(b));
}

}  // namespace

Tensor::Tensor(Shape shape, double fill)
    : shape_(std::move(shape)), data_(shape_size(shape_), fill) {
  check_shape(shape_);
}

Tensor::Tensor(Shape shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  check_shape(shape_);
  if (data_.size() != shape_size(shape_)) {
    throw ShapeError("data length " + std::to_string(data_.size()) +
                     " does not match shape " + shape_str(shape_));
  }
}

Tensor Tensor::matrix(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r ? rows.begin()->size() : 0;
  std::vector<double> data;
  for (const auto& row : rows) {
    if (row.size() != c) throw ShapeError("ragged matrix literal");
    data.insert(data.end(), row.begin(), row.end());
  }
  return Tensor({r, c}, std::move(data));
}

Tensor Tensor::vector(std::vector<double> values) {
  const std::size_t n = values.size();
  return Tensor({n}, std::move(values));
}

Tensor Tensor::identity(std::size_t n) {
  Tensor t({n, n});
  for (std::size_t i = 0; i < n; ++i) t.at(i, i) = 1.0;
  return t;
}

double Tensor::item() const {
  if (data_.size() != 1) {
    throw ShapeError("item() needs a single-element tensor, got " + shape_str(shape_));
  }
  return data_[0];
}

Tensor Tensor::reshaped(Shape shape) const {
  if (shape_size(shape) != data_.size()) mismatch("reshape", shape_, shape);
  return Tensor(std::move(shape), data_);
}

double max_abs_diff(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) mismatch("max_abs_diff", a.shape(), b.shape());
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

namespace kernel {

Tensor matmul(const Tensor& a, const Tensor& b) {
  const bool batched = a.rank() == 3;
  if (a.rank() != b.rank() || (a.rank() != 2 && a.rank() != 3)) {
    mismatch("matmul", a.shape(), b.shape());
  }
  const std::size_t batch = batched ? a.dim(0) : 1;
  const std::size_t m = a.dim(a.rank() - 2), k = a.dim(a.rank() - 1);
  const std::size_t k2 = b.dim(b.rank() - 2), n = b.dim(b.rank() - 1);
  if (k != k2 || (batched && b.dim(0) != batch)) mismatch("matmul", a.shape(), b.shape());
  Tensor out(batched ? Shape{batch, m, n} : Shape{m, n});
  const double* pa = a.data().data();
  const double* pb = b.data().data();
  double* po = out.data().data();
  for (std::size_t t = 0; t < batch; ++t) {
    const double* A = pa + t * m * k;
    const double* B = pb + t * k * n;
    double* C = po + t * m * n;
    for (std::size_t i = 0; i < m; ++i) {
      double* crow = C + i * n;
      for (std::size_t p = 0; p < k; ++p) {
        const double av = A[i * k + p];
        if (av == 0.0) continue;
        const double* brow = B + p * n;
        for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
      }
    }
  }
  return out;
}

Tensor transpose(const Tensor& a) {
  if (a.rank() != 2 && a.rank() != 3) {
    throw ShapeError("transpose needs rank 2 or 3, got " + shape_str(a.shape()));
  }
  const bool batched = a.rank() == 3;
  const std::size_t batch = batched ? a.dim(0) : 1;
  const std::size_t m = a.dim(a.rank() - 2), n = a.dim(a.rank() - 1);
  Tensor out(batched ? Shape{batch, n, m} : Shape{n, m});
  for (std::size_t t = 0; t < batch; ++t)
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j)
        out[t * m * n + j * m + i] = a[t * m * n + i * n + j];
  return out;
}

Tensor kron(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() < 2) mismatch("kron", a.shape(), b.shape());
  const std::size_t n = a.dim(0), m = a.dim(1);
  const std::size_t p = b.dim(0), q = b.dim(1);
  const std::size_t inner = b.size() / (p * q);
  Shape shape = b.shape();
  shape[0] = n * p;
  shape[1] = m * q;
  Tensor out(shape);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < m; ++c) {
      const double s = a.at(r, c);
      if (s == 0.0) continue;
      for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = 0; j < q; ++j) {
          const double* src = b.data().data() + (i * q + j) * inner;
          double* dst = out.data().data() + ((r * p + i) * (m * q) + c * q + j) * inner;
          for (std::size_t t = 0; t < inner; ++t) dst[t] = s * src[t];
        }
      }
    }
  }
  return out;
}

namespace {

struct ConvDims {
  std::size_t n, c, h, w, o, kh, kw, oh, ow;
};

ConvDims conv_dims(const Shape& in, const Shape& f, Conv2dGeometry g) {
  if (in.size() != 4 || f.size() != 4 || in[1] != f[1]) mismatch("conv2d", in, f);
  if (g.stride == 0) throw ShapeError("conv2d: stride must be positive");
  const std::size_t ph = in[2] + 2 * g.padding, pw = in[3] + 2 * g.padding;
  if (ph < f[2] || pw < f[3]) mismatch("conv2d", in, f);
  return {in[0], in[1], in[2], in[3], f[0], f[2], f[3],
          (ph - f[2]) / g.stride + 1, (pw - f[3]) / g.stride + 1};
}

// cols is [C*kh*kw, oh*ow] for a single image.
void im2col(const double* img, const ConvDims& d, Conv2dGeometry g, double* cols) {
  const std::size_t spatial = d.oh * d.ow;
  for (std::size_t ch = 0; ch < d.c; ++ch)
    for (std::size_t ki = 0; ki < d.kh; ++ki)
      for (std::size_t kj = 0; kj < d.kw; ++kj) {
        double* row = cols + ((ch * d.kh + ki) * d.kw + kj) * spatial;
        for (std::size_t y = 0; y < d.oh; ++y) {
          const long iy = static_cast<long>(y * g.stride + ki) - static_cast<long>(g.padding);
          for (std::size_t x = 0; x < d.ow; ++x) {
            const long ix = static_cast<long>(x * g.stride + kj) - static_cast<long>(g.padding);
            const bool inside = iy >= 0 && ix >= 0 && iy < static_cast<long>(d.h) &&
                                ix < static_cast<long>(d.w);
            row[y * d.ow + x] = inside ? img[(ch * d.h + iy) * d.w + ix] : 0.0;
          }
        }
      }
}

void col2im(const double* cols, const ConvDims& d, Conv2dGeometry g, double* img) {
  const std::size_t spatial = d.oh * d.ow;
  for (std::size_t ch = 0; ch < d.c; ++ch)
    for (std::size_t ki = 0; ki < d.kh; ++ki)
      for (std::size_t kj = 0; kj < d.kw; ++kj) {
        const double* row = cols + ((ch * d.kh + ki) * d.kw + kj) * spatial;
        for (std::size_t y = 0; y < d.oh; ++y) {
          const long iy = static_cast<long>(y * g.stride + ki) - static_cast<long>(g.padding);
          if (iy < 0 || iy >= static_cast<long>(d.h)) continue;
          for (std::size_t x = 0; x < d.ow; ++x) {
            const long ix = static_cast<long>(x * g.stride + kj) - static_cast<long>(g.padding);
            if (ix < 0 || ix >= static_cast<long>(d.w)) continue;
            img[(ch * d.h + iy) * d.w + ix] += row[y * d.ow + x];
          }
        }
      }
}

// C[m,n] (+)= A[m,k] * B[k,n]; optional transposes via strides.
void gemm(const double* A, const double* B, double* C, std::size_t m, std::size_t k,
          std::size_t n, bool trans_a, bool trans_b) {
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = C + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = trans_a ? A[p * m + i] : A[i * k + p];
      if (av == 0.0) continue;
      if (!trans_b) {
        const double* brow = B + p * n;
        for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
      } else {
        for (std::size_t j = 0; j < n; ++j) crow[j] += av * B[j * k + p];
      }
    }
  }
}

}  // namespace

Tensor conv2d(const Tensor& input, const Tensor& filters, Conv2dGeometry g) {
  const ConvDims d = conv_dims(input.shape(), filters.shape(), g);
  const std::size_t patch = d.c * d.kh * d.kw, spatial = d.oh * d.ow;
  Tensor out({d.n, d.o, d.oh, d.ow});
  std::vector<double> cols(patch * spatial);
  for (std::size_t b = 0; b < d.n; ++b) {
    im2col(input.data().data() + b * d.c * d.h * d.w, d, g, cols.data());
    gemm(filters.data().data(), cols.data(), out.data().data() + b * d.o * spatial,
         d.o, patch, spatial, false, false);
  }
  return out;
}

Tensor conv2d_input_grad(const Tensor& out_grad, const Tensor& filters,
                         const Shape& input_shape, Conv2dGeometry g) {
  const ConvDims d = conv_dims(input_shape, filters.shape(), g);
  const std::size_t patch = d.c * d.kh * d.kw, spatial = d.oh * d.ow;
  Tensor grad(input_shape);
  std::vector<double> cols(patch * spatial);
  for (std::size_t b = 0; b < d.n; ++b) {
    std::fill(cols.begin(), cols.end(), 0.0);
    gemm(filters.data().data(), out_grad.data().data() + b * d.o * spatial, cols.data(),
         patch, d.o, spatial, true, false);
    col2im(cols.data(), d, g, grad.data().data() + b * d.c * d.h * d.w);
  }
  return grad;
}

Tensor conv2d_filter_grad(const Tensor& out_grad, const Tensor& input,
                          const Shape& filter_shape, Conv2dGeometry g) {
  const ConvDims d = conv_dims(input.shape(), filter_shape, g);
  const std::size_t patch = d.c * d.kh * d.kw, spatial = d.oh * d.ow;
  Tensor grad(filter_shape);
  std::vector<double> cols(patch * spatial);
  for (std::size_t b = 0; b < d.n; ++b) {
    im2col(input.data().data() + b * d.c * d.h * d.w, d, g, cols.data());
    gemm(out_grad.data().data() + b * d.o * spatial, cols.data(), grad.data().data(),
         d.o, spatial, patch, false, true);
  }
  return grad;
}

Tensor softmax(const Tensor& a, std::size_t axis) {
  if (axis >= a.rank()) throw ShapeError("softmax axis out of range for " + shape_str(a.shape()));
  const std::size_t len = a.dim(axis);
  std::size_t inner = 1;
  for (std::size_t i = axis + 1; i < a.rank(); ++i) inner *= a.dim(i);
  const std::size_t outer = a.size() / (len * inner);
  Tensor out(a.shape());
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t in = 0; in < inner; ++in) {
      const std::size_t base = o * len * inner + in;
      double mx = a[base];
      for (std::size_t k = 1; k < len; ++k) mx = std::max(mx, a[base + k * inner]);
      double total = 0.0;
      for (std::size_t k = 0; k < len; ++k) {
        const double e = std::exp(a[base + k * inner] - mx);
        out[base + k * inner] = e;
        total += e;
      }
      for (std::size_t k = 0; k < len; ++k) out[base + k * inner] /= total;
    }
  }
  return out;
}

Tensor concat(const std::vector<const Tensor*>& parts, std::size_t axis) {
  if (parts.empty()) throw ShapeError("concat of zero tensors");
  const Shape& first = parts[0]->shape();
  if (axis >= first.size()) throw ShapeError("concat axis out of range for " + shape_str(first));
  Shape shape = first;
  shape[axis] = 0;
  for (const Tensor* t : parts) {
    Shape probe = t->shape();
    if (probe.size() != first.size()) mismatch("concat", first, probe);
    probe[axis] = first[axis];
    if (probe != first) mismatch("concat", first, t->shape());
    shape[axis] += t->dim(axis);
  }
  std::size_t outer = 1, inner = 1;
  for (std::size_t i = 0; i < axis; ++i) outer *= first[i];
  for (std::size_t i = axis + 1; i < first.size(); ++i) inner *= first[i];
  Tensor out(shape);
  double* dst = out.data().data();
  for (std::size_t o = 0; o < outer; ++o) {
    for (const Tensor* t : parts) {
      const std::size_t chunk = t->dim(axis) * inner;
      const double* src = t->data().data() + o * chunk;
      dst = std::copy(src, src + chunk, dst);
    }
  }
  return out;
}

}  // namespace kernel
}  // namespace hxnn
