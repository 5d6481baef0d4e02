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

#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace hxnn {

using Shape = std::vector<std::size_t>;

std::string shape_str(const Shape& shape);
std::size_t shape_size(const Shape& shape);

/// Dense row-major array of doubles. The shape is fixed at construction; the
/// element buffer may be written (optimizers update parameters in place).
class Tensor {
 public:
  /// Rank-0 scalar holding 0.
  Tensor() : data_(1, 0.0) {}
  explicit Tensor(Shape shape, double fill = 0.0);
  Tensor(Shape shape, std::vector<double> data);

  static Tensor scalar(double v) { return Tensor(Shape{}, {v}); }
  static Tensor matrix(std::initializer_list<std::initializer_list<double>> rows);
  static Tensor vector(std::vector<double> values);
  static Tensor identity(std::size_t n);

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t dim(std::size_t axis) const { return shape_.at(axis); }
  std::size_t size() const { return data_.size(); }

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }
  const std::vector<double>& vec() const { return data_; }

  double operator[](std::size_t i) const { return data_[i]; }
  double& operator[](std::size_t i) { return data_[i]; }
  double item() const;

  double at(std::size_t i, std::size_t j) const { return data_[i * shape_[1] + j]; }
  double& at(std::size_t i, std::size_t j) { return data_[i * shape_[1] + j]; }

  Tensor reshaped(Shape shape) const;

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  Shape shape_;
  std::vector<double> data_;
};

double max_abs_diff(const Tensor& a, const Tensor& b);

/// Value-level kernels shared by the differentiable ops. All raise ShapeError
/// naming both shapes on incompatible input.
namespace kernel {

/// [m,k]x[k,n] or batched [b,m,k]x[b,k,n].
Tensor matmul(const Tensor& a, const Tensor& b);
/// Swaps the last two axes of a rank-2 or rank-3 tensor.
Tensor transpose(const Tensor& a);

/// A is n x m; B has rank >= 2 with shape [p, q, rest...]. The result has
/// shape [n*p, m*q, rest...] with block (r, c) equal to A[r][c] * B.
Tensor kron(const Tensor& a, const Tensor& b);

struct Conv2dGeometry {
  std::size_t stride = 1;
  std::size_t padding = 0;
};

/// Cross-correlation of input [N,C,H,W] with filters [O,C,kh,kw] and
/// symmetric zero padding.
Tensor conv2d(const Tensor& input, const Tensor& filters, Conv2dGeometry g);
Tensor conv2d_input_grad(const Tensor& out_grad, const Tensor& filters,
                         const Shape& input_shape, Conv2dGeometry g);
Tensor conv2d_filter_grad(const Tensor& out_grad, const Tensor& input,
                          const Shape& filter_shape, Conv2dGeometry g);

/// Max-shifted softmax along `axis`.
Tensor softmax(const Tensor& a, std::size_t axis);

Tensor concat(const std::vector<const Tensor*>& parts, std::size_t axis);

}  // namespace kernel
}  // namespace hxnn
