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
#include <deque>
#include <functional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "hxnn/algebra.hpp"
#include "hxnn/tensor.hpp"

namespace hxnn {

/// A named, possibly frozen, model parameter.
struct Parameter {
  std::string name;
  Tensor value;
  bool trainable = true;
};

class Tape;

/// Handle to a node on a tape.
class Var {
 public:
  Var() = default;
  Tape& tape() const { return *tape_; }
  std::size_t id() const { return id_; }
  const Tensor& value() const;
  const Shape& shape() const { return value().shape(); }

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}
  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

struct BackwardContext {
  const Tensor& out_value;
  const Tensor& out_grad;
  std::span<const Tensor* const> in_values;
  /// Null for inputs that do not need a gradient.
  std::span<Tensor* const> in_grads;
};

using BackwardFn = std::function<void(const BackwardContext&)>;

/// Append-only record of a computation for reverse-mode differentiation.
/// Single-threaded; build one per training step.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Tensor value);
  Var leaf(Tensor value);
  /// Binds a parameter once per tape; frozen parameters become constants.
  Var param(const Parameter& p);
  Var record(Tensor value, std::vector<Var> inputs, BackwardFn backward);

  const Tensor& value(Var v) const { return nodes_.at(v.id()).value; }
  bool needs_grad(Var v) const { return nodes_.at(v.id()).needs_grad; }

  /// Reverse sweep from a single-element loss. Resets earlier gradients.
  void backward(Var loss);
  /// Zero-filled when the node was not reached.
  Tensor grad(Var v) const;
  Tensor grad(const Parameter& p) const;

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    bool has_grad = false;
    bool needs_grad = false;
    std::vector<std::size_t> inputs;
    BackwardFn backward;
  };
  // Deque keeps value references stable while the tape grows.
  std::deque<Node> nodes_;
  std::unordered_map<const Parameter*, std::size_t> bound_;
};

inline const Tensor& Var::value() const { return tape_->value(*this); }

// Differentiable operations. Same-shape elementwise unless noted.
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var a, double s);
/// Adds `bias` (length = x.dim(axis)) along `axis`.
Var add_bias(Var x, Var bias, std::size_t axis);
/// x [N,C,...] times gate [N,C] broadcast over the trailing axes.
Var scale_channels(Var x, Var gate);
Var matmul(Var a, Var b);
Var transpose(Var a);
Var reshape(Var a, Shape shape);
Var concat(const std::vector<Var>& parts, std::size_t axis);
Var slice(Var a, std::size_t axis, std::size_t begin, std::size_t end);
Var kron(Var a, Var b);
/// Places sign * blocks[weight_index] at every cell of the n x n layout.
/// Blocks share a shape [p, q, rest...]; the result is [n*p, n*q, rest...].
Var block_assemble(const LeftMatrixPattern& pattern, const std::vector<Var>& blocks);
Var conv2d(Var input, Var filters, kernel::Conv2dGeometry g);
Var relu(Var a);
Var sigmoid(Var a);
Var softmax(Var a, std::size_t axis);
Var sum(Var a);
Var mean(Var a);
/// Mean over all axes after `axis` - 1, i.e. keeps the first `axis` axes.
Var mean_trailing(Var a, std::size_t keep_axes);

Var mse(Var pred, Var target);
/// logits [N, C]; labels hold class indices.
Var cross_entropy(Var logits, const std::vector<std::size_t>& labels);

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t coordinates = 0;
};

using ScalarFn = std::function<Var(Tape&, Var)>;

/// Max over coordinates of |analytic - central difference| /
/// max(1, |analytic|, |numeric|).
GradCheckResult grad_check(const ScalarFn& f, const Tensor& x, double eps = 1e-5);

/// Same, perturbing a parameter in place; `loss` must bind it via tape.param.
GradCheckResult grad_check(Parameter& p, const std::function<Var(Tape&)>& loss,
                           double eps = 1e-5);

}  // namespace hxnn
