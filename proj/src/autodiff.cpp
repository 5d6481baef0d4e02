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

#include "hxnn/autodiff.hpp"

#include <algorithm>
#include <cmath>

#include "hxnn/error.hpp"

namespace hxnn {

Var Tape::constant(Tensor value) {
  nodes_.push_back(Node{std::move(value), Tensor(), false, false, {}, {}});
  return Var(this, nodes_.size() - 1);
}

Var Tape::leaf(Tensor value) {
  nodes_.push_back(Node{std::move(value), Tensor(), false, true, {}, {}});
  return Var(this, nodes_.size() - 1);
}

Var Tape::param(const Parameter& p) {
  if (auto it = bound_.find(&p); it != bound_.end()) return Var(this, it->second);
  Var v = p.trainable ? leaf(p.value) : constant(p.value);
  bound_.emplace(&p, v.id());
  return v;
}

Var Tape::record(Tensor value, std::vector<Var> inputs, BackwardFn backward) {
  Node node{std::move(value), Tensor(), false, false, {}, std::move(backward)};
  for (const Var& in : inputs) {
    if (in.tape_ != this) throw InvalidArgument("operands recorded on different tapes");
    node.needs_grad = node.needs_grad || nodes_[in.id()].needs_grad;
    node.inputs.push_back(in.id());
  }
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

void Tape::backward(Var loss) {
  if (value(loss).size() != 1) {
    throw ShapeError("backward needs a scalar loss, got shape " +
                     shape_str(value(loss).shape()));
  }
  for (Node& n : nodes_) {
    n.has_grad = false;
    n.grad = Tensor();
  }
  Node& root = nodes_[loss.id()];
  root.grad = Tensor(root.value.shape(), 1.0);
  root.has_grad = true;

  std::vector<const Tensor*> in_values;
  std::vector<Tensor*> in_grads;
  for (std::size_t id = loss.id() + 1; id-- > 0;) {
    Node& node = nodes_[id];
    if (!node.has_grad || !node.needs_grad || !node.backward) continue;
    in_values.clear();
    in_grads.clear();
    for (std::size_t in : node.inputs) {
      Node& src = nodes_[in];
      in_values.push_back(&src.value);
      if (src.needs_grad) {
        if (!src.has_grad) {
          src.grad = Tensor(src.value.shape(), 0.0);
          src.has_grad = true;
        }
        in_grads.push_back(&src.grad);
      } else {
        in_grads.push_back(nullptr);
      }
    }
    node.backward(BackwardContext{node.value, node.grad, in_values, in_grads});
  }
}

Tensor Tape::grad(Var v) const {
  const Node& node = nodes_.at(v.id());
  if (node.has_grad) return node.grad;
  return Tensor(node.value.shape(), 0.0);
}

Tensor Tape::grad(const Parameter& p) const {
  if (auto it = bound_.find(&p); it != bound_.end()) {
    const Node& node = nodes_[it->second];
    if (node.has_grad) return node.grad;
  }
  return Tensor(p.value.shape(), 0.0);
}

}  // namespace hxnn
