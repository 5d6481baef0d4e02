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

#include "hxnn/layer.hpp"

#include "hxnn/error.hpp"

namespace hxnn {

Var activate(Var x, Activation a) {
  switch (a) {
    case Activation::None: return x;
    case Activation::Relu: return relu(x);
    case Activation::Sigmoid: return sigmoid(x);
  }
  return x;
}

std::string_view activation_name(Activation a) {
  switch (a) {
    case Activation::None: return "none";
    case Activation::Relu: return "relu";
    case Activation::Sigmoid: return "sigmoid";
  }
  return "none";
}

Activation parse_activation(std::string_view name) {
  if (name == "none") return Activation::None;
  if (name == "relu") return Activation::Relu;
  if (name == "sigmoid") return Activation::Sigmoid;
  throw NameError("unknown activation '" + std::string(name) + "'");
}

const std::string& LayerSpec::get(std::string_view key) const {
  for (const auto& [k, v] : attrs)
    if (k == key) return v;
  throw FormatError("layer '" + kind + "' is missing attribute '" + std::string(key) + "'");
}

std::size_t LayerSpec::get_size(std::string_view key) const {
  const std::string& v = get(key);
  try {
    std::size_t pos = 0;
    const unsigned long long r = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return static_cast<std::size_t>(r);
  } catch (const std::exception&) {
    throw FormatError("layer '" + kind + "' attribute '" + std::string(key) +
                      "' is not an unsigned integer: '" + v + "'");
  }
}

std::vector<const Parameter*> Layer::parameters() const {
  auto params = const_cast<Layer*>(this)->parameters();
  return {params.begin(), params.end()};
}

LayerSpec ActivationLayer::spec() const {
  return {"activation", {{"function", std::string(activation_name(act_))}}};
}

Var GlobalAvgPool::forward(Tape&, Var x, const ForwardContext&) const {
  if (x.value().rank() != 4) {
    throw ShapeError("global_avg_pool expects [N,C,H,W], got " + shape_str(x.shape()));
  }
  return mean_trailing(x, 2);
}

Var Flatten::forward(Tape&, Var x, const ForwardContext&) const {
  const Shape& s = x.shape();
  if (s.empty()) throw ShapeError("flatten needs a batch axis");
  return reshape(x, {s[0], x.value().size() / s[0]});
}

Sequential::Sequential(const Sequential& other)
    : n(other.n), algebra(other.algebra), encoding(other.encoding) {
  for (const auto& l : other.layers_) layers_.push_back(l->clone());
}

Sequential& Sequential::operator=(const Sequential& other) {
  if (this != &other) {
    Sequential copy(other);
    *this = std::move(copy);
  }
  return *this;
}

Sequential& Sequential::add(std::unique_ptr<Layer> layer) {
  layers_.push_back(std::move(layer));
  return *this;
}

Var Sequential::forward(Tape& tape, Var x, const ForwardContext& ctx) const {
  for (const auto& l : layers_) x = l->forward(tape, x, ctx);
  return x;
}

Tensor Sequential::predict(const Tensor& x, const ForwardContext& ctx) const {
  Tape tape;
  return forward(tape, tape.constant(x), ctx).value();
}

std::vector<Parameter*> Sequential::parameters() {
  std::vector<Parameter*> out;
  for (auto& l : layers_) {
    auto p = l->parameters();
    out.insert(out.end(), p.begin(), p.end());
  }
  return out;
}

std::vector<const Parameter*> Sequential::parameters() const {
  auto params = const_cast<Sequential*>(this)->parameters();
  return {params.begin(), params.end()};
}

ParamCount Sequential::param_count() const {
  ParamCount c;
  for (const auto& l : layers_) c += l->param_count();
  return c;
}

void Sequential::initialize(Rng& rng) {
  for (auto& l : layers_) l->initialize(rng);
}

}  // namespace hxnn
