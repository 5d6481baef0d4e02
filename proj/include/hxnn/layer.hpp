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
#include <memory>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hxnn/autodiff.hpp"

namespace hxnn {

using Rng = std::mt19937_64;

enum class Activation { None, Relu, Sigmoid };

/// Split activation: applied to every real coefficient independently.
Var activate(Var x, Activation a);
std::string_view activation_name(Activation a);
Activation parse_activation(std::string_view name);

struct ParamCount {
  std::size_t free_weights = 0;
  std::size_t dense_weights = 0;
  std::size_t bias = 0;

  std::size_t free_total() const { return free_weights + bias; }
  std::size_t dense_total() const { return dense_weights + bias; }
  ParamCount& operator+=(const ParamCount& o) {
    free_weights += o.free_weights;
    dense_weights += o.dense_weights;
    bias += o.bias;
    return *this;
  }
};

struct Graph;

struct ForwardContext {
  const Graph* graph = nullptr;
};

/// Serializable description of a layer's hyperparameters.
struct LayerSpec {
  std::string kind;
  std::vector<std::pair<std::string, std::string>> attrs;

  const std::string& get(std::string_view key) const;
  std::size_t get_size(std::string_view key) const;
  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

class Layer {
 public:
  virtual ~Layer() = default;

  virtual LayerSpec spec() const = 0;
  std::string kind() const { return spec().kind; }

  virtual Var forward(Tape& tape, Var x, const ForwardContext& ctx = {}) const = 0;
  /// Stable order; serialization relies on it.
  virtual std::vector<Parameter*> parameters() = 0;
  std::vector<const Parameter*> parameters() const;
  virtual ParamCount param_count() const = 0;
  virtual void initialize(Rng& rng) = 0;
  virtual std::unique_ptr<Layer> clone() const = 0;
};

/// Parameter-free layers used to compose sequential models.
class ActivationLayer final : public Layer {
 public:
  explicit ActivationLayer(Activation a) : act_(a) {}
  LayerSpec spec() const override;
  Var forward(Tape&, Var x, const ForwardContext&) const override { return activate(x, act_); }
  std::vector<Parameter*> parameters() override { return {}; }
  ParamCount param_count() const override { return {}; }
  void initialize(Rng&) override {}
  std::unique_ptr<Layer> clone() const override { return std::make_unique<ActivationLayer>(*this); }

 private:
  Activation act_;
};

/// [N, C, H, W] -> [N, C].
class GlobalAvgPool final : public Layer {
 public:
  LayerSpec spec() const override { return {"global_avg_pool", {}}; }
  Var forward(Tape&, Var x, const ForwardContext&) const override;
  std::vector<Parameter*> parameters() override { return {}; }
  ParamCount param_count() const override { return {}; }
  void initialize(Rng&) override {}
  std::unique_ptr<Layer> clone() const override { return std::make_unique<GlobalAvgPool>(*this); }
};

/// [N, ...] -> [N, prod(...)].
class Flatten final : public Layer {
 public:
  LayerSpec spec() const override { return {"flatten", {}}; }
  Var forward(Tape&, Var x, const ForwardContext&) const override;
  std::vector<Parameter*> parameters() override { return {}; }
  ParamCount param_count() const override { return {}; }
  void initialize(Rng&) override {}
  std::unique_ptr<Layer> clone() const override { return std::make_unique<Flatten>(*this); }
};

/// Ordered stack of layers plus the algebra descriptor stored in model files.
class Sequential {
 public:
  Sequential() = default;
  Sequential(const Sequential& other);
  Sequential& operator=(const Sequential& other);
  Sequential(Sequential&&) noexcept = default;
  Sequential& operator=(Sequential&&) noexcept = default;

  /// `algebra` is a built-in algebra name or "parameterized"; `encoding`
  /// tags how inputs are prepared (free-form, e.g. "image" or "pure_quaternion").
  std::size_t n = 1;
  std::string algebra = "real";
  std::string encoding = "raw";

  Sequential& add(std::unique_ptr<Layer> layer);
  template <class L, class... Args>
  L& emplace(Args&&... args) {
    auto p = std::make_unique<L>(std::forward<Args>(args)...);
    L& ref = *p;
    layers_.push_back(std::move(p));
    return ref;
  }

  Var forward(Tape& tape, Var x, const ForwardContext& ctx = {}) const;
  /// Tape-free evaluation.
  Tensor predict(const Tensor& x, const ForwardContext& ctx = {}) const;

  std::vector<Parameter*> parameters();
  std::vector<const Parameter*> parameters() const;
  ParamCount param_count() const;
  void initialize(Rng& rng);

  std::size_t size() const { return layers_.size(); }
  Layer& layer(std::size_t i) { return *layers_.at(i); }
  const Layer& layer(std::size_t i) const { return *layers_.at(i); }

 private:
  std::vector<std::unique_ptr<Layer>> layers_;
};

}  // namespace hxnn
