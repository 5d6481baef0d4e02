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

// Parameterized hypercomplex layers. The weight is W = sum_i A_i (x) F_i
// where the n x n "algebra matrices" A_i are learned together with the
// blocks F_i, so n is free to be any positive integer.

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "hxnn/algebra.hpp"
#include "hxnn/layer.hpp"

namespace hxnn {

/// Kronecker-sum weight shared by all PH layers.
class KronSumWeight {
 public:
  /// `block_shape` is the shape of each F_i: [rows/n, cols/n, rest...].
  KronSumWeight(std::size_t n, Shape block_shape);

  std::size_t n() const { return n_; }
  std::vector<Parameter>& algebra_matrices() { return a_; }
  const std::vector<Parameter>& algebra_matrices() const { return a_; }
  std::vector<Parameter>& blocks() { return f_; }
  const std::vector<Parameter>& blocks() const { return f_; }
  bool algebra_trainable() const;
  /// Set once collapse() ran.
  const std::optional<std::string>& collapsed_to() const { return collapsed_; }
  void set_collapsed_to(std::optional<std::string> name) { collapsed_ = std::move(name); }

  Tensor assemble() const;
  Var assemble(Tape& tape) const;

  /// A from {-1, 0, +1}; F zero-mean normal, variance 3 / (n * fan_in).
  void initialize(Rng& rng, std::size_t fan_in);
  /// A_i becomes the signed selector of W_i in the algebra's layout; frozen.
  void collapse(const Algebra& algebra);

  std::size_t free_weights() const;

  std::vector<Parameter*> parameters();

 private:
  std::size_t n_;
  std::vector<Parameter> a_;
  std::vector<Parameter> f_;
  std::optional<std::string> collapsed_;
};

/// y = W x + b. Activation is optional and off by default.
class PHMLayer final : public Layer {
 public:
  PHMLayer(std::size_t n, std::size_t in_features, std::size_t out_features, bool bias = true,
           Activation act = Activation::None);

  std::size_t n() const { return weight_.n(); }
  std::size_t in_features() const { return in_; }
  std::size_t out_features() const { return out_; }
  KronSumWeight& weight() { return weight_; }
  const KronSumWeight& weight() const { return weight_; }
  Parameter& bias() { return bias_; }

  /// out x in.
  Tensor phm_weight() const { return weight_.assemble(); }
  void collapse_to_algebra(const Algebra& a);

  LayerSpec spec() const override;
  Var forward(Tape& tape, Var x, const ForwardContext& ctx = {}) const override;
  std::vector<Parameter*> parameters() override;
  ParamCount param_count() const override;
  void initialize(Rng& rng) override;
  std::unique_ptr<Layer> clone() const override { return std::make_unique<PHMLayer>(*this); }

 private:
  std::size_t in_, out_;
  bool has_bias_;
  Activation act_;
  KronSumWeight weight_;
  Parameter bias_;
};

/// y = W * x + b with F_i of shape (out/n) x (in/n) x k x k; A_i acts on the
/// channel-block grid only.
class PHCLayer final : public Layer {
 public:
  PHCLayer(std::size_t n, std::size_t in_channels, std::size_t out_channels, std::size_t kernel,
           std::size_t stride = 1, std::size_t padding = 0, bool bias = true,
           Activation act = Activation::None);

  std::size_t n() const { return weight_.n(); }
  KronSumWeight& weight() { return weight_; }
  const KronSumWeight& weight() const { return weight_; }
  Parameter& bias() { return bias_; }

  /// out x in x k x k.
  Tensor filter_bank() const { return weight_.assemble(); }
  void collapse_to_algebra(const Algebra& a);

  LayerSpec spec() const override;
  Var forward(Tape& tape, Var x, const ForwardContext& ctx = {}) const override;
  std::vector<Parameter*> parameters() override;
  ParamCount param_count() const override;
  void initialize(Rng& rng) override;
  std::unique_ptr<Layer> clone() const override { return std::make_unique<PHCLayer>(*this); }

 private:
  std::size_t in_, out_, k_, stride_, padding_;
  bool has_bias_;
  Activation act_;
  KronSumWeight weight_;
  Parameter bias_;
};

enum class AttentionOutput { Gate, Pure };

/// Q, K, V = phi(PHM(x)); Att = softmax(Q K^T / sqrt(d_k)) V; y = Att . x.
/// With heads > 1 the per-head outputs are concatenated and passed through a
/// further PHM before gating.
class PHAttBlock final : public Layer {
 public:
  PHAttBlock(std::size_t n, std::size_t features, std::size_t heads = 1,
             Activation phi = Activation::Relu, AttentionOutput output = AttentionOutput::Gate);

  std::size_t heads() const { return heads_; }
  std::size_t key_dim() const { return features_ / heads_; }
  PHMLayer& query() { return q_; }
  PHMLayer& key() { return k_; }
  PHMLayer& value() { return v_; }
  /// Present only with heads > 1.
  PHMLayer* output_projection() { return out_ ? &*out_ : nullptr; }

  /// Per-head attention weights [heads][batch, tokens, tokens].
  std::vector<Tensor> attention_weights(const Tensor& x) const;
  void collapse_to_algebra(const Algebra& a);

  LayerSpec spec() const override;
  /// x is [batch, tokens, features].
  Var forward(Tape& tape, Var x, const ForwardContext& ctx = {}) const override;
  std::vector<Parameter*> parameters() override;
  ParamCount param_count() const override;
  void initialize(Rng& rng) override;
  std::unique_ptr<Layer> clone() const override { return std::make_unique<PHAttBlock>(*this); }

 private:
  struct Projections {
    Var q, k, v;
  };
  Projections project(Tape& tape, Var x) const;
  Var head_weights(Var q, Var k, std::size_t head) const;

  std::size_t n_, features_, heads_;
  Activation phi_;
  AttentionOutput output_;
  PHMLayer q_, k_, v_;
  std::optional<PHMLayer> out_;
};

/// H' = phi(A_hat H W^T) with W assembled as a Kronecker sum.
class PHGraphLayer final : public Layer {
 public:
  PHGraphLayer(std::size_t n, std::size_t in_features, std::size_t out_features,
               Activation act = Activation::Relu);

  KronSumWeight& weight() { return weight_; }
  const KronSumWeight& weight() const { return weight_; }
  void collapse_to_algebra(const Algebra& a);

  LayerSpec spec() const override;
  Var forward(Tape& tape, Var x, const ForwardContext& ctx) const override;
  Var forward(Tape& tape, const Graph& graph) const;
  std::vector<Parameter*> parameters() override;
  ParamCount param_count() const override;
  void initialize(Rng& rng) override;
  std::unique_ptr<Layer> clone() const override { return std::make_unique<PHGraphLayer>(*this); }

 private:
  std::size_t in_, out_;
  Activation act_;
  KronSumWeight weight_;
};

}  // namespace hxnn
