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

// Algebra-bound layers. Every weight is assembled from n blocks laid out by
// the algebra's left-multiplication pattern, so a layer holds 1/n of the
// weights of a dense layer of the same size.

#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "hxnn/algebra.hpp"
#include "hxnn/layer.hpp"

namespace hxnn {

/// n weight blocks arranged on the algebra's block grid.
class AlgebraWeight {
 public:
  /// `block_shape` is [rows/n, cols/n, rest...].
  AlgebraWeight(Algebra algebra, Shape block_shape, const std::string& prefix);

  const Algebra& algebra() const { return algebra_; }
  std::vector<Parameter>& blocks() { return blocks_; }
  const std::vector<Parameter>& blocks() const { return blocks_; }

  Tensor assemble() const;
  Var assemble(Tape& tape) const;
  /// He-normal with the given fan-in.
  void initialize(Rng& rng, std::size_t fan_in);

 private:
  Algebra algebra_;
  std::vector<Parameter> blocks_;
};

/// y = phi(W x + b) on batches [batch, d].
class HFCLayer final : public Layer {
 public:
  HFCLayer(Algebra algebra, std::size_t in_features, std::size_t out_features,
           Activation act = Activation::Relu, bool bias = true);

  std::size_t in_features() const { return in_; }
  std::size_t out_features() const { return out_; }
  const Algebra& algebra() const { return weight_.algebra(); }
  Activation activation() const { return act_; }
  std::vector<Parameter>& blocks() { return weight_.blocks(); }
  Parameter& bias() { return bias_; }
  bool has_bias() const { return has_bias_; }

  /// out x in.
  Tensor assemble_weight() const { return weight_.assemble(); }

  LayerSpec spec() const override;
  Var forward(Tape& tape, Var x, const ForwardContext& ctx = {}) const override;
  std::vector<Parameter*> parameters() override;
  ParamCount param_count() const override;
  void initialize(Rng& rng) override;
  std::unique_ptr<Layer> clone() const override { return std::make_unique<HFCLayer>(*this); }

 private:
  std::size_t in_, out_;
  Activation act_;
  bool has_bias_;
  AlgebraWeight weight_;
  Parameter bias_;
};

/// y = phi(W * x + b) for NCHW input; filter blocks are
/// (out/n) x (in/n) x k x k.
class HConv2DLayer final : public Layer {
 public:
  HConv2DLayer(Algebra algebra, std::size_t in_channels, std::size_t out_channels,
               std::size_t kernel, std::size_t stride = 1, std::size_t padding = 0,
               Activation act = Activation::Relu, bool bias = true);

  std::size_t in_channels() const { return in_; }
  std::size_t out_channels() const { return out_; }
  std::size_t kernel() const { return k_; }
  const Algebra& algebra() const { return weight_.algebra(); }
  std::vector<Parameter>& blocks() { return weight_.blocks(); }
  Parameter& bias() { return bias_; }

  /// out x in x k x k.
  Tensor assemble_weight() const { return weight_.assemble(); }

  LayerSpec spec() const override;
  Var forward(Tape& tape, Var x, const ForwardContext& ctx = {}) const override;
  std::vector<Parameter*> parameters() override;
  ParamCount param_count() const override;
  void initialize(Rng& rng) override;
  std::unique_ptr<Layer> clone() const override { return std::make_unique<HConv2DLayer>(*this); }

 private:
  std::size_t in_, out_, k_, stride_, padding_;
  Activation act_;
  bool has_bias_;
  AlgebraWeight weight_;
  Parameter bias_;
};

enum class Gating { Sigmoid, Identity };
enum class GateProduct { Elementwise, ChannelBroadcast };

/// h = HConv(x); a = HConv_1x1(HConv(Concat(h, h))); y = g(a) . x
class HAttBlock final : public Layer {
 public:
  HAttBlock(Algebra algebra, std::size_t channels, std::size_t kernel = 3,
            Gating gating = Gating::Sigmoid, GateProduct product = GateProduct::Elementwise);

  HConv2DLayer& feature_conv() { return feature_; }
  HConv2DLayer& fusion_conv() { return fusion_; }
  HConv2DLayer& point_conv() { return point_; }
  Gating gating() const { return gating_; }

  /// The pre-gating attention map a.
  Var attention_map(Tape& tape, Var x) const;

  LayerSpec spec() const override;
  Var forward(Tape& tape, Var x, const ForwardContext& ctx = {}) const override;
  std::vector<Parameter*> parameters() override;
  ParamCount param_count() const override;
  void initialize(Rng& rng) override;
  std::unique_ptr<Layer> clone() const override { return std::make_unique<HAttBlock>(*this); }

 private:
  std::size_t channels_, kernel_;
  Gating gating_;
  GateProduct product_;
  HConv2DLayer feature_, fusion_, point_;
};

/// Undirected graph with node features [|V|, d].
struct Graph {
  std::size_t num_nodes = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  Tensor features;

  /// D^{-1/2} (A + I) D^{-1/2}, symmetric.
  Tensor normalized_adjacency() const;
};

/// H' = phi(A_hat H W^T): every node aggregates W h_u over its closed
/// neighbourhood with normalized edge weights.
class HGraphConvLayer final : public Layer {
 public:
  HGraphConvLayer(Algebra algebra, std::size_t in_features, std::size_t out_features,
                  Activation act = Activation::Relu);

  const Algebra& algebra() const { return weight_.algebra(); }
  std::vector<Parameter>& blocks() { return weight_.blocks(); }
  Tensor assemble_weight() const { return weight_.assemble(); }

  LayerSpec spec() const override;
  /// Uses ctx.graph's adjacency; x is the node feature matrix.
  Var forward(Tape& tape, Var x, const ForwardContext& ctx) const override;
  Var forward(Tape& tape, const Graph& graph) const;
  std::vector<Parameter*> parameters() override;
  ParamCount param_count() const override;
  void initialize(Rng& rng) override;
  std::unique_ptr<Layer> clone() const override { return std::make_unique<HGraphConvLayer>(*this); }

 private:
  std::size_t in_, out_;
  Activation act_;
  AlgebraWeight weight_;
};

/// Explicit zero-padding of the channel axis (axis 1) up to a multiple of n.
Tensor pad_channels(const Tensor& x, std::size_t n);

}  // namespace hxnn
