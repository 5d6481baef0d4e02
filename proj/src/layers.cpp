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

#include "hxnn/layers.hpp"

#include <cmath>

#include "hxnn/error.hpp"

namespace hxnn {
namespace {

void require_divisible(const char* what, std::size_t value, std::size_t n) {
  if (value % n != 0) {
    throw DivisibilityError(std::string(what) + " (" + std::to_string(value) +
                            ") is not divisible by the algebra dimension " + std::to_string(n));
  }
}

void he_normal(Rng& rng, Tensor& t, double variance) {
  std::normal_distribution<double> dist(0.0, std::sqrt(variance));
  for (double& v : t.data()) v = dist(rng);
}

}  // namespace

AlgebraWeight::AlgebraWeight(Algebra algebra, Shape block_shape, const std::string& prefix)
    : algebra_(std::move(algebra)) {
  for (std::size_t i = 0; i < algebra_.dim(); ++i) {
    blocks_.push_back(Parameter{prefix + std::to_string(i), Tensor(block_shape), true});
  }
}

Tensor AlgebraWeight::assemble() const {
  Tape tape;
  return assemble(tape).value();
}

Var AlgebraWeight::assemble(Tape& tape) const {
  std::vector<Var> vars;
  for (const Parameter& b : blocks_) vars.push_back(tape.param(b));
  return block_assemble(algebra_.left_pattern(), vars);
}

void AlgebraWeight::initialize(Rng& rng, std::size_t fan_in) {
  for (Parameter& b : blocks_) he_normal(rng, b.value, 2.0 / static_cast<double>(fan_in));
}

// ---------------------------------------------------------------------------

namespace {

AlgebraWeight make_fc_weight(const Algebra& a, std::size_t in, std::size_t out,
                             const char* prefix) {
  require_divisible("input features", in, a.dim());
  require_divisible("output features", out, a.dim());
  return AlgebraWeight(a, {out / a.dim(), in / a.dim()}, prefix);
}

AlgebraWeight make_conv_weight(const Algebra& a, std::size_t in, std::size_t out,
                               std::size_t k) {
  require_divisible("input channels", in, a.dim());
  require_divisible("output channels", out, a.dim());
  if (k == 0) throw InvalidArgument("kernel size must be positive");
  return AlgebraWeight(a, {out / a.dim(), in / a.dim(), k, k}, "W");
}

}  // namespace

HFCLayer::HFCLayer(Algebra algebra, std::size_t in_features, std::size_t out_features,
                   Activation act, bool bias)
    : in_(in_features),
      out_(out_features),
      act_(act),
      has_bias_(bias),
      weight_(make_fc_weight(algebra, in_features, out_features, "W")),
      bias_{"b", Tensor({out_features}), true} {}

LayerSpec HFCLayer::spec() const {
  return {"hfc",
          {{"algebra", algebra().name()},
           {"in", std::to_string(in_)},
           {"out", std::to_string(out_)},
           {"activation", std::string(activation_name(act_))},
           {"bias", has_bias_ ? "1" : "0"}}};
}

Var HFCLayer::forward(Tape& tape, Var x, const ForwardContext&) const {
  if (x.value().rank() != 2 || x.shape()[1] != in_) {
    throw ShapeError("hfc: expected input [batch," + std::to_string(in_) + "], got " +
                     shape_str(x.shape()));
  }
  Var y = matmul(x, transpose(weight_.assemble(tape)));
  if (has_bias_) y = add_bias(y, tape.param(bias_), 1);
  return activate(y, act_);
}

std::vector<Parameter*> HFCLayer::parameters() {
  std::vector<Parameter*> out;
  for (Parameter& b : weight_.blocks()) out.push_back(&b);
  if (has_bias_) out.push_back(&bias_);
  return out;
}

ParamCount HFCLayer::param_count() const {
  return {in_ * out_ / algebra().dim(), in_ * out_, has_bias_ ? out_ : 0};
}

void HFCLayer::initialize(Rng& rng) {
  weight_.initialize(rng, in_);
  for (double& v : bias_.value.data()) v = 0.0;
}

// ---------------------------------------------------------------------------

HConv2DLayer::HConv2DLayer(Algebra algebra, std::size_t in_channels, std::size_t out_channels,
                           std::size_t kernel, std::size_t stride, std::size_t padding,
                           Activation act, bool bias)
    : in_(in_channels),
      out_(out_channels),
      k_(kernel),
      stride_(stride),
      padding_(padding),
      act_(act),
      has_bias_(bias),
      weight_(make_conv_weight(algebra, in_channels, out_channels, kernel)),
      bias_{"b", Tensor({out_channels}), true} {
  if (stride == 0) throw InvalidArgument("stride must be positive");
}

LayerSpec HConv2DLayer::spec() const {
  return {"hconv2d",
          {{"algebra", algebra().name()},
           {"in", std::to_string(in_)},
           {"out", std::to_string(out_)},
           {"kernel", std::to_string(k_)},
           {"stride", std::to_string(stride_)},
           {"padding", std::to_string(padding_)},
           {"activation", std::string(activation_name(act_))},
           {"bias", has_bias_ ? "1" : "0"}}};
}

Var HConv2DLayer::forward(Tape& tape, Var x, const ForwardContext&) const {
  if (x.value().rank() != 4 || x.shape()[1] != in_) {
    throw ShapeError("hconv2d: expected input [N," + std::to_string(in_) + ",H,W], got " +
                     shape_str(x.shape()));
  }
  Var y = conv2d(x, weight_.assemble(tape), {stride_, padding_});
  if (has_bias_) y = add_bias(y, tape.param(bias_), 1);
  return activate(y, act_);
}

std::vector<Parameter*> HConv2DLayer::parameters() {
  std::vector<Parameter*> out;
  for (Parameter& b : weight_.blocks()) out.push_back(&b);
  if (has_bias_) out.push_back(&bias_);
  return out;
}

ParamCount HConv2DLayer::param_count() const {
  const std::size_t dense = out_ * in_ * k_ * k_;
  return {dense / algebra().dim(), dense, has_bias_ ? out_ : 0};
}

void HConv2DLayer::initialize(Rng& rng) {
  weight_.initialize(rng, in_ * k_ * k_);
  for (double& v : bias_.value.data()) v = 0.0;
}

// ---------------------------------------------------------------------------

HAttBlock::HAttBlock(Algebra algebra, std::size_t channels, std::size_t kernel, Gating gating,
                     GateProduct product)
    : channels_(channels),
      kernel_(kernel),
      gating_(gating),
      product_(product),
      feature_(algebra, channels, channels, kernel, 1, kernel / 2, Activation::Relu),
      fusion_(algebra, 2 * channels, channels, kernel, 1, kernel / 2, Activation::Relu),
      point_(algebra, channels, channels, 1, 1, 0, Activation::None) {
  if (kernel % 2 == 0) throw InvalidArgument("attention kernel must be odd to preserve shape");
}

LayerSpec HAttBlock::spec() const {
  return {"hatt",
          {{"algebra", feature_.algebra().name()},
           {"channels", std::to_string(channels_)},
           {"kernel", std::to_string(kernel_)},
           {"gating", gating_ == Gating::Sigmoid ? "sigmoid" : "identity"},
           {"product", product_ == GateProduct::Elementwise ? "elementwise" : "broadcast"}}};
}

Var HAttBlock::attention_map(Tape& tape, Var x) const {
  Var h = feature_.forward(tape, x);
  Var fused = fusion_.forward(tape, concat({h, h}, 1));
  return point_.forward(tape, fused);
}

Var HAttBlock::forward(Tape& tape, Var x, const ForwardContext&) const {
  Var a = attention_map(tape, x);
  if (gating_ == Gating::Sigmoid) a = sigmoid(a);
  if (product_ == GateProduct::ChannelBroadcast) return scale_channels(x, mean_trailing(a, 2));
  return mul(a, x);
}

std::vector<Parameter*> HAttBlock::parameters() {
  std::vector<Parameter*> out;
  for (HConv2DLayer* l : {&feature_, &fusion_, &point_}) {
    auto p = l->parameters();
    out.insert(out.end(), p.begin(), p.end());
  }
  return out;
}

ParamCount HAttBlock::param_count() const {
  ParamCount c = feature_.param_count();
  c += fusion_.param_count();
  c += point_.param_count();
  return c;
}

void HAttBlock::initialize(Rng& rng) {
  feature_.initialize(rng);
  fusion_.initialize(rng);
  point_.initialize(rng);
}

// ---------------------------------------------------------------------------

Tensor Graph::normalized_adjacency() const {
  if (num_nodes == 0) throw InvalidArgument("graph has no nodes");
  Tensor a({num_nodes, num_nodes});
  for (std::size_t v = 0; v < num_nodes; ++v) a.at(v, v) = 1.0;
  for (const auto& [u, v] : edges) {
    if (u >= num_nodes || v >= num_nodes) throw InvalidArgument("edge endpoint out of range");
    a.at(u, v) = 1.0;
    a.at(v, u) = 1.0;
  }
  std::vector<double> inv_sqrt(num_nodes);
  for (std::size_t v = 0; v < num_nodes; ++v) {
    double deg = 0.0;
    for (std::size_t u = 0; u < num_nodes; ++u) deg += a.at(v, u);
    inv_sqrt[v] = 1.0 / std::sqrt(deg);
  }
  for (std::size_t v = 0; v < num_nodes; ++v)
    for (std::size_t u = 0; u < num_nodes; ++u) a.at(v, u) *= inv_sqrt[v] * inv_sqrt[u];
  return a;
}

HGraphConvLayer::HGraphConvLayer(Algebra algebra, std::size_t in_features,
                                 std::size_t out_features, Activation act)
    : in_(in_features),
      out_(out_features),
      act_(act),
      weight_(make_fc_weight(algebra, in_features, out_features, "W")) {}

LayerSpec HGraphConvLayer::spec() const {
  return {"hgraph",
          {{"algebra", algebra().name()},
           {"in", std::to_string(in_)},
           {"out", std::to_string(out_)},
           {"activation", std::string(activation_name(act_))}}};
}

Var HGraphConvLayer::forward(Tape& tape, Var x, const ForwardContext& ctx) const {
  if (!ctx.graph) throw InvalidArgument("hgraph layer needs a graph in the forward context");
  if (x.value().rank() != 2 || x.shape()[0] != ctx.graph->num_nodes || x.shape()[1] != in_) {
    throw ShapeError("hgraph: expected node features [" + std::to_string(ctx.graph->num_nodes) +
                     "," + std::to_string(in_) + "], got " + shape_str(x.shape()));
  }
  Var adj = tape.constant(ctx.graph->normalized_adjacency());
  return activate(matmul(adj, matmul(x, transpose(weight_.assemble(tape)))), act_);
}

Var HGraphConvLayer::forward(Tape& tape, const Graph& graph) const {
  return forward(tape, tape.constant(graph.features), ForwardContext{&graph});
}

std::vector<Parameter*> HGraphConvLayer::parameters() {
  std::vector<Parameter*> out;
  for (Parameter& b : weight_.blocks()) out.push_back(&b);
  return out;
}

ParamCount HGraphConvLayer::param_count() const {
  return {in_ * out_ / algebra().dim(), in_ * out_, 0};
}

void HGraphConvLayer::initialize(Rng& rng) { weight_.initialize(rng, in_); }

// ---------------------------------------------------------------------------

Tensor pad_channels(const Tensor& x, std::size_t n) {
  if (x.rank() < 2 || n == 0) throw ShapeError("pad_channels needs [N,C,...] input");
  const std::size_t c = x.dim(1);
  const std::size_t padded = (c + n - 1) / n * n;
  if (padded == c) return x;
  Shape shape = x.shape();
  shape[1] = padded;
  const std::size_t inner = x.size() / (x.dim(0) * c);
  Tensor out(shape);
  for (std::size_t b = 0; b < x.dim(0); ++b)
    for (std::size_t i = 0; i < c * inner; ++i) out[b * padded * inner + i] = x[b * c * inner + i];
  return out;
}

}  // namespace hxnn
