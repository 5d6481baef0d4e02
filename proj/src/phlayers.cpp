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

#include "hxnn/phlayers.hpp"

#include <cmath>

#include "hxnn/error.hpp"
#include "hxnn/layers.hpp"

namespace hxnn {
namespace {

void require_divisible(const char* what, std::size_t value, std::size_t n) {
  if (n == 0) throw InvalidArgument("n must be positive");
  if (value % n != 0) {
    throw DivisibilityError(std::string(what) + " (" + std::to_string(value) +
                            ") is not divisible by n = " + std::to_string(n));
  }
}

}  // namespace

KronSumWeight::KronSumWeight(std::size_t n, Shape block_shape) : n_(n) {
  for (std::size_t i = 0; i < n; ++i) {
    a_.push_back(Parameter{"A" + std::to_string(i), Tensor({n, n}), true});
    f_.push_back(Parameter{"F" + std::to_string(i), Tensor(block_shape), true});
  }
}

bool KronSumWeight::algebra_trainable() const {
  for (const Parameter& a : a_)
    if (a.trainable) return true;
  return false;
}

Tensor KronSumWeight::assemble() const {
  Tensor out = kernel::kron(a_[0].value, f_[0].value);
  for (std::size_t i = 1; i < n_; ++i) {
    const Tensor term = kernel::kron(a_[i].value, f_[i].value);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += term[j];
  }
  return out;
}

Var KronSumWeight::assemble(Tape& tape) const {
  Var w = kron(tape.param(a_[0]), tape.param(f_[0]));
  for (std::size_t i = 1; i < n_; ++i) w = add(w, kron(tape.param(a_[i]), tape.param(f_[i])));
  return w;
}

void KronSumWeight::initialize(Rng& rng, std::size_t fan_in) {
  std::uniform_int_distribution<int> sign(-1, 1);
  for (Parameter& a : a_) {
    if (!a.trainable) continue;
    for (double& v : a.value.data()) v = static_cast<double>(sign(rng));
  }
  std::normal_distribution<double> normal(
      0.0, std::sqrt(3.0 / (static_cast<double>(n_) * static_cast<double>(fan_in))));
  for (Parameter& f : f_)
    for (double& v : f.value.data()) v = normal(rng);
}

void KronSumWeight::collapse(const Algebra& algebra) {
  if (algebra.dim() != n_) {
    throw AlgebraMismatch("cannot collapse an n = " + std::to_string(n_) + " layer into '" +
                          algebra.name() + "' (dimension " + std::to_string(algebra.dim()) + ")");
  }
  const LeftMatrixPattern& pattern = algebra.left_pattern();
  for (std::size_t i = 0; i < n_; ++i) {
    a_[i].value = Tensor({n_, n_}, pattern.selector(i));
    a_[i].trainable = false;
  }
  collapsed_ = algebra.name();
}

std::size_t KronSumWeight::free_weights() const {
  std::size_t total = 0;
  for (const Parameter& a : a_)
    if (a.trainable) total += a.value.size();
  for (const Parameter& f : f_) total += f.value.size();
  return total;
}

std::vector<Parameter*> KronSumWeight::parameters() {
  std::vector<Parameter*> out;
  for (Parameter& a : a_) out.push_back(&a);
  for (Parameter& f : f_) out.push_back(&f);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

KronSumWeight make_fc(std::size_t n, std::size_t in, std::size_t out) {
  require_divisible("input features", in, n);
  require_divisible("output features", out, n);
  return KronSumWeight(n, {out / n, in / n});
}

void add_collapse_attr(LayerSpec& spec, const KronSumWeight& w) {
  spec.attrs.emplace_back("collapsed", w.collapsed_to().value_or(""));
}

}  // namespace

PHMLayer::PHMLayer(std::size_t n, std::size_t in_features, std::size_t out_features, bool bias,
                   Activation act)
    : in_(in_features),
      out_(out_features),
      has_bias_(bias),
      act_(act),
      weight_(make_fc(n, in_features, out_features)),
      bias_{"b", Tensor({out_features}), true} {}

void PHMLayer::collapse_to_algebra(const Algebra& a) { weight_.collapse(a); }

LayerSpec PHMLayer::spec() const {
  LayerSpec s{"phm",
              {{"n", std::to_string(n())},
               {"in", std::to_string(in_)},
               {"out", std::to_string(out_)},
               {"activation", std::string(activation_name(act_))},
               {"bias", has_bias_ ? "1" : "0"}}};
  add_collapse_attr(s, weight_);
  return s;
}

Var PHMLayer::forward(Tape& tape, Var x, const ForwardContext&) const {
  if (x.value().rank() != 2 || x.shape()[1] != in_) {
    throw ShapeError("phm: expected input [batch," + std::to_string(in_) + "], got " +
                     shape_str(x.shape()));
  }
  Var y = matmul(x, transpose(weight_.assemble(tape)));
  if (has_bias_) y = add_bias(y, tape.param(bias_), 1);
  return activate(y, act_);
}

std::vector<Parameter*> PHMLayer::parameters() {
  auto out = weight_.parameters();
  if (has_bias_) out.push_back(&bias_);
  return out;
}

ParamCount PHMLayer::param_count() const {
  return {weight_.free_weights(), in_ * out_, has_bias_ ? out_ : 0};
}

void PHMLayer::initialize(Rng& rng) {
  weight_.initialize(rng, in_);
  for (double& v : bias_.value.data()) v = 0.0;
}

// ---------------------------------------------------------------------------

namespace {

KronSumWeight make_conv(std::size_t n, std::size_t in, std::size_t out, std::size_t k) {
  require_divisible("input channels", in, n);
  require_divisible("output channels", out, n);
  if (k == 0) throw InvalidArgument("kernel size must be positive");
  return KronSumWeight(n, {out / n, in / n, k, k});
}

}  // namespace

PHCLayer::PHCLayer(std::size_t n, std::size_t in_channels, std::size_t out_channels,
                   std::size_t kernel, std::size_t stride, std::size_t padding, bool bias,
                   Activation act)
    : in_(in_channels),
      out_(out_channels),
      k_(kernel),
      stride_(stride),
      padding_(padding),
      has_bias_(bias),
      act_(act),
      weight_(make_conv(n, in_channels, out_channels, kernel)),
      bias_{"b", Tensor({out_channels}), true} {
  if (stride == 0) throw InvalidArgument("stride must be positive");
}

void PHCLayer::collapse_to_algebra(const Algebra& a) { weight_.collapse(a); }

LayerSpec PHCLayer::spec() const {
  LayerSpec s{"phc",
              {{"n", std::to_string(n())},
               {"in", std::to_string(in_)},
               {"out", std::to_string(out_)},
               {"kernel", std::to_string(k_)},
               {"stride", std::to_string(stride_)},
               {"padding", std::to_string(padding_)},
               {"activation", std::string(activation_name(act_))},
               {"bias", has_bias_ ? "1" : "0"}}};
  add_collapse_attr(s, weight_);
  return s;
}

Var PHCLayer::forward(Tape& tape, Var x, const ForwardContext&) const {
  if (x.value().rank() != 4 || x.shape()[1] != in_) {
    throw ShapeError("phc: expected input [N," + std::to_string(in_) + ",H,W], got " +
                     shape_str(x.shape()));
  }
  Var y = conv2d(x, weight_.assemble(tape), {stride_, padding_});
  if (has_bias_) y = add_bias(y, tape.param(bias_), 1);
  return activate(y, act_);
}

std::vector<Parameter*> PHCLayer::parameters() {
  auto out = weight_.parameters();
  if (has_bias_) out.push_back(&bias_);
  return out;
}

ParamCount PHCLayer::param_count() const {
  return {weight_.free_weights(), out_ * in_ * k_ * k_, has_bias_ ? out_ : 0};
}

void PHCLayer::initialize(Rng& rng) {
  weight_.initialize(rng, in_ * k_ * k_);
  for (double& v : bias_.value.data()) v = 0.0;
}

// ---------------------------------------------------------------------------

PHAttBlock::PHAttBlock(std::size_t n, std::size_t features, std::size_t heads, Activation phi,
                       AttentionOutput output)
    : n_(n),
      features_(features),
      heads_(heads),
      phi_(phi),
      output_(output),
      q_(n, features, features),
      k_(n, features, features),
      v_(n, features, features) {
  if (heads == 0 || features % heads != 0) {
    throw DivisibilityError("features (" + std::to_string(features) +
                            ") must split evenly into " + std::to_string(heads) + " heads");
  }
  if (heads > 1) out_.emplace(n, features, features);
}

void PHAttBlock::collapse_to_algebra(const Algebra& a) {
  q_.collapse_to_algebra(a);
  k_.collapse_to_algebra(a);
  v_.collapse_to_algebra(a);
  if (out_) out_->collapse_to_algebra(a);
}

LayerSpec PHAttBlock::spec() const {
  LayerSpec s{"phatt",
              {{"n", std::to_string(n_)},
               {"features", std::to_string(features_)},
               {"heads", std::to_string(heads_)},
               {"activation", std::string(activation_name(phi_))},
               {"output", output_ == AttentionOutput::Gate ? "gate" : "pure"}}};
  add_collapse_attr(s, q_.weight());
  return s;
}

PHAttBlock::Projections PHAttBlock::project(Tape& tape, Var x) const {
  const Shape& s = x.shape();
  if (s.size() != 3 || s[2] != features_) {
    throw ShapeError("phatt: expected input [batch,tokens," + std::to_string(features_) +
                     "], got " + shape_str(s));
  }
  Var flat = reshape(x, {s[0] * s[1], s[2]});
  auto proj = [&](const PHMLayer& l) {
    return reshape(activate(l.forward(tape, flat), phi_), s);
  };
  return {proj(q_), proj(k_), proj(v_)};
}

Var PHAttBlock::head_weights(Var q, Var k, std::size_t head) const {
  const std::size_t dk = key_dim();
  Var qh = heads_ == 1 ? q : slice(q, 2, head * dk, (head + 1) * dk);
  Var kh = heads_ == 1 ? k : slice(k, 2, head * dk, (head + 1) * dk);
  Var logits = scale(matmul(qh, transpose(kh)), 1.0 / std::sqrt(static_cast<double>(dk)));
  return softmax(logits, 2);
}

std::vector<Tensor> PHAttBlock::attention_weights(const Tensor& x) const {
  Tape tape;
  const Projections p = project(tape, tape.constant(x));
  std::vector<Tensor> out;
  for (std::size_t h = 0; h < heads_; ++h) out.push_back(head_weights(p.q, p.k, h).value());
  return out;
}

Var PHAttBlock::forward(Tape& tape, Var x, const ForwardContext&) const {
  const Projections p = project(tape, x);
  const std::size_t dk = key_dim();
  std::vector<Var> heads;
  for (std::size_t h = 0; h < heads_; ++h) {
    Var vh = heads_ == 1 ? p.v : slice(p.v, 2, h * dk, (h + 1) * dk);
    heads.push_back(matmul(head_weights(p.q, p.k, h), vh));
  }
  Var att = heads_ == 1 ? heads[0] : concat(heads, 2);
  if (out_) {
    const Shape& s = x.shape();
    att = reshape(out_->forward(tape, reshape(att, {s[0] * s[1], s[2]})), s);
  }
  return output_ == AttentionOutput::Gate ? mul(att, x) : att;
}

std::vector<Parameter*> PHAttBlock::parameters() {
  std::vector<Parameter*> out;
  for (PHMLayer* l : {&q_, &k_, &v_}) {
    auto p = l->parameters();
    out.insert(out.end(), p.begin(), p.end());
  }
  if (out_) {
    auto p = out_->parameters();
    out.insert(out.end(), p.begin(), p.end());
  }
  return out;
}

ParamCount PHAttBlock::param_count() const {
  ParamCount c = q_.param_count();
  c += k_.param_count();
  c += v_.param_count();
  if (out_) c += out_->param_count();
  return c;
}

void PHAttBlock::initialize(Rng& rng) {
  q_.initialize(rng);
  k_.initialize(rng);
  v_.initialize(rng);
  if (out_) out_->initialize(rng);
}

// ---------------------------------------------------------------------------

PHGraphLayer::PHGraphLayer(std::size_t n, std::size_t in_features, std::size_t out_features,
                           Activation act)
    : in_(in_features), out_(out_features), act_(act), weight_(make_fc(n, in_features, out_features)) {}

void PHGraphLayer::collapse_to_algebra(const Algebra& a) { weight_.collapse(a); }

LayerSpec PHGraphLayer::spec() const {
  LayerSpec s{"phgraph",
              {{"n", std::to_string(weight_.n())},
               {"in", std::to_string(in_)},
               {"out", std::to_string(out_)},
               {"activation", std::string(activation_name(act_))}}};
  add_collapse_attr(s, weight_);
  return s;
}

Var PHGraphLayer::forward(Tape& tape, Var x, const ForwardContext& ctx) const {
  if (!ctx.graph) throw InvalidArgument("phgraph layer needs a graph in the forward context");
  if (x.value().rank() != 2 || x.shape()[0] != ctx.graph->num_nodes || x.shape()[1] != in_) {
    throw ShapeError("phgraph: expected node features [" + std::to_string(ctx.graph->num_nodes) +
                     "," + std::to_string(in_) + "], got " + shape_str(x.shape()));
  }
  Var adj = tape.constant(ctx.graph->normalized_adjacency());
  return activate(matmul(adj, matmul(x, transpose(weight_.assemble(tape)))), act_);
}

Var PHGraphLayer::forward(Tape& tape, const Graph& graph) const {
  return forward(tape, tape.constant(graph.features), ForwardContext{&graph});
}

std::vector<Parameter*> PHGraphLayer::parameters() { return weight_.parameters(); }

ParamCount PHGraphLayer::param_count() const {
  return {weight_.free_weights(), in_ * out_, 0};
}

void PHGraphLayer::initialize(Rng& rng) { weight_.initialize(rng, in_); }

}  // namespace hxnn
