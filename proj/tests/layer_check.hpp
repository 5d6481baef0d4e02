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

#include <random>

#include "hxnn/layer.hpp"
#include "oracles.hpp"

namespace testing_util {

// Largest relative gradient error over all trainable parameters of `layer`
// for the loss sum(y * c) with a fixed random c.
inline double layer_grad_error(hxnn::Layer& layer, const hxnn::Tensor& x,
                               const hxnn::ForwardContext& ctx = {}, std::uint64_t seed = 11) {
  hxnn::Tensor c;
  {
    hxnn::Tape t;
    const hxnn::Tensor y = layer.forward(t, t.constant(x), ctx).value();
    std::mt19937_64 rng(seed);
    c = oracle::uniform_tensor(rng, y.shape());
  }
  double worst = 0.0;
  for (hxnn::Parameter* p : layer.parameters()) {
    if (!p->trainable) continue;
    const auto r = hxnn::grad_check(*p, [&](hxnn::Tape& t) {
      return hxnn::sum(hxnn::mul(layer.forward(t, t.constant(x), ctx), t.constant(c)));
    });
    worst = std::max(worst, r.max_rel_error);
  }
  auto r = hxnn::grad_check(
      [&](hxnn::Tape& t, hxnn::Var v) { return hxnn::sum(hxnn::mul(layer.forward(t, v, ctx), t.constant(c))); },
      x);
  return std::max(worst, r.max_rel_error);
}

inline void fill_random(hxnn::Layer& layer, std::mt19937_64& rng, double scale = 0.5) {
  for (hxnn::Parameter* p : layer.parameters()) {
    if (!p->trainable) continue;
    for (double& v : p->value.data()) v = std::uniform_real_distribution<double>(-scale, scale)(rng);
  }
}

}  // namespace testing_util
