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

#include "hxnn/report.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include "hxnn/layers.hpp"
#include "hxnn/phlayers.hpp"
#include "hxnn/training.hpp"

namespace hxnn {

std::string format_algebra_table(const Algebra& a) {
  std::ostringstream os;
  os << "i j sign k\n";
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j) {
      const BasisProduct& p = a.product(i, j);
      os << i << ' ' << j << ' ' << p.sign << ' ' << (p.sign == 0 ? 0 : p.index) << '\n';
    }
  return os.str();
}

std::string format_property_check(const Algebra& a) {
  std::string out;
  for (Property p : kAllProperties) {
    if (!out.empty()) out += ' ';
    out += property_name(p);
    out += check_property(a, p) ? "=true" : "=false";
  }
  return out + '\n';
}

namespace {

std::string coeffs_str(const HNumber& x) {
  std::string s = "(";
  for (std::size_t i = 0; i < x.dim(); ++i) {
    if (i) s += ',';
    s += format_double(x[i]);
  }
  return s + ')';
}

}  // namespace

std::string format_zero_divisor(const Algebra& a) {
  const auto found = find_zero_divisor(a);
  if (!found) return "none found\n";
  const auto& [x, y] = *found;
  return "x=" + coeffs_str(x) + " y=" + coeffs_str(y) + " x*y=" + coeffs_str(multiply(x, y)) + '\n';
}

namespace {

Tensor uniform(Rng& rng, Shape shape) {
  Tensor t(std::move(shape));
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (double& v : t.data()) v = u(rng);
  return t;
}

void randomize(Layer& layer, Rng& rng) {
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (Parameter* p : layer.parameters()) {
    if (!p->trainable) continue;
    for (double& v : p->value.data()) v = u(rng);
  }
}

// sum(y * c) against every trainable parameter and the input.
GradcheckRow check_layer(const std::string& name, Layer& layer, const Tensor& x,
                         const ForwardContext& ctx, Rng& rng) {
  randomize(layer, rng);
  Tensor c;
  {
    Tape t;
    c = uniform(rng, layer.forward(t, t.constant(x), ctx).value().shape());
  }
  auto loss_at = [&](Tape& t, Var in) { return sum(mul(layer.forward(t, in, ctx), t.constant(c))); };
  GradcheckRow row{name, 0.0, 0};
  for (Parameter* p : layer.parameters()) {
    if (!p->trainable) continue;
    const auto r = grad_check(*p, [&](Tape& t) { return loss_at(t, t.constant(x)); });
    row.max_rel_error = std::max(row.max_rel_error, r.max_rel_error);
    row.coordinates += r.coordinates;
  }
  const auto r = grad_check(loss_at, x);
  row.max_rel_error = std::max(row.max_rel_error, r.max_rel_error);
  row.coordinates += r.coordinates;
  return row;
}

}  // namespace

std::vector<GradcheckRow> gradcheck_all_layers(std::uint64_t seed) {
  Rng rng(seed);
  const Algebra q = builtin_algebra("quaternion");
  Graph g;
  g.num_nodes = 5;
  g.edges = {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}, {1, 3}};
  std::vector<GradcheckRow> rows;

  HFCLayer hfc(q, 8, 4, Activation::Sigmoid);
  rows.push_back(check_layer("hfc", hfc, uniform(rng, {3, 8}), {}, rng));
  HConv2DLayer conv(q, 4, 8, 3, 1, 1, Activation::Sigmoid);
  rows.push_back(check_layer("hconv2d", conv, uniform(rng, {2, 4, 5, 5}), {}, rng));
  HAttBlock att(q, 4, 3);
  rows.push_back(check_layer("hatt", att, uniform(rng, {1, 4, 4, 4}), {}, rng));
  HGraphConvLayer graph(q, 8, 4, Activation::Sigmoid);
  g.features = uniform(rng, {5, 8});
  rows.push_back(check_layer("hgraph", graph, g.features, ForwardContext{&g}, rng));

  PHMLayer phm(3, 6, 9, true, Activation::Sigmoid);
  rows.push_back(check_layer("phm", phm, uniform(rng, {4, 6}), {}, rng));
  PHCLayer phc(3, 3, 6, 3, 1, 1, true, Activation::Sigmoid);
  rows.push_back(check_layer("phc", phc, uniform(rng, {2, 3, 5, 5}), {}, rng));
  PHAttBlock phatt(2, 4, 2, Activation::Sigmoid);
  rows.push_back(check_layer("phatt", phatt, uniform(rng, {2, 3, 4}), {}, rng));
  PHGraphLayer phgraph(2, 8, 4, Activation::Sigmoid);
  rows.push_back(check_layer("phgraph", phgraph, g.features, ForwardContext{&g}, rng));
  return rows;
}

double gradcheck_max(const std::vector<GradcheckRow>& rows) {
  double m = 0.0;
  for (const auto& r : rows) m = std::max(m, r.max_rel_error);
  return m;
}

std::string format_gradcheck(const std::vector<GradcheckRow>& rows) {
  std::ostringstream os;
  for (const auto& r : rows) {
    os << r.layer << ": max_rel_error=" << format_double(r.max_rel_error)
       << " coordinates=" << r.coordinates << '\n';
  }
  const double m = gradcheck_max(rows);
  os << "max_rel_error=" << format_double(m) << ' ' << (m < kGradcheckTolerance ? "PASS" : "FAIL") << '\n';
  return os.str();
}

}  // namespace hxnn
