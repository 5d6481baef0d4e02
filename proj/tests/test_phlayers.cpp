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

#include <cmath>
#include <random>

#include "doctest.h"
#include "hxnn/error.hpp"
#include "hxnn/layers.hpp"
#include "hxnn/phlayers.hpp"
#include "layer_check.hpp"
#include "oracles.hpp"

using namespace hxnn;

namespace {

void randomize(KronSumWeight& w, std::mt19937_64& rng) {
  for (Parameter& a : w.algebra_matrices()) a.value = oracle::uniform_tensor(rng, a.value.shape());
  for (Parameter& f : w.blocks()) f.value = oracle::uniform_tensor(rng, f.value.shape());
}

// Double loop over the block grid; trailing dims of F ride along.
Tensor naive_kron_sum(const KronSumWeight& w) {
  const std::size_t n = w.n();
  const Shape& fs = w.blocks()[0].value.shape();
  const std::size_t br = fs[0], bc = fs[1], inner = shape_size(fs) / (br * bc);
  Shape out = fs;
  out[0] *= n;
  out[1] *= n;
  Tensor m(out);
  for (std::size_t r = 0; r < n * br; ++r)
    for (std::size_t c = 0; c < n * bc; ++c)
      for (std::size_t s = 0; s < inner; ++s) {
        double v = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          v += w.algebra_matrices()[i].value.at(r / br, c / bc) *
               w.blocks()[i].value[((r % br) * bc + (c % bc)) * inner + s];
        }
        m[(r * n * bc + c) * inner + s] = v;
      }
  return m;
}

}  // namespace

TEST_SUITE("phlayers") {

TEST_CASE("kron sum equals the naive block assembly") {
  std::mt19937_64 rng(1);
  for (std::size_t n : {1, 2, 3, 4, 5, 8}) {
    CAPTURE(n);
    KronSumWeight w(n, {2, 3});
    randomize(w, rng);
    CHECK(w.assemble() == naive_kron_sum(w));
    KronSumWeight f(n, {2, 1, 3, 3});
    randomize(f, rng);
    CHECK(f.assemble() == naive_kron_sum(f));
  }
}

TEST_CASE("complex selectors recover the complex block pattern") {
  PHMLayer l(2, 4, 4);
  auto& a = l.weight().algebra_matrices();
  a[0].value = Tensor::identity(2);
  a[1].value = Tensor::matrix({{0, -1}, {1, 0}});
  std::mt19937_64 rng(2);
  for (Parameter& f : l.weight().blocks()) f.value = oracle::uniform_tensor(rng, {2, 2});
  const Tensor w = l.phm_weight();
  const Tensor& f1 = l.weight().blocks()[0].value;
  const Tensor& f2 = l.weight().blocks()[1].value;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      CHECK(w.at(i, j) == f1.at(i, j));
      CHECK(w.at(i, j + 2) == -f2.at(i, j));
      CHECK(w.at(i + 2, j) == f2.at(i, j));
      CHECK(w.at(i + 2, j + 2) == f1.at(i, j));
    }
}

TEST_CASE("n = 1 is a scaled real layer") {
  PHMLayer l(1, 3, 2);
  std::mt19937_64 rng(3);
  l.weight().algebra_matrices()[0].value = Tensor({1, 1}, 2.5);
  l.weight().blocks()[0].value = oracle::uniform_tensor(rng, {2, 3});
  const Tensor w = l.phm_weight();
  for (std::size_t i = 0; i < 6; ++i) CHECK(w[i] == 2.5 * l.weight().blocks()[0].value[i]);
}

TEST_CASE("collapse writes signed selectors and freezes them") {
  PHMLayer l(2, 2, 2);
  l.collapse_to_algebra(builtin_algebra("complex"));
  CHECK(l.weight().algebra_matrices()[0].value == Tensor::identity(2));
  CHECK(l.weight().algebra_matrices()[1].value == Tensor::matrix({{0, -1}, {1, 0}}));
  CHECK_FALSE(l.weight().algebra_trainable());
  CHECK(l.weight().collapsed_to() == "complex");
  CHECK(l.param_count().free_weights == 2);
  CHECK_THROWS_AS(l.collapse_to_algebra(builtin_algebra("quaternion")), AlgebraMismatch);

  PHMLayer r(1, 3, 3);
  r.collapse_to_algebra(builtin_algebra("real"));
  std::mt19937_64 rng(4);
  r.weight().blocks()[0].value = oracle::uniform_tensor(rng, {3, 3});
  CHECK(r.phm_weight() == r.weight().blocks()[0].value);
}

TEST_CASE("collapsed PHM equals the algebra-bound layer") {
  for (const char* name : {"real", "complex", "quaternion", "octonion", "tessarine"}) {
    CAPTURE(name);
    const Algebra a = builtin_algebra(name);
    const std::size_t n = a.dim();
    std::mt19937_64 rng(5);
    HFCLayer fc(a, 2 * n, 3 * n, Activation::None);
    fc.initialize(rng);
    PHMLayer ph(n, 2 * n, 3 * n);
    ph.collapse_to_algebra(a);
    for (std::size_t i = 0; i < n; ++i) ph.weight().blocks()[i].value = fc.blocks()[i].value;
    ph.bias().value = fc.bias().value;
    CHECK(ph.phm_weight() == fc.assemble_weight());
    double worst = 0.0;
    for (int s = 0; s < 1000; ++s) {
      Tape t;
      const Var x = t.constant(oracle::uniform_tensor(rng, {1, 2 * n}));
      worst = std::max(worst, max_abs_diff(ph.forward(t, x).value(), fc.forward(t, x).value()));
    }
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("zero algebra matrices give the bias") {
  PHMLayer l(4, 8, 8);
  std::mt19937_64 rng(6);
  for (Parameter& f : l.weight().blocks()) f.value = oracle::uniform_tensor(rng, f.value.shape());
  l.bias().value = oracle::uniform_tensor(rng, {8});
  Tape t;
  const Tensor y = l.forward(t, t.constant(oracle::uniform_tensor(rng, {3, 8}))).value();
  for (std::size_t b = 0; b < 3; ++b)
    for (std::size_t i = 0; i < 8; ++i) CHECK(y.at(b, i) == l.bias().value[i]);
}

TEST_CASE("count law") {
  for (std::size_t n : {1, 2, 3, 4, 8}) {
    CAPTURE(n);
    const std::size_t d = 24, s = 48;
    const auto p = PHMLayer(n, d, s).param_count();
    CHECK(p.free_weights == n * n * n + s * d / n);
    CHECK(p.dense_weights == s * d);
    CHECK(p.bias == s);
    CHECK(PHGraphLayer(n, d, s).param_count().free_weights == n * n * n + s * d / n);
    CHECK(PHCLayer(n, d, s, 3).param_count().free_weights == n * n * n + s * d * 9 / n);
  }
  const auto q = PHMLayer(4, 64, 64).param_count();
  CHECK(q.free_weights == 1088);
  CHECK(q.dense_weights == 4096);
  const auto c = PHCLayer(3, 24, 24, 3).param_count();
  CHECK(c.free_weights == 1755);
  CHECK(c.dense_weights == 5184);
  CHECK_THROWS_AS(PHMLayer(3, 8, 9), DivisibilityError);
  CHECK_THROWS_AS(PHCLayer(3, 4, 6, 3), DivisibilityError);
}

TEST_CASE("PHC equals dense conv with the kron-sum bank") {
  std::mt19937_64 rng(7);
  PHCLayer l(3, 3, 3, 1, 1, 0, true);
  randomize(l.weight(), rng);
  l.bias().value = oracle::uniform_tensor(rng, {3});
  const Tensor x = oracle::uniform_tensor(rng, {2, 3, 5, 5});
  Tape t;
  const Tensor y = l.forward(t, t.constant(x)).value();
  Tensor ref = oracle::naive_conv2d(x, naive_kron_sum(l.weight()), 1, 0);
  for (std::size_t i = 0; i < ref.size(); ++i) ref[i] += l.bias().value[(i / 25) % 3];
  CHECK(max_abs_diff(y, ref) < 1e-12);

  PHCLayer big(3, 6, 12, 3, 2, 1);
  randomize(big.weight(), rng);
  const Tensor x2 = oracle::uniform_tensor(rng, {1, 6, 7, 7});
  CHECK(max_abs_diff(big.forward(t, t.constant(x2)).value(),
                     oracle::naive_conv2d(x2, naive_kron_sum(big.weight()), 2, 1)) < 1e-12);
}

TEST_CASE("PHC with n = 1 scales a real convolution") {
  std::mt19937_64 rng(8);
  PHCLayer l(1, 2, 2, 3, 1, 1, false);
  l.weight().algebra_matrices()[0].value = Tensor({1, 1}, -2.0);
  l.weight().blocks()[0].value = oracle::uniform_tensor(rng, {2, 2, 3, 3});
  const Tensor x = oracle::uniform_tensor(rng, {1, 2, 4, 4});
  Tape t;
  Tensor ref = oracle::naive_conv2d(x, l.weight().blocks()[0].value, 1, 1);
  for (double& v : ref.data()) v *= -2.0;
  CHECK(max_abs_diff(l.forward(t, t.constant(x)).value(), ref) < 1e-12);
}

TEST_CASE("n = 3 accepts RGB input without padding") {
  PHCLayer l(3, 3, 12, 3, 1, 1, true, Activation::Relu);
  std::mt19937_64 rng(9);
  l.initialize(rng);
  Tape t;
  CHECK(l.forward(t, t.constant(oracle::uniform_tensor(rng, {2, 3, 8, 8}))).shape() ==
        Shape{2, 12, 8, 8});
}

TEST_CASE("collapsed PHC equals HConv") {
  const Algebra q = builtin_algebra("quaternion");
  std::mt19937_64 rng(10);
  HConv2DLayer hc(q, 8, 4, 3, 1, 1, Activation::Relu);
  hc.initialize(rng);
  PHCLayer pc(4, 8, 4, 3, 1, 1, true, Activation::Relu);
  pc.collapse_to_algebra(q);
  for (std::size_t i = 0; i < 4; ++i) pc.weight().blocks()[i].value = hc.blocks()[i].value;
  pc.bias().value = hc.bias().value;
  const Tensor x = oracle::uniform_tensor(rng, {2, 8, 5, 5});
  Tape t;
  CHECK(max_abs_diff(pc.forward(t, t.constant(x)).value(), hc.forward(t, t.constant(x)).value()) <
        1e-12);
}

TEST_CASE("single token attention reduces to V times x") {
  PHAttBlock blk(2, 4);
  std::mt19937_64 rng(11);
  blk.initialize(rng);
  const Tensor x = oracle::uniform_tensor(rng, {3, 1, 4});
  Tape t;
  const Tensor y = blk.forward(t, t.constant(x)).value();
  const Tensor v = blk.value().forward(t, t.constant(x.reshaped({3, 4}))).value();
  for (std::size_t i = 0; i < 12; ++i) CHECK(y[i] == doctest::Approx(std::max(0.0, v[i]) * x[i]).epsilon(1e-14));
}

TEST_CASE("attention rows sum to one") {
  for (std::size_t heads : {1, 2}) {
    PHAttBlock blk(2, 8, heads);
    std::mt19937_64 rng(12);
    blk.initialize(rng);
    const auto w = blk.attention_weights(oracle::uniform_tensor(rng, {2, 5, 8}));
    REQUIRE(w.size() == heads);
    for (const Tensor& a : w) {
      REQUIRE(a.shape() == Shape{2, 5, 5});
      for (std::size_t r = 0; r < 10; ++r) {
        double s = 0.0;
        for (std::size_t c = 0; c < 5; ++c) s += a[r * 5 + c];
        CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
      }
    }
  }
}

TEST_CASE("single key weights do not depend on the key scale") {
  PHAttBlock blk(2, 4);
  std::mt19937_64 rng(13);
  blk.initialize(rng);
  const Tensor x = oracle::uniform_tensor(rng, {1, 1, 4});
  const Tensor before = blk.attention_weights(x)[0];
  for (Parameter& f : blk.key().weight().blocks())
    for (double& v : f.value.data()) v *= 7.0;
  CHECK(blk.attention_weights(x)[0] == before);
  CHECK(before[0] == 1.0);
}

TEST_CASE("pure output and multi-head shapes") {
  std::mt19937_64 rng(14);
  PHAttBlock pure(4, 8, 1, Activation::Relu, AttentionOutput::Pure);
  pure.initialize(rng);
  const Tensor x = oracle::uniform_tensor(rng, {2, 3, 8});
  Tape t;
  CHECK(pure.forward(t, t.constant(x)).shape() == x.shape());
  PHAttBlock multi(2, 8, 2);
  CHECK(multi.output_projection() != nullptr);
  CHECK(multi.key_dim() == 4);
  multi.initialize(rng);
  CHECK(multi.forward(t, t.constant(x)).shape() == x.shape());
  CHECK_THROWS_AS(PHAttBlock(2, 8, 3), DivisibilityError);
}

TEST_CASE("graph layer equals the algebra-bound graph layer once collapsed") {
  const Algebra q = builtin_algebra("quaternion");
  std::mt19937_64 rng(15);
  HGraphConvLayer hg(q, 8, 4);
  hg.initialize(rng);
  PHGraphLayer pg(4, 8, 4);
  pg.collapse_to_algebra(q);
  for (std::size_t i = 0; i < 4; ++i) pg.weight().blocks()[i].value = hg.blocks()[i].value;
  Graph g{5, {{0, 1}, {1, 2}, {3, 4}}, oracle::uniform_tensor(rng, {5, 8})};
  Tape t;
  CHECK(max_abs_diff(pg.forward(t, g).value(), hg.forward(t, g).value()) < 1e-12);

  PHGraphLayer lin(2, 4, 4, Activation::None);
  lin.initialize(rng);
  Graph empty{3, {}, oracle::uniform_tensor(rng, {3, 4})};
  PHMLayer phm(2, 4, 4, false);
  phm.weight().algebra_matrices() = lin.weight().algebra_matrices();
  phm.weight().blocks() = lin.weight().blocks();
  CHECK(max_abs_diff(lin.forward(t, empty).value(),
                     phm.forward(t, t.constant(empty.features)).value()) < 1e-15);
}

TEST_CASE("initialization statistics") {
  PHMLayer l(4, 256, 256);
  std::mt19937_64 rng(16);
  l.initialize(rng);
  bool only_levels = true;
  for (const Parameter& a : l.weight().algebra_matrices())
    for (double v : a.value.data()) only_levels = only_levels && (v == -1.0 || v == 0.0 || v == 1.0);
  CHECK(only_levels);
  double s2 = 0.0;
  std::size_t count = 0;
  for (const Parameter& f : l.weight().blocks())
    for (double v : f.value.data()) {
      s2 += v * v;
      ++count;
    }
  CHECK(s2 / count == doctest::Approx(3.0 / (4.0 * 256.0)).epsilon(0.05));
}

TEST_CASE("gradients over A and F") {
  std::mt19937_64 rng(17);
  PHMLayer phm(3, 6, 9, true, Activation::Sigmoid);
  randomize(phm.weight(), rng);
  CHECK(testing_util::layer_grad_error(phm, oracle::uniform_tensor(rng, {4, 6})) < 1e-6);
  PHCLayer phc(2, 4, 6, 3, 2, 1, true, Activation::Sigmoid);
  randomize(phc.weight(), rng);
  CHECK(testing_util::layer_grad_error(phc, oracle::uniform_tensor(rng, {2, 4, 5, 5})) < 1e-6);
  PHAttBlock att(2, 4, 2, Activation::Sigmoid);
  testing_util::fill_random(att, rng);
  CHECK(testing_util::layer_grad_error(att, oracle::uniform_tensor(rng, {2, 3, 4})) < 1e-6);
  PHGraphLayer pg(2, 4, 6, Activation::Sigmoid);
  randomize(pg.weight(), rng);
  Graph g{3, {{0, 1}, {1, 2}}, oracle::uniform_tensor(rng, {3, 4})};
  CHECK(testing_util::layer_grad_error(pg, g.features, ForwardContext{&g}) < 1e-6);
}

}  // TEST_SUITE
