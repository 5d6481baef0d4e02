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
#include "hxnn/autodiff.hpp"
#include "hxnn/error.hpp"
#include "oracles.hpp"

using namespace hxnn;

TEST_SUITE("tensor") {

TEST_CASE("construction and shape checks") {
  const Tensor t({2, 3}, 1.5);
  CHECK(t.size() == 6);
  CHECK(t.rank() == 2);
  CHECK_THROWS_AS(Tensor({2, 0}), ShapeError);
  CHECK_THROWS_AS(Tensor({2, 2}, std::vector<double>{1, 2, 3}), ShapeError);
  CHECK(Tensor::scalar(4.0).item() == 4.0);
  CHECK_THROWS_AS(t.item(), ShapeError);
  CHECK(t.reshaped({3, 2}).shape() == Shape{3, 2});
  CHECK_THROWS_AS(t.reshaped({4, 2}), ShapeError);
}

TEST_CASE("matmul against identity and the naive loop") {
  std::mt19937_64 rng(1);
  const Tensor x = oracle::uniform_tensor(rng, {3, 5});
  CHECK(kernel::matmul(Tensor::identity(3), x) == x);
  const Tensor a = oracle::uniform_tensor(rng, {7, 4}), b = oracle::uniform_tensor(rng, {4, 6});
  CHECK(max_abs_diff(kernel::matmul(a, b), oracle::naive_matmul(a, b)) < 1e-12);
  try {
    kernel::matmul(a, a);
    FAIL("expected ShapeError");
  } catch (const ShapeError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("[7,4]") != std::string::npos);
  }
}

TEST_CASE("batched matmul") {
  std::mt19937_64 rng(2);
  const Tensor a = oracle::uniform_tensor(rng, {2, 3, 4}), b = oracle::uniform_tensor(rng, {2, 4, 5});
  const Tensor c = kernel::matmul(a, b);
  REQUIRE(c.shape() == Shape{2, 3, 5});
  for (std::size_t k = 0; k < 2; ++k) {
    const Tensor ak({3, 4}, std::vector<double>(a.vec().begin() + k * 12, a.vec().begin() + (k + 1) * 12));
    const Tensor bk({4, 5}, std::vector<double>(b.vec().begin() + k * 20, b.vec().begin() + (k + 1) * 20));
    const Tensor ck = oracle::naive_matmul(ak, bk);
    for (std::size_t i = 0; i < 15; ++i) CHECK(std::abs(c[k * 15 + i] - ck[i]) < 1e-12);
  }
}

TEST_CASE("kron identity gives block diagonal") {
  const Tensor f = Tensor::matrix({{1, 2}, {3, 4}});
  const Tensor k = kernel::kron(Tensor::identity(2), f);
  CHECK(k == Tensor::matrix({{1, 2, 0, 0}, {3, 4, 0, 0}, {0, 0, 1, 2}, {0, 0, 3, 4}}));
}

TEST_CASE("kron matches the blockwise definition") {
  std::mt19937_64 rng(3);
  const Tensor a = oracle::uniform_tensor(rng, {2, 2}), b = oracle::uniform_tensor(rng, {3, 3});
  const Tensor k = kernel::kron(a, b);
  REQUIRE(k.shape() == Shape{6, 6});
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) CHECK(k.at(i, j) == a.at(i / 3, j / 3) * b.at(i % 3, j % 3));
  // (A (x) B) vec(X) = vec(B X A^T) with row-major vec.
  const Tensor x = oracle::uniform_tensor(rng, {2, 3});
  const Tensor lhs = kernel::matmul(k, x.reshaped({6, 1}));
  const Tensor rhs = oracle::naive_matmul(oracle::naive_matmul(a, x), kernel::transpose(b));
  CHECK(max_abs_diff(lhs.reshaped({2, 3}), rhs) < 1e-12);
}

TEST_CASE("kron with trailing filter dimensions") {
  std::mt19937_64 rng(4);
  const Tensor a = oracle::uniform_tensor(rng, {2, 3}), f = oracle::uniform_tensor(rng, {2, 1, 3, 3});
  const Tensor k = kernel::kron(a, f);
  REQUIRE(k.shape() == Shape{4, 3, 3, 3});
  for (std::size_t o = 0; o < 4; ++o)
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t s = 0; s < 9; ++s)
        CHECK(k[(o * 3 + i) * 9 + s] == a.at(o / 2, i) * f[((o % 2) * 1 + 0) * 9 + s]);
}

TEST_CASE("conv2d hand example") {
  const Tensor x({1, 1, 3, 3}, 1.0), w({1, 1, 2, 2}, 1.0);
  CHECK(kernel::conv2d(x, w, {1, 0}) == Tensor({1, 1, 2, 2}, 4.0));
  CHECK_THROWS_AS(kernel::conv2d(x, Tensor({1, 2, 2, 2}, 1.0), {1, 0}), ShapeError);
}

TEST_CASE("conv2d matches the naive loop") {
  std::mt19937_64 rng(5);
  for (auto [stride, pad] : {std::pair<std::size_t, std::size_t>{1, 0}, {1, 1}, {2, 1}, {2, 0}}) {
    const Tensor x = oracle::uniform_tensor(rng, {2, 4, 8, 8});
    const Tensor w = oracle::uniform_tensor(rng, {3, 4, 3, 3});
    CHECK(max_abs_diff(kernel::conv2d(x, w, {stride, pad}), oracle::naive_conv2d(x, w, stride, pad)) <
          1e-12);
  }
}

TEST_CASE("softmax is stable and normalized") {
  const Tensor a = Tensor::matrix({{1000.0, 1000.0}, {0.0, std::log(3.0)}});
  const Tensor s = kernel::softmax(a, 1);
  CHECK(s.at(0, 0) == doctest::Approx(0.5));
  CHECK(s.at(1, 1) == doctest::Approx(0.75));
}

TEST_CASE("concat along an axis") {
  const Tensor a = Tensor::matrix({{1, 2}}), b = Tensor::matrix({{3, 4}});
  CHECK(kernel::concat({&a, &b}, 0) == Tensor::matrix({{1, 2}, {3, 4}}));
  CHECK(kernel::concat({&a, &b}, 1) == Tensor::matrix({{1, 2, 3, 4}}));
}

}  // TEST_SUITE

TEST_SUITE("autodiff") {

TEST_CASE("sum gradient is all ones") {
  Tape t;
  const Var x = t.leaf(Tensor({2, 3}, 0.7));
  t.backward(sum(x));
  CHECK(t.grad(x) == Tensor({2, 3}, 1.0));
}

TEST_CASE("matmul adjoint") {
  std::mt19937_64 rng(6);
  const Tensor a = oracle::uniform_tensor(rng, {3, 4});
  Tape t;
  const Var av = t.constant(a);
  const Var x = t.leaf(oracle::uniform_tensor(rng, {4, 1}));
  t.backward(sum(matmul(av, x)));
  const Tensor expected = oracle::naive_matmul(kernel::transpose(a), Tensor({3, 1}, 1.0));
  CHECK(max_abs_diff(t.grad(x), expected) < 1e-14);
}

TEST_CASE("non-scalar loss is rejected") {
  Tape t;
  const Var x = t.leaf(Tensor({2}, 1.0));
  CHECK_THROWS_AS(t.backward(x), ShapeError);
}

TEST_CASE("unvisited leaves and unbound parameters get zeros") {
  Tape t;
  const Var x = t.leaf(Tensor({2}, 1.0));
  const Var y = t.leaf(Tensor({3}, 1.0));
  t.backward(sum(x));
  CHECK(t.grad(y) == Tensor({3}, 0.0));
  const Parameter p{"p", Tensor({2, 2}, 1.0)};
  CHECK(t.grad(p) == Tensor({2, 2}, 0.0));
}

TEST_CASE("gradients accumulate over shared inputs") {
  Tape t;
  const Var x = t.leaf(Tensor::vector({1.0, 2.0}));
  t.backward(sum(mul(x, x)));
  CHECK(t.grad(x) == Tensor::vector({2.0, 4.0}));
}

TEST_CASE("frozen parameters are constants") {
  Parameter p{"a", Tensor({2}, 1.0), false};
  Tape t;
  const Var v = t.param(p);
  CHECK_FALSE(t.needs_grad(v));
  CHECK(t.param(p).id() == v.id());
}

TEST_CASE("squared norm gradient check") {
  std::mt19937_64 rng(7);
  const auto r = grad_check([](Tape&, Var x) { return sum(mul(x, x)); },
                            oracle::uniform_tensor(rng, {5}));
  CHECK(r.max_rel_error < 1e-8);
  CHECK(r.coordinates == 5);
}

TEST_CASE("relu off the kink") {
  std::mt19937_64 rng(8);
  Tensor x = oracle::uniform_tensor(rng, {6});
  for (double& v : x.data()) v += v > 0 ? 0.1 : -0.1;
  CHECK(grad_check([](Tape&, Var v) { return sum(relu(v)); }, x).max_rel_error < 1e-6);
  Tape t;
  const Var z = t.leaf(Tensor::vector({0.0}));
  t.backward(sum(relu(z)));
  CHECK(t.grad(z)[0] == 0.0);
}

TEST_CASE("every op matches central differences") {
  std::mt19937_64 rng(9);
  const Tensor w = oracle::uniform_tensor(rng, {3, 4});
  const Tensor f = oracle::uniform_tensor(rng, {2, 3, 3, 3});
  const Tensor gate = oracle::uniform_tensor(rng, {2, 3});
  const Tensor sel = oracle::uniform_tensor(rng, {2, 2});
  const LeftMatrixPattern pat = builtin_algebra("complex").left_pattern();
  struct Case {
    const char* name;
    Shape shape;
    ScalarFn f;
  };
  const std::vector<Case> cases = {
      {"add/sub/scale", {3, 4}, [&](Tape& t, Var x) { return sum(scale(sub(add(x, t.constant(w)), mul(x, x)), 1.7)); }},
      {"matmul/transpose", {4, 2}, [&](Tape& t, Var x) { return sum(mul(matmul(t.constant(w), x), matmul(t.constant(w), x))); }},
      {"batched matmul", {2, 3, 3}, [&](Tape&, Var x) { return sum(mul(matmul(x, transpose(x)), x)); }},
      {"add_bias", {4}, [&](Tape& t, Var b) { return sum(mul(add_bias(t.constant(w), b, 1), t.constant(w))); }},
      {"scale_channels", {2, 3}, [&](Tape& t, Var g) { return sum(mul(scale_channels(t.constant(f), g), t.constant(f))); }},
      {"reshape/concat/slice", {2, 6}, [&](Tape&, Var x) {
         const Var y = concat({x, scale(x, 2.0)}, 1);
         return sum(mul(slice(reshape(y, {4, 6}), 0, 1, 3), slice(reshape(y, {4, 6}), 0, 2, 4)));
       }},
      {"kron", {2, 2}, [&](Tape& t, Var a) { return sum(mul(kron(a, t.constant(w)), kron(t.constant(sel), t.constant(w)))); }},
      {"kron filter", {2, 3, 3, 3}, [&](Tape& t, Var b) { return sum(mul(kron(t.constant(sel), b), kron(t.constant(sel), b))); }},
      {"block_assemble", {2, 3}, [&](Tape& t, Var b) {
         const Var m = block_assemble(pat, {b, scale(b, -0.5)});
         return sum(mul(m, m));
       }},
      {"conv2d input", {2, 3, 5, 5}, [&](Tape& t, Var x) { return sum(mul(conv2d(x, t.constant(f), {2, 1}), conv2d(x, t.constant(f), {2, 1}))); }},
      {"conv2d filter", {2, 3, 3, 3}, [&](Tape& t, Var k) {
         const Tensor img = Tensor({1, 3, 4, 4}, std::vector<double>(48, 0.3));
         return sum(mul(conv2d(t.constant(img), k, {1, 1}), conv2d(t.constant(img), k, {1, 1})));
       }},
      {"sigmoid", {7}, [&](Tape&, Var x) { return sum(mul(sigmoid(x), x)); }},
      {"softmax", {2, 5}, [&](Tape&, Var x) { return sum(mul(softmax(x, 1), x)); }},
      {"softmax axis 0", {3, 2}, [&](Tape&, Var x) { return sum(mul(softmax(x, 0), x)); }},
      {"mean/mean_trailing", {2, 3, 2, 2}, [&](Tape&, Var x) { return mean(mul(mean_trailing(x, 2), mean_trailing(x, 2))); }},
      {"mse", {3, 4}, [&](Tape& t, Var x) { return mse(x, t.constant(w)); }},
      {"cross_entropy", {3, 4}, [&](Tape&, Var x) { return cross_entropy(x, {0, 3, 1}); }},
  };
  for (const Case& c : cases) {
    CAPTURE(c.name);
    const auto r = grad_check(c.f, oracle::uniform_tensor(rng, c.shape));
    CHECK(r.max_rel_error < 1e-7);
  }
}

TEST_CASE("loss values") {
  Tape t;
  const Var x = t.leaf(Tensor::matrix({{1, 2}, {3, 4}}));
  CHECK(mse(x, x).value().item() == 0.0);
  const Var u = t.leaf(Tensor({2, 5}, 0.3));
  CHECK(cross_entropy(u, {0, 4}).value().item() == doctest::Approx(std::log(5.0)).epsilon(1e-14));
  CHECK_THROWS_AS(cross_entropy(u, {0, 5}), InvalidArgument);
}

}  // TEST_SUITE
