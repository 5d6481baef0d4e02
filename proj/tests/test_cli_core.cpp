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

#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "hxnn/config.hpp"
#include "hxnn/error.hpp"
#include "hxnn/layers.hpp"
#include "hxnn/phlayers.hpp"
#include "hxnn/report.hpp"
#include "hxnn/serialize.hpp"
#include "layer_check.hpp"

using namespace hxnn;

namespace {

Sequential every_layer_model(std::uint64_t seed) {
  const Algebra q = builtin_algebra("quaternion");
  Sequential m;
  m.n = 4;
  m.algebra = "parameterized";
  m.encoding = "pure_quaternion";
  m.emplace<HFCLayer>(q, 8, 4, Activation::Sigmoid, false);
  m.emplace<HConv2DLayer>(q, 4, 8, 3, 2, 1);
  m.emplace<HAttBlock>(q, 4, 3, Gating::Identity, GateProduct::ChannelBroadcast);
  m.emplace<HGraphConvLayer>(q, 8, 4, Activation::None);
  m.emplace<PHMLayer>(3, 6, 9, true, Activation::Relu);
  m.emplace<PHCLayer>(3, 3, 6, 3, 1, 1, false);
  m.emplace<PHAttBlock>(2, 4, 2, Activation::Sigmoid, AttentionOutput::Pure);
  m.emplace<PHGraphLayer>(2, 8, 4);
  m.emplace<PHMLayer>(4, 8, 8).collapse_to_algebra(q);
  m.emplace<ActivationLayer>(Activation::Sigmoid);
  m.emplace<GlobalAvgPool>();
  m.emplace<Flatten>();
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < m.size(); ++i) testing_util::fill_random(m.layer(i), rng);
  return m;
}

void expect_identical(const Sequential& a, const Sequential& b) {
  REQUIRE(a.size() == b.size());
  CHECK(a.n == b.n);
  CHECK(a.algebra == b.algebra);
  CHECK(a.encoding == b.encoding);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.layer(i).spec() == b.layer(i).spec());
    const auto pa = a.layer(i).parameters();
    const auto pb = b.layer(i).parameters();
    REQUIRE(pa.size() == pb.size());
    for (std::size_t k = 0; k < pa.size(); ++k) {
      CHECK(pa[k]->name == pb[k]->name);
      CHECK(pa[k]->trainable == pb[k]->trainable);
      REQUIRE(pa[k]->value.shape() == pb[k]->value.shape());
      CHECK(std::memcmp(pa[k]->value.data().data(), pb[k]->value.data().data(),
                        pa[k]->value.size() * sizeof(double)) == 0);
    }
  }
}

const char* kSmallLorenz = R"(# tiny forecaster run
[model]
architecture = forecaster
algebra = quaternion
encoding = pure_quaternion
hidden = 16

[data]
dataset = lorenz
trajectories = 3
test_trajectories = 1
steps = 60
burn_in = 100
offsets = 0, 10

[train]
seed = 3
epochs = 3
learning_rate = 0.005
)";

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("property check strings follow the table columns") {
    const std::pair<const char*, const char*> rows[] = {
        {"real", "commutative=true associative=true alternative=true power_associative=true\n"},
        {"complex", "commutative=true associative=true alternative=true power_associative=true\n"},
        {"quaternion", "commutative=false associative=true alternative=true power_associative=true\n"},
        {"tessarine", "commutative=true associative=true alternative=true power_associative=true\n"},
        {"dual_quaternion", "commutative=false associative=true alternative=true power_associative=true\n"},
        {"octonion", "commutative=false associative=false alternative=true power_associative=true\n"},
    };
    for (const auto& [name, want] : rows) CHECK(format_property_check(builtin_algebra(name)) == want);
  }

  TEST_CASE("algebra table lists every basis product") {
    const std::string t = format_algebra_table(builtin_algebra("complex"));
    CHECK(t == "i j sign k\n0 0 1 0\n0 1 1 1\n1 0 1 1\n1 1 -1 0\n");
    const std::string d = format_algebra_table(builtin_algebra("dual_quaternion"));
    CHECK(std::count(d.begin(), d.end(), '\n') == 65);
    // eps * eps = 0.
    CHECK(d.find("\n4 4 0 0\n") != std::string::npos);
  }

  TEST_CASE("zero divisor report") {
    CHECK(format_zero_divisor(builtin_algebra("quaternion")) == "none found\n");
    const std::string s = format_zero_divisor(builtin_algebra("sedenion"));
    CHECK(s.rfind("x=(", 0) == 0);
    CHECK(s.find(" x*y=(0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0)\n") != std::string::npos);
    CHECK(format_zero_divisor(builtin_algebra("tessarine")).rfind("x=(", 0) == 0);
  }

  TEST_CASE("gradcheck over every layer kind") {
    const auto rows = gradcheck_all_layers();
    REQUIRE(rows.size() == 8);
    const char* kinds[] = {"hfc", "hconv2d", "hatt", "hgraph", "phm", "phc", "phatt", "phgraph"};
    for (std::size_t i = 0; i < 8; ++i) {
      CHECK(rows[i].layer == kinds[i]);
      CHECK(rows[i].coordinates > 0);
      CHECK(rows[i].max_rel_error < kGradcheckTolerance);
    }
    bool passed = false;
    const CommandOutput out = run_gradcheck(passed);
    CHECK(passed);
    CHECK(out.text == format_gradcheck(rows));
    CHECK(out.text.find("\nmax_rel_error=") != std::string::npos);
    CHECK(out.text.substr(out.text.size() - 5) == "PASS\n");
  }

  TEST_CASE("save then load is bit exact for every layer kind") {
    const Sequential m = every_layer_model(31);
    const std::string bytes = model_to_bytes(m);
    CHECK(bytes.substr(0, 4) == "HXNN");
    CHECK(bytes[4] == 1);
    CHECK(bytes[5] == 0);
    const Sequential back = model_from_bytes(bytes);
    expect_identical(m, back);
    CHECK(model_to_bytes(back) == bytes);
    // The collapsed PHM stays frozen.
    const auto collapsed = back.layer(8).parameters();
    CHECK_FALSE(collapsed[0]->trainable);

    const auto path = (std::filesystem::temp_directory_path() / "hxnn_roundtrip.hxnn").string();
    save_model(m, path);
    expect_identical(m, load_model(path));
    std::filesystem::remove(path);
  }

  TEST_CASE("payload is little-endian f64") {
    Sequential m;
    m.emplace<HFCLayer>(builtin_algebra("real"), 1, 1, Activation::None, false);
    m.layer(0).parameters()[0]->value[0] = 1.0;
    const std::string b = model_to_bytes(m);
    // 1.0 = 0x3FF0000000000000 ends the file.
    const unsigned char tail[8] = {0, 0, 0, 0, 0, 0, 0xF0, 0x3F};
    CHECK(std::memcmp(b.data() + b.size() - 8, tail, 8) == 0);
  }

  TEST_CASE("truncated, foreign and future files are rejected") {
    const std::string bytes = model_to_bytes(every_layer_model(32));
    for (std::size_t n = 0; n < bytes.size(); n += 1 + n / 7) {
      CHECK_THROWS_AS(model_from_bytes(std::string_view(bytes).substr(0, n)), FormatError);
    }
    CHECK_THROWS_AS(model_from_bytes(std::string_view(bytes).substr(0, bytes.size() - 1)), FormatError);
    CHECK_THROWS_AS(model_from_bytes(bytes + "x"), FormatError);
    std::string bad = bytes;
    bad[0] = 'Q';
    CHECK_THROWS_AS(model_from_bytes(bad), FormatError);
    std::string future = bytes;
    future[4] = 2;
    try {
      model_from_bytes(future);
      FAIL("version 2 accepted");
    } catch (const FormatError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("version 2") != std::string::npos);
      CHECK(msg.find("expected 1") != std::string::npos);
    }
    CHECK_THROWS_AS(load_model("/nonexistent/dir/model.hxnn"), IoError);
  }

  TEST_CASE("make_layer rejects bad specs") {
    CHECK_THROWS_AS(make_layer({"dense", {}}), FormatError);
    CHECK_THROWS_AS(make_layer({"hfc", {{"algebra", "real"}}}), FormatError);
    CHECK_THROWS_AS(make_layer({"hfc",
                                {{"algebra", "quaternion"}, {"in", "6"}, {"out", "4"},
                                 {"activation", "relu"}, {"bias", "1"}}}),
                    FormatError);
    const LayerSpec ok{"phm", {{"n", "2"}, {"in", "4"}, {"out", "2"}, {"activation", "none"},
                               {"bias", "1"}, {"collapsed", "complex"}}};
    CHECK(make_layer(ok)->spec() == ok);
  }

  TEST_CASE("config parsing") {
    const Config c = parse_config(kSmallLorenz);
    CHECK(c.model.algebra == "quaternion");
    CHECK(c.model.hidden == 16);
    CHECK(c.data.offsets == std::vector<double>{0.0, 10.0});
    CHECK(c.train.learning_rate == 0.005);
    CHECK(c.train.batch_size == 32);
    CHECK(parse_config("") == Config{});
    CHECK(parse_config("[train]\nepochs = 4 # inline comment\n").train.epochs == 4);
    CHECK_THROWS_AS(parse_config("[train]\nepochz = 4\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[training]\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("epochs = 4\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[train]\nepochs = four\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[train]\nepochs = -1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[train]\nepochs = 1\nepochs = 2\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[train]\nlearning_rate = 1e-3x\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[model]\nalgebra = bicomplex\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[train]\noptimizer = lbfgs\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[data\n"), ConfigError);
    try {
      parse_config("[model]\n\n# c\nhiden = 4\n");
      FAIL("typo accepted");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("line 4") != std::string::npos);
    }
    CHECK_THROWS_AS(load_config("/nonexistent/run.cfg"), IoError);
  }

  TEST_CASE("config round trip is a fixed point") {
    Config c = parse_config(kSmallLorenz);
    c.data.dt = 0.1 + 0.2;
    c.train.epsilon = 1.0 / 3.0;
    const std::string once = serialize_config(c);
    const Config back = parse_config(once);
    CHECK(back == c);
    CHECK(serialize_config(back) == once);
    CHECK(parse_config(serialize_config(Config{})) == Config{});
  }

  TEST_CASE("seed override") {
    Config c = parse_config(kSmallLorenz);
    override_seed(c, 99);
    CHECK(c.data.seed == 99);
    CHECK(c.train.seed == 99);
    CHECK(c.train.seeds == std::vector<std::uint64_t>{99});
  }

  TEST_CASE("model and dataset must agree") {
    Config c;
    c.data.dataset = "blobs";
    CHECK_THROWS_AS(build_model(c), ConfigError);
    c.model.architecture = "conv_classifier";
    c.model.algebra = "parameterized";
    c.model.n = 3;
    CHECK(conv_param_count(build_model(c)).free_weights == 2781);
    c.model.n = 5;
    CHECK_THROWS_AS(build_model(c), DivisibilityError);
  }

  TEST_CASE("train then eval a small forecaster") {
    const Config c = parse_config(kSmallLorenz);
    const CommandOutput a = run_train(c), b = run_train(c);
    CHECK(a.text == b.text);
    REQUIRE(a.files.size() == 2);
    CHECK(a.files[0].first == "model.hxnn");
    CHECK(a.files[0].second == b.files[0].second);
    CHECK(a.files[1].second.rfind("epoch,train_loss,test_mse\n1,", 0) == 0);
    CHECK(std::count(a.files[1].second.begin(), a.files[1].second.end(), '\n') == 4);
    const Sequential model = model_from_bytes(a.files[0].second);
    CHECK(model.encoding == "pure_quaternion");
    const CommandOutput e = run_eval(model, c);
    CHECK(e.text.rfind("test_mse=", 0) == 0);
    CHECK(e.text.find("offset=0 ratio=1\n") != std::string::npos);
    REQUIRE(e.files.size() == 1);
    CHECK(e.files[0].second.rfind("offset,mse_original,mse_translated,ratio\n0,", 0) == 0);
    // The test metric in the summary equals evaluating the reloaded model.
    const std::string metric = e.text.substr(0, e.text.find('\n'));
    CHECK(a.text.find(metric) != std::string::npos);
  }

  TEST_CASE("paramtable command") {
    const CommandOutput out = run_paramtable("fc:64:64");
    CHECK(out.text == format_param_table(experiment_param_table("fc:64:64")));
    CHECK(out.text.find("\nquaternion,1024,4096,0.25,64\n") != std::string::npos);
  }
}
