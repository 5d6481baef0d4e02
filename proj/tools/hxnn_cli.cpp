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

// Command-line front end. Every command forwards to the C interface and
// prints the library's text unchanged.

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <functional>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "hxnn/hxnn.h"

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

struct CommandFailed {
  int code;
};

void check(hxnn_status s) {
  if (s == HXNN_OK) return;
  std::fprintf(stderr, "hxnn: error: %s\n", hxnn_last_error());
  throw CommandFailed{s == HXNN_ERR_IO ? kExitIo : kExitValidation};
}

void print(const char* text, std::size_t size) { std::fwrite(text, 1, size, stdout); }

// Owning wrappers so early exits release handles.
template <class T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(p); }
};

using String = Handle<hxnn_string, hxnn_string_free>;
using Algebra = Handle<hxnn_algebra, hxnn_algebra_free>;
using Config = Handle<hxnn_config, hxnn_config_free>;
using Model = Handle<hxnn_model, hxnn_model_free>;
using Report = Handle<hxnn_report, hxnn_report_free>;

struct Options {
  std::string out = ".";
  std::optional<std::uint64_t> seed;
};

void algebra_command(const std::string& name, hxnn_status (*fn)(const hxnn_algebra*, hxnn_string**)) {
  Algebra a;
  check(hxnn_algebra_create(name.c_str(), &a.p));
  String s;
  check(fn(a.p, &s.p));
  print(hxnn_string_data(s.p), hxnn_string_size(s.p));
}

void load_config(const std::string& path, const Options& o, Config& c) {
  check(hxnn_config_load(path.c_str(), &c.p));
  if (o.seed) check(hxnn_config_set_seed(c.p, *o.seed));
}

void finish(const Report& r, const Options& o) {
  const char* text = hxnn_report_text(r.p);
  print(text, std::strlen(text));
  if (hxnn_report_file_count(r.p) > 0) check(hxnn_report_write_files(r.p, o.out.c_str()));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hypercomplex and parameterized hypercomplex neural networks"};
  app.require_subcommand(1);
  // Global flags may follow the subcommand.
  app.fallthrough();
  Options opt;
  app.add_option("--out", opt.out, "Directory for CSV and model files")->capture_default_str();
  app.add_option("--seed", opt.seed, "Overrides the data and training seeds of the config");
  app.set_version_flag("--version", std::string(hxnn_version()));

  std::string name, spec, config, model;
  bool grad_ok = true;
  std::function<void()> action;

  auto* algebra = app.add_subcommand("algebra", "Algebra tables and properties");
  algebra->require_subcommand(1);
  auto* table = algebra->add_subcommand("table", "Basis multiplication table");
  table->add_option("name", name)->required();
  table->callback([&] { action = [&] { algebra_command(name, hxnn_algebra_table); }; });
  auto* chk = algebra->add_subcommand("check", "Commutativity, associativity, alternativity, power associativity");
  chk->add_option("name", name)->required();
  chk->callback([&] { action = [&] { algebra_command(name, hxnn_algebra_check); }; });
  auto* zd = algebra->add_subcommand("zerodiv", "Search for a pair of nonzero zero divisors");
  zd->add_option("name", name)->required();
  zd->callback([&] { action = [&] { algebra_command(name, hxnn_algebra_zerodiv); }; });

  auto* layers = app.add_subcommand("layers", "Layer utilities");
  layers->require_subcommand(1);
  auto* pt = layers->add_subcommand("paramtable", "Parameter counts, e.g. fc:64:64,conv:24:24:3");
  pt->add_option("spec", spec)->required();
  pt->callback([&] {
    action = [&] {
      Report r;
      check(hxnn_paramtable(spec.c_str(), &r.p));
      finish(r, opt);
    };
  });

  auto* train = app.add_subcommand("train", "Train the model described by a config file");
  train->add_option("config", config)->required();
  train->callback([&] {
    action = [&] {
      Config c;
      load_config(config, opt, c);
      Report r;
      check(hxnn_train(c.p, &r.p));
      finish(r, opt);
    };
  });

  auto* eval = app.add_subcommand("eval", "Evaluate a saved model on the config's dataset");
  eval->add_option("model", model)->required();
  eval->add_option("config", config)->required();
  eval->callback([&] {
    action = [&] {
      Model m;
      check(hxnn_model_load(model.c_str(), &m.p));
      Config c;
      load_config(config, opt, c);
      Report r;
      check(hxnn_eval(m.p, c.p, &r.p));
      finish(r, opt);
    };
  });

  auto* experiment = app.add_subcommand("experiment", "Desk-scale experiments");
  experiment->require_subcommand(1);
  auto* lorenz = experiment->add_subcommand("lorenz", "Translation equivariance on Lorenz forecasting");
  lorenz->add_option("config", config)->required();
  lorenz->callback([&] {
    action = [&] {
      Config c;
      load_config(config, opt, c);
      Report r;
      check(hxnn_experiment_lorenz(c.p, &r.p));
      finish(r, opt);
    };
  });
  auto* blobs = experiment->add_subcommand("blobs", "PHC n=3 against a real CNN on RGB blobs");
  blobs->add_option("config", config)->required();
  blobs->callback([&] {
    action = [&] {
      Config c;
      load_config(config, opt, c);
      Report r;
      check(hxnn_experiment_blobs(c.p, &r.p));
      finish(r, opt);
    };
  });

  auto* grad = app.add_subcommand("gradcheck", "Finite-difference check of every layer type");
  grad->callback([&] {
    action = [&] {
      Report r;
      int passed = 0;
      check(hxnn_gradcheck(&r.p, &passed));
      finish(r, opt);
      grad_ok = passed != 0;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }
  try {
    action();
  } catch (const CommandFailed& f) {
    return f.code;
  }
  std::fflush(stdout);
  return grad_ok ? 0 : kExitValidation;
}
