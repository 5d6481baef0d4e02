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

#include "hxnn/config.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "hxnn/error.hpp"
#include "hxnn/report.hpp"
#include "hxnn/serialize.hpp"

namespace hxnn {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::uint64_t to_u64(const std::string& v) {
  if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos) {
    throw ConfigError("expected an unsigned integer, got '" + v + "'");
  }
  try {
    return std::stoull(v);
  } catch (const std::out_of_range&) {
    throw ConfigError("integer '" + v + "' is out of range");
  }
}

double to_double(const std::string& v) {
  std::size_t pos = 0;
  double r = 0.0;
  try {
    r = std::stod(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (v.empty() || pos != v.size()) throw ConfigError("expected a number, got '" + v + "'");
  return r;
}

template <class T, class F>
std::vector<T> to_list(const std::string& v, F&& conv) {
  std::vector<T> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = v.find(',', start);
    out.push_back(conv(trim(std::string_view(v).substr(start, comma - start))));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class T, class F>
std::string join(const std::vector<T>& v, F&& fmt) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
  return s;
}

struct Key {
  const char* section;
  const char* name;
  std::function<void(Config&, const std::string&)> set;
  std::function<std::string(const Config&)> get;
};

#define SIZE_KEY(sec, field)                                                                  \
  Key {                                                                                       \
    #sec, #field, [](Config& c, const std::string& v) { c.sec.field = to_u64(v); },           \
        [](const Config& c) { return std::to_string(c.sec.field); }                           \
  }
#define DOUBLE_KEY(sec, field)                                                                \
  Key {                                                                                       \
    #sec, #field, [](Config& c, const std::string& v) { c.sec.field = to_double(v); },        \
        [](const Config& c) { return num(c.sec.field); }                                      \
  }
#define STRING_KEY(sec, field, check)                                                         \
  Key {                                                                                       \
    #sec, #field, [](Config& c, const std::string& v) { check(v); c.sec.field = v; },         \
        [](const Config& c) { return c.sec.field; }                                           \
  }

void one_of(const std::string& v, std::initializer_list<const char*> allowed) {
  for (const char* a : allowed)
    if (v == a) return;
  std::string msg = "'" + v + "' is not one of";
  for (const char* a : allowed) msg += std::string(" ") + a;
  throw ConfigError(msg);
}

void check_architecture(const std::string& v) { one_of(v, {"forecaster", "conv_classifier"}); }
void check_dataset(const std::string& v) { one_of(v, {"lorenz", "blobs"}); }
void check_encoding(const std::string& v) { parse_encoding(v); }
void check_optimizer(const std::string& v) { parse_optimizer(v); }
void check_algebra(const std::string& v) {
  if (v == "parameterized") return;
  for (const auto& n : builtin_algebra_names())
    if (v == n) return;
  throw ConfigError("unknown algebra '" + v + "'");
}

const std::vector<Key>& keys() {
  static const std::vector<Key> k = {
      STRING_KEY(model, architecture, check_architecture),
      STRING_KEY(model, algebra, check_algebra),
      SIZE_KEY(model, n),
      STRING_KEY(model, encoding, check_encoding),
      SIZE_KEY(model, hidden),
      Key{"model", "channels",
          [](Config& c, const std::string& v) {
            c.model.channels = to_list<std::size_t>(v, [](const std::string& s) { return to_u64(s); });
          },
          [](const Config& c) {
            return join(c.model.channels, [](std::size_t x) { return std::to_string(x); });
          }},
      SIZE_KEY(model, kernel),
      STRING_KEY(data, dataset, check_dataset),
      SIZE_KEY(data, seed),
      SIZE_KEY(data, trajectories),
      SIZE_KEY(data, steps),
      DOUBLE_KEY(data, dt),
      SIZE_KEY(data, window),
      SIZE_KEY(data, burn_in),
      SIZE_KEY(data, test_trajectories),
      Key{"data", "offsets",
          [](Config& c, const std::string& v) { c.data.offsets = to_list<double>(v, to_double); },
          [](const Config& c) { return join(c.data.offsets, num); }},
      SIZE_KEY(data, train_per_class),
      SIZE_KEY(data, test_per_class),
      SIZE_KEY(data, size),
      DOUBLE_KEY(data, noise),
      SIZE_KEY(train, seed),
      Key{"train", "seeds",
          [](Config& c, const std::string& v) { c.train.seeds = to_list<std::uint64_t>(v, to_u64); },
          [](const Config& c) {
            return join(c.train.seeds, [](std::uint64_t x) { return std::to_string(x); });
          }},
      SIZE_KEY(train, epochs),
      SIZE_KEY(train, batch_size),
      DOUBLE_KEY(train, learning_rate),
      STRING_KEY(train, optimizer, check_optimizer),
      DOUBLE_KEY(train, beta1),
      DOUBLE_KEY(train, beta2),
      DOUBLE_KEY(train, epsilon),
  };
  return k;
}

#undef SIZE_KEY
#undef DOUBLE_KEY
#undef STRING_KEY

}  // namespace

Config parse_config(std::string_view text) {
  Config c;
  std::string section;
  std::set<std::string> seen;
  std::size_t line_no = 0, start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find('\n', start), text.size());
    std::string_view raw = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    const std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + "unterminated section header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (section != "model" && section != "data" && section != "train") {
        throw ConfigError(where + "unknown section [" + section + "]");
      }
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
    if (section.empty()) throw ConfigError(where + "key outside of any section");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    const Key* k = nullptr;
    for (const Key& cand : keys())
      if (section == cand.section && key == cand.name) k = &cand;
    if (!k) throw ConfigError(where + "unknown key '" + key + "' in [" + section + "]");
    if (!seen.insert(section + "." + key).second) {
      throw ConfigError(where + "duplicate key '" + key + "' in [" + section + "]");
    }
    try {
      k->set(c, value);
    } catch (const Error& e) {
      throw ConfigError(where + key + ": " + e.what());
    }
  }
  return c;
}

std::string serialize_config(const Config& c) {
  std::string out, section;
  for (const Key& k : keys()) {
    if (section != k.section) {
      if (!section.empty()) out += '\n';
      section = k.section;
      out += "[" + section + "]\n";
    }
    out += std::string(k.name) + " = " + k.get(c) + '\n';
  }
  return out;
}

Config load_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

void override_seed(Config& c, std::uint64_t seed) {
  c.data.seed = seed;
  c.train.seed = seed;
  c.train.seeds = {seed};
}

TrainConfig train_config(const Config& c) {
  return {c.train.seed, c.train.epochs, c.train.batch_size, c.train.learning_rate,
          parse_optimizer(c.train.optimizer), {c.train.beta1, c.train.beta2, c.train.epsilon}};
}

LorenzConfig lorenz_config(const Config& c) {
  LorenzConfig l;
  l.seed = c.data.seed;
  l.trajectories = c.data.trajectories;
  l.steps = c.data.steps;
  l.dt = c.data.dt;
  l.window = c.data.window;
  l.burn_in = c.data.burn_in;
  l.test_trajectories = c.data.test_trajectories;
  return l;
}

BlobsConfig blobs_config(const Config& c) {
  return {c.data.seed, c.data.train_per_class, c.data.test_per_class, c.data.size, c.data.noise};
}

LorenzExperimentConfig lorenz_experiment_config(const Config& c) {
  LorenzExperimentConfig e;
  e.data = lorenz_config(c);
  e.train = train_config(c);
  e.seeds = c.train.seeds;
  e.offsets = c.data.offsets;
  e.real_hidden = c.model.hidden;
  return e;
}

BlobsExperimentConfig blobs_experiment_config(const Config& c) {
  BlobsExperimentConfig e;
  e.data = blobs_config(c);
  e.train = train_config(c);
  e.n = c.model.n;
  e.channels = c.model.channels;
  e.kernel = c.model.kernel;
  return e;
}

Sequential build_model(const Config& c) {
  if (c.model.architecture == "forecaster") {
    if (c.data.dataset != "lorenz") throw ConfigError("forecaster models need dataset = lorenz");
    return make_forecaster(c.model.algebra, c.model.n, parse_encoding(c.model.encoding), c.data.window,
                           c.model.hidden);
  }
  if (c.data.dataset != "blobs") throw ConfigError("conv_classifier models need dataset = blobs");
  return make_conv_classifier(c.model.algebra, c.model.n, c.model.channels, c.model.kernel, kBlobClasses);
}

// ---------------------------------------------------------------------------

namespace {

struct Prepared {
  Dataset data;
  Task task;
  Dataset raw;  // Lorenz windows in point space.
};

Prepared prepare(const Sequential& model, const Config& c) {
  if (model.encoding == "image") {
    if (c.data.dataset != "blobs") throw ConfigError("image models need dataset = blobs");
    return {make_rgb_blobs(blobs_config(c)), Task::Classification, {}};
  }
  if (c.data.dataset != "lorenz") throw ConfigError("forecaster models need dataset = lorenz");
  const PointEncoding e = parse_encoding(model.encoding);
  Dataset raw = lorenz_trajectories(lorenz_config(c));
  Dataset enc{encode_windows(raw.inputs, e), encode_targets(raw.inputs, raw.targets, e), raw.train, raw.test};
  return {std::move(enc), Task::Regression, std::move(raw)};
}

const char* metric_name(Task t) { return t == Task::Classification ? "test_accuracy" : "test_mse"; }

}  // namespace

CommandOutput run_train(const Config& c) {
  Sequential model = build_model(c);
  Rng init(c.train.seed);
  model.initialize(init);
  const Prepared p = prepare(model, c);
  const Metrics m = train(model, p.data, train_config(c), p.task);
  std::ostringstream text, csv;
  csv << "epoch,train_loss," << metric_name(p.task) << '\n';
  for (std::size_t e = 0; e < m.train_loss.size(); ++e) {
    csv << e + 1 << ',' << format_double(m.train_loss[e]) << ',' << format_double(m.test_metric[e]) << '\n';
  }
  text << "architecture=" << c.model.architecture << " algebra=" << model.algebra << " n=" << model.n
       << " free_params=" << m.params.free_total() << " epochs=" << m.train_loss.size() << '\n'
       << "initial_train_loss=" << format_double(m.initial_train_loss) << " final_train_loss="
       << format_double(m.train_loss.empty() ? m.initial_train_loss : m.train_loss.back()) << ' '
       << metric_name(p.task) << '=' << format_double(evaluate(model, p.data, p.task)) << '\n';
  return {text.str(), {{"model.hxnn", model_to_bytes(model)}, {"train_metrics.csv", csv.str()}}};
}

CommandOutput run_eval(const Sequential& model, const Config& c) {
  const Prepared p = prepare(model, c);
  std::ostringstream text;
  text << metric_name(p.task) << '=' << format_double(evaluate(model, p.data, p.task)) << '\n';
  CommandOutput out;
  if (p.task == Task::Regression) {
    const Tensor in = gather(p.raw.inputs, p.raw.test), target = gather(p.raw.targets, p.raw.test);
    const auto rows = equivariance_report(point_predictor(model, parse_encoding(model.encoding)),
                                          TransformFamily::Translation, in, target, c.data.offsets);
    std::ostringstream csv;
    csv << "offset,mse_original,mse_translated,ratio\n";
    for (const auto& r : rows) {
      csv << format_double(r.magnitude) << ',' << format_double(r.error_original) << ','
          << format_double(r.error_transformed) << ',' << format_double(r.ratio) << '\n';
      text << "offset=" << format_double(r.magnitude) << " ratio=" << format_double(r.ratio) << '\n';
    }
    out.files.emplace_back("eval_translation.csv", csv.str());
  }
  out.text = text.str();
  return out;
}

CommandOutput run_experiment_lorenz(const Config& c) {
  const LorenzReport r = experiment_lorenz(lorenz_experiment_config(c));
  return {lorenz_summary(r), {{"lorenz.csv", lorenz_csv(r)}}};
}

CommandOutput run_experiment_blobs(const Config& c) {
  const BlobsReport r = experiment_blobs(blobs_experiment_config(c));
  return {blobs_summary(r), {{"blobs.csv", blobs_csv(r)}, {"blobs_curves.csv", blobs_curves_csv(r)}}};
}

CommandOutput run_paramtable(std::string_view spec) {
  const std::string table = format_param_table(experiment_param_table(spec));
  return {table, {{"param_table.csv", table}}};
}

CommandOutput run_gradcheck(bool& passed) {
  const auto rows = gradcheck_all_layers();
  passed = gradcheck_max(rows) < kGradcheckTolerance;
  return {format_gradcheck(rows), {}};
}

}  // namespace hxnn
