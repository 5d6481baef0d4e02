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

#include "hxnn/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <sstream>

#include "hxnn/error.hpp"
#include "hxnn/layers.hpp"
#include "hxnn/phlayers.hpp"

namespace hxnn {

// ---------------------------------------------------------------------------
// Optimizers

void sgd_step(std::span<double> params, std::span<const double> grads, double lr) {
  if (params.size() != grads.size()) throw ShapeError("sgd_step: parameter/gradient size mismatch");
  for (std::size_t i = 0; i < params.size(); ++i) params[i] -= lr * grads[i];
}

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state,
               double lr, const AdamOptions& o) {
  if (params.size() != grads.size()) throw ShapeError("adam_step: parameter/gradient size mismatch");
  if (state.m.empty()) {
    state.m.assign(params.size(), 0.0);
    state.v.assign(params.size(), 0.0);
  }
  ++state.t;
  const double c1 = 1.0 - std::pow(o.beta1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(o.beta2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.m[i] = o.beta1 * state.m[i] + (1.0 - o.beta1) * grads[i];
    state.v[i] = o.beta2 * state.v[i] + (1.0 - o.beta2) * grads[i] * grads[i];
    const double mh = state.m[i] / c1, vh = state.v[i] / c2;
    params[i] -= lr * mh / (std::sqrt(vh) + o.epsilon);
  }
}

void Optimizer::step(const std::vector<Parameter*>& params, const Tape& tape) {
  if (state_.empty()) state_.resize(params.size());
  if (state_.size() != params.size()) throw InvalidArgument("optimizer used with a different model");
  for (std::size_t i = 0; i < params.size(); ++i) {
    Parameter& p = *params[i];
    if (!p.trainable) continue;
    const Tensor g = tape.grad(p);
    if (cfg_.optimizer == OptimizerKind::Sgd) {
      sgd_step(p.value.data(), g.data(), cfg_.learning_rate);
    } else {
      adam_step(p.value.data(), g.data(), state_[i], cfg_.learning_rate, cfg_.adam);
    }
  }
}

std::string_view optimizer_name(OptimizerKind k) { return k == OptimizerKind::Sgd ? "sgd" : "adam"; }

OptimizerKind parse_optimizer(std::string_view name) {
  if (name == "sgd") return OptimizerKind::Sgd;
  if (name == "adam") return OptimizerKind::Adam;
  throw ConfigError("unknown optimizer '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Datasets

Tensor gather(const Tensor& t, std::span<const std::size_t> index) {
  if (t.rank() == 0) throw ShapeError("gather needs a leading sample axis");
  const std::size_t rows = t.dim(0), width = t.size() / rows;
  Shape shape = t.shape();
  shape[0] = index.size();
  std::vector<double> out(index.size() * width);
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (index[i] >= rows) throw InvalidArgument("gather index out of range");
    std::copy_n(t.data().begin() + index[i] * width, width, out.begin() + i * width);
  }
  return Tensor(std::move(shape), std::move(out));
}

void check_splits(const Dataset& d) {
  const std::size_t n = d.inputs.rank() ? d.inputs.dim(0) : 0;
  if (d.targets.rank() == 0 || d.targets.dim(0) != n) {
    throw ShapeError("inputs " + shape_str(d.inputs.shape()) + " and targets " +
                     shape_str(d.targets.shape()) + " disagree on the sample count");
  }
  std::vector<char> seen(n, 0);
  for (const auto* split : {&d.train, &d.test}) {
    for (std::size_t i : *split) {
      if (i >= n) throw InvalidArgument("split index " + std::to_string(i) + " out of range");
      if (seen[i]) throw InvalidArgument("split index " + std::to_string(i) + " used twice");
      seen[i] = 1;
    }
  }
}

Dataset make_rgb_blobs(const BlobsConfig& cfg) {
  if (cfg.size < 4) throw InvalidArgument("blob images need at least 4x4 pixels");
  const std::size_t s = cfg.size, per_image = 3 * s * s;
  const std::size_t total = kBlobClasses * (cfg.train_per_class + cfg.test_per_class);
  if (total == 0) throw InvalidArgument("empty blob dataset");
  static constexpr double kPalette[2][3] = {{0.9, 0.45, 0.15}, {0.15, 0.5, 0.9}};
  Rng rng(cfg.seed);
  std::uniform_real_distribution<double> period_d(3.0, 6.0), phase_d(0.0, 2.0 * M_PI);
  std::normal_distribution<double> noise_d(0.0, cfg.noise);
  std::vector<double> x(total * per_image), y(total);
  Dataset d;
  std::size_t k = 0;
  for (std::size_t per : {cfg.train_per_class, cfg.test_per_class}) {
    auto& split = k == 0 ? d.train : d.test;
    for (std::size_t i = 0; i < per; ++i) {
      for (std::size_t c = 0; c < kBlobClasses; ++c, ++k) {
        const double* palette = kPalette[c % 2];
        const bool vertical = c / 2 == 1;
        const double period = period_d(rng), phase = phase_d(rng);
        double* img = x.data() + k * per_image;
        for (std::size_t r = 0; r < s; ++r)
          for (std::size_t q = 0; q < s; ++q) {
            const double coord = static_cast<double>(vertical ? q : r);
            const double stripe = 0.5 + 0.5 * std::sin(2.0 * M_PI * coord / period + phase);
            for (std::size_t ch = 0; ch < 3; ++ch) {
              img[(ch * s + r) * s + q] = palette[ch] * stripe + noise_d(rng);
            }
          }
        y[k] = static_cast<double>(c);
        split.push_back(k);
      }
    }
  }
  d.inputs = Tensor({total, 3, s, s}, std::move(x));
  d.targets = Tensor({total}, std::move(y));
  return d;
}

std::vector<double> rk4_step(const OdeFn& f, const std::vector<double>& y, double dt) {
  auto axpy = [](const std::vector<double>& a, const std::vector<double>& b, double h) {
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + h * b[i];
    return out;
  };
  const auto k1 = f(y);
  const auto k2 = f(axpy(y, k1, dt / 2));
  const auto k3 = f(axpy(y, k2, dt / 2));
  const auto k4 = f(axpy(y, k3, dt));
  std::vector<double> out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    out[i] = y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return out;
}

Vec3 lorenz_field(const Vec3& p, double sigma, double rho, double beta) {
  return {sigma * (p[1] - p[0]), p[0] * (rho - p[2]) - p[1], p[0] * p[1] - beta * p[2]};
}

Dataset lorenz_trajectories(const LorenzConfig& cfg) {
  if (!(cfg.dt > 0.0)) throw InvalidArgument("dt must be positive");
  if (cfg.window < 3) throw InvalidArgument("window must hold at least 3 points");
  if (cfg.steps <= cfg.window) throw InvalidArgument("steps must exceed the window length");
  if (cfg.test_trajectories >= cfg.trajectories) {
    throw InvalidArgument("test trajectories must leave at least one training trajectory");
  }
  const OdeFn f = [&](const std::vector<double>& v) {
    const Vec3 d = lorenz_field({v[0], v[1], v[2]}, cfg.sigma, cfg.rho, cfg.beta);
    return std::vector<double>{d[0], d[1], d[2]};
  };
  Rng rng(cfg.seed);
  std::uniform_real_distribution<double> xy(-15.0, 15.0), z(10.0, 40.0);
  const std::size_t per_traj = cfg.steps - cfg.window, w = cfg.window;
  const std::size_t total = per_traj * cfg.trajectories;
  std::vector<double> in(total * w * 3), out(total * 3);
  Dataset d;
  std::size_t k = 0;
  for (std::size_t t = 0; t < cfg.trajectories; ++t) {
    std::vector<double> y = {xy(rng), xy(rng), z(rng)};
    for (std::size_t s = 0; s < cfg.burn_in; ++s) y = rk4_step(f, y, cfg.dt);
    std::vector<double> path;
    path.reserve(cfg.steps * 3);
    for (std::size_t s = 0; s < cfg.steps; ++s) {
      path.insert(path.end(), y.begin(), y.end());
      y = rk4_step(f, y, cfg.dt);
    }
    const bool test = t >= cfg.trajectories - cfg.test_trajectories;
    for (std::size_t s = 0; s < per_traj; ++s, ++k) {
      std::copy_n(path.begin() + s * 3, w * 3, in.begin() + k * w * 3);
      std::copy_n(path.begin() + (s + w) * 3, 3, out.begin() + k * 3);
      (test ? d.test : d.train).push_back(k);
    }
  }
  d.inputs = Tensor({total, w, 3}, std::move(in));
  d.targets = Tensor({total, 3}, std::move(out));
  return d;
}

Dataset translated(const Dataset& d, double offset) {
  Dataset out = d;
  for (double& v : out.inputs.data()) v += offset;
  for (double& v : out.targets.data()) v += offset;
  return out;
}

// ---------------------------------------------------------------------------
// Training

namespace {

std::vector<std::size_t> labels_of(const Tensor& t) {
  std::vector<std::size_t> out(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < 0.0 || t[i] != std::floor(t[i])) throw InvalidArgument("class labels must be whole numbers");
    out[i] = static_cast<std::size_t>(t[i]);
  }
  return out;
}

Var loss_of(Tape& tape, Var out, const Tensor& targets, Task task) {
  if (task == Task::Classification) return cross_entropy(out, labels_of(targets));
  return mse(out, tape.constant(targets));
}

template <class Fn>
void for_batches(std::span<const std::size_t> index, std::size_t batch, Fn&& fn) {
  for (std::size_t b = 0; b < index.size(); b += batch) {
    fn(index.subspan(b, std::min(batch, index.size() - b)));
  }
}

}  // namespace

double mean_loss(const Sequential& model, const Dataset& data, Task task,
                 std::span<const std::size_t> index, std::size_t batch_size) {
  if (index.empty()) throw InvalidArgument("mean_loss over an empty split");
  double total = 0.0;
  for_batches(index, batch_size, [&](std::span<const std::size_t> b) {
    Tape tape;
    const Var out = model.forward(tape, tape.constant(gather(data.inputs, b)));
    total += loss_of(tape, out, gather(data.targets, b), task).value().item() *
             static_cast<double>(b.size());
  });
  return total / static_cast<double>(index.size());
}

double evaluate(const Sequential& model, const Dataset& data, Task task,
                std::span<const std::size_t> index) {
  if (index.empty()) index = data.test;
  if (index.empty()) throw InvalidArgument("evaluate over an empty split");
  if (task == Task::Regression) return mean_loss(model, data, task, index);
  std::size_t correct = 0;
  for_batches(index, 256, [&](std::span<const std::size_t> b) {
    const Tensor logits = model.predict(gather(data.inputs, b));
    const auto labels = labels_of(gather(data.targets, b));
    const std::size_t classes = logits.dim(1);
    for (std::size_t i = 0; i < b.size(); ++i) {
      const auto row = logits.data().subspan(i * classes, classes);
      const auto best = static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
      correct += best == labels[i];
    }
  });
  return static_cast<double>(correct) / static_cast<double>(index.size());
}

Metrics train(Sequential& model, const Dataset& data, const TrainConfig& cfg, Task task) {
  check_splits(data);
  Metrics m;
  m.params = model.param_count();
  if (cfg.epochs == 0) return m;
  if (cfg.batch_size == 0) throw ConfigError("batch_size must be positive");
  if (data.train.empty()) throw InvalidArgument("training split is empty");
  m.initial_train_loss = mean_loss(model, data, task, data.train);
  Rng rng(cfg.seed);
  Optimizer opt(cfg);
  const auto params = model.parameters();
  std::vector<std::size_t> order = data.train;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    // Fisher-Yates with raw engine output, identical across standard libraries.
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
    double total = 0.0;
    for_batches(order, cfg.batch_size, [&](std::span<const std::size_t> b) {
      Tape tape;
      const Var out = model.forward(tape, tape.constant(gather(data.inputs, b)));
      const Var loss = loss_of(tape, out, gather(data.targets, b), task);
      tape.backward(loss);
      opt.step(params, tape);
      total += loss.value().item() * static_cast<double>(b.size());
    });
    m.train_loss.push_back(total / static_cast<double>(order.size()));
    m.test_metric.push_back(data.test.empty() ? 0.0 : evaluate(model, data, task));
  }
  return m;
}

// ---------------------------------------------------------------------------
// Parameter table

namespace {

std::vector<std::size_t> parse_sizes(std::string_view item) {
  std::vector<std::size_t> out;
  std::size_t pos = item.find(':');
  while (pos != std::string_view::npos) {
    const std::size_t next = item.find(':', pos + 1);
    const std::string tok(item.substr(pos + 1, next == std::string_view::npos ? next : next - pos - 1));
    if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos || std::stoull(tok) == 0) {
      throw InvalidArgument("bad layer size '" + tok + "' in '" + std::string(item) + "'");
    }
    out.push_back(std::stoull(tok));
    pos = next;
  }
  return out;
}

ParamCount count_layer(std::string_view kind, const std::vector<std::size_t>& s,
                       const std::string& variant, std::size_t n) {
  const bool ph = variant.rfind("ph", 0) == 0;
  const Algebra a = builtin_algebra(ph ? "real" : variant);
  if (kind == "fc") {
    if (ph) return PHMLayer(n, s[0], s[1]).param_count();
    return HFCLayer(a, s[0], s[1]).param_count();
  }
  if (kind == "conv") {
    if (ph) return PHCLayer(n, s[0], s[1], s[2]).param_count();
    return HConv2DLayer(a, s[0], s[1], s[2]).param_count();
  }
  if (ph) return PHGraphLayer(n, s[0], s[1]).param_count();
  return HGraphConvLayer(a, s[0], s[1]).param_count();
}

}  // namespace

std::vector<ParamTableRow> experiment_param_table(std::string_view spec) {
  struct Item {
    std::string kind;
    std::vector<std::size_t> sizes;
  };
  std::vector<Item> items;
  std::size_t start = 0;
  while (start <= spec.size()) {
    const std::size_t end = std::min(spec.find(',', start), spec.size());
    const std::string_view item = spec.substr(start, end - start);
    const std::string kind(item.substr(0, item.find(':')));
    Item it{kind, parse_sizes(item)};
    const std::size_t want = kind == "conv" ? 3 : 2;
    if ((kind != "fc" && kind != "conv" && kind != "graph") || it.sizes.size() != want) {
      throw InvalidArgument("bad layer spec '" + std::string(item) +
                            "' (expected fc:in:out, conv:in:out:k or graph:in:out)");
    }
    items.push_back(std::move(it));
    start = end + 1;
  }
  const std::pair<const char*, std::size_t> variants[] = {
      {"real", 1}, {"quaternion", 4}, {"ph2", 2}, {"ph3", 3}, {"ph4", 4}, {"ph8", 8}};
  std::vector<ParamTableRow> rows;
  for (auto [name, n] : variants) {
    const bool fits = std::all_of(items.begin(), items.end(), [n = n](const Item& it) {
      return it.sizes[0] % n == 0 && it.sizes[1] % n == 0;
    });
    if (!fits) continue;
    ParamTableRow row{name, {}};
    for (const Item& it : items) row.count += count_layer(it.kind, it.sizes, name, n);
    rows.push_back(row);
  }
  return rows;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string format_param_table(const std::vector<ParamTableRow>& rows) {
  std::ostringstream os;
  os << "model,free_weights,dense_weights,ratio,bias\n";
  for (const auto& r : rows) {
    os << r.model << ',' << r.count.free_weights << ',' << r.count.dense_weights << ','
       << format_double(r.ratio()) << ',' << r.count.bias << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Encodings

std::string_view encoding_name(PointEncoding e) {
  switch (e) {
    case PointEncoding::Raw: return "raw";
    case PointEncoding::PureQuaternion: return "pure_quaternion";
    case PointEncoding::DualQuaternionMotion: return "dual_quaternion_motion";
  }
  return "raw";
}

PointEncoding parse_encoding(std::string_view name) {
  if (name == "raw") return PointEncoding::Raw;
  if (name == "pure_quaternion") return PointEncoding::PureQuaternion;
  if (name == "dual_quaternion_motion") return PointEncoding::DualQuaternionMotion;
  throw ConfigError("unknown point encoding '" + std::string(name) + "'");
}

namespace {

void check_windows(const Tensor& w) {
  if (w.rank() != 3 || w.dim(2) != 3 || w.dim(1) < 3) {
    throw ShapeError("expected windows [N, T >= 3, 3], got " + shape_str(w.shape()));
  }
}

Vec3 point(const Tensor& w, std::size_t i, std::size_t t) {
  const std::size_t base = (i * w.dim(1) + t) * 3;
  return {w[base], w[base + 1], w[base + 2]};
}

Vec3 minus(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }

void put_motion(double* out, const Vec3& prev_step, const Vec3& step) {
  const DualQuaternion dq = dq_from_rt({rotation_between(prev_step, step), step});
  const auto c = dq.coeffs();
  std::copy(c.begin(), c.end(), out);
}

std::size_t output_width(PointEncoding e) {
  switch (e) {
    case PointEncoding::Raw: return 3;
    case PointEncoding::PureQuaternion: return 4;
    case PointEncoding::DualQuaternionMotion: return 8;
  }
  return 3;
}

std::size_t input_width(PointEncoding e, std::size_t window) {
  switch (e) {
    case PointEncoding::Raw: return 3 * window;
    case PointEncoding::PureQuaternion: return 4 * window;
    case PointEncoding::DualQuaternionMotion: return 8 * (window - 2);
  }
  return 3 * window;
}

}  // namespace

Tensor encode_windows(const Tensor& windows, PointEncoding e) {
  check_windows(windows);
  const std::size_t n = windows.dim(0), t = windows.dim(1), f = input_width(e, t);
  Tensor out({n, f});
  for (std::size_t i = 0; i < n; ++i) {
    double* row = out.data().data() + i * f;
    if (e == PointEncoding::Raw) {
      for (std::size_t k = 0; k < 3 * t; ++k) row[k] = windows[i * 3 * t + k] / kPointScale;
    } else if (e == PointEncoding::PureQuaternion) {
      for (std::size_t s = 0; s < t; ++s) {
        row[4 * s] = 0.0;
        for (std::size_t k = 0; k < 3; ++k) row[4 * s + 1 + k] = windows[(i * t + s) * 3 + k] / kPointScale;
      }
    } else {
      for (std::size_t s = 1; s + 1 < t; ++s) {
        put_motion(row + 8 * (s - 1), minus(point(windows, i, s), point(windows, i, s - 1)),
                   minus(point(windows, i, s + 1), point(windows, i, s)));
      }
    }
  }
  return out;
}

Tensor encode_targets(const Tensor& windows, const Tensor& next, PointEncoding e) {
  check_windows(windows);
  const std::size_t n = windows.dim(0), t = windows.dim(1), k = output_width(e);
  if (next.shape() != Shape{n, 3}) throw ShapeError("expected targets [N, 3], got " + shape_str(next.shape()));
  Tensor out({n, k});
  for (std::size_t i = 0; i < n; ++i) {
    double* row = out.data().data() + i * k;
    const Vec3 p{next[3 * i], next[3 * i + 1], next[3 * i + 2]};
    if (e == PointEncoding::Raw) {
      for (std::size_t c = 0; c < 3; ++c) row[c] = p[c] / kPointScale;
    } else if (e == PointEncoding::PureQuaternion) {
      row[0] = 0.0;
      for (std::size_t c = 0; c < 3; ++c) row[1 + c] = p[c] / kPointScale;
    } else {
      const Vec3 last = point(windows, i, t - 1);
      put_motion(row, minus(last, point(windows, i, t - 2)), minus(p, last));
    }
  }
  return out;
}

Tensor decode_outputs(const Tensor& windows, const Tensor& outputs, PointEncoding e) {
  check_windows(windows);
  const std::size_t n = windows.dim(0), t = windows.dim(1), k = output_width(e);
  if (outputs.shape() != Shape{n, k}) {
    throw ShapeError("expected outputs [" + std::to_string(n) + "," + std::to_string(k) + "], got " +
                     shape_str(outputs.shape()));
  }
  Tensor out({n, 3});
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = outputs.data().data() + i * k;
    if (e == PointEncoding::Raw) {
      for (std::size_t c = 0; c < 3; ++c) out[3 * i + c] = row[c] * kPointScale;
    } else if (e == PointEncoding::PureQuaternion) {
      for (std::size_t c = 0; c < 3; ++c) out[3 * i + c] = row[1 + c] * kPointScale;
    } else {
      const Vec3 step = dq_translation(DualQuaternion::from_coeffs(std::span<const double>(row, 8)));
      const Vec3 last = point(windows, i, t - 1);
      for (std::size_t c = 0; c < 3; ++c) out[3 * i + c] = last[c] + step[c];
    }
  }
  return out;
}

PointPredictor point_predictor(const Sequential& model, PointEncoding e) {
  return [&model, e](const Tensor& windows) {
    return decode_outputs(windows, model.predict(encode_windows(windows, e)), e);
  };
}

Sequential make_forecaster(std::string_view algebra, std::size_t n, PointEncoding e,
                           std::size_t window, std::size_t hidden) {
  Sequential m;
  const std::size_t in = input_width(e, window), out = output_width(e);
  if (algebra == "parameterized") {
    m.emplace<PHMLayer>(n, in, hidden, true, Activation::Relu);
    m.emplace<PHMLayer>(n, hidden, out, true, Activation::None);
  } else {
    const Algebra a = builtin_algebra(algebra);
    n = a.dim();
    m.emplace<HFCLayer>(a, in, hidden, Activation::Relu);
    m.emplace<HFCLayer>(a, hidden, out, Activation::None);
  }
  m.n = n;
  m.algebra = std::string(algebra);
  m.encoding = std::string(encoding_name(e));
  return m;
}

std::size_t matched_hidden(std::string_view algebra, std::size_t n, PointEncoding e,
                           std::size_t window, std::size_t target) {
  const std::size_t step = algebra == "parameterized" ? n : builtin_algebra(algebra).dim();
  std::size_t best = step, best_gap = SIZE_MAX;
  for (std::size_t h = step;; h += step) {
    const std::size_t count = make_forecaster(algebra, n, e, window, h).param_count().free_total();
    const std::size_t gap = count > target ? count - target : target - count;
    if (gap < best_gap) {
      best = h;
      best_gap = gap;
    }
    if (count > target) break;
  }
  return best;
}

// ---------------------------------------------------------------------------
// Experiments

Sequential make_conv_classifier(std::string_view algebra, std::size_t n,
                                const std::vector<std::size_t>& channels, std::size_t kernel,
                                std::size_t classes) {
  if (channels.empty()) throw InvalidArgument("classifier needs at least one conv layer");
  Sequential m;
  std::size_t in = 3;
  for (std::size_t i = 0; i < channels.size(); ++i) {
    const std::size_t stride = i == 0 ? 1 : 2;
    if (algebra == "parameterized") {
      m.emplace<PHCLayer>(n, in, channels[i], kernel, stride, kernel / 2, true, Activation::Relu);
    } else {
      m.emplace<HConv2DLayer>(builtin_algebra(algebra), in, channels[i], kernel, stride, kernel / 2,
                              Activation::Relu);
    }
    in = channels[i];
  }
  m.emplace<GlobalAvgPool>();
  m.emplace<HFCLayer>(builtin_algebra("real"), in, classes, Activation::None);
  m.n = algebra == "parameterized" ? n : builtin_algebra(algebra).dim();
  m.algebra = std::string(algebra);
  m.encoding = "image";
  return m;
}

ParamCount conv_param_count(const Sequential& model) {
  ParamCount c;
  for (std::size_t i = 0; i < model.size(); ++i) {
    const std::string kind = model.layer(i).kind();
    if (kind == "hconv2d" || kind == "phc") c += model.layer(i).param_count();
  }
  return c;
}

BlobsReport experiment_blobs(const BlobsExperimentConfig& cfg) {
  const Dataset data = make_rgb_blobs(cfg.data);
  BlobsReport report;
  const std::pair<std::string, std::string> variants[] = {
      {"real", "real"}, {"phc_n" + std::to_string(cfg.n), "parameterized"}};
  for (const auto& [label, algebra] : variants) {
    Sequential model = make_conv_classifier(algebra, cfg.n, cfg.channels, cfg.kernel, kBlobClasses);
    Rng init(cfg.train.seed);
    model.initialize(init);
    BlobsModelResult r;
    r.model = label;
    r.metrics = train(model, data, cfg.train, Task::Classification);
    r.conv = conv_param_count(model);
    r.total = model.param_count();
    r.test_accuracy = evaluate(model, data, Task::Classification);
    report.models.push_back(std::move(r));
  }
  return report;
}

std::string blobs_csv(const BlobsReport& r) {
  std::ostringstream os;
  os << "model,conv_free_weights,conv_dense_weights,conv_ratio,total_free_params,"
        "initial_train_loss,final_train_loss,test_accuracy\n";
  for (const auto& m : r.models) {
    os << m.model << ',' << m.conv.free_weights << ',' << m.conv.dense_weights << ','
       << format_double(static_cast<double>(m.conv.free_weights) / static_cast<double>(m.conv.dense_weights))
       << ',' << m.total.free_total() << ',' << format_double(m.metrics.initial_train_loss) << ','
       << format_double(m.metrics.train_loss.empty() ? m.metrics.initial_train_loss : m.metrics.train_loss.back())
       << ',' << format_double(m.test_accuracy) << '\n';
  }
  return os.str();
}

std::string blobs_curves_csv(const BlobsReport& r) {
  std::ostringstream os;
  os << "model,epoch,train_loss,test_accuracy\n";
  for (const auto& m : r.models) {
    for (std::size_t e = 0; e < m.metrics.train_loss.size(); ++e) {
      os << m.model << ',' << e + 1 << ',' << format_double(m.metrics.train_loss[e]) << ','
         << format_double(m.metrics.test_metric[e]) << '\n';
    }
  }
  return os.str();
}

std::string blobs_summary(const BlobsReport& r) {
  std::ostringstream os;
  const double base = r.models.empty() ? 1.0 : static_cast<double>(r.models.front().conv.free_weights);
  for (const auto& m : r.models) {
    os << m.model << ": test_accuracy=" << format_double(m.test_accuracy)
       << " conv_weights=" << m.conv.free_weights
       << " of_real_baseline=" << format_double(static_cast<double>(m.conv.free_weights) / base) << '\n';
  }
  return os.str();
}

LorenzReport experiment_lorenz(const LorenzExperimentConfig& cfg) {
  struct Variant {
    const char* label;
    const char* algebra;
    std::size_t n;
    PointEncoding encoding;
  };
  const Variant variants[] = {{"real_mlp", "real", 1, PointEncoding::Raw},
                              {"quaternion_hfc", "quaternion", 4, PointEncoding::PureQuaternion},
                              {"phm_n4", "parameterized", 4, PointEncoding::PureQuaternion},
                              {"dual_quaternion_hfc", "dual_quaternion", 8,
                               PointEncoding::DualQuaternionMotion}};
  const std::size_t w = cfg.data.window;
  const std::size_t target =
      make_forecaster("real", 1, PointEncoding::Raw, w, cfg.real_hidden).param_count().free_total();
  LorenzReport report;
  for (std::uint64_t seed : cfg.seeds) {
    LorenzConfig dc = cfg.data;
    dc.seed = seed;
    const Dataset raw = lorenz_trajectories(dc);
    const Tensor test_in = gather(raw.inputs, raw.test), test_out = gather(raw.targets, raw.test);
    for (const Variant& v : variants) {
      const std::size_t hidden = std::string_view(v.algebra) == "real"
                                     ? cfg.real_hidden
                                     : matched_hidden(v.algebra, v.n, v.encoding, w, target);
      Sequential model = make_forecaster(v.algebra, v.n, v.encoding, w, hidden);
      Rng init(seed);
      model.initialize(init);
      const Dataset enc{encode_windows(raw.inputs, v.encoding),
                        encode_targets(raw.inputs, raw.targets, v.encoding), raw.train, raw.test};
      TrainConfig tc = cfg.train;
      tc.seed = seed;
      train(model, enc, tc, Task::Regression);
      const auto rows = equivariance_report(point_predictor(model, v.encoding),
                                            TransformFamily::Translation, test_in, test_out, cfg.offsets);
      for (const auto& row : rows) {
        report.rows.push_back({seed, v.label, model.param_count().free_total(), row});
      }
    }
  }
  return report;
}

std::string lorenz_csv(const LorenzReport& r) {
  std::ostringstream os;
  os << "seed,model,free_params,offset,mse_original,mse_translated,ratio\n";
  for (const auto& x : r.rows) {
    os << x.seed << ',' << x.model << ',' << x.params << ',' << format_double(x.row.magnitude) << ','
       << format_double(x.row.error_original) << ',' << format_double(x.row.error_transformed) << ','
       << format_double(x.row.ratio) << '\n';
  }
  return os.str();
}

std::string lorenz_summary(const LorenzReport& r) {
  // Per model, ratios at the largest offset across seeds.
  std::vector<std::string> models;
  double largest = -INFINITY;
  for (const auto& x : r.rows) {
    if (std::find(models.begin(), models.end(), x.model) == models.end()) models.push_back(x.model);
    largest = std::max(largest, x.row.magnitude);
  }
  std::ostringstream os;
  for (const auto& m : models) {
    std::vector<double> ratios;
    std::size_t params = 0;
    for (const auto& x : r.rows) {
      if (x.model == m && x.row.magnitude == largest) {
        ratios.push_back(x.row.ratio);
        params = x.params;
      }
    }
    std::sort(ratios.begin(), ratios.end());
    const auto below2 = std::count_if(ratios.begin(), ratios.end(), [](double v) { return v < 2.0; });
    const auto above10 = std::count_if(ratios.begin(), ratios.end(), [](double v) { return v > 10.0; });
    os << m << ": params=" << params << " offset=" << format_double(largest)
       << " median_ratio=" << format_double(ratios.empty() ? 0.0 : ratios[ratios.size() / 2])
       << " seeds_below_2=" << below2 << '/' << ratios.size() << " seeds_above_10=" << above10 << '/'
       << ratios.size() << '\n';
  }
  return os.str();
}

}  // namespace hxnn
