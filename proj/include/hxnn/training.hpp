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

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hxnn/geometry.hpp"
#include "hxnn/layer.hpp"

namespace hxnn {

// ---------------------------------------------------------------------------
// Optimizers

enum class OptimizerKind { Sgd, Adam };

struct AdamOptions {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct TrainConfig {
  std::uint64_t seed = 1;
  std::size_t epochs = 10;
  std::size_t batch_size = 32;
  double learning_rate = 1e-3;
  OptimizerKind optimizer = OptimizerKind::Adam;
  AdamOptions adam;
};

struct AdamState {
  std::vector<double> m, v;
  std::size_t t = 0;
};

/// w -= lr g.
void sgd_step(std::span<double> params, std::span<const double> grads, double lr);
/// Bias-corrected Adam update.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state,
               double lr, const AdamOptions& options = {});

/// Applies one update to every trainable parameter from the tape's gradients.
class Optimizer {
 public:
  explicit Optimizer(const TrainConfig& cfg) : cfg_(cfg) {}
  void step(const std::vector<Parameter*>& params, const Tape& tape);

 private:
  TrainConfig cfg_;
  std::vector<AdamState> state_;
};

std::string_view optimizer_name(OptimizerKind k);
OptimizerKind parse_optimizer(std::string_view name);

// ---------------------------------------------------------------------------
// Datasets

/// Inputs and targets share the leading sample axis.
struct Dataset {
  Tensor inputs;
  Tensor targets;
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Rows `index` of t along axis 0.
Tensor gather(const Tensor& t, std::span<const std::size_t> index);
/// Throws InvalidArgument if the splits overlap or leave the sample range.
void check_splits(const Dataset& d);

struct BlobsConfig {
  std::uint64_t seed = 1;
  std::size_t train_per_class = 500;
  std::size_t test_per_class = 100;
  std::size_t size = 16;
  double noise = 0.25;
};

inline constexpr std::size_t kBlobClasses = 4;

/// Four classes: {warm, cool} palette x {horizontal, vertical} stripes with a
/// random phase and period. Class c has palette c % 2 and orientation c / 2.
/// Inputs [N, 3, size, size], targets [N] holding class ids.
Dataset make_rgb_blobs(const BlobsConfig& cfg);

struct LorenzConfig {
  std::uint64_t seed = 1;
  std::size_t trajectories = 12;
  std::size_t steps = 400;
  double dt = 0.01;
  std::size_t window = 8;
  std::size_t burn_in = 500;
  std::size_t test_trajectories = 3;
  double sigma = 10.0;
  double rho = 28.0;
  double beta = 8.0 / 3.0;
};

using OdeFn = std::function<std::vector<double>(const std::vector<double>&)>;
std::vector<double> rk4_step(const OdeFn& f, const std::vector<double>& y, double dt);
Vec3 lorenz_field(const Vec3& p, double sigma, double rho, double beta);

/// Sliding windows [N, window, 3] with the next point [N, 3] as target.
/// Whole trajectories go to either split.
Dataset lorenz_trajectories(const LorenzConfig& cfg);
/// Adds `offset` to every coordinate of inputs and targets.
Dataset translated(const Dataset& d, double offset);

// ---------------------------------------------------------------------------
// Training

enum class Task { Classification, Regression };

struct Metrics {
  /// Mean loss over the training split before the first update.
  double initial_train_loss = 0.0;
  /// Mean minibatch loss per epoch.
  std::vector<double> train_loss;
  /// Test accuracy (classification) or test MSE (regression) per epoch.
  std::vector<double> test_metric;
  ParamCount params;
};

/// Minibatch training with per-epoch shuffles from cfg.seed.
Metrics train(Sequential& model, const Dataset& data, const TrainConfig& cfg, Task task);
/// Accuracy or MSE over `index` (the test split when empty).
double evaluate(const Sequential& model, const Dataset& data, Task task,
                std::span<const std::size_t> index = {});
/// Mean loss over `index` without updating anything.
double mean_loss(const Sequential& model, const Dataset& data, Task task,
                 std::span<const std::size_t> index, std::size_t batch_size = 256);

// ---------------------------------------------------------------------------
// Parameter table

struct ParamTableRow {
  std::string model;
  ParamCount count;
  double ratio() const {
    return static_cast<double>(count.free_weights) / static_cast<double>(count.dense_weights);
  }
};

/// `spec` lists layers as "fc:in:out", "conv:in:out:k" or "graph:in:out",
/// comma separated. Rows: real, quaternion, ph2, ph3, ph4, ph8; variants whose
/// n does not divide every width are skipped.
std::vector<ParamTableRow> experiment_param_table(std::string_view spec);
std::string format_param_table(const std::vector<ParamTableRow>& rows);

// ---------------------------------------------------------------------------
// Point encodings and forecasters

enum class PointEncoding { Raw, PureQuaternion, DualQuaternionMotion };

std::string_view encoding_name(PointEncoding e);
PointEncoding parse_encoding(std::string_view name);

/// Coordinates of raw and pure-quaternion inputs are divided by this.
inline constexpr double kPointScale = 20.0;

/// [N, T, 3] windows to model features [N, F].
Tensor encode_windows(const Tensor& windows, PointEncoding e);
/// Training targets [N, K] for the next points [N, 3].
Tensor encode_targets(const Tensor& windows, const Tensor& next, PointEncoding e);
/// Model outputs [N, K] back to predicted points [N, 3].
Tensor decode_outputs(const Tensor& windows, const Tensor& outputs, PointEncoding e);
/// Window -> encode -> model -> decode.
PointPredictor point_predictor(const Sequential& model, PointEncoding e);

/// Single hidden layer forecaster. `algebra` is "real", a built-in name, or
/// "parameterized" (PHM with n and learned A).
Sequential make_forecaster(std::string_view algebra, std::size_t n, PointEncoding e,
                           std::size_t window, std::size_t hidden);
/// Hidden width (a multiple of the algebra dimension) whose total free
/// parameter count is closest to `target`.
std::size_t matched_hidden(std::string_view algebra, std::size_t n, PointEncoding e,
                           std::size_t window, std::size_t target);

// ---------------------------------------------------------------------------
// Experiments

/// conv(3 -> c0, stride 1) then conv(c_i -> c_{i+1}, stride 2), all k x k with
/// padding k/2 and ReLU, global average pool and a real linear head.
Sequential make_conv_classifier(std::string_view algebra, std::size_t n,
                                const std::vector<std::size_t>& channels, std::size_t kernel,
                                std::size_t classes);
/// Counts of the convolutional layers only.
ParamCount conv_param_count(const Sequential& model);

struct BlobsExperimentConfig {
  BlobsConfig data;
  TrainConfig train{1, 20, 32, 3e-3, OptimizerKind::Adam, {}};
  std::size_t n = 3;
  std::vector<std::size_t> channels{12, 24, 24};
  std::size_t kernel = 3;
};

struct BlobsModelResult {
  std::string model;
  ParamCount conv;
  ParamCount total;
  double test_accuracy = 0.0;
  Metrics metrics;
};

struct BlobsReport {
  std::vector<BlobsModelResult> models;
};

/// Trains the real baseline and the PHC network on the same data.
BlobsReport experiment_blobs(const BlobsExperimentConfig& cfg);
std::string blobs_csv(const BlobsReport& r);
std::string blobs_curves_csv(const BlobsReport& r);
std::string blobs_summary(const BlobsReport& r);

struct LorenzExperimentConfig {
  LorenzConfig data;
  TrainConfig train{1, 30, 32, 2e-3, OptimizerKind::Adam, {}};
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::vector<double> offsets{1.0, 5.0, 10.0};
  /// Hidden width of the real MLP; the others are sized to match it.
  std::size_t real_hidden = 64;
};

struct LorenzRow {
  std::uint64_t seed = 0;
  std::string model;
  std::size_t params = 0;
  EquivarianceRow row;
};

struct LorenzReport {
  std::vector<LorenzRow> rows;
};

/// Real MLP, quaternion HFC, PHM (n = 4, learned A) and dual-quaternion HFC
/// forecasters, each trained per seed and evaluated on translated test sets.
LorenzReport experiment_lorenz(const LorenzExperimentConfig& cfg);
std::string lorenz_csv(const LorenzReport& r);
std::string lorenz_summary(const LorenzReport& r);

/// Ten significant digits, '.' decimal separator, locale independent.
std::string format_double(double v);

}  // namespace hxnn
