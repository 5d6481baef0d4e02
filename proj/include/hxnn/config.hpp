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
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hxnn/training.hpp"

namespace hxnn {

/// [model] section.
struct ModelConfig {
  /// "forecaster" or "conv_classifier".
  std::string architecture = "forecaster";
  /// Built-in algebra name or "parameterized".
  std::string algebra = "real";
  std::size_t n = 4;
  /// Forecaster point encoding.
  std::string encoding = "raw";
  std::size_t hidden = 64;
  std::vector<std::size_t> channels{12, 24, 24};
  std::size_t kernel = 3;
  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

/// [data] section. Only the keys of the chosen dataset are used.
struct DataConfig {
  /// "lorenz" or "blobs".
  std::string dataset = "lorenz";
  std::uint64_t seed = 1;
  std::size_t trajectories = 12;
  std::size_t steps = 400;
  double dt = 0.01;
  std::size_t window = 8;
  std::size_t burn_in = 500;
  std::size_t test_trajectories = 3;
  std::vector<double> offsets{1.0, 5.0, 10.0};
  std::size_t train_per_class = 500;
  std::size_t test_per_class = 100;
  std::size_t size = 16;
  double noise = 0.25;
  friend bool operator==(const DataConfig&, const DataConfig&) = default;
};

/// [train] section.
struct TrainSection {
  std::uint64_t seed = 1;
  /// Experiments repeat over these; train and eval use `seed`.
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::size_t epochs = 30;
  std::size_t batch_size = 32;
  double learning_rate = 2e-3;
  std::string optimizer = "adam";
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  friend bool operator==(const TrainSection&, const TrainSection&) = default;
};

struct Config {
  ModelConfig model;
  DataConfig data;
  TrainSection train;
  friend bool operator==(const Config&, const Config&) = default;
};

/// `key = value` lines under [model], [data] and [train]; '#' starts a
/// comment. Unknown sections or keys and malformed values throw ConfigError
/// naming the line.
Config parse_config(std::string_view text);
/// Every key, doubles with 17 significant digits.
std::string serialize_config(const Config& c);
/// IoError when unreadable, ConfigError when malformed.
Config load_config(const std::string& path);

/// The --seed override: data and train seeds, and the experiment seed list.
void override_seed(Config& c, std::uint64_t seed);

TrainConfig train_config(const Config& c);
LorenzConfig lorenz_config(const Config& c);
BlobsConfig blobs_config(const Config& c);
LorenzExperimentConfig lorenz_experiment_config(const Config& c);
BlobsExperimentConfig blobs_experiment_config(const Config& c);

/// Uninitialized model described by [model] for the [data] dataset.
Sequential build_model(const Config& c);

// ---------------------------------------------------------------------------
// Command runners shared by the C API and the command-line tool.

struct CommandOutput {
  /// Printed to standard output.
  std::string text;
  /// (file name, contents) written to the output directory.
  std::vector<std::pair<std::string, std::string>> files;
};

/// Trains build_model(c) on the configured dataset; files model.hxnn and
/// train_metrics.csv.
CommandOutput run_train(const Config& c);
/// Test metric of a saved model; forecasters also get a translated-test
/// table (eval_translation.csv).
CommandOutput run_eval(const Sequential& model, const Config& c);
CommandOutput run_experiment_lorenz(const Config& c);
CommandOutput run_experiment_blobs(const Config& c);
CommandOutput run_paramtable(std::string_view spec);
/// `passed` is set when every layer is below kGradcheckTolerance.
CommandOutput run_gradcheck(bool& passed);

}  // namespace hxnn
