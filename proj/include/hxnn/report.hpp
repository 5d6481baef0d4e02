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
#include <vector>

#include "hxnn/algebra.hpp"

namespace hxnn {

/// Header "i j sign k", then one row per basis pair: e_i e_j = sign e_k.
std::string format_algebra_table(const Algebra& a);

/// "commutative=... associative=... alternative=... power_associative=...".
std::string format_property_check(const Algebra& a);

/// "x=(...) y=(...) x*y=(...)" for a witness, or "none found".
std::string format_zero_divisor(const Algebra& a);

inline constexpr double kGradcheckTolerance = 1e-6;

struct GradcheckRow {
  std::string layer;
  double max_rel_error = 0.0;
  std::size_t coordinates = 0;
};

/// Central-difference check of every layer type on small seeded inputs,
/// covering all trainable parameters and the layer input.
std::vector<GradcheckRow> gradcheck_all_layers(std::uint64_t seed = 11);
double gradcheck_max(const std::vector<GradcheckRow>& rows);
std::string format_gradcheck(const std::vector<GradcheckRow>& rows);

}  // namespace hxnn
