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

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

#include "hxnn/layer.hpp"

namespace hxnn {

inline constexpr char kModelMagic[4] = {'H', 'X', 'N', 'N'};
inline constexpr std::uint32_t kModelFormatVersion = 1;

/// Rebuilds a layer from its spec with zeroed parameters. PH layers whose
/// spec names a collapse target are collapsed again. Throws FormatError.
std::unique_ptr<Layer> make_layer(const LayerSpec& spec);

/// Little-endian file image:
///   magic, u32 version, u64 n, str algebra, str encoding, u32 layers,
///   per layer: str kind, u32 attrs, (str key, str value)*, u32 params,
///   per param: str name, u8 trainable, u32 rank, u64 dims, f64 values.
/// Strings are u32 length plus bytes.
std::string model_to_bytes(const Sequential& model);
/// Throws FormatError on bad magic, version or truncation.
Sequential model_from_bytes(std::string_view bytes);

/// Throw IoError when the file cannot be written or read.
void save_model(const Sequential& model, const std::string& path);
Sequential load_model(const std::string& path);

}  // namespace hxnn
