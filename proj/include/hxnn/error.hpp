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

#include <stdexcept>
#include <string>

namespace hxnn {

enum class ErrorCode {
  InvalidArgument,
  Name,
  AlgebraMismatch,
  Shape,
  Divisibility,
  Normalization,
  DegenerateAxis,
  Config,
  Format,
  Io,
};

/// Base of every exception raised by the library. The code is what the C API
/// reports across the shared-library boundary.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

#define HXNN_DEFINE_ERROR(Type, Code)                                  \
  class Type : public Error {                                          \
   public:                                                             \
    explicit Type(const std::string& what) : Error(ErrorCode::Code, what) {} \
  }

HXNN_DEFINE_ERROR(InvalidArgument, InvalidArgument);
HXNN_DEFINE_ERROR(NameError, Name);
HXNN_DEFINE_ERROR(AlgebraMismatch, AlgebraMismatch);
HXNN_DEFINE_ERROR(ShapeError, Shape);
HXNN_DEFINE_ERROR(DivisibilityError, Divisibility);
HXNN_DEFINE_ERROR(NormalizationError, Normalization);
HXNN_DEFINE_ERROR(DegenerateAxis, DegenerateAxis);
HXNN_DEFINE_ERROR(ConfigError, Config);
HXNN_DEFINE_ERROR(FormatError, Format);
HXNN_DEFINE_ERROR(IoError, Io);

#undef HXNN_DEFINE_ERROR

}  // namespace hxnn
