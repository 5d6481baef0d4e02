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

#include "hxnn/hxnn.h"

#include <filesystem>
#include <fstream>
#include <string>
#include <system_error>

#include "hxnn/algebra.hpp"
#include "hxnn/config.hpp"
#include "hxnn/error.hpp"
#include "hxnn/report.hpp"
#include "hxnn/serialize.hpp"

struct hxnn_string {
  std::string value;
};
struct hxnn_algebra {
  hxnn::Algebra value;
};
struct hxnn_config {
  hxnn::Config value;
};
struct hxnn_model {
  hxnn::Sequential value;
};
struct hxnn_report {
  hxnn::CommandOutput value;
};

namespace {

thread_local std::string g_last_error;

hxnn_status status_of(hxnn::ErrorCode c) {
  using hxnn::ErrorCode;
  switch (c) {
    case ErrorCode::InvalidArgument: return HXNN_ERR_INVALID_ARGUMENT;
    case ErrorCode::Name: return HXNN_ERR_NAME;
    case ErrorCode::AlgebraMismatch: return HXNN_ERR_ALGEBRA_MISMATCH;
    case ErrorCode::Shape: return HXNN_ERR_SHAPE;
    case ErrorCode::Divisibility: return HXNN_ERR_DIVISIBILITY;
    case ErrorCode::Normalization: return HXNN_ERR_NORMALIZATION;
    case ErrorCode::DegenerateAxis: return HXNN_ERR_DEGENERATE_AXIS;
    case ErrorCode::Config: return HXNN_ERR_CONFIG;
    case ErrorCode::Format: return HXNN_ERR_FORMAT;
    case ErrorCode::Io: return HXNN_ERR_IO;
  }
  return HXNN_ERR_INTERNAL;
}

// Runs f, translating exceptions into a status and the thread's last error.
template <class F>
hxnn_status guard(F&& f) {
  try {
    f();
    g_last_error.clear();
    return HXNN_OK;
  } catch (const hxnn::Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown error";
  }
  return HXNN_ERR_INTERNAL;
}

void need(const void* p, const char* what) {
  if (!p) throw hxnn::InvalidArgument(std::string(what) + " is null");
}

template <class Out>
hxnn_status emit_string(Out** out, std::string s) {
  return guard([&] {
    need(out, "out");
    *out = new hxnn_string{std::move(s)};
  });
}

template <class F>
hxnn_status make_report(hxnn_report** out, F&& f) {
  return guard([&] {
    need(out, "out");
    *out = nullptr;
    *out = new hxnn_report{f()};
  });
}

}  // namespace

extern "C" {

const char* hxnn_version(void) { return "0.1.0"; }
const char* hxnn_last_error(void) { return g_last_error.c_str(); }

const char* hxnn_status_name(hxnn_status s) {
  switch (s) {
    case HXNN_OK: return "ok";
    case HXNN_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case HXNN_ERR_NAME: return "name";
    case HXNN_ERR_ALGEBRA_MISMATCH: return "algebra_mismatch";
    case HXNN_ERR_SHAPE: return "shape";
    case HXNN_ERR_DIVISIBILITY: return "divisibility";
    case HXNN_ERR_NORMALIZATION: return "normalization";
    case HXNN_ERR_DEGENERATE_AXIS: return "degenerate_axis";
    case HXNN_ERR_CONFIG: return "config";
    case HXNN_ERR_FORMAT: return "format";
    case HXNN_ERR_IO: return "io";
    case HXNN_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* hxnn_string_data(const hxnn_string* s) { return s ? s->value.c_str() : ""; }
size_t hxnn_string_size(const hxnn_string* s) { return s ? s->value.size() : 0; }
void hxnn_string_free(hxnn_string* s) { delete s; }

hxnn_status hxnn_algebra_create(const char* name, hxnn_algebra** out) {
  return guard([&] {
    need(name, "name");
    need(out, "out");
    *out = new hxnn_algebra{hxnn::builtin_algebra(name)};
  });
}

void hxnn_algebra_free(hxnn_algebra* a) { delete a; }

hxnn_status hxnn_algebra_dim(const hxnn_algebra* a, size_t* dim) {
  return guard([&] {
    need(a, "algebra");
    need(dim, "dim");
    *dim = a->value.dim();
  });
}

hxnn_status hxnn_algebra_multiply(const hxnn_algebra* a, const double* x, const double* y, double* out) {
  return guard([&] {
    need(a, "algebra");
    need(x, "x");
    need(y, "y");
    need(out, "out");
    const std::size_t n = a->value.dim();
    const hxnn::HNumber r = hxnn::multiply(hxnn::HNumber(a->value, {x, x + n}), hxnn::HNumber(a->value, {y, y + n}));
    for (std::size_t i = 0; i < n; ++i) out[i] = r[i];
  });
}

hxnn_status hxnn_algebra_left_matrix(const hxnn_algebra* a, const double* w, double* out) {
  return guard([&] {
    need(a, "algebra");
    need(w, "w");
    need(out, "out");
    const std::size_t n = a->value.dim();
    const auto m = hxnn::left_matrix(hxnn::HNumber(a->value, {w, w + n}));
    std::copy(m.begin(), m.end(), out);
  });
}

hxnn_status hxnn_algebra_check_property(const hxnn_algebra* a, hxnn_property p, int* holds) {
  return guard([&] {
    need(a, "algebra");
    need(holds, "holds");
    if (p < HXNN_COMMUTATIVE || p > HXNN_POWER_ASSOCIATIVE) throw hxnn::InvalidArgument("unknown property");
    *holds = hxnn::check_property(a->value, hxnn::kAllProperties[p]) ? 1 : 0;
  });
}

hxnn_status hxnn_algebra_table(const hxnn_algebra* a, hxnn_string** out) {
  std::string s;
  if (const hxnn_status st = guard([&] { need(a, "algebra"); s = hxnn::format_algebra_table(a->value); })) return st;
  return emit_string(out, std::move(s));
}

hxnn_status hxnn_algebra_check(const hxnn_algebra* a, hxnn_string** out) {
  std::string s;
  if (const hxnn_status st = guard([&] { need(a, "algebra"); s = hxnn::format_property_check(a->value); })) return st;
  return emit_string(out, std::move(s));
}

hxnn_status hxnn_algebra_zerodiv(const hxnn_algebra* a, hxnn_string** out) {
  std::string s;
  if (const hxnn_status st = guard([&] { need(a, "algebra"); s = hxnn::format_zero_divisor(a->value); })) return st;
  return emit_string(out, std::move(s));
}

hxnn_status hxnn_config_load(const char* path, hxnn_config** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    *out = new hxnn_config{hxnn::load_config(path)};
  });
}

hxnn_status hxnn_config_parse(const char* text, hxnn_config** out) {
  return guard([&] {
    need(text, "text");
    need(out, "out");
    *out = new hxnn_config{hxnn::parse_config(text)};
  });
}

void hxnn_config_free(hxnn_config* c) { delete c; }

hxnn_status hxnn_config_set_seed(hxnn_config* c, uint64_t seed) {
  return guard([&] {
    need(c, "config");
    hxnn::override_seed(c->value, seed);
  });
}

hxnn_status hxnn_config_serialize(const hxnn_config* c, hxnn_string** out) {
  std::string s;
  if (const hxnn_status st = guard([&] { need(c, "config"); s = hxnn::serialize_config(c->value); })) return st;
  return emit_string(out, std::move(s));
}

hxnn_status hxnn_model_load(const char* path, hxnn_model** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    *out = new hxnn_model{hxnn::load_model(path)};
  });
}

hxnn_status hxnn_model_save(const hxnn_model* m, const char* path) {
  return guard([&] {
    need(m, "model");
    need(path, "path");
    hxnn::save_model(m->value, path);
  });
}

void hxnn_model_free(hxnn_model* m) { delete m; }

hxnn_status hxnn_model_free_params(const hxnn_model* m, size_t* count) {
  return guard([&] {
    need(m, "model");
    need(count, "count");
    *count = m->value.param_count().free_total();
  });
}

const char* hxnn_report_text(const hxnn_report* r) { return r ? r->value.text.c_str() : ""; }
size_t hxnn_report_file_count(const hxnn_report* r) { return r ? r->value.files.size() : 0; }

const char* hxnn_report_file_name(const hxnn_report* r, size_t i) {
  return r && i < r->value.files.size() ? r->value.files[i].first.c_str() : nullptr;
}

const char* hxnn_report_file_data(const hxnn_report* r, size_t i, size_t* size) {
  if (!r || i >= r->value.files.size()) {
    if (size) *size = 0;
    return nullptr;
  }
  if (size) *size = r->value.files[i].second.size();
  return r->value.files[i].second.data();
}

hxnn_status hxnn_report_write_files(const hxnn_report* r, const char* dir) {
  return guard([&] {
    need(r, "report");
    need(dir, "dir");
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw hxnn::IoError("cannot create directory '" + std::string(dir) + "': " + ec.message());
    for (const auto& [name, data] : r->value.files) {
      const std::string path = (fs::path(dir) / name).string();
      std::ofstream f(path, std::ios::binary | std::ios::trunc);
      if (!f) throw hxnn::IoError("cannot open '" + path + "' for writing");
      f.write(data.data(), static_cast<std::streamsize>(data.size()));
      if (!f) throw hxnn::IoError("write to '" + path + "' failed");
    }
  });
}

void hxnn_report_free(hxnn_report* r) { delete r; }

hxnn_status hxnn_paramtable(const char* spec, hxnn_report** out) {
  return make_report(out, [&] {
    need(spec, "spec");
    return hxnn::run_paramtable(spec);
  });
}

hxnn_status hxnn_train(const hxnn_config* c, hxnn_report** out) {
  return make_report(out, [&] {
    need(c, "config");
    return hxnn::run_train(c->value);
  });
}

hxnn_status hxnn_eval(const hxnn_model* m, const hxnn_config* c, hxnn_report** out) {
  return make_report(out, [&] {
    need(m, "model");
    need(c, "config");
    return hxnn::run_eval(m->value, c->value);
  });
}

hxnn_status hxnn_experiment_lorenz(const hxnn_config* c, hxnn_report** out) {
  return make_report(out, [&] {
    need(c, "config");
    return hxnn::run_experiment_lorenz(c->value);
  });
}

hxnn_status hxnn_experiment_blobs(const hxnn_config* c, hxnn_report** out) {
  return make_report(out, [&] {
    need(c, "config");
    return hxnn::run_experiment_blobs(c->value);
  });
}

hxnn_status hxnn_gradcheck(hxnn_report** out, int* passed) {
  return make_report(out, [&] {
    need(passed, "passed");
    bool ok = false;
    hxnn::CommandOutput r = hxnn::run_gradcheck(ok);
    *passed = ok ? 1 : 0;
    return r;
  });
}

}  // extern "C"
