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

#include "hxnn/serialize.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "hxnn/error.hpp"
#include "hxnn/layers.hpp"
#include "hxnn/phlayers.hpp"

namespace hxnn {
namespace {

Activation activation_attr(const LayerSpec& s, const char* key = "activation") {
  try {
    return parse_activation(s.get(key));
  } catch (const Error& e) {
    throw FormatError(s.kind + ": " + e.what());
  }
}

bool flag_attr(const LayerSpec& s, const char* key) {
  const std::string& v = s.get(key);
  if (v != "0" && v != "1") throw FormatError(s.kind + ": attribute " + key + " must be 0 or 1");
  return v == "1";
}

Algebra algebra_attr(const LayerSpec& s) {
  try {
    return builtin_algebra(s.get("algebra"));
  } catch (const NameError&) {
    throw FormatError(s.kind + ": algebra '" + s.get("algebra") + "' is not a built-in algebra");
  }
}

template <class L>
void recollapse(const LayerSpec& s, L& layer) {
  const std::string& target = s.get("collapsed");
  if (!target.empty()) layer.collapse_to_algebra(builtin_algebra(target));
}

std::unique_ptr<Layer> build(const LayerSpec& s) {
  const std::string& k = s.kind;
  if (k == "hfc") {
    return std::make_unique<HFCLayer>(algebra_attr(s), s.get_size("in"), s.get_size("out"),
                                      activation_attr(s), flag_attr(s, "bias"));
  }
  if (k == "hconv2d") {
    return std::make_unique<HConv2DLayer>(algebra_attr(s), s.get_size("in"), s.get_size("out"),
                                          s.get_size("kernel"), s.get_size("stride"),
                                          s.get_size("padding"), activation_attr(s),
                                          flag_attr(s, "bias"));
  }
  if (k == "hatt") {
    const std::string& gating = s.get("gating");
    const std::string& product = s.get("product");
    if ((gating != "sigmoid" && gating != "identity") || (product != "elementwise" && product != "broadcast")) {
      throw FormatError("hatt: bad gating or product attribute");
    }
    return std::make_unique<HAttBlock>(algebra_attr(s), s.get_size("channels"), s.get_size("kernel"),
                                       gating == "sigmoid" ? Gating::Sigmoid : Gating::Identity,
                                       product == "elementwise" ? GateProduct::Elementwise
                                                                : GateProduct::ChannelBroadcast);
  }
  if (k == "hgraph") {
    return std::make_unique<HGraphConvLayer>(algebra_attr(s), s.get_size("in"), s.get_size("out"),
                                             activation_attr(s));
  }
  if (k == "phm") {
    auto l = std::make_unique<PHMLayer>(s.get_size("n"), s.get_size("in"), s.get_size("out"),
                                        flag_attr(s, "bias"), activation_attr(s));
    recollapse(s, *l);
    return l;
  }
  if (k == "phc") {
    auto l = std::make_unique<PHCLayer>(s.get_size("n"), s.get_size("in"), s.get_size("out"),
                                        s.get_size("kernel"), s.get_size("stride"), s.get_size("padding"),
                                        flag_attr(s, "bias"), activation_attr(s));
    recollapse(s, *l);
    return l;
  }
  if (k == "phatt") {
    const std::string& output = s.get("output");
    if (output != "gate" && output != "pure") throw FormatError("phatt: bad output attribute");
    auto l = std::make_unique<PHAttBlock>(s.get_size("n"), s.get_size("features"), s.get_size("heads"),
                                          activation_attr(s),
                                          output == "gate" ? AttentionOutput::Gate : AttentionOutput::Pure);
    recollapse(s, *l);
    return l;
  }
  if (k == "phgraph") {
    auto l = std::make_unique<PHGraphLayer>(s.get_size("n"), s.get_size("in"), s.get_size("out"),
                                            activation_attr(s));
    recollapse(s, *l);
    return l;
  }
  if (k == "activation") return std::make_unique<ActivationLayer>(activation_attr(s, "function"));
  if (k == "global_avg_pool") return std::make_unique<GlobalAvgPool>();
  if (k == "flatten") return std::make_unique<Flatten>();
  throw FormatError("unknown layer kind '" + k + "'");
}

// Little-endian writer and bounds-checked reader.
class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) { put(v); }
  void u64(std::uint64_t v) { put(v); }
  void f64(double v) { put(std::bit_cast<std::uint64_t>(v)); }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    out_ += s;
  }
  void raw(const char* p, std::size_t n) { out_.append(p, n); }
  std::string take() { return std::move(out_); }

 private:
  template <class T>
  void put(T v) {
    for (std::size_t i = 0; i < sizeof(T); ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view in) : in_(in) {}
  std::uint8_t u8() { return static_cast<std::uint8_t>(take(1)[0]); }
  std::uint32_t u32() { return get<std::uint32_t>(); }
  std::uint64_t u64() { return get<std::uint64_t>(); }
  double f64() { return std::bit_cast<double>(get<std::uint64_t>()); }
  std::string str() {
    const std::uint32_t n = u32();
    return std::string(take(n));
  }
  std::string_view take(std::size_t n) {
    if (in_.size() - pos_ < n) {
      throw FormatError("model file truncated at byte " + std::to_string(in_.size()) + " (needed " +
                        std::to_string(pos_ + n) + ")");
    }
    const std::string_view s = in_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == in_.size(); }

 private:
  template <class T>
  T get() {
    const std::string_view b = take(sizeof(T));
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(static_cast<unsigned char>(b[i])) << (8 * i);
    return v;
  }
  std::string_view in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::unique_ptr<Layer> make_layer(const LayerSpec& spec) {
  try {
    return build(spec);
  } catch (const FormatError&) {
    throw;
  } catch (const Error& e) {
    throw FormatError(spec.kind + ": " + e.what());
  }
}

std::string model_to_bytes(const Sequential& model) {
  Writer w;
  w.raw(kModelMagic, 4);
  w.u32(kModelFormatVersion);
  w.u64(model.n);
  w.str(model.algebra);
  w.str(model.encoding);
  w.u32(static_cast<std::uint32_t>(model.size()));
  for (std::size_t i = 0; i < model.size(); ++i) {
    const Layer& layer = model.layer(i);
    const LayerSpec spec = layer.spec();
    w.str(spec.kind);
    w.u32(static_cast<std::uint32_t>(spec.attrs.size()));
    for (const auto& [k, v] : spec.attrs) {
      w.str(k);
      w.str(v);
    }
    const auto params = layer.parameters();
    w.u32(static_cast<std::uint32_t>(params.size()));
    for (const Parameter* p : params) {
      w.str(p->name);
      w.u8(p->trainable ? 1 : 0);
      w.u32(static_cast<std::uint32_t>(p->value.rank()));
      for (std::size_t d : p->value.shape()) w.u64(d);
      for (double v : p->value.data()) w.f64(v);
    }
  }
  return w.take();
}

Sequential model_from_bytes(std::string_view bytes) {
  Reader r(bytes);
  if (r.take(4) != std::string_view(kModelMagic, 4)) throw FormatError("not a model file (bad magic)");
  const std::uint32_t version = r.u32();
  if (version != kModelFormatVersion) {
    throw FormatError("unsupported model format version " + std::to_string(version) + " (expected " +
                      std::to_string(kModelFormatVersion) + ")");
  }
  Sequential m;
  m.n = r.u64();
  m.algebra = r.str();
  m.encoding = r.str();
  const std::uint32_t layers = r.u32();
  for (std::uint32_t i = 0; i < layers; ++i) {
    LayerSpec spec;
    spec.kind = r.str();
    const std::uint32_t attrs = r.u32();
    for (std::uint32_t a = 0; a < attrs; ++a) {
      std::string k = r.str();
      spec.attrs.emplace_back(std::move(k), r.str());
    }
    std::unique_ptr<Layer> layer = make_layer(spec);
    const auto params = layer->parameters();
    const std::uint32_t count = r.u32();
    if (count != params.size()) {
      throw FormatError(spec.kind + ": file has " + std::to_string(count) + " parameters, layer has " +
                        std::to_string(params.size()));
    }
    for (Parameter* p : params) {
      const std::string name = r.str();
      const bool trainable = r.u8() != 0;
      Shape shape(r.u32());
      for (auto& d : shape) d = r.u64();
      if (name != p->name || shape != p->value.shape()) {
        throw FormatError(spec.kind + ": parameter " + name + " " + shape_str(shape) + " does not match " +
                          p->name + " " + shape_str(p->value.shape()));
      }
      for (double& v : p->value.data()) v = r.f64();
      p->trainable = trainable;
    }
    m.add(std::move(layer));
  }
  if (!r.done()) throw FormatError("trailing bytes after the last layer");
  return m;
}

void save_model(const Sequential& model, const std::string& path) {
  const std::string bytes = model_to_bytes(model);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw IoError("write to '" + path + "' failed");
}

Sequential load_model(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  if (f.bad()) throw IoError("read from '" + path + "' failed");
  return model_from_bytes(ss.str());
}

}  // namespace hxnn
