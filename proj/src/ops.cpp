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

#include <algorithm>
#include <cmath>

#include "hxnn/autodiff.hpp"
#include "hxnn/error.hpp"

namespace hxnn {
namespace {

void require_same_shape(const char* op, const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(op) + ": incompatible shapes " + shape_str(a.shape()) +
                     " and " + shape_str(b.shape()));
  }
}

void accumulate(Tensor* dst, const Tensor& src, double s = 1.0) {
  if (!dst) return;
  auto d = dst->data();
  auto v = src.data();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] += s * v[i];
}

// Splits a shape into (outer, len, inner) around `axis`.
struct AxisSplit {
  std::size_t outer = 1, len = 1, inner = 1;
};

AxisSplit split_axis(const Shape& s, std::size_t axis) {
  AxisSplit r;
  for (std::size_t i = 0; i < axis; ++i) r.outer *= s[i];
  r.len = s[axis];
  for (std::size_t i = axis + 1; i < s.size(); ++i) r.inner *= s[i];
  return r;
}

// Offset of element (row-block r, col-block c, i, j, t) inside a block grid
// tensor of shape [n*p, m*q, inner...].
struct BlockGrid {
  std::size_t p, q, m, inner;
  std::size_t at(std::size_t r, std::size_t c, std::size_t i, std::size_t j) const {
    return ((r * p + i) * (m * q) + c * q + j) * inner;
  }
};

}  // namespace

Var add(Var a, Var b) {
  require_same_shape("add", a.value(), b.value());
  Tensor out = a.value();
  accumulate(&out, b.value());
  return a.tape().record(std::move(out), {a, b}, [](const BackwardContext& c) {
    accumulate(c.in_grads[0], c.out_grad);
    accumulate(c.in_grads[1], c.out_grad);
  });
}

Var sub(Var a, Var b) {
  require_same_shape("sub", a.value(), b.value());
  Tensor out = a.value();
  accumulate(&out, b.value(), -1.0);
  return a.tape().record(std::move(out), {a, b}, [](const BackwardContext& c) {
    accumulate(c.in_grads[0], c.out_grad);
    accumulate(c.in_grads[1], c.out_grad, -1.0);
  });
}

Var mul(Var a, Var b) {
  require_same_shape("mul", a.value(), b.value());
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b.value()[i];
  return a.tape().record(std::move(out), {a, b}, [](const BackwardContext& c) {
    const Tensor& x = *c.in_values[0];
    const Tensor& y = *c.in_values[1];
    for (std::size_t i = 0; i < c.out_grad.size(); ++i) {
      if (c.in_grads[0]) (*c.in_grads[0])[i] += c.out_grad[i] * y[i];
      if (c.in_grads[1]) (*c.in_grads[1])[i] += c.out_grad[i] * x[i];
    }
  });
}

Var scale(Var a, double s) {
  Tensor out = a.value();
  for (double& v : out.data()) v *= s;
  return a.tape().record(std::move(out), {a}, [s](const BackwardContext& c) {
    accumulate(c.in_grads[0], c.out_grad, s);
  });
}

Var add_bias(Var x, Var bias, std::size_t axis) {
  const Tensor& xv = x.value();
  const Tensor& bv = bias.value();
  if (axis >= xv.rank() || bv.rank() != 1 || bv.size() != xv.dim(axis)) {
    throw ShapeError("add_bias: incompatible shapes " + shape_str(xv.shape()) + " and " +
                     shape_str(bv.shape()));
  }
  const AxisSplit s = split_axis(xv.shape(), axis);
  Tensor out = xv;
  for (std::size_t o = 0; o < s.outer; ++o)
    for (std::size_t k = 0; k < s.len; ++k)
      for (std::size_t i = 0; i < s.inner; ++i) out[(o * s.len + k) * s.inner + i] += bv[k];
  return x.tape().record(std::move(out), {x, bias}, [s](const BackwardContext& c) {
    accumulate(c.in_grads[0], c.out_grad);
    if (Tensor* gb = c.in_grads[1]) {
      for (std::size_t o = 0; o < s.outer; ++o)
        for (std::size_t k = 0; k < s.len; ++k)
          for (std::size_t i = 0; i < s.inner; ++i)
            (*gb)[k] += c.out_grad[(o * s.len + k) * s.inner + i];
    }
  });
}

Var scale_channels(Var x, Var gate) {
  const Tensor& xv = x.value();
  const Tensor& gv = gate.value();
  if (xv.rank() < 2 || gv.rank() != 2 || gv.dim(0) != xv.dim(0) || gv.dim(1) != xv.dim(1)) {
    throw ShapeError("scale_channels: incompatible shapes " + shape_str(xv.shape()) + " and " +
                     shape_str(gv.shape()));
  }
  const std::size_t inner = xv.size() / gv.size();
  Tensor out = xv;
  for (std::size_t g = 0; g < gv.size(); ++g)
    for (std::size_t i = 0; i < inner; ++i) out[g * inner + i] *= gv[g];
  return x.tape().record(std::move(out), {x, gate}, [inner](const BackwardContext& c) {
    const Tensor& xv = *c.in_values[0];
    const Tensor& gv = *c.in_values[1];
    for (std::size_t g = 0; g < gv.size(); ++g) {
      double acc = 0.0;
      for (std::size_t i = 0; i < inner; ++i) {
        const std::size_t k = g * inner + i;
        if (c.in_grads[0]) (*c.in_grads[0])[k] += c.out_grad[k] * gv[g];
        acc += c.out_grad[k] * xv[k];
      }
      if (c.in_grads[1]) (*c.in_grads[1])[g] += acc;
    }
  });
}

Var matmul(Var a, Var b) {
  return a.tape().record(kernel::matmul(a.value(), b.value()), {a, b},
                         [](const BackwardContext& c) {
                           if (c.in_grads[0]) {
                             accumulate(c.in_grads[0],
                                        kernel::matmul(c.out_grad, kernel::transpose(*c.in_values[1])));
                           }
                           if (c.in_grads[1]) {
                             accumulate(c.in_grads[1],
                                        kernel::matmul(kernel::transpose(*c.in_values[0]), c.out_grad));
                           }
                         });
}

Var transpose(Var a) {
  return a.tape().record(kernel::transpose(a.value()), {a}, [](const BackwardContext& c) {
    accumulate(c.in_grads[0], kernel::transpose(c.out_grad));
  });
}

Var reshape(Var a, Shape shape) {
  return a.tape().record(a.value().reshaped(std::move(shape)), {a},
                         [](const BackwardContext& c) {
                           if (Tensor* g = c.in_grads[0]) {
                             for (std::size_t i = 0; i < g->size(); ++i) (*g)[i] += c.out_grad[i];
                           }
                         });
}

Var concat(const std::vector<Var>& parts, std::size_t axis) {
  if (parts.empty()) throw ShapeError("concat of zero tensors");
  std::vector<const Tensor*> values;
  for (const Var& p : parts) values.push_back(&p.value());
  Tensor out = kernel::concat(values, axis);
  return parts[0].tape().record(std::move(out), parts, [axis](const BackwardContext& c) {
    const AxisSplit whole = split_axis(c.out_value.shape(), axis);
    std::size_t offset = 0;
    for (std::size_t p = 0; p < c.in_values.size(); ++p) {
      const std::size_t chunk = c.in_values[p]->dim(axis) * whole.inner;
      if (Tensor* g = c.in_grads[p]) {
        for (std::size_t o = 0; o < whole.outer; ++o)
          for (std::size_t i = 0; i < chunk; ++i)
            (*g)[o * chunk + i] += c.out_grad[o * whole.len * whole.inner + offset + i];
      }
      offset += chunk;
    }
  });
}

Var slice(Var a, std::size_t axis, std::size_t begin, std::size_t end) {
  const Tensor& av = a.value();
  if (axis >= av.rank() || begin >= end || end > av.dim(axis)) {
    throw ShapeError("slice [" + std::to_string(begin) + "," + std::to_string(end) +
                     ") out of range for " + shape_str(av.shape()));
  }
  const AxisSplit s = split_axis(av.shape(), axis);
  Shape shape = av.shape();
  shape[axis] = end - begin;
  Tensor out(shape);
  const std::size_t chunk = (end - begin) * s.inner;
  for (std::size_t o = 0; o < s.outer; ++o)
    for (std::size_t i = 0; i < chunk; ++i)
      out[o * chunk + i] = av[o * s.len * s.inner + begin * s.inner + i];
  return a.tape().record(std::move(out), {a}, [s, begin, chunk](const BackwardContext& c) {
    if (Tensor* g = c.in_grads[0]) {
      for (std::size_t o = 0; o < s.outer; ++o)
        for (std::size_t i = 0; i < chunk; ++i)
          (*g)[o * s.len * s.inner + begin * s.inner + i] += c.out_grad[o * chunk + i];
    }
  });
}

Var kron(Var a, Var b) {
  Tensor out = kernel::kron(a.value(), b.value());
  return a.tape().record(std::move(out), {a, b}, [](const BackwardContext& c) {
    const Tensor& av = *c.in_values[0];
    const Tensor& bv = *c.in_values[1];
    const std::size_t n = av.dim(0), m = av.dim(1), p = bv.dim(0), q = bv.dim(1);
    const BlockGrid grid{p, q, m, bv.size() / (p * q)};
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t col = 0; col < m; ++col) {
        double ga = 0.0;
        const double s = av.at(r, col);
        for (std::size_t i = 0; i < p; ++i)
          for (std::size_t j = 0; j < q; ++j) {
            const std::size_t o = grid.at(r, col, i, j);
            const std::size_t src = (i * q + j) * grid.inner;
            for (std::size_t t = 0; t < grid.inner; ++t) {
              ga += c.out_grad[o + t] * bv[src + t];
              if (c.in_grads[1]) (*c.in_grads[1])[src + t] += s * c.out_grad[o + t];
            }
          }
        if (c.in_grads[0]) c.in_grads[0]->at(r, col) += ga;
      }
  });
}

Var block_assemble(const LeftMatrixPattern& pattern, const std::vector<Var>& blocks) {
  const std::size_t n = pattern.n;
  if (blocks.size() != n) {
    throw ShapeError("block_assemble: expected " + std::to_string(n) + " blocks, got " +
                     std::to_string(blocks.size()));
  }
  const Tensor& first = blocks[0].value();
  if (first.rank() < 2) throw ShapeError("block_assemble: blocks need rank >= 2");
  for (const Var& b : blocks) require_same_shape("block_assemble", first, b.value());
  const std::size_t p = first.dim(0), q = first.dim(1);
  const BlockGrid grid{p, q, n, first.size() / (p * q)};
  Shape shape = first.shape();
  shape[0] *= n;
  shape[1] *= n;
  Tensor out(shape);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      const PatternCell& cell = pattern.at(r, c);
      if (cell.sign == 0) continue;
      const Tensor& src = blocks[cell.weight_index].value();
      for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < q; ++j) {
          const std::size_t o = grid.at(r, c, i, j);
          const std::size_t s = (i * q + j) * grid.inner;
          for (std::size_t t = 0; t < grid.inner; ++t) out[o + t] = cell.sign * src[s + t];
        }
    }
  return blocks[0].tape().record(std::move(out), blocks, [pattern, grid](const BackwardContext& c) {
    const std::size_t n = pattern.n;
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t col = 0; col < n; ++col) {
        const PatternCell& cell = pattern.at(r, col);
        Tensor* g = cell.sign == 0 ? nullptr : c.in_grads[cell.weight_index];
        if (!g) continue;
        for (std::size_t i = 0; i < grid.p; ++i)
          for (std::size_t j = 0; j < grid.q; ++j) {
            const std::size_t o = grid.at(r, col, i, j);
            const std::size_t s = (i * grid.q + j) * grid.inner;
            for (std::size_t t = 0; t < grid.inner; ++t) (*g)[s + t] += cell.sign * c.out_grad[o + t];
          }
      }
  });
}

Var conv2d(Var input, Var filters, kernel::Conv2dGeometry g) {
  Tensor out = kernel::conv2d(input.value(), filters.value(), g);
  return input.tape().record(std::move(out), {input, filters}, [g](const BackwardContext& c) {
    if (c.in_grads[0]) {
      accumulate(c.in_grads[0],
                 kernel::conv2d_input_grad(c.out_grad, *c.in_values[1], c.in_values[0]->shape(), g));
    }
    if (c.in_grads[1]) {
      accumulate(c.in_grads[1],
                 kernel::conv2d_filter_grad(c.out_grad, *c.in_values[0], c.in_values[1]->shape(), g));
    }
  });
}

Var relu(Var a) {
  Tensor out = a.value();
  for (double& v : out.data()) v = v > 0.0 ? v : 0.0;
  return a.tape().record(std::move(out), {a}, [](const BackwardContext& c) {
    if (Tensor* g = c.in_grads[0]) {
      const Tensor& x = *c.in_values[0];
      for (std::size_t i = 0; i < g->size(); ++i)
        if (x[i] > 0.0) (*g)[i] += c.out_grad[i];
    }
  });
}

Var sigmoid(Var a) {
  Tensor out = a.value();
  for (double& v : out.data()) v = 1.0 / (1.0 + std::exp(-v));
  return a.tape().record(std::move(out), {a}, [](const BackwardContext& c) {
    if (Tensor* g = c.in_grads[0]) {
      for (std::size_t i = 0; i < g->size(); ++i) {
        const double y = c.out_value[i];
        (*g)[i] += c.out_grad[i] * y * (1.0 - y);
      }
    }
  });
}

Var softmax(Var a, std::size_t axis) {
  Tensor out = kernel::softmax(a.value(), axis);
  return a.tape().record(std::move(out), {a}, [axis](const BackwardContext& c) {
    Tensor* g = c.in_grads[0];
    if (!g) return;
    const AxisSplit s = split_axis(c.out_value.shape(), axis);
    for (std::size_t o = 0; o < s.outer; ++o)
      for (std::size_t in = 0; in < s.inner; ++in) {
        const std::size_t base = o * s.len * s.inner + in;
        double dot = 0.0;
        for (std::size_t k = 0; k < s.len; ++k)
          dot += c.out_grad[base + k * s.inner] * c.out_value[base + k * s.inner];
        for (std::size_t k = 0; k < s.len; ++k) {
          const std::size_t idx = base + k * s.inner;
          (*g)[idx] += c.out_value[idx] * (c.out_grad[idx] - dot);
        }
      }
  });
}

Var sum(Var a) {
  double total = 0.0;
  for (double v : a.value().data()) total += v;
  return a.tape().record(Tensor::scalar(total), {a}, [](const BackwardContext& c) {
    if (Tensor* g = c.in_grads[0])
      for (double& v : g->data()) v += c.out_grad[0];
  });
}

Var mean(Var a) { return scale(sum(a), 1.0 / static_cast<double>(a.value().size())); }

Var mean_trailing(Var a, std::size_t keep_axes) {
  const Tensor& av = a.value();
  if (keep_axes == 0 || keep_axes >= av.rank()) {
    throw ShapeError("mean_trailing: cannot keep " + std::to_string(keep_axes) + " axes of " +
                     shape_str(av.shape()));
  }
  Shape shape(av.shape().begin(), av.shape().begin() + keep_axes);
  const std::size_t groups = shape_size(shape);
  const std::size_t inner = av.size() / groups;
  Tensor out(shape);
  for (std::size_t g = 0; g < groups; ++g) {
    double acc = 0.0;
    for (std::size_t i = 0; i < inner; ++i) acc += av[g * inner + i];
    out[g] = acc / static_cast<double>(inner);
  }
  return a.tape().record(std::move(out), {a}, [inner, groups](const BackwardContext& c) {
    if (Tensor* g = c.in_grads[0]) {
      const double w = 1.0 / static_cast<double>(inner);
      for (std::size_t k = 0; k < groups; ++k)
        for (std::size_t i = 0; i < inner; ++i) (*g)[k * inner + i] += w * c.out_grad[k];
    }
  });
}

Var mse(Var pred, Var target) {
  require_same_shape("mse", pred.value(), target.value());
  const Tensor& p = pred.value();
  const Tensor& t = target.value();
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) total += (p[i] - t[i]) * (p[i] - t[i]);
  const double count = static_cast<double>(p.size());
  return pred.tape().record(Tensor::scalar(total / count), {pred, target},
                            [count](const BackwardContext& c) {
                              const Tensor& p = *c.in_values[0];
                              const Tensor& t = *c.in_values[1];
                              const double w = 2.0 * c.out_grad[0] / count;
                              for (std::size_t i = 0; i < p.size(); ++i) {
                                const double d = w * (p[i] - t[i]);
                                if (c.in_grads[0]) (*c.in_grads[0])[i] += d;
                                if (c.in_grads[1]) (*c.in_grads[1])[i] -= d;
                              }
                            });
}

Var cross_entropy(Var logits, const std::vector<std::size_t>& labels) {
  const Tensor& z = logits.value();
  if (z.rank() != 2 || z.dim(0) != labels.size()) {
    throw ShapeError("cross_entropy: logits " + shape_str(z.shape()) + " vs " +
                     std::to_string(labels.size()) + " labels");
  }
  const std::size_t n = z.dim(0), k = z.dim(1);
  Tensor probs = kernel::softmax(z, 1);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] >= k) throw InvalidArgument("label out of range");
    double mx = z.at(i, 0);
    for (std::size_t j = 1; j < k; ++j) mx = std::max(mx, z.at(i, j));
    double s = 0.0;
    for (std::size_t j = 0; j < k; ++j) s += std::exp(z.at(i, j) - mx);
    total += mx + std::log(s) - z.at(i, labels[i]);
  }
  return logits.tape().record(
      Tensor::scalar(total / static_cast<double>(n)), {logits},
      [probs = std::move(probs), labels](const BackwardContext& c) {
        Tensor* g = c.in_grads[0];
        if (!g) return;
        const std::size_t n = probs.dim(0), k = probs.dim(1);
        const double w = c.out_grad[0] / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < k; ++j)
            g->at(i, j) += w * (probs.at(i, j) - (j == labels[i] ? 1.0 : 0.0));
      });
}

// ---------------------------------------------------------------------------

namespace {

double rel_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) /
         std::max({1.0, std::abs(analytic), std::abs(numeric)});
}

}  // namespace

GradCheckResult grad_check(const ScalarFn& f, const Tensor& x, double eps) {
  if (!(eps > 0.0)) throw InvalidArgument("grad_check: eps must be positive");
  Tensor analytic;
  {
    Tape tape;
    Var xv = tape.leaf(x);
    Var loss = f(tape, xv);
    tape.backward(loss);
    analytic = tape.grad(xv);
  }
  auto eval = [&](const Tensor& point) {
    Tape tape;
    return f(tape, tape.leaf(point)).value().item();
  };
  GradCheckResult result{0.0, x.size()};
  Tensor probe = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + eps;
    const double up = eval(probe);
    probe[i] = x[i] - eps;
    const double down = eval(probe);
    probe[i] = x[i];
    result.max_rel_error =
        std::max(result.max_rel_error, rel_error(analytic[i], (up - down) / (2.0 * eps)));
  }
  return result;
}

GradCheckResult grad_check(Parameter& p, const std::function<Var(Tape&)>& loss, double eps) {
  if (!(eps > 0.0)) throw InvalidArgument("grad_check: eps must be positive");
  Tensor analytic;
  {
    Tape tape;
    Var l = loss(tape);
    tape.backward(l);
    analytic = tape.grad(p);
  }
  auto eval = [&] {
    Tape tape;
    return loss(tape).value().item();
  };
  GradCheckResult result{0.0, p.value.size()};
  for (std::size_t i = 0; i < p.value.size(); ++i) {
    const double orig = p.value[i];
    p.value[i] = orig + eps;
    const double up = eval();
    p.value[i] = orig - eps;
    const double down = eval();
    p.value[i] = orig;
    result.max_rel_error =
        std::max(result.max_rel_error, rel_error(analytic[i], (up - down) / (2.0 * eps)));
  }
  return result;
}

}  // namespace hxnn
