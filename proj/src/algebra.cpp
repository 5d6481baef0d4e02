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

#include "hxnn/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "hxnn/error.hpp"

namespace hxnn {
namespace {

// Left-multiplication layouts, row r / column c holding sign * W_index.
constexpr std::string_view kComplexLayout =
    "W0 -W1\n"
    "W1 W0";

constexpr std::string_view kQuaternionLayout =
    "W0 -W1 -W2 -W3\n"
    "W1 W0 -W3 W2\n"
    "W2 W3 W0 -W1\n"
    "W3 -W2 W1 W0";

constexpr std::string_view kTessarineLayout =
    "W0 -W1 W2 -W3\n"
    "W1 W0 W3 W2\n"
    "W2 -W3 W0 -W1\n"
    "W3 W2 W1 W0";

// Basis order (1, i, j, k, eps, eps i, eps j, eps k).
constexpr std::string_view kDualQuaternionLayout =
    "W0 -W1 -W2 -W3 0 0 0 0\n"
    "W1 W0 -W3 W2 0 0 0 0\n"
    "W2 W3 W0 -W1 0 0 0 0\n"
    "W3 -W2 W1 W0 0 0 0 0\n"
    "W4 -W5 -W6 -W7 W0 -W1 -W2 -W3\n"
    "W5 W4 -W7 W6 W1 W0 -W3 W2\n"
    "W6 W7 W4 -W5 W2 W3 W0 -W1\n"
    "W7 -W6 W5 W4 W3 -W2 W1 W0";

constexpr std::string_view kOctonionLayout =
    "W0 -W1 -W2 -W3 -W4 -W5 -W6 -W7\n"
    "W1 W0 -W3 W2 -W5 W4 W7 -W6\n"
    "W2 W3 W0 -W1 -W6 -W7 W4 W5\n"
    "W3 -W2 W1 W0 -W7 W6 -W5 W4\n"
    "W4 W5 W6 W7 W0 -W1 -W2 -W3\n"
    "W5 -W4 W7 -W6 W1 W0 W3 -W2\n"
    "W6 -W7 -W4 W5 W2 -W3 W0 W1\n"
    "W7 W6 -W5 -W4 W3 W2 -W1 W0";

LeftMatrixPattern build_pattern(const std::string& name, std::size_t n,
                                const std::vector<BasisProduct>& table) {
  LeftMatrixPattern pattern{n, std::vector<PatternCell>(n * n)};
  // e_i e_c = s e_r contributes s * w_i to L[r][c].
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < n; ++c) {
      const BasisProduct& p = table[i * n + c];
      if (p.sign == 0) continue;
      PatternCell& cell = pattern.cells[p.index * n + c];
      if (cell.sign != 0) {
        throw InvalidArgument("algebra '" + name +
                              "' has no monomial left-multiplication layout");
      }
      cell = PatternCell{p.sign, i};
    }
  }
  return pattern;
}

void require_same(const HNumber& x, const HNumber& y) {
  if (!x.algebra().same_as(y.algebra())) {
    throw AlgebraMismatch("operands belong to different algebras ('" +
                          x.algebra().name() + "' vs '" + y.algebra().name() +
                          "')");
  }
}

}  // namespace

std::vector<double> LeftMatrixPattern::selector(std::size_t index) const {
  std::vector<double> out(n * n, 0.0);
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (cells[k].sign != 0 && cells[k].weight_index == index) {
      out[k] = static_cast<double>(cells[k].sign);
    }
  }
  return out;
}

Algebra::Algebra(std::string name, std::size_t n,
                 std::vector<BasisProduct> table) {
  if (n == 0) throw InvalidArgument("algebra dimension must be positive");
  if (table.size() != n * n) {
    throw InvalidArgument("structure table of '" + name + "' must have " +
                          std::to_string(n * n) + " entries");
  }
  for (const BasisProduct& p : table) {
    if (p.sign < -1 || p.sign > 1 || p.index >= n) {
      throw InvalidArgument("structure table of '" + name +
                            "' has an out-of-range entry");
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (table[j] != BasisProduct{1, j} || table[j * n] != BasisProduct{1, j}) {
      throw InvalidArgument("e_0 is not a two-sided identity in '" + name + "'");
    }
  }
  LeftMatrixPattern pattern = build_pattern(name, n, table);
  data_ = std::make_shared<const Data>(
      Data{std::move(name), n, std::move(table), std::move(pattern)});
}

const LeftMatrixPattern& Algebra::left_pattern() const { return data_->pattern; }

bool Algebra::same_as(const Algebra& other) const {
  return data_ == other.data_ ||
         (data_->n == other.data_->n && data_->table == other.data_->table);
}

Algebra algebra_from_pattern(std::string name, std::string_view layout) {
  std::vector<std::vector<PatternCell>> rows;
  std::istringstream lines{std::string(layout)};
  std::string line;
  while (std::getline(lines, line)) {
    std::istringstream tokens(line);
    std::vector<PatternCell> row;
    std::string tok;
    while (tokens >> tok) {
      if (tok == "0") {
        row.push_back({});
        continue;
      }
      int sign = 1;
      std::size_t pos = 0;
      if (tok[0] == '-' || tok[0] == '+') {
        sign = tok[0] == '-' ? -1 : 1;
        pos = 1;
      }
      if (pos >= tok.size() || tok[pos] != 'W') {
        throw InvalidArgument("bad layout token '" + tok + "'");
      }
      row.push_back({sign, std::stoul(tok.substr(pos + 1))});
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  const std::size_t n = rows.size();
  std::vector<BasisProduct> table(n * n);
  std::vector<bool> seen(n * n, false);
  for (std::size_t r = 0; r < n; ++r) {
    if (rows[r].size() != n) throw InvalidArgument("layout is not square");
    for (std::size_t c = 0; c < n; ++c) {
      const PatternCell& cell = rows[r][c];
      if (cell.sign == 0) continue;
      if (cell.weight_index >= n) throw InvalidArgument("weight index out of range");
      const std::size_t slot = cell.weight_index * n + c;
      if (seen[slot]) throw InvalidArgument("layout defines a product twice");
      seen[slot] = true;
      table[slot] = BasisProduct{cell.sign, r};
    }
  }
  return Algebra(std::move(name), n, std::move(table));
}

std::vector<std::string> builtin_algebra_names() {
  return {"real",          "complex",  "quaternion", "tessarine",
          "dual_quaternion", "octonion", "sedenion"};
}

Algebra builtin_algebra(std::string_view name) {
  if (name == "real") return Algebra("real", 1, {BasisProduct{1, 0}});
  if (name == "complex") return algebra_from_pattern("complex", kComplexLayout);
  if (name == "quaternion") {
    return algebra_from_pattern("quaternion", kQuaternionLayout);
  }
  if (name == "tessarine") {
    return algebra_from_pattern("tessarine", kTessarineLayout);
  }
  if (name == "dual_quaternion") {
    return algebra_from_pattern("dual_quaternion", kDualQuaternionLayout);
  }
  if (name == "octonion") return algebra_from_pattern("octonion", kOctonionLayout);
  if (name == "sedenion") {
    return cayley_dickson_double(builtin_algebra("octonion"));
  }
  throw NameError("unknown algebra '" + std::string(name) + "'");
}

Algebra cayley_dickson_double(const Algebra& a) {
  const std::size_t n = a.dim();
  if ((n & (n - 1)) != 0) {
    throw InvalidArgument("cannot double '" + a.name() +
                          "': dimension is not a power of two");
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (a.product(i, i) != BasisProduct{-1, 0}) {
      throw InvalidArgument("cannot double '" + a.name() +
                            "': not a Cayley-Dickson algebra");
    }
  }
  // x = (p, q) with p, q in a; basis e_i of the double is (e_i, 0) for i < n
  // and (0, e_{i-n}) otherwise.
  auto half = [&](std::size_t i, bool upper) {
    if ((i >= n) == upper) return HNumber::basis(a, i % n);
    return HNumber::zero(a);
  };
  const std::size_t m = 2 * n;
  std::vector<BasisProduct> table(m * m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const HNumber p = half(i, false), q = half(i, true);
      const HNumber r = half(j, false), s = half(j, true);
      const HNumber lo = subtract(multiply(p, r), multiply(conjugate(s), q));
      const HNumber hi = add(multiply(s, p), multiply(q, conjugate(r)));
      BasisProduct bp{};
      for (std::size_t k = 0; k < m; ++k) {
        const double v = k < n ? lo[k] : hi[k - n];
        if (v == 0.0) continue;
        if (bp.sign != 0 || std::abs(v) != 1.0) {
          throw InvalidArgument("doubling of '" + a.name() +
                                "' is not monomial");
        }
        bp = BasisProduct{v > 0 ? 1 : -1, k};
      }
      table[i * m + j] = bp;
    }
  }
  std::string name = a.name() + "_double";
  if (a.name() == "real") name = "complex";
  if (a.name() == "complex") name = "quaternion";
  if (a.name() == "quaternion") name = "octonion";
  if (a.name() == "octonion") name = "sedenion";
  return Algebra(std::move(name), m, std::move(table));
}

// ---------------------------------------------------------------------------

HNumber::HNumber(Algebra algebra, std::vector<double> coeffs)
    : algebra_(std::move(algebra)), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != algebra_.dim()) {
    throw InvalidArgument("expected " + std::to_string(algebra_.dim()) +
                          " coefficients for '" + algebra_.name() + "', got " +
                          std::to_string(coeffs_.size()));
  }
}

HNumber HNumber::zero(const Algebra& algebra) {
  return HNumber(algebra, std::vector<double>(algebra.dim(), 0.0));
}

HNumber HNumber::one(const Algebra& algebra) { return basis(algebra, 0); }

HNumber HNumber::basis(const Algebra& algebra, std::size_t i) {
  std::vector<double> c(algebra.dim(), 0.0);
  c.at(i) = 1.0;
  return HNumber(algebra, std::move(c));
}

bool HNumber::is_zero() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(),
                     [](double v) { return v == 0.0; });
}

double HNumber::norm() const {
  double s = 0.0;
  for (double v : coeffs_) s += v * v;
  return std::sqrt(s);
}

// Evaluated through the left-multiplication layout in matrix-vector order so
// that the result is bit-identical to left_matrix(x) * vec(y).
HNumber multiply(const HNumber& x, const HNumber& y) {
  require_same(x, y);
  const LeftMatrixPattern& pat = x.algebra().left_pattern();
  const std::size_t n = pat.n;
  std::vector<double> z(n, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    double acc = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
      const PatternCell& cell = pat.cells[r * n + c];
      if (cell.sign == 0) continue;
      acc += (cell.sign * x[cell.weight_index]) * y[c];
    }
    z[r] = acc;
  }
  return HNumber(x.algebra(), std::move(z));
}

HNumber add(const HNumber& x, const HNumber& y) {
  require_same(x, y);
  std::vector<double> z(x.dim());
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = x[i] + y[i];
  return HNumber(x.algebra(), std::move(z));
}

HNumber subtract(const HNumber& x, const HNumber& y) {
  require_same(x, y);
  std::vector<double> z(x.dim());
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = x[i] - y[i];
  return HNumber(x.algebra(), std::move(z));
}

HNumber scale(double alpha, const HNumber& x) {
  std::vector<double> z(x.dim());
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = alpha * x[i];
  return HNumber(x.algebra(), std::move(z));
}

HNumber conjugate(const HNumber& x) {
  std::vector<double> z(x.coeffs().begin(), x.coeffs().end());
  for (std::size_t i = 1; i < z.size(); ++i) z[i] = -z[i];
  return HNumber(x.algebra(), std::move(z));
}

std::vector<double> left_matrix(const HNumber& w) {
  const LeftMatrixPattern& pat = w.algebra().left_pattern();
  std::vector<double> m(pat.n * pat.n, 0.0);
  for (std::size_t k = 0; k < m.size(); ++k) {
    const PatternCell& cell = pat.cells[k];
    if (cell.sign != 0) m[k] = cell.sign * w[cell.weight_index];
  }
  return m;
}

// ---------------------------------------------------------------------------

std::string_view property_name(Property p) {
  switch (p) {
    case Property::Commutative: return "commutative";
    case Property::Associative: return "associative";
    case Property::Alternative: return "alternative";
    case Property::PowerAssociative: return "power_associative";
  }
  return "?";
}

namespace {

bool exactly_equal(const HNumber& a, const HNumber& b) {
  return std::equal(a.coeffs().begin(), a.coeffs().end(), b.coeffs().begin());
}

bool close(const HNumber& a, const HNumber& b, double tol) {
  double diff = 0.0, scale = 1.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    diff = std::max(diff, std::abs(a[i] - b[i]));
    scale = std::max({scale, std::abs(a[i]), std::abs(b[i])});
  }
  return diff <= tol * scale;
}

HNumber mul(const HNumber& a, const HNumber& b) { return multiply(a, b); }

// Every parenthesization of x^3 and x^4 agrees.
template <class Eq>
bool powers_agree(const HNumber& x, Eq&& eq) {
  const HNumber x2 = mul(x, x);
  const HNumber left3 = mul(x2, x), right3 = mul(x, x2);
  if (!eq(left3, right3)) return false;
  const HNumber candidates[] = {mul(x2, x2), mul(left3, x), mul(right3, x),
                                mul(x, left3), mul(x, right3)};
  for (const HNumber& c : candidates) {
    if (!eq(c, candidates[0])) return false;
  }
  return true;
}

bool basis_check(const Algebra& a, Property p) {
  const std::size_t n = a.dim();
  std::vector<HNumber> e;
  for (std::size_t i = 0; i < n; ++i) e.push_back(HNumber::basis(a, i));
  switch (p) {
    case Property::Commutative:
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          if (a.product(i, j) != a.product(j, i)) return false;
      return true;
    case Property::Associative:
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          for (std::size_t k = 0; k < n; ++k)
            if (!exactly_equal(mul(mul(e[i], e[j]), e[k]),
                               mul(e[i], mul(e[j], e[k]))))
              return false;
      return true;
    case Property::Alternative:
      // Polarized forms of (xx)y = x(xy) and (yx)x = y(xx).
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          const HNumber sym = add(mul(e[i], e[j]), mul(e[j], e[i]));
          for (std::size_t k = 0; k < n; ++k) {
            if (!exactly_equal(mul(sym, e[k]),
                               add(mul(e[i], mul(e[j], e[k])),
                                   mul(e[j], mul(e[i], e[k])))))
              return false;
            if (!exactly_equal(mul(e[k], sym),
                               add(mul(mul(e[k], e[i]), e[j]),
                                   mul(mul(e[k], e[j]), e[i]))))
              return false;
          }
        }
      return true;
    case Property::PowerAssociative:
      for (std::size_t i = 0; i < n; ++i) {
        if (!powers_agree(e[i], exactly_equal)) return false;
        for (std::size_t j = i + 1; j < n; ++j) {
          if (!powers_agree(add(e[i], e[j]), exactly_equal)) return false;
          if (!powers_agree(subtract(e[i], e[j]), exactly_equal)) return false;
        }
      }
      return true;
  }
  return false;
}

}  // namespace

bool check_property(const Algebra& a, Property p,
                    const PropertyCheckOptions& options) {
  if (!basis_check(a, p)) return false;
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  auto sample = [&] {
    std::vector<double> c(a.dim());
    for (double& v : c) v = dist(rng);
    return HNumber(a, std::move(c));
  };
  auto eq = [&](const HNumber& l, const HNumber& r) {
    return close(l, r, options.tolerance);
  };
  for (std::size_t s = 0; s < options.samples; ++s) {
    const HNumber x = sample(), y = sample(), z = sample();
    switch (p) {
      case Property::Commutative:
        if (!eq(mul(x, y), mul(y, x))) return false;
        break;
      case Property::Associative:
        if (!eq(mul(mul(x, y), z), mul(x, mul(y, z)))) return false;
        break;
      case Property::Alternative:
        if (!eq(mul(mul(x, x), y), mul(x, mul(x, y)))) return false;
        if (!eq(mul(mul(y, x), x), mul(y, mul(x, x)))) return false;
        break;
      case Property::PowerAssociative:
        if (!powers_agree(x, eq)) return false;
        break;
    }
  }
  return true;
}

std::optional<std::pair<HNumber, HNumber>> find_zero_divisor(
    const Algebra& a, std::size_t budget) {
  const std::size_t n = a.dim();
  std::vector<HNumber> family;
  for (std::size_t i = 1; i < n; ++i) family.push_back(HNumber::basis(a, i));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      family.push_back(add(HNumber::basis(a, i), HNumber::basis(a, j)));
      family.push_back(subtract(HNumber::basis(a, i), HNumber::basis(a, j)));
    }
  }
  std::size_t spent = 0;
  for (const HNumber& x : family) {
    for (const HNumber& y : family) {
      if (spent++ >= budget) return std::nullopt;
      if (multiply(x, y).is_zero()) return std::make_pair(x, y);
    }
  }
  return std::nullopt;
}

}  // namespace hxnn
