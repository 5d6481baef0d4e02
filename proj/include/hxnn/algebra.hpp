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
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hxnn {

/// e_i * e_j = sign * e_index. A zero sign means the product vanishes and the
/// index carries no meaning.
struct BasisProduct {
  int sign = 0;
  std::size_t index = 0;
  friend bool operator==(const BasisProduct&, const BasisProduct&) = default;
};

/// One cell of the left-multiplication block layout: the cell holds
/// sign * W_{weight_index}.
struct PatternCell {
  int sign = 0;
  std::size_t weight_index = 0;
  friend bool operator==(const PatternCell&, const PatternCell&) = default;
};

/// n x n, row-major.
struct LeftMatrixPattern {
  std::size_t n = 0;
  std::vector<PatternCell> cells;

  const PatternCell& at(std::size_t row, std::size_t col) const {
    return cells[row * n + col];
  }
  /// Signed selector matrix of weight block `index` (row-major n x n).
  std::vector<double> selector(std::size_t index) const;
};

/// A hypercomplex number system given by monomial structure constants.
/// Cheap to copy; the table is shared and immutable.
class Algebra {
 public:
  /// `table` is n*n row-major. Throws InvalidArgument when the identity law
  /// or index ranges are violated.
  Algebra(std::string name, std::size_t n, std::vector<BasisProduct> table);

  const std::string& name() const { return data_->name; }
  std::size_t dim() const { return data_->n; }
  const BasisProduct& product(std::size_t i, std::size_t j) const {
    return data_->table[i * data_->n + j];
  }
  std::span<const BasisProduct> table() const { return data_->table; }
  const LeftMatrixPattern& left_pattern() const;

  /// Same dimension and identical structure constants.
  bool same_as(const Algebra& other) const;

 private:
  struct Data {
    std::string name;
    std::size_t n;
    std::vector<BasisProduct> table;
    LeftMatrixPattern pattern;
  };
  std::shared_ptr<const Data> data_;
};

/// Builds an algebra from a textual left-multiplication layout such as
/// "W0 -W1\nW1 W0". A literal `0` marks a structurally zero cell.
Algebra algebra_from_pattern(std::string name, std::string_view layout);

/// real, complex, quaternion, tessarine, dual_quaternion, octonion, sedenion.
Algebra builtin_algebra(std::string_view name);
std::vector<std::string> builtin_algebra_names();

/// (p,q)(r,s) = (pr - conj(s) q, s p + q conj(r)). The input must be a
/// Cayley-Dickson algebra: power-of-two dimension with e_i^2 = -1 for i >= 1.
Algebra cayley_dickson_double(const Algebra& a);

class HNumber {
 public:
  HNumber(Algebra algebra, std::vector<double> coeffs);
  static HNumber zero(const Algebra& algebra);
  static HNumber one(const Algebra& algebra);
  static HNumber basis(const Algebra& algebra, std::size_t i);

  const Algebra& algebra() const { return algebra_; }
  std::size_t dim() const { return coeffs_.size(); }
  std::span<const double> coeffs() const { return coeffs_; }
  double operator[](std::size_t i) const { return coeffs_[i]; }
  double real() const { return coeffs_[0]; }
  bool is_pure() const { return coeffs_[0] == 0.0; }
  bool is_zero() const;
  double norm() const;

 private:
  Algebra algebra_;
  std::vector<double> coeffs_;
};

HNumber multiply(const HNumber& x, const HNumber& y);
HNumber add(const HNumber& x, const HNumber& y);
HNumber subtract(const HNumber& x, const HNumber& y);
HNumber scale(double alpha, const HNumber& x);
HNumber conjugate(const HNumber& x);

/// Row-major n x n real matrix with left_matrix(w) * vec(x) = vec(w * x).
std::vector<double> left_matrix(const HNumber& w);

enum class Property { Commutative, Associative, Alternative, PowerAssociative };

/// In the column order used by the property report.
inline constexpr Property kAllProperties[] = {
    Property::Commutative, Property::Associative, Property::Alternative,
    Property::PowerAssociative};

std::string_view property_name(Property p);

inline constexpr std::uint64_t kDefaultPropertySeed = 0xC0FFEE;

struct PropertyCheckOptions {
  std::uint64_t seed = kDefaultPropertySeed;
  std::size_t samples = 1000;
  double tolerance = 1e-12;
};

/// Exact checks over basis elements (polarized where the identity is not
/// multilinear) followed by seeded random samples.
bool check_property(const Algebra& a, Property p,
                    const PropertyCheckOptions& options = {});

/// Searches pairs drawn from {e_i} and {e_i +- e_j}; `budget` caps the
/// number of products evaluated.
std::optional<std::pair<HNumber, HNumber>> find_zero_divisor(
    const Algebra& a, std::size_t budget = 1u << 20);

}  // namespace hxnn
