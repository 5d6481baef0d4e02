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

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "hxnn/tensor.hpp"

namespace hxnn {

using Vec3 = std::array<double, 3>;
/// (w, x, y, z).
using Quat = std::array<double, 4>;

inline constexpr double kUnitTolerance = 1e-9;

/// Hamilton product, evaluated through the quaternion algebra table.
Quat hamilton(const Quat& a, const Quat& b);
Quat quat_conjugate(const Quat& q);
double quat_norm(const Quat& q);

class UnitQuaternion {
 public:
  UnitQuaternion() = default;
  /// Throws NormalizationError unless |q| = 1 within kUnitTolerance.
  explicit UnitQuaternion(const Quat& q);
  /// Explicit renormalization; throws NormalizationError for q = 0.
  static UnitQuaternion normalize(const Quat& q);

  const Quat& coeffs() const { return q_; }
  double w() const { return q_[0]; }

 private:
  Quat q_{1.0, 0.0, 0.0, 0.0};
};

UnitQuaternion operator*(const UnitQuaternion& a, const UnitQuaternion& b);

/// Throws DegenerateAxis for a zero axis.
UnitQuaternion quat_from_axis_angle(const Vec3& axis, double angle);
/// Imaginary part of q (0, v) conj(q).
Vec3 quat_rotate(const UnitQuaternion& q, const Vec3& v);
/// Validating overload for raw coefficients.
Vec3 quat_rotate(const Quat& q, const Vec3& v);
/// Shortest-arc rotation taking direction `from` onto `to`.
UnitQuaternion rotation_between(const Vec3& from, const Vec3& to);

struct RigidTransform {
  UnitQuaternion rotation;
  Vec3 translation{0.0, 0.0, 0.0};
};

/// q_r + eps q_d; coefficient order (1, i, j, k, eps, eps i, eps j, eps k).
struct DualQuaternion {
  Quat real{1.0, 0.0, 0.0, 0.0};
  Quat dual{0.0, 0.0, 0.0, 0.0};

  std::array<double, 8> coeffs() const;
  static DualQuaternion from_coeffs(std::span<const double> c);
  /// |q_r| = 1 and <q_r, q_d> = 0 within tol.
  bool is_unit(double tol = kUnitTolerance) const;
  /// Explicit projection onto the unit dual quaternions.
  DualQuaternion normalized() const;
};

/// q_r = rotation, q_d = 1/2 t q_r.
DualQuaternion dq_from_rt(const RigidTransform& t);
RigidTransform dq_to_rt(const DualQuaternion& dq);
/// Product in the dual-quaternion algebra.
DualQuaternion dq_multiply(const DualQuaternion& a, const DualQuaternion& b);
/// Rotate then translate. Throws NormalizationError for non-unit input.
Vec3 dq_apply(const DualQuaternion& dq, const Vec3& p);
/// Translation t = 2 q_d q_r^{-1}; q_r need not be unit.
Vec3 dq_translation(const DualQuaternion& dq);

// ---------------------------------------------------------------------------

enum class TransformFamily { Rotation, Translation };

/// Maps windows [N, T, 3] to predicted points [N, 3].
using PointPredictor = std::function<Tensor(const Tensor&)>;

struct EquivarianceRow {
  double magnitude = 0.0;
  double error_original = 0.0;
  double error_transformed = 0.0;
  /// error_transformed / error_original; 1 when both vanish.
  double ratio = 1.0;
};

/// Translation by m (1, 1, 1) or rotation by angle m about the (1, 1, 1)
/// axis, applied to inputs [N, T, 3] and targets [N, 3] alike. Errors are
/// mean squared errors.
std::vector<EquivarianceRow> equivariance_report(const PointPredictor& model,
                                                 TransformFamily family, const Tensor& inputs,
                                                 const Tensor& targets,
                                                 std::span<const double> magnitudes);

/// Applies `family` with magnitude m to every trailing 3-vector of `points`.
Tensor transform_points(const Tensor& points, TransformFamily family, double m);

}  // namespace hxnn
