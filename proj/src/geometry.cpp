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

#include "hxnn/geometry.hpp"

#include <cmath>

#include "hxnn/algebra.hpp"
#include "hxnn/error.hpp"

namespace hxnn {
namespace {

const Algebra& quaternions() {
  static const Algebra a = builtin_algebra("quaternion");
  return a;
}

const Algebra& dual_quaternions() {
  static const Algebra a = builtin_algebra("dual_quaternion");
  return a;
}

double dot4(const Quat& a, const Quat& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
}

Quat pure(const Vec3& v) { return {0.0, v[0], v[1], v[2]}; }
Vec3 imag(const Quat& q) { return {q[1], q[2], q[3]}; }
double norm3(const Vec3& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }

void require_unit(const Quat& q) {
  const double n = quat_norm(q);
  if (std::abs(n - 1.0) > kUnitTolerance) {
    throw NormalizationError("quaternion norm " + std::to_string(n) + " is not 1");
  }
}

}  // namespace

Quat hamilton(const Quat& a, const Quat& b) {
  const HNumber p(quaternions(), {a.begin(), a.end()});
  const HNumber q(quaternions(), {b.begin(), b.end()});
  const HNumber r = multiply(p, q);
  return {r[0], r[1], r[2], r[3]};
}

Quat quat_conjugate(const Quat& q) { return {q[0], -q[1], -q[2], -q[3]}; }

double quat_norm(const Quat& q) { return std::sqrt(dot4(q, q)); }

UnitQuaternion::UnitQuaternion(const Quat& q) : q_(q) { require_unit(q); }

UnitQuaternion UnitQuaternion::normalize(const Quat& q) {
  const double n = quat_norm(q);
  if (n == 0.0) throw NormalizationError("cannot normalize the zero quaternion");
  return UnitQuaternion(Quat{q[0] / n, q[1] / n, q[2] / n, q[3] / n});
}

UnitQuaternion operator*(const UnitQuaternion& a, const UnitQuaternion& b) {
  return UnitQuaternion(hamilton(a.coeffs(), b.coeffs()));
}

UnitQuaternion quat_from_axis_angle(const Vec3& axis, double angle) {
  const double n = norm3(axis);
  if (n == 0.0) throw DegenerateAxis("rotation axis has zero length");
  const double s = std::sin(angle / 2.0) / n;
  return UnitQuaternion::normalize(
      Quat{std::cos(angle / 2.0), s * axis[0], s * axis[1], s * axis[2]});
}

Vec3 quat_rotate(const UnitQuaternion& q, const Vec3& v) {
  return imag(hamilton(hamilton(q.coeffs(), pure(v)), quat_conjugate(q.coeffs())));
}

Vec3 quat_rotate(const Quat& q, const Vec3& v) { return quat_rotate(UnitQuaternion(q), v); }

UnitQuaternion rotation_between(const Vec3& from, const Vec3& to) {
  const double nf = norm3(from), nt = norm3(to);
  if (nf == 0.0 || nt == 0.0) throw DegenerateAxis("rotation between zero-length vectors");
  const Vec3 a{from[0] / nf, from[1] / nf, from[2] / nf};
  const Vec3 b{to[0] / nt, to[1] / nt, to[2] / nt};
  const double c = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
  const Vec3 cross{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
                   a[0] * b[1] - a[1] * b[0]};
  if (c < -1.0 + 1e-12) {
    // Antiparallel: any axis orthogonal to `a`.
    Vec3 axis = std::abs(a[0]) < 0.9 ? Vec3{0.0, -a[2], a[1]} : Vec3{-a[2], 0.0, a[0]};
    return quat_from_axis_angle(axis, M_PI);
  }
  return UnitQuaternion::normalize(Quat{1.0 + c, cross[0], cross[1], cross[2]});
}

// ---------------------------------------------------------------------------

std::array<double, 8> DualQuaternion::coeffs() const {
  return {real[0], real[1], real[2], real[3], dual[0], dual[1], dual[2], dual[3]};
}

DualQuaternion DualQuaternion::from_coeffs(std::span<const double> c) {
  if (c.size() != 8) throw InvalidArgument("a dual quaternion has 8 coefficients");
  return {{c[0], c[1], c[2], c[3]}, {c[4], c[5], c[6], c[7]}};
}

bool DualQuaternion::is_unit(double tol) const {
  return std::abs(quat_norm(real) - 1.0) <= tol && std::abs(dot4(real, dual)) <= tol;
}

DualQuaternion DualQuaternion::normalized() const {
  const double n = quat_norm(real);
  if (n == 0.0) throw NormalizationError("dual quaternion has a zero real part");
  DualQuaternion out;
  for (int i = 0; i < 4; ++i) {
    out.real[i] = real[i] / n;
    out.dual[i] = dual[i] / n;
  }
  const double d = dot4(out.real, out.dual);
  for (int i = 0; i < 4; ++i) out.dual[i] -= d * out.real[i];
  return out;
}

DualQuaternion dq_from_rt(const RigidTransform& t) {
  DualQuaternion dq;
  dq.real = t.rotation.coeffs();
  const Quat td = hamilton(pure(t.translation), dq.real);
  for (int i = 0; i < 4; ++i) dq.dual[i] = 0.5 * td[i];
  return dq;
}

RigidTransform dq_to_rt(const DualQuaternion& dq) {
  if (!dq.is_unit()) throw NormalizationError("dual quaternion is not unit");
  return {UnitQuaternion(dq.real), dq_translation(dq)};
}

Vec3 dq_translation(const DualQuaternion& dq) {
  const double n2 = dot4(dq.real, dq.real);
  if (n2 == 0.0) throw NormalizationError("dual quaternion has a zero real part");
  const Quat t = hamilton(dq.dual, quat_conjugate(dq.real));
  return {2.0 * t[1] / n2, 2.0 * t[2] / n2, 2.0 * t[3] / n2};
}

DualQuaternion dq_multiply(const DualQuaternion& a, const DualQuaternion& b) {
  const auto ca = a.coeffs(), cb = b.coeffs();
  const HNumber x(dual_quaternions(), {ca.begin(), ca.end()});
  const HNumber y(dual_quaternions(), {cb.begin(), cb.end()});
  return DualQuaternion::from_coeffs(multiply(x, y).coeffs());
}

Vec3 dq_apply(const DualQuaternion& dq, const Vec3& p) {
  const RigidTransform t = dq_to_rt(dq);
  const Vec3 r = quat_rotate(t.rotation, p);
  return {r[0] + t.translation[0], r[1] + t.translation[1], r[2] + t.translation[2]};
}

// ---------------------------------------------------------------------------

Tensor transform_points(const Tensor& points, TransformFamily family, double m) {
  if (points.rank() == 0 || points.shape().back() != 3) {
    throw ShapeError("expected trailing dimension 3, got " + shape_str(points.shape()));
  }
  Tensor out = points;
  const std::size_t count = points.size() / 3;
  if (family == TransformFamily::Translation) {
    for (double& v : out.data()) v += m;
    return out;
  }
  const UnitQuaternion q = quat_from_axis_angle({1.0, 1.0, 1.0}, m);
  for (std::size_t i = 0; i < count; ++i) {
    const Vec3 r = quat_rotate(q, Vec3{points[3 * i], points[3 * i + 1], points[3 * i + 2]});
    for (std::size_t k = 0; k < 3; ++k) out[3 * i + k] = r[k];
  }
  return out;
}

std::vector<EquivarianceRow> equivariance_report(const PointPredictor& model,
                                                 TransformFamily family, const Tensor& inputs,
                                                 const Tensor& targets,
                                                 std::span<const double> magnitudes) {
  auto mse_of = [](const Tensor& p, const Tensor& t) {
    if (p.shape() != t.shape()) {
      throw ShapeError("prediction " + shape_str(p.shape()) + " vs target " + shape_str(t.shape()));
    }
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s += (p[i] - t[i]) * (p[i] - t[i]);
    return s / static_cast<double>(p.size());
  };
  const double base = mse_of(model(inputs), targets);
  std::vector<EquivarianceRow> rows;
  for (double m : magnitudes) {
    const double err = mse_of(model(transform_points(inputs, family, m)),
                              transform_points(targets, family, m));
    const double ratio = base == 0.0 ? (err == 0.0 ? 1.0 : INFINITY) : err / base;
    rows.push_back({m, base, err, ratio});
  }
  return rows;
}

}  // namespace hxnn
