#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cmath>

#include "lilo/errors.hpp"
#include "lilo/random.hpp"

namespace lilo {

/// Tangent-space element of SE(3): rotational part `omega` (radians) and
/// translational part `v` (meters). Serializes as [wx, wy, wz, vx, vy, vz].
template <typename Scalar>
struct Twist {
  using Vec3 = Eigen::Matrix<Scalar, 3, 1>;
  using Vec6 = Eigen::Matrix<Scalar, 6, 1>;

  Vec3 omega = Vec3::Zero();
  Vec3 v = Vec3::Zero();

  Twist() = default;
  Twist(const Vec3& omega_in, const Vec3& v_in) : omega(omega_in), v(v_in) {}

  static Twist fromVector(const Vec6& x) { return Twist(x.template head<3>(), x.template tail<3>()); }
  Vec6 vector() const {
    Vec6 x;
    x << omega, v;
    return x;
  }
};

/// Rigid transform as unit quaternion + translation. The quaternion is
/// renormalized by every composing operation so chained products stay on the
/// manifold. Serializes as [qw, qx, qy, qz, tx, ty, tz].
template <typename Scalar>
struct Pose {
  using Quat = Eigen::Quaternion<Scalar>;
  using Vec3 = Eigen::Matrix<Scalar, 3, 1>;
  using Mat4 = Eigen::Matrix<Scalar, 4, 4>;

  Quat rotation = Quat::Identity();
  Vec3 translation = Vec3::Zero();

  Pose() = default;
  Pose(const Quat& q, const Vec3& t) : rotation(q.normalized()), translation(t) {}

  static Pose identity() { return Pose(); }

  static Pose fromTranslation(const Vec3& t) { return Pose(Quat::Identity(), t); }

  static Pose fromAxisAngle(const Vec3& axis, Scalar angle, const Vec3& t = Vec3::Zero()) {
    return Pose(Quat(Eigen::AngleAxis<Scalar>(angle, axis.normalized())), t);
  }

  Mat4 matrix() const {
    Mat4 m = Mat4::Identity();
    m.template topLeftCorner<3, 3>() = rotation.toRotationMatrix();
    m.template topRightCorner<3, 1>() = translation;
    return m;
  }

  /// Apply the transform to a point.
  Vec3 operator*(const Vec3& p) const { return rotation * p + translation; }
};

using Twistd = Twist<double>;
using Twistf = Twist<float>;
using Posed = Pose<double>;
using Posef = Pose<float>;

template <typename Scalar>
Eigen::Matrix<Scalar, 3, 3> hat(const Eigen::Matrix<Scalar, 3, 1>& w) {
  Eigen::Matrix<Scalar, 3, 3> m;
  m << Scalar(0), -w.z(), w.y(),
       w.z(), Scalar(0), -w.x(),
       -w.y(), w.x(), Scalar(0);
  return m;
}

/// a then b, i.e. the frame product: M(a) * M(b) in homogeneous form.
template <typename Scalar>
Pose<Scalar> compose(const Pose<Scalar>& a, const Pose<Scalar>& b) {
  Pose<Scalar> out;
  out.rotation = (a.rotation * b.rotation).normalized();
  out.translation = a.translation + a.rotation * b.translation;
  return out;
}

template <typename Scalar>
Pose<Scalar> operator*(const Pose<Scalar>& a, const Pose<Scalar>& b) {
  return compose(a, b);
}

template <typename Scalar>
Pose<Scalar> inverse(const Pose<Scalar>& p) {
  Pose<Scalar> out;
  out.rotation = p.rotation.conjugate().normalized();
  out.translation = -(out.rotation * p.translation);
  return out;
}

namespace detail {

// Series guard: closed forms of the Rodrigues coefficients lose precision
// well above the 1e-8 identity threshold, so fall back to truncated series
// below this angle.
template <typename Scalar>
constexpr Scalar seriesGuard() {
  return Scalar(1e-2);
}

template <typename Scalar>
constexpr Scalar identityGuard() {
  return Scalar(1e-8);
}

}  // namespace detail

/// SE(3) exponential: Rodrigues rotation of omega, translation through the
/// left Jacobian. expMap of the zero twist is the identity pose.
template <typename Scalar>
Pose<Scalar> expMap(const Twist<Scalar>& xi) {
  using Vec3 = Eigen::Matrix<Scalar, 3, 1>;
  using Mat3 = Eigen::Matrix<Scalar, 3, 3>;
  using Quat = Eigen::Quaternion<Scalar>;

  const Vec3& w = xi.omega;
  const Scalar theta2 = w.squaredNorm();
  const Scalar theta = std::sqrt(theta2);

  Quat q;
  if (theta < detail::identityGuard<Scalar>()) {
    q = Quat(Scalar(1), w.x() / Scalar(2), w.y() / Scalar(2), w.z() / Scalar(2));
  } else {
    const Scalar half = theta / Scalar(2);
    const Scalar k = std::sin(half) / theta;
    q = Quat(std::cos(half), k * w.x(), k * w.y(), k * w.z());
  }
  q.normalize();

  Scalar b, c;  // (1-cos)/theta^2 and (theta-sin)/theta^3
  if (theta < detail::seriesGuard<Scalar>()) {
    b = Scalar(0.5) - theta2 / Scalar(24) + theta2 * theta2 / Scalar(720);
    c = Scalar(1) / Scalar(6) - theta2 / Scalar(120) + theta2 * theta2 / Scalar(5040);
  } else {
    b = (Scalar(1) - std::cos(theta)) / theta2;
    c = (theta - std::sin(theta)) / (theta2 * theta);
  }
  const Mat3 w_hat = hat(w);
  const Mat3 jacobian = Mat3::Identity() + b * w_hat + c * w_hat * w_hat;
  return Pose<Scalar>(q, jacobian * xi.v);
}

/// SE(3) logarithm, inverse of expMap. Throws AngleNearPi for rotations within
/// 1e-6 of pi, where the axis is ill-conditioned.
template <typename Scalar>
Twist<Scalar> logMap(const Pose<Scalar>& p) {
  using Vec3 = Eigen::Matrix<Scalar, 3, 1>;
  using Mat3 = Eigen::Matrix<Scalar, 3, 3>;

  Eigen::Quaternion<Scalar> q = p.rotation.normalized();
  if (q.w() < Scalar(0)) q.coeffs() = -q.coeffs();

  const Vec3 qv(q.x(), q.y(), q.z());
  const Scalar s = qv.norm();
  const Scalar theta = Scalar(2) * std::atan2(s, q.w());
  if (theta > Scalar(M_PI) - Scalar(1e-6)) throw AngleNearPi();

  Twist<Scalar> xi;
  if (s < detail::identityGuard<Scalar>()) {
    xi.omega = Scalar(2) / q.w() * qv;
  } else {
    xi.omega = (theta / s) * qv;
  }

  const Scalar theta2 = xi.omega.squaredNorm();
  Scalar d;  // coefficient of hat(w)^2 in the inverse left Jacobian
  if (theta < detail::seriesGuard<Scalar>()) {
    d = Scalar(1) / Scalar(12) + theta2 / Scalar(720) + theta2 * theta2 / Scalar(30240);
  } else {
    d = Scalar(1) / theta2 -
        (Scalar(1) + std::cos(theta)) / (Scalar(2) * theta * std::sin(theta));
  }
  const Mat3 w_hat = hat(xi.omega);
  const Mat3 inv_jacobian = Mat3::Identity() - Scalar(0.5) * w_hat + d * w_hat * w_hat;
  xi.v = inv_jacobian * p.translation;
  return xi;
}

/// Pose of `world_ee` expressed in the frame of `world_obj`:
/// inverse(world_obj) * world_ee. Left-invariant: a common left factor on both
/// arguments cancels exactly.
template <typename Scalar>
Pose<Scalar> relativePose(const Pose<Scalar>& world_obj, const Pose<Scalar>& world_ee) {
  return compose(inverse(world_obj), world_ee);
}

/// Absolute rotation angle between two poses' orientations, in [0, pi].
template <typename Scalar>
Scalar rotationAngle(const Pose<Scalar>& a, const Pose<Scalar>& b) {
  Scalar dot = std::abs(a.rotation.normalized().dot(b.rotation.normalized()));
  dot = std::min(dot, Scalar(1));
  return Scalar(2) * std::acos(dot);
}

template <typename Scalar>
Scalar translationDistance(const Pose<Scalar>& a, const Pose<Scalar>& b) {
  return (a.translation - b.translation).norm();
}

/// Sign-insensitive quaternion distance; zero iff the rotations coincide.
template <typename Scalar>
Scalar quaternionDistance(const Pose<Scalar>& a, const Pose<Scalar>& b) {
  const auto d1 = (a.rotation.coeffs() - b.rotation.coeffs()).norm();
  const auto d2 = (a.rotation.coeffs() + b.rotation.coeffs()).norm();
  return std::min(d1, d2);
}

/// Diagonal zero-mean noise on SE(3), given as six standard deviations:
/// three rotational (radians) then three translational (meters).
struct PerturbationSpec {
  Eigen::Matrix<double, 6, 1> sigma = Eigen::Matrix<double, 6, 1>::Zero();

  PerturbationSpec() = default;
  PerturbationSpec(const Eigen::Vector3d& sigma_rot, const Eigen::Vector3d& sigma_trans) {
    sigma << sigma_rot, sigma_trans;
    validate();
  }

  /// Overridable defaults: 0.05 rad and 0.01 m per axis.
  static PerturbationSpec defaults() {
    return PerturbationSpec(Eigen::Vector3d::Constant(0.05), Eigen::Vector3d::Constant(0.01));
  }

  static PerturbationSpec zero() { return PerturbationSpec(); }

  bool isZero() const { return sigma.isZero(0.0); }

  void validate() const {
    if ((sigma.array() < 0.0).any()) {
      throw ConfigError("perturbation sigma entries must be non-negative");
    }
  }
};

/// Draw a twist with independent N(0, sigma_i^2) components.
inline Twistd samplePerturbation(const PerturbationSpec& spec, Rng& rng) {
  Eigen::Matrix<double, 6, 1> x;
  for (int i = 0; i < 6; ++i) x[i] = rng.normal(spec.sigma[i]);
  return Twistd::fromVector(x);
}

/// Right-perturbed start pose: approach * exp(xi), xi ~ N(0, diag(sigma^2)).
/// The noise acts in the approach (body) frame. Zero sigma returns `approach`
/// bit-exactly.
inline Posed samplePerturbedInit(const Posed& approach, const PerturbationSpec& spec, Rng& rng) {
  if (spec.isZero()) return approach;
  return compose(approach, expMap(samplePerturbation(spec, rng)));
}

}  // namespace lilo
