#pragma once

#include <Eigen/Core>

namespace msplat {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

/// Normalized twist: unit rotation axis, rotation angle, translation
/// component. Scaled by theta it generates a rigid transform through the
/// exponential map.
struct ScrewAxis {
  Vec3 omega_hat = Vec3::UnitZ();
  Vec3 v = Vec3::Zero();
  double theta = 0.0;
};

/// Rigid transform (rotation + translation), the 4x4 homogeneous form
/// [R|t; 0 1]. Composition is the homogeneous matrix product.
struct Pose {
  Mat3 R = Mat3::Identity();
  Vec3 t = Vec3::Zero();

  static Pose identity() { return {}; }
  Mat4 matrix() const;
  Pose inverse() const;
  Vec3 apply(const Vec3& p) const { return R * p + t; }
};

/// Skew-symmetric matrix of v: skew(v) * w == v x w.
Mat3 skew(const Vec3& v);

/// Rodrigues rotation about a unit axis. Rejects a non-unit axis
/// (normalization is the caller's job).
Mat3 so3_exp(const Vec3& omega_hat, double theta);

/// Translation coupling matrix of the SE(3) exponential,
/// I*theta + (1-cos theta)[w] + (theta - sin theta)[w]^2; equals the
/// integral of so3_exp(w, s) for s in [0, theta].
Mat3 se3_G(const Vec3& omega_hat, double theta);

/// Screw motion exponential: R = so3_exp, t = G(theta) * v.
Pose se3_exp(const ScrewAxis& s);

Pose compose(const Pose& a, const Pose& b);

/// Truncated Taylor series sum of m^n / n! for n = 0..terms. Test oracle;
/// not used on any runtime path.
Mat4 matrix_exp_oracle(const Mat4& m, int terms);

/// Frobenius norm of R^T R - I; zero iff R is orthogonal.
double orthogonality_residual(const Mat3& R);

}  // namespace msplat
