#include "msplat/liegroup.hpp"

#include <cmath>
#include <stdexcept>

namespace msplat {

namespace {
constexpr double kSmallAngle = 1e-7;

void require_unit_axis(const Vec3& omega_hat, const char* where) {
  if (std::fabs(omega_hat.norm() - 1.0) > 1e-9)
    throw std::invalid_argument(std::string(where) + ": axis must be unit length");
}
}  // namespace

Mat4 Pose::matrix() const {
  Mat4 m = Mat4::Identity();
  m.topLeftCorner<3, 3>() = R;
  m.topRightCorner<3, 1>() = t;
  return m;
}

Pose Pose::inverse() const {
  Pose p;
  p.R = R.transpose();
  p.t = -(p.R * t);
  return p;
}

Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
  return m;
}

Mat3 so3_exp(const Vec3& omega_hat, double theta) {
  require_unit_axis(omega_hat, "so3_exp");
  const Mat3 K = skew(omega_hat);
  double s, c1;  // sin(theta), 1 - cos(theta)
  if (std::fabs(theta) < kSmallAngle) {
    // Three-term Taylor expansions; avoids cancellation in 1 - cos.
    const double t2 = theta * theta;
    s = theta * (1.0 - t2 / 6.0 * (1.0 - t2 / 20.0));
    c1 = t2 / 2.0 * (1.0 - t2 / 12.0 * (1.0 - t2 / 30.0));
  } else {
    s = std::sin(theta);
    c1 = 1.0 - std::cos(theta);
  }
  return Mat3::Identity() + s * K + c1 * (K * K);
}

Mat3 se3_G(const Vec3& omega_hat, double theta) {
  require_unit_axis(omega_hat, "se3_G");
  const Mat3 K = skew(omega_hat);
  double c1, ts;  // 1 - cos(theta), theta - sin(theta)
  if (std::fabs(theta) < kSmallAngle) {
    const double t2 = theta * theta;
    c1 = t2 / 2.0 * (1.0 - t2 / 12.0 * (1.0 - t2 / 30.0));
    ts = theta * t2 / 6.0 * (1.0 - t2 / 20.0 * (1.0 - t2 / 42.0));
  } else {
    c1 = 1.0 - std::cos(theta);
    ts = theta - std::sin(theta);
  }
  return theta * Mat3::Identity() + c1 * K + ts * (K * K);
}

Pose se3_exp(const ScrewAxis& s) {
  Pose p;
  p.R = so3_exp(s.omega_hat, s.theta);
  p.t = se3_G(s.omega_hat, s.theta) * s.v;
  return p;
}

Pose compose(const Pose& a, const Pose& b) {
  Pose p;
  p.R = a.R * b.R;
  p.t = a.R * b.t + a.t;
  return p;
}

Mat4 matrix_exp_oracle(const Mat4& m, int terms) {
  if (terms < 1) throw std::invalid_argument("matrix_exp_oracle: terms must be >= 1");
  Mat4 sum = Mat4::Identity();
  Mat4 power = Mat4::Identity();
  for (int n = 1; n <= terms; ++n) {
    power = Mat4(power * m / static_cast<double>(n));
    sum += power;
  }
  return sum;
}

double orthogonality_residual(const Mat3& R) { return (R.transpose() * R - Mat3::Identity()).norm(); }

}  // namespace msplat
