#include "vetsim/frames.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vetsim/errors.hpp"

namespace vetsim {

double wrap_angle(double a) {
  double r = std::remainder(a, 2.0 * kPi);
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

Mat3 rotation_body_to_world(const EulerAngles& att) {
  const double cphi = std::cos(att.phi), sphi = std::sin(att.phi);
  const double cth = std::cos(att.theta), sth = std::sin(att.theta);
  const double cpsi = std::cos(att.psi), spsi = std::sin(att.psi);

  Mat3 r;
  r << cpsi * cth, -spsi * cphi + cpsi * sth * sphi, cpsi * sth * cphi + spsi * sphi,
      spsi * cth, cpsi * cphi + spsi * sth * sphi, -cpsi * sphi + spsi * sth * cphi,
      -sth, cth * sphi, cth * cphi;
  return r;
}

Mat3 euler_rate_transform(const EulerAngles& att) {
  if (!(std::abs(att.theta) < kPi / 2.0 - kGimbalMargin)) {
    throw GimbalSingularity("pitch " + std::to_string(att.theta) +
                            " rad is too close to +-pi/2");
  }
  const double cphi = std::cos(att.phi), sphi = std::sin(att.phi);
  const double cth = std::cos(att.theta), tth = std::tan(att.theta);

  Mat3 t;
  t << 1.0, sphi * tth, cphi * tth,
      0.0, cphi, -sphi,
      0.0, sphi / cth, cphi / cth;
  return t;
}

Mat3 surface_jacobian(double psi, bool mirrored_convention) {
  const double c = std::cos(psi), s = std::sin(psi);
  Mat3 j;
  if (mirrored_convention) {
    j << -c, s, 0.0,
        -s, c, 0.0,
        0.0, 0.0, 1.0;
  } else {
    j << c, -s, 0.0,
        s, c, 0.0,
        0.0, 0.0, 1.0;
  }
  return j;
}

EulerAngles euler_from_rotation(const Mat3& r) {
  EulerAngles e;
  const double s = std::clamp(-r(2, 0), -1.0, 1.0);
  e.theta = std::asin(s);
  e.phi = std::atan2(r(2, 1), r(2, 2));
  e.psi = std::atan2(r(1, 0), r(0, 0));
  return e;
}

RigidTransform RigidTransform::from_rpy(const Vec3& t, double roll, double pitch, double yaw) {
  return {rotation_body_to_world({roll, pitch, yaw}), t};
}

bool RigidTransform::valid(double tol) const {
  if (!rotation.allFinite() || !translation.allFinite()) return false;
  const double ortho = (rotation.transpose() * rotation - Mat3::Identity()).cwiseAbs().maxCoeff();
  return ortho <= tol && std::abs(rotation.determinant() - 1.0) <= tol;
}

RigidTransform compose(const RigidTransform& a, const RigidTransform& b) {
  return {a.rotation * b.rotation, a.rotation * b.translation + a.translation};
}

RigidTransform invert(const RigidTransform& a) {
  const Mat3 rt = a.rotation.transpose();
  return {rt, -(rt * a.translation)};
}

RigidTransform pose_to_transform(const Pose6& p) {
  return {rotation_body_to_world(p.attitude), p.position()};
}

RigidTransform pose_to_transform(const Pose3& p) {
  return {rotation_body_to_world({0.0, 0.0, p.psi}), Vec3(p.x, p.y, 0.0)};
}

Pose6 transform_to_pose(const RigidTransform& t) {
  Pose6 p;
  p.x = t.translation.x();
  p.y = t.translation.y();
  p.z = t.translation.z();
  p.attitude = euler_from_rotation(t.rotation);
  return p;
}

}  // namespace vetsim
