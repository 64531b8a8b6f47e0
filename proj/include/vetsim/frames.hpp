#pragma once

// Rotation and rigid-transform algebra shared by the vehicles, the camera
// model and the controllers. World and body frames are right-handed with z
// up; attitude is roll-pitch-yaw (ZYX) as used by marine-craft kinematics.

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace vetsim {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kPi = 3.14159265358979323846;

/// Gimbal guard: pitch must stay below pi/2 - kGimbalMargin.
inline constexpr double kGimbalMargin = 1e-3;

struct EulerAngles {
  double phi = 0.0;    // roll
  double theta = 0.0;  // pitch
  double psi = 0.0;    // yaw

  bool operator==(const EulerAngles&) const = default;
};

struct Pose6 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  EulerAngles attitude;

  Vec3 position() const { return {x, y, z}; }
  bool operator==(const Pose6&) const = default;
};

struct Pose3 {
  double x = 0.0;
  double y = 0.0;
  double psi = 0.0;

  bool operator==(const Pose3&) const = default;
};

struct RigidTransform {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  static RigidTransform identity() { return {}; }
  static RigidTransform from_translation(const Vec3& t) { return {Mat3::Identity(), t}; }
  static RigidTransform from_rpy(const Vec3& t, double roll, double pitch, double yaw);

  /// True when the rotation is orthonormal with determinant +1.
  bool valid(double tol = 1e-9) const;

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }

  bool operator==(const RigidTransform& o) const {
    return rotation == o.rotation && translation == o.translation;
  }
};

/// Wraps an angle into (-pi, pi].
double wrap_angle(double a);

/// Body-to-world rotation, entry for entry the ZYX matrix of marine kinematics.
Mat3 rotation_body_to_world(const EulerAngles& attitude);

/// Maps body angular rates to Euler-angle rates. Throws GimbalSingularity
/// when |theta| >= pi/2 - kGimbalMargin.
Mat3 euler_rate_transform(const EulerAngles& attitude);

/// Planar body-to-world velocity Jacobian of the surface vehicle. The
/// mirrored convention returns [-c s 0; -s c 0; 0 0 1], a sign variant of the
/// surface kinematic model kept for comparison runs.
Mat3 surface_jacobian(double psi, bool mirrored_convention = false);

/// Recovers ZYX Euler angles from a rotation matrix (inverse of
/// rotation_body_to_world away from the gimbal singularity).
EulerAngles euler_from_rotation(const Mat3& r);

RigidTransform compose(const RigidTransform& a, const RigidTransform& b);
RigidTransform invert(const RigidTransform& a);

RigidTransform pose_to_transform(const Pose6& p);
/// The surface vehicle lives on the z = 0 plane.
RigidTransform pose_to_transform(const Pose3& p);
Pose6 transform_to_pose(const RigidTransform& t);

}  // namespace vetsim
