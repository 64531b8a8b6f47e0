#pragma once

// Controllers for the two robots: per-robot sub-task PD laws, the virtual
// elastic tether (VET) law driven by the partner's tag in the camera image,
// and the one-way IBVS follower used as the baseline.

#include <Eigen/Core>
#include <string_view>

#include "vetsim/frames.hpp"
#include "vetsim/perception.hpp"
#include "vetsim/vehicle.hpp"

namespace vetsim {

enum class RobotKind { Underwater, Surface };
enum class ControllerMode { Vet, Baseline };

std::string_view to_string(ControllerMode m);
/// Throws ConfigInvalid for anything but "vet" or "baseline".
ControllerMode parse_controller_mode(std::string_view s);

struct PdGains {
  Vector kp;
  Vector kd;

  /// Non-negative entries; for the underwater vehicle the x, y and yaw
  /// entries must be exactly zero since those states are not measured.
  void validate(RobotKind kind) const;
  bool operator==(const PdGains&) const = default;
};

PdGains underwater_pd_gains(double kp, double kd);
PdGains surface_pd_gains(double kp, double kd);

struct VetGains {
  double k_safe_p = 0.5;
  double k_elastic_p = 1.0;
  double k_elastic_d = 0.15;
  double k_psi = 0.5;
  double u_max_x = 0.1;
  double u_max_y = 0.1;
  double derivative_time_constant = 0.1;  // s, low-pass on the tag-center rate
  double hold_half_life = 0.5;            // s, decay of the held command on loss

  void validate() const;
  bool operator==(const VetGains&) const = default;
};

struct UnderwaterTarget {
  double z = -1.0;
  double phi = 0.0;
  double theta = 0.0;
  bool operator==(const UnderwaterTarget&) const = default;
};

struct SurfaceTarget {
  double x = 0.0;
  double y = 0.0;
  double psi = 0.0;
  bool operator==(const SurfaceTarget&) const = default;
};

/// Everything the underwater vehicle can sense about itself: depth and
/// attitude from its pressure sensor and IMU, plus their rates.
struct UnderwaterMeasurement {
  double z = 0.0;
  double phi = 0.0;
  double theta = 0.0;
  double z_rate = 0.0;
  double phi_rate = 0.0;
  double theta_rate = 0.0;
};

inline constexpr int kUnderwaterMeasuredStates = 3;

struct SurfaceMeasurement {
  Pose3 pose;
  Eigen::Vector3d rates = Eigen::Vector3d::Zero();  // world-frame x, y, psi rates
};

/// Camera-frame tether command.
struct VetCommand {
  Eigen::Vector3d u = Eigen::Vector3d::Zero();  // u_x, u_y, u_psi
  RegionLabel region = RegionLabel::Danger;
  bool detected = false;
};

/// Filter and hold state carried between VET updates.
struct VetMemory {
  bool has_previous = false;
  Eigen::Vector2d previous_error = Eigen::Vector2d::Zero();
  double previous_time = 0.0;
  Eigen::Vector2d error_rate = Eigen::Vector2d::Zero();
  Eigen::Vector3d last_command = Eigen::Vector3d::Zero();
  RegionLabel last_region = RegionLabel::Danger;
  double last_detection_time = 0.0;
};

ControlInput subtask_control_underwater(const UnderwaterMeasurement& m,
                                        const UnderwaterTarget& target, const PdGains& gains);

/// Planar PD with the world-frame error rotated into the body frame.
ControlInput subtask_control_surface(const SurfaceMeasurement& m, const SurfaceTarget& target,
                                     const PdGains& gains);

/// Image offset of the tag center normalised by half the resolution.
Eigen::Vector2d normalized_offset(const ImagePoint& center, const CameraModel& cam);

/// LoS-aware tether law. Safe: proportional with the soft gain. Elastic:
/// proportional with the stiff gain plus the tag-center rate. Danger: full
/// command toward re-centering. On loss the last command is held and decays.
VetCommand vet_law(const TagObservation& obs, VetMemory& memory, const VetGains& gains,
                   const CameraModel& cam);

struct BaselineCommand {
  VetCommand follower;
  Eigen::Vector3d leader = Eigen::Vector3d::Zero();
};

/// One-way IBVS: single proportional gain over the whole image, no region
/// logic, zero command when the tag is not detected; the leader gets nothing.
BaselineCommand baseline_ibvs(const TagObservation& obs, const VetGains& gains,
                              const CameraModel& cam);

/// Rotates a camera-frame command into the body frame. The underwater output
/// is [u_x, u_y, 0, 0, 0, u_psi], the surface output [u_x, u_y, u_psi].
ControlInput camera_to_body(const VetCommand& cmd, const RigidTransform& camera_mount,
                            RobotKind kind);

/// Residual of the mounting condition R_U (c_C^U - c_T^U) = -R_S (c_C^S - c_T^S).
/// Zero when both robots can centre each other's tag simultaneously.
double check_connectivity(const RigidTransform& world_from_underwater,
                          const RigidTransform& underwater_camera_mount,
                          const RigidTransform& underwater_tag_mount,
                          const RigidTransform& world_from_surface,
                          const RigidTransform& surface_camera_mount,
                          const RigidTransform& surface_tag_mount);

/// saturate(saturate(subtask) + tether). The sub-task part is clipped first
/// so a taut tether at u_max can hold the robot against its own goal.
ControlInput combined_control(const ControlInput& subtask, const ControlInput& tether,
                              const VehicleParams& params);

struct ControllerOutput {
  ControlInput subtask;
  ControlInput tether;
  ControlInput command;
  VetCommand camera_command;
};

/// Underwater controller. Its inputs are restricted to its own measurements
/// and its own camera observation.
class UnderwaterController {
 public:
  UnderwaterController(ControllerMode mode, PdGains pd, UnderwaterTarget target, VetGains vet,
                       CameraModel camera, VehicleParams params);

  ControllerOutput update(const UnderwaterMeasurement& m, const TagObservation& obs);

 private:
  ControllerMode mode_;
  PdGains pd_;
  UnderwaterTarget target_;
  VetGains vet_;
  CameraModel camera_;
  VehicleParams params_;
  VetMemory memory_;
};

class SurfaceController {
 public:
  SurfaceController(ControllerMode mode, PdGains pd, VetGains vet, CameraModel camera,
                    VehicleParams params, double cruise_speed);

  ControllerOutput update(const SurfaceMeasurement& m, const SurfaceTarget& target,
                          const TagObservation& obs);

 private:
  ControllerMode mode_;
  PdGains pd_;
  VetGains vet_;
  CameraModel camera_;
  VehicleParams params_;
  double cruise_speed_;
  VetMemory memory_;
};

}  // namespace vetsim
