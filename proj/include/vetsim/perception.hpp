#pragma once

// Virtual pinhole camera looking at a square fiducial tag. Produces the four
// projected corners the controllers consume, the adaptive tag dimensions,
// the image-plane region classification and the tether state.

#include <array>
#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

#include "vetsim/frames.hpp"

namespace vetsim {

struct CameraModel {
  double width = 640.0;         // W, px
  double height = 480.0;        // V, px
  double focal_length = 400.0;  // px
  RigidTransform mount;         // body -> camera

  Eigen::Vector2d image_center() const { return {width / 2.0, height / 2.0}; }
  void validate() const;
  bool operator==(const CameraModel&) const = default;
};

/// Square tag. Corners a, b, c, d run cyclically around the tag; the tag x
/// axis is aligned with the carrying robot's centerline.
struct TagModel {
  double side_length = 0.2;  // m
  RigidTransform mount;      // body -> tag

  void validate() const;
  bool operator==(const TagModel&) const = default;
};

struct ImagePoint {
  double x = 0.0;  // along the width axis
  double y = 0.0;  // along the height axis

  bool operator==(const ImagePoint&) const = default;
};

struct TagObservation {
  std::array<ImagePoint, 4> corners{};  // a, b, c, d
  double camera_yaw = 0.0;              // tag yaw about the optical axis, rad
  double timestamp = 0.0;
  bool detected = false;
  bool visible = false;  // geometric visibility before any dropout

  bool operator==(const TagObservation&) const = default;
};

enum class RegionLabel { Safe, Elastic, Danger };

std::string_view to_string(RegionLabel r);

struct TagGeometry {
  ImagePoint center;
  double side = 0.0;      // l-bar: mean edge length
  double diagonal = 0.0;  // h-bar: mean diagonal length
};

struct TetherState {
  double xi = 0.0;  // distance of the tag center from the image center, px
  ImagePoint center;
};

struct DropoutModel {
  std::vector<std::pair<double, double>> windows;  // forced-loss intervals, s
  double random_rate = 0.0;                        // per-observation loss probability

  /// Throws ConfigInvalid unless windows are ordered, non-overlapping and
  /// the rate lies in [0, 1).
  void validate() const;
  bool in_window(double t) const;
  bool operator==(const DropoutModel&) const = default;
};

/// Seeded generator for dropout draws. mt19937_64 output is fixed by the
/// standard and the double conversion is done by hand, so sequences are
/// identical across standard libraries.
class DropoutRng {
 public:
  explicit DropoutRng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

/// Tag corners in the tag frame, in a, b, c, d order.
std::array<Vec3, 4> tag_corners(const TagModel& tag);

/// Projects the target's tag into the observer's camera. The tag is detected
/// when all four corners are in front of the camera and inside the image.
TagObservation project_tag(const RigidTransform& world_from_observer,
                           const RigidTransform& world_from_target, const CameraModel& cam,
                           const TagModel& tag, double t);

/// Adaptive tag dimensions measured from the corners. Throws NotDetected.
TagGeometry tag_geometry(const TagObservation& obs);

RegionLabel classify_region(const ImagePoint& center, double side, double diagonal,
                            const CameraModel& cam);

/// Throws NotDetected.
TetherState tether_state(const TagObservation& obs, const CameraModel& cam);

TagObservation apply_dropout(const TagObservation& obs, const DropoutModel& model, double t,
                             DropoutRng& rng);

/// Yaw of the tag about the optical axis recovered from the corner layout.
/// Exact when the tag plane is parallel to the image plane.
double yaw_from_corners(const TagObservation& obs);

/// Planar homography pose estimate (camera -> tag) from the four corners.
/// Throws NotDetected.
RigidTransform estimate_tag_pose(const TagObservation& obs, const CameraModel& cam,
                                 const TagModel& tag);

}  // namespace vetsim
