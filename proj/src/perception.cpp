#include "vetsim/perception.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "vetsim/errors.hpp"

namespace vetsim {
namespace {

double dist(const ImagePoint& p, const ImagePoint& q) { return std::hypot(p.x - q.x, p.y - q.y); }

bool inside_open(double v, double lo, double hi) { return v > lo && v < hi; }

}  // namespace

std::string_view to_string(RegionLabel r) {
  switch (r) {
    case RegionLabel::Safe: return "safe";
    case RegionLabel::Elastic: return "elastic";
    case RegionLabel::Danger: return "danger";
  }
  return "unknown";
}

void CameraModel::validate() const {
  if (!(width > 0.0) || !(height > 0.0) || !(focal_length > 0.0)) {
    throw ConfigInvalid("camera resolution and focal length must be positive");
  }
  if (!mount.valid()) throw ConfigInvalid("camera mount is not a rigid transform");
}

void TagModel::validate() const {
  if (!(side_length > 0.0)) throw ConfigInvalid("tag side length must be positive");
  if (!mount.valid()) throw ConfigInvalid("tag mount is not a rigid transform");
}

void DropoutModel::validate() const {
  if (!(random_rate >= 0.0 && random_rate < 1.0)) {
    throw ConfigInvalid("dropout rate must lie in [0, 1)");
  }
  double prev_end = -std::numeric_limits<double>::infinity();
  for (const auto& [start, end] : windows) {
    if (!(start <= end)) throw ConfigInvalid("dropout window ends before it starts");
    if (!(start >= prev_end)) throw ConfigInvalid("dropout windows overlap or are unordered");
    prev_end = end;
  }
}

bool DropoutModel::in_window(double t) const {
  for (const auto& [start, end] : windows) {
    if (t >= start && t <= end) return true;
  }
  return false;
}

std::array<Vec3, 4> tag_corners(const TagModel& tag) {
  const double h = tag.side_length / 2.0;
  return {Vec3(-h, -h, 0.0), Vec3(-h, h, 0.0), Vec3(h, h, 0.0), Vec3(h, -h, 0.0)};
}

TagObservation project_tag(const RigidTransform& world_from_observer,
                           const RigidTransform& world_from_target, const CameraModel& cam,
                           const TagModel& tag, double t) {
  const RigidTransform world_from_camera = compose(world_from_observer, cam.mount);
  const RigidTransform world_from_tag = compose(world_from_target, tag.mount);
  const RigidTransform camera_from_tag = compose(invert(world_from_camera), world_from_tag);

  TagObservation obs;
  obs.timestamp = t;
  bool visible = true;
  const auto corners = tag_corners(tag);
  for (std::size_t i = 0; i < corners.size(); ++i) {
    const Vec3 p = camera_from_tag.apply(corners[i]);
    if (!(p.z() > 0.0)) {
      visible = false;
      obs.corners[i] = {};
      continue;
    }
    const ImagePoint ip{cam.focal_length * p.x() / p.z() + cam.width / 2.0,
                        cam.focal_length * p.y() / p.z() + cam.height / 2.0};
    obs.corners[i] = ip;
    if (ip.x < 0.0 || ip.x > cam.width || ip.y < 0.0 || ip.y > cam.height) visible = false;
  }
  const Mat3& r = camera_from_tag.rotation;
  obs.camera_yaw = wrap_angle(std::atan2(r(1, 0), r(0, 0)));
  obs.visible = visible;
  obs.detected = visible;
  return obs;
}

TagGeometry tag_geometry(const TagObservation& obs) {
  if (!obs.detected) throw NotDetected("tag geometry requested for an undetected tag");
  const auto& [a, b, c, d] = obs.corners;
  TagGeometry g;
  g.center = {(a.x + b.x + c.x + d.x) / 4.0, (a.y + b.y + c.y + d.y) / 4.0};
  g.side = (dist(a, b) + dist(b, c) + dist(c, d) + dist(a, d)) / 4.0;
  g.diagonal = (dist(a, c) + dist(b, d)) / 2.0;
  return g;
}

// Image x pairs with the width W and image y with the height V throughout.
RegionLabel classify_region(const ImagePoint& center, double side, double diagonal,
                            const CameraModel& cam) {
  const double w = cam.width, v = cam.height;
  if (inside_open(center.x, (w - side) / 2.0, (w + side) / 2.0) &&
      inside_open(center.y, (v - side) / 2.0, (v + side) / 2.0)) {
    return RegionLabel::Safe;
  }
  if (inside_open(center.x, diagonal, w - diagonal) &&
      inside_open(center.y, diagonal, v - diagonal)) {
    return RegionLabel::Elastic;
  }
  return RegionLabel::Danger;
}

TetherState tether_state(const TagObservation& obs, const CameraModel& cam) {
  const TagGeometry g = tag_geometry(obs);
  return {std::hypot(g.center.x - cam.width / 2.0, g.center.y - cam.height / 2.0), g.center};
}

TagObservation apply_dropout(const TagObservation& obs, const DropoutModel& model, double t,
                             DropoutRng& rng) {
  TagObservation out = obs;
  if (model.in_window(t)) {
    out.detected = false;
    return out;
  }
  if (model.random_rate > 0.0 && rng.uniform() < model.random_rate) out.detected = false;
  return out;
}

double yaw_from_corners(const TagObservation& obs) {
  const auto& [a, b, c, d] = obs.corners;
  // a->d and b->c both run along the tag x axis.
  const double dx = (d.x - a.x) + (c.x - b.x);
  const double dy = (d.y - a.y) + (c.y - b.y);
  return wrap_angle(std::atan2(dy, dx));
}

RigidTransform estimate_tag_pose(const TagObservation& obs, const CameraModel& cam,
                                 const TagModel& tag) {
  if (!obs.detected) throw NotDetected("pose requested for an undetected tag");
  const auto model = tag_corners(tag);

  // DLT with h33 = 1 on normalised image coordinates.
  Eigen::Matrix<double, 8, 8> a;
  Eigen::Matrix<double, 8, 1> rhs;
  for (int i = 0; i < 4; ++i) {
    const double X = model[i].x(), Y = model[i].y();
    const double u = (obs.corners[i].x - cam.width / 2.0) / cam.focal_length;
    const double v = (obs.corners[i].y - cam.height / 2.0) / cam.focal_length;
    a.row(2 * i) << X, Y, 1.0, 0.0, 0.0, 0.0, -u * X, -u * Y;
    a.row(2 * i + 1) << 0.0, 0.0, 0.0, X, Y, 1.0, -v * X, -v * Y;
    rhs(2 * i) = u;
    rhs(2 * i + 1) = v;
  }
  const Eigen::Matrix<double, 8, 1> h = a.fullPivLu().solve(rhs);
  Mat3 hm;
  hm << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), 1.0;

  double scale = 2.0 / (hm.col(0).norm() + hm.col(1).norm());
  if (hm(2, 2) * scale < 0.0) scale = -scale;  // tag in front of the camera
  const Vec3 r1 = hm.col(0) * scale;
  const Vec3 r2 = hm.col(1) * scale;
  Mat3 r;
  r << r1, r2, r1.cross(r2);
  Eigen::JacobiSVD<Mat3> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 rot = svd.matrixU() * svd.matrixV().transpose();
  if (rot.determinant() < 0.0) {
    Mat3 u = svd.matrixU();
    u.col(2) *= -1.0;
    rot = u * svd.matrixV().transpose();
  }
  return {rot, hm.col(2) * scale};
}

}  // namespace vetsim
