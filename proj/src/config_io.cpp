#include "vetsim/config_io.hpp"

#include <set>
#include <string>
#include <vector>

#include "vetsim/errors.hpp"

namespace vetsim {
namespace {

// Strict object reader: every requested key must exist and every key in the
// object must have been requested by the time finish() runs.
class Reader {
 public:
  Reader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigInvalid(path_ + " must be an object");
  }

  const Json& at(const std::string& key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) throw ConfigInvalid("missing key " + child(key));
    return *it;
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  double number(const std::string& key) {
    const Json& v = at(key);
    if (!v.is_number()) throw ConfigInvalid(child(key) + " must be a number");
    return v.get<double>();
  }

  bool boolean(const std::string& key) {
    const Json& v = at(key);
    if (!v.is_boolean()) throw ConfigInvalid(child(key) + " must be a boolean");
    return v.get<bool>();
  }

  std::string string(const std::string& key) {
    const Json& v = at(key);
    if (!v.is_string()) throw ConfigInvalid(child(key) + " must be a string");
    return v.get<std::string>();
  }

  std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) throw ConfigInvalid("unknown key " + child(key));
    }
  }

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

Vector read_vector(const Json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigInvalid(path + " must be an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ConfigInvalid(path + " must hold numbers");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

Vec3 read_vec3(const Json& j, const std::string& path) {
  const Vector v = read_vector(j, path);
  if (v.size() != 3) throw ConfigInvalid(path + " must have 3 entries");
  return v;
}

Json vector_json(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Json transform_json(const RigidTransform& t) {
  Json rows = Json::array();
  for (int r = 0; r < 3; ++r) rows.push_back({t.rotation(r, 0), t.rotation(r, 1), t.rotation(r, 2)});
  return Json{{"translation", vector_json(t.translation)}, {"rotation", rows}};
}

// Accepts either a full rotation matrix or roll/pitch/yaw in radians.
RigidTransform read_transform(const Json& j, const std::string& path) {
  Reader r(j, path);
  const Vec3 t = read_vec3(r.at("translation"), r.child("translation"));
  RigidTransform out;
  if (r.has("rpy")) {
    const Vec3 rpy = read_vec3(r.at("rpy"), r.child("rpy"));
    out = RigidTransform::from_rpy(t, rpy.x(), rpy.y(), rpy.z());
  } else {
    const Json& rows = r.at("rotation");
    if (!rows.is_array() || rows.size() != 3) throw ConfigInvalid(r.child("rotation") + " must be 3x3");
    for (int i = 0; i < 3; ++i) out.rotation.row(i) = read_vec3(rows[i], r.child("rotation")).transpose();
    out.translation = t;
  }
  r.finish();
  return out;
}

Json params_json(const VehicleParams& p) {
  return {{"mass", vector_json(p.mass)},
          {"damping_linear", vector_json(p.damping_linear)},
          {"damping_quadratic", vector_json(p.damping_quadratic)},
          {"thrust_gain", vector_json(p.thrust_gain)},
          {"velocity_bound_linear", p.velocity_bound_linear},
          {"velocity_bound_angular", p.velocity_bound_angular},
          {"speed_bound", p.speed_bound}};
}

VehicleParams read_params(const Json& j, const std::string& path) {
  Reader r(j, path);
  VehicleParams p;
  p.mass = read_vector(r.at("mass"), r.child("mass"));
  p.damping_linear = read_vector(r.at("damping_linear"), r.child("damping_linear"));
  p.damping_quadratic = read_vector(r.at("damping_quadratic"), r.child("damping_quadratic"));
  p.thrust_gain = read_vector(r.at("thrust_gain"), r.child("thrust_gain"));
  p.velocity_bound_linear = r.number("velocity_bound_linear");
  p.velocity_bound_angular = r.number("velocity_bound_angular");
  p.speed_bound = r.number("speed_bound");
  r.finish();
  return p;
}

Json camera_json(const CameraModel& c) {
  return {{"width", c.width}, {"height", c.height}, {"focal_length", c.focal_length},
          {"mount", transform_json(c.mount)}};
}

CameraModel read_camera(const Json& j, const std::string& path) {
  Reader r(j, path);
  CameraModel c;
  c.width = r.number("width");
  c.height = r.number("height");
  c.focal_length = r.number("focal_length");
  c.mount = read_transform(r.at("mount"), r.child("mount"));
  r.finish();
  return c;
}

Json tag_json(const TagModel& t) {
  return {{"side_length", t.side_length}, {"mount", transform_json(t.mount)}};
}

TagModel read_tag(const Json& j, const std::string& path) {
  Reader r(j, path);
  TagModel t;
  t.side_length = r.number("side_length");
  t.mount = read_transform(r.at("mount"), r.child("mount"));
  r.finish();
  return t;
}

Json pd_json(const PdGains& g) { return {{"kp", vector_json(g.kp)}, {"kd", vector_json(g.kd)}}; }

PdGains read_pd(const Json& j, const std::string& path) {
  Reader r(j, path);
  PdGains g{read_vector(r.at("kp"), r.child("kp")), read_vector(r.at("kd"), r.child("kd"))};
  r.finish();
  return g;
}

Json dropout_json(const DropoutModel& d) {
  Json windows = Json::array();
  for (const auto& [a, b] : d.windows) windows.push_back({a, b});
  return {{"windows", windows}, {"random_rate", d.random_rate}};
}

DropoutModel read_dropout(const Json& j, const std::string& path) {
  Reader r(j, path);
  DropoutModel d;
  const Json& windows = r.at("windows");
  if (!windows.is_array()) throw ConfigInvalid(r.child("windows") + " must be an array");
  for (const auto& w : windows) {
    const Vector v = read_vector(w, r.child("windows"));
    if (v.size() != 2) throw ConfigInvalid(r.child("windows") + " entries must be [start, end]");
    d.windows.emplace_back(v[0], v[1]);
  }
  d.random_rate = r.number("random_rate");
  r.finish();
  return d;
}

Json target_json(const SurfaceTarget& t) { return {{"x", t.x}, {"y", t.y}, {"psi", t.psi}}; }

Json planner_json(const PlannerSpec& plan) {
  if (const auto* sp = std::get_if<SetpointPlanner>(&plan)) {
    Json wps = Json::array();
    for (const auto& w : sp->waypoints) wps.push_back(target_json(w));
    return {{"type", "setpoints"},
            {"waypoints", wps},
            {"capture_radius", sp->capture_radius},
            {"speed", sp->speed}};
  }
  const auto& lm = std::get<LawnmowerPlanner>(plan);
  return {{"type", "lawnmower"},     {"x_min", lm.x_min},
          {"x_max", lm.x_max},       {"y_min", lm.y_min},
          {"y_max", lm.y_max},       {"lane_spacing", lm.lane_spacing},
          {"speed", lm.speed},       {"capture_radius", lm.capture_radius}};
}

PlannerSpec read_planner(const Json& j, const std::string& path) {
  Reader r(j, path);
  const std::string type = r.string("type");
  if (type == "setpoints") {
    SetpointPlanner sp;
    const Json& wps = r.at("waypoints");
    if (!wps.is_array()) throw ConfigInvalid(r.child("waypoints") + " must be an array");
    for (const auto& w : wps) {
      Reader wr(w, r.child("waypoints"));
      sp.waypoints.push_back({wr.number("x"), wr.number("y"), wr.number("psi")});
      wr.finish();
    }
    sp.capture_radius = r.number("capture_radius");
    sp.speed = r.number("speed");
    r.finish();
    return sp;
  }
  if (type == "lawnmower") {
    LawnmowerPlanner lm;
    lm.x_min = r.number("x_min");
    lm.x_max = r.number("x_max");
    lm.y_min = r.number("y_min");
    lm.y_max = r.number("y_max");
    lm.lane_spacing = r.number("lane_spacing");
    lm.speed = r.number("speed");
    lm.capture_radius = r.number("capture_radius");
    r.finish();
    return lm;
  }
  throw ConfigInvalid(r.child("type") + " must be 'setpoints' or 'lawnmower'");
}

Json disturbance_json(const Disturbance& d) {
  return {{"force", vector_json(d.force)},
          {"torque", vector_json(d.torque)},
          {"t_start", d.t_start},
          {"t_end", d.t_end},
          {"trigger_y", d.trigger_y ? Json(*d.trigger_y) : Json(nullptr)}};
}

Disturbance read_disturbance(const Json& j, const std::string& path) {
  Reader r(j, path);
  Disturbance d;
  d.force = read_vec3(r.at("force"), r.child("force"));
  d.torque = read_vec3(r.at("torque"), r.child("torque"));
  d.t_start = r.number("t_start");
  d.t_end = r.number("t_end");
  const Json& trig = r.at("trigger_y");
  if (trig.is_number()) {
    d.trigger_y = trig.get<double>();
  } else if (!trig.is_null()) {
    throw ConfigInvalid(r.child("trigger_y") + " must be a number or null");
  }
  r.finish();
  return d;
}

}  // namespace

Json config_to_json(const ScenarioConfig& c) {
  Json perturbations = Json::array();
  for (const auto& d : c.perturbations) perturbations.push_back(disturbance_json(d));
  const auto& u = c.underwater_initial;
  return {
      {"name", c.name},
      {"tank",
       {{"x_min", c.tank.x_min},
        {"x_max", c.tank.x_max},
        {"y_min", c.tank.y_min},
        {"y_max", c.tank.y_max},
        {"depth", c.tank.depth}}},
      {"dt", c.dt},
      {"duration", c.duration},
      {"underwater_initial",
       {{"x", u.x},
        {"y", u.y},
        {"z", u.z},
        {"phi", u.attitude.phi},
        {"theta", u.attitude.theta},
        {"psi", u.attitude.psi}}},
      {"surface_initial", {{"x", c.surface_initial.x}, {"y", c.surface_initial.y}, {"psi", c.surface_initial.psi}}},
      {"underwater_params", params_json(c.underwater_params)},
      {"surface_params", params_json(c.surface_params)},
      {"underwater_camera", camera_json(c.underwater_camera)},
      {"surface_camera", camera_json(c.surface_camera)},
      {"underwater_tag", tag_json(c.underwater_tag)},
      {"surface_tag", tag_json(c.surface_tag)},
      {"underwater_pd", pd_json(c.underwater_pd)},
      {"surface_pd", pd_json(c.surface_pd)},
      {"underwater_target",
       {{"z", c.underwater_target.z}, {"phi", c.underwater_target.phi}, {"theta", c.underwater_target.theta}}},
      {"vet",
       {{"k_safe_p", c.vet.k_safe_p},
        {"k_elastic_p", c.vet.k_elastic_p},
        {"k_elastic_d", c.vet.k_elastic_d},
        {"k_psi", c.vet.k_psi},
        {"u_max_x", c.vet.u_max_x},
        {"u_max_y", c.vet.u_max_y},
        {"derivative_time_constant", c.vet.derivative_time_constant},
        {"hold_half_life", c.vet.hold_half_life}}},
      {"mode", std::string(to_string(c.mode))},
      {"planner", planner_json(c.planner)},
      {"perturbations", perturbations},
      {"underwater_dropout", dropout_json(c.underwater_dropout)},
      {"surface_dropout", dropout_json(c.surface_dropout)},
      {"seed", c.seed},
      {"formation_threshold", c.formation_threshold},
      {"surface_mirrored_jacobian", c.surface_mirrored_jacobian},
  };
}

ScenarioConfig config_from_json(const Json& j) {
  Reader r(j, "");
  ScenarioConfig c;
  c.name = r.string("name");
  {
    Reader t(r.at("tank"), "tank");
    c.tank = {t.number("x_min"), t.number("x_max"), t.number("y_min"), t.number("y_max"),
              t.number("depth")};
    t.finish();
  }
  c.dt = r.number("dt");
  c.duration = r.number("duration");
  {
    Reader p(r.at("underwater_initial"), "underwater_initial");
    c.underwater_initial = {p.number("x"), p.number("y"), p.number("z"),
                            {p.number("phi"), p.number("theta"), p.number("psi")}};
    p.finish();
  }
  {
    Reader p(r.at("surface_initial"), "surface_initial");
    c.surface_initial = {p.number("x"), p.number("y"), p.number("psi")};
    p.finish();
  }
  c.underwater_params = read_params(r.at("underwater_params"), "underwater_params");
  c.surface_params = read_params(r.at("surface_params"), "surface_params");
  c.underwater_camera = read_camera(r.at("underwater_camera"), "underwater_camera");
  c.surface_camera = read_camera(r.at("surface_camera"), "surface_camera");
  c.underwater_tag = read_tag(r.at("underwater_tag"), "underwater_tag");
  c.surface_tag = read_tag(r.at("surface_tag"), "surface_tag");
  c.underwater_pd = read_pd(r.at("underwater_pd"), "underwater_pd");
  c.surface_pd = read_pd(r.at("surface_pd"), "surface_pd");
  {
    Reader t(r.at("underwater_target"), "underwater_target");
    c.underwater_target = {t.number("z"), t.number("phi"), t.number("theta")};
    t.finish();
  }
  {
    Reader v(r.at("vet"), "vet");
    c.vet.k_safe_p = v.number("k_safe_p");
    c.vet.k_elastic_p = v.number("k_elastic_p");
    c.vet.k_elastic_d = v.number("k_elastic_d");
    c.vet.k_psi = v.number("k_psi");
    c.vet.u_max_x = v.number("u_max_x");
    c.vet.u_max_y = v.number("u_max_y");
    c.vet.derivative_time_constant = v.number("derivative_time_constant");
    c.vet.hold_half_life = v.number("hold_half_life");
    v.finish();
  }
  c.mode = parse_controller_mode(r.string("mode"));
  c.planner = read_planner(r.at("planner"), "planner");
  const Json& perturbations = r.at("perturbations");
  if (!perturbations.is_array()) throw ConfigInvalid("perturbations must be an array");
  for (const auto& d : perturbations) c.perturbations.push_back(read_disturbance(d, "perturbations"));
  c.underwater_dropout = read_dropout(r.at("underwater_dropout"), "underwater_dropout");
  c.surface_dropout = read_dropout(r.at("surface_dropout"), "surface_dropout");
  const Json& seed = r.at("seed");
  if (!seed.is_number_integer() || (seed.is_number_integer() && !seed.is_number_unsigned() && seed.get<long long>() < 0)) {
    throw ConfigInvalid("seed must be a non-negative integer");
  }
  c.seed = seed.get<std::uint64_t>();
  c.formation_threshold = r.number("formation_threshold");
  c.surface_mirrored_jacobian = r.boolean("surface_mirrored_jacobian");
  r.finish();
  return c;
}

Json resolve_document(const Json& partial) {
  if (!partial.is_object()) throw ConfigInvalid("configuration must be a JSON object");
  Json doc;
  Json rest = partial;
  if (partial.contains("preset")) {
    if (!partial["preset"].is_string()) throw ConfigInvalid("preset must be a string");
    doc = config_to_json(preset(partial["preset"].get<std::string>()));
    rest.erase("preset");
  } else {
    doc = config_to_json(ScenarioConfig{});
  }
  // A planner of a different type replaces the base planner instead of merging.
  if (rest.contains("planner") && rest["planner"].is_object() && rest["planner"].contains("type") &&
      rest["planner"]["type"] != doc["planner"]["type"]) {
    doc["planner"] = rest["planner"];
    rest.erase("planner");
  }
  doc.merge_patch(rest);
  return doc;
}

void apply_override(Json& doc, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ConfigInvalid("override must look like key.path=value: '" + std::string(assignment) + "'");
  }
  const std::string path(assignment.substr(0, eq));
  const std::string text(assignment.substr(eq + 1));

  Json value = Json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  Json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) throw ConfigInvalid("empty segment in override path '" + path + "'");
    Json* next = nullptr;
    if (node->is_array()) {
      std::size_t idx = 0;
      try {
        idx = std::stoul(key);
      } catch (const std::exception&) {
        throw ConfigInvalid("override path '" + path + "' indexes an array with '" + key + "'");
      }
      if (idx >= node->size()) throw ConfigInvalid("override index out of range in '" + path + "'");
      next = &(*node)[idx];
    } else if (node->is_object()) {
      if (!node->contains(key)) throw ConfigInvalid("unknown override key '" + path + "'");
      next = &(*node)[key];
    } else {
      throw ConfigInvalid("override path '" + path + "' descends into a scalar");
    }
    if (dot == std::string::npos) {
      *next = value;
      return;
    }
    node = next;
    start = dot + 1;
  }
}

Json parse_json_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigParse(std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace vetsim
