#include "spreach/robot_config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "spreach/errors.hpp"

namespace spreach {

namespace {

using nlohmann::json;

void reject_unknown_fields(const json& obj, const std::set<std::string>& known,
                           const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (!known.contains(key)) {
      throw ValidationError(where + ": unknown field \"" + key + "\"");
    }
  }
}

double require_number(const json& obj, const std::string& field, const std::string& where) {
  if (!obj.contains(field)) throw ValidationError(where + "." + field + ": missing");
  const json& v = obj.at(field);
  if (!v.is_number()) throw ValidationError(where + "." + field + ": expected a number");
  return v.get<double>();
}

}  // namespace

RobotModel load_robot_model(std::string_view config_text) {
  json doc;
  try {
    doc = json::parse(config_text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("robot config: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("robot config: top level must be an object");

  reject_unknown_fields(doc, {"name", "dof", "convention", "joints", "extrinsics"},
                        "robot config");

  if (!doc.contains("name") || !doc.at("name").is_string()) {
    throw ValidationError("name: missing or not a string");
  }
  const auto name = doc.at("name").get<std::string>();

  if (doc.contains("convention")) {
    const json& c = doc.at("convention");
    if (!c.is_string() || c.get<std::string>() != "classic") {
      throw ValidationError(
          "convention: only the classic (distal) DH convention is supported");
    }
  }

  if (!doc.contains("dof") || !doc.at("dof").is_number_integer()) {
    throw ValidationError("dof: missing or not an integer");
  }
  const auto dof = doc.at("dof").get<std::int64_t>();
  if (dof < 1) throw ValidationError("dof: must be >= 1");

  if (!doc.contains("joints") || !doc.at("joints").is_array()) {
    throw ValidationError("joints: missing or not an array");
  }
  const json& joints_json = doc.at("joints");
  if (std::int64_t(joints_json.size()) != dof) {
    throw ValidationError("joints: " + std::to_string(joints_json.size()) +
                          " entries but dof is " + std::to_string(dof));
  }

  std::vector<Joint> joints;
  joints.reserve(joints_json.size());
  for (std::size_t i = 0; i < joints_json.size(); ++i) {
    const std::string where = "joints[" + std::to_string(i) + "]";
    const json& jj = joints_json.at(i);
    if (!jj.is_object()) throw ValidationError(where + ": expected an object");
    reject_unknown_fields(jj,
                          {"theta_offset_rad", "d_m", "a_m", "alpha_rad",
                           "limit_min_rad", "limit_max_rad", "type"},
                          where);
    if (jj.contains("type")) {
      const json& t = jj.at("type");
      if (!t.is_string() || t.get<std::string>() != "revolute") {
        throw ValidationError(where + ".type: only revolute joints are supported");
      }
    }
    Joint joint;
    joint.dh.theta_offset = require_number(jj, "theta_offset_rad", where);
    joint.dh.d = require_number(jj, "d_m", where);
    joint.dh.a = require_number(jj, "a_m", where);
    joint.dh.alpha = require_number(jj, "alpha_rad", where);
    joint.limits.min_rad = require_number(jj, "limit_min_rad", where);
    joint.limits.max_rad = require_number(jj, "limit_max_rad", where);
    if (joint.limits.min_rad > joint.limits.max_rad) {
      throw ValidationError(where + ".limits: min > max");
    }
    joints.push_back(joint);
  }

  if (!doc.contains("extrinsics") || !doc.at("extrinsics").is_array() ||
      doc.at("extrinsics").size() != 16) {
    throw ValidationError("extrinsics: expected 16 numbers (row-major camera->base)");
  }
  Transform4 extrinsics;
  for (int i = 0; i < 16; ++i) {
    const json& v = doc.at("extrinsics").at(i);
    if (!v.is_number()) throw ValidationError("extrinsics: entry " + std::to_string(i) +
                                              " is not a number");
    extrinsics(i / 4, i % 4) = v.get<double>();
  }

  try {
    return RobotModel(name, std::move(joints), extrinsics);
  } catch (const ValidationError& e) {
    // Re-scope constructor messages to the config fields they came from.
    throw ValidationError(std::string("robot config: ") + e.what());
  }
}

RobotModel load_robot_model_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open robot config: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError("failed reading robot config: " + path.string());
  return load_robot_model(buffer.str());
}

}  // namespace spreach
