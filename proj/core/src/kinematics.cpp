#include "spreach/kinematics.hpp"

#include <cmath>
#include <numbers>
#include <utility>

#include "spreach/errors.hpp"

namespace spreach {

namespace {

constexpr double kLimitRangeSlack = 1e-9;  // revolute range sanity: max-min <= 2*pi + slack

bool all_finite(std::span<const double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace

RobotModel::RobotModel(std::string name, std::vector<Joint> joints,
                       Transform4 camera_to_base)
    : name_(std::move(name)), joints_(std::move(joints)),
      camera_to_base_(std::move(camera_to_base)) {
  if (name_.empty()) throw ValidationError("robot name must be non-empty");
  if (joints_.empty()) throw ValidationError("robot must have at least one joint");
  for (std::size_t i = 0; i < joints_.size(); ++i) {
    const auto& j = joints_[i];
    const double fields[] = {j.dh.theta_offset, j.dh.d, j.dh.a, j.dh.alpha,
                             j.limits.min_rad, j.limits.max_rad};
    if (!all_finite(fields)) {
      throw ValidationError("joints[" + std::to_string(i) + "]: non-finite parameter");
    }
    if (j.limits.min_rad > j.limits.max_rad) {
      throw ValidationError("joints[" + std::to_string(i) + "].limits: min > max");
    }
    if (j.limits.range() > 2.0 * std::numbers::pi + kLimitRangeSlack) {
      throw ValidationError("joints[" + std::to_string(i) +
                            "].limits: range exceeds 2*pi");
    }
  }
  require_rigid(camera_to_base_, "extrinsics");
}

Transform4 dh_transform(double theta, const DHRow& row) {
  const double fields[] = {theta, row.theta_offset, row.d, row.a, row.alpha};
  if (!all_finite(fields)) {
    throw InvalidArgumentError("dh_transform: non-finite input");
  }
  const double t = theta + row.theta_offset;
  const double ct = std::cos(t), st = std::sin(t);
  const double ca = std::cos(row.alpha), sa = std::sin(row.alpha);
  // Rz(theta) * Tz(d) * Tx(a) * Rx(alpha), classic (distal) convention.
  Transform4 m;
  m << ct, -st * ca,  st * sa, row.a * ct,
       st,  ct * ca, -ct * sa, row.a * st,
      0.0,       sa,       ca,      row.d,
      0.0,      0.0,      0.0,        1.0;
  return m;
}

Transform4 forward_kinematics(const RobotModel& robot, std::span<const double> q) {
  if (q.size() != robot.dof()) {
    throw InvalidArgumentError("forward_kinematics: config has " +
                               std::to_string(q.size()) + " angles, robot has " +
                               std::to_string(robot.dof()) + " joints");
  }
  Transform4 t = Transform4::Identity();
  for (std::size_t i = 0; i < q.size(); ++i) {
    t = t * dh_transform(q[i], robot.joints()[i].dh);
  }
  return t;
}

Point3 end_effector_position(const RobotModel& robot, std::span<const double> q) {
  return forward_kinematics(robot, q).topRightCorner<3, 1>();
}

std::vector<LimitViolation> validate_joint_config(const RobotModel& robot,
                                                  std::span<const double> q) {
  if (q.size() != robot.dof()) {
    throw InvalidArgumentError("validate_joint_config: config has " +
                               std::to_string(q.size()) + " angles, robot has " +
                               std::to_string(robot.dof()) + " joints");
  }
  std::vector<LimitViolation> violations;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const auto& limits = robot.joints()[i].limits;
    if (!(q[i] >= limits.min_rad && q[i] <= limits.max_rad)) {
      violations.push_back({i, q[i], limits});
    }
  }
  return violations;
}

}  // namespace spreach
