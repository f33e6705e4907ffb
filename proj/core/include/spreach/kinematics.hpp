#pragma once

#include <span>
#include <string>
#include <vector>

#include "spreach/geometry.hpp"

namespace spreach {

// One row of a Denavit-Hartenberg table, classic (distal) convention:
// the joint transform is Rz(theta) * Tz(d) * Tx(a) * Rx(alpha).
// `theta_offset` is a fixed offset added to the joint variable, so robots
// whose zero pose differs from the DH zero can share one schema.
struct DHRow {
  double theta_offset = 0.0;  // rad
  double d = 0.0;             // m, offset along z
  double a = 0.0;             // m, link length (may be negative)
  double alpha = 0.0;         // rad, twist about x
};

struct JointLimits {
  double min_rad = 0.0;
  double max_rad = 0.0;

  double range() const { return max_rad - min_rad; }
};

struct Joint {
  DHRow dh;
  JointLimits limits;
};

// Serial revolute kinematic chain plus the extrinsic calibration of the
// mounted camera. Immutable after construction; the constructor enforces
// every invariant (n >= 1, finite parameters, sane limits, rigid extrinsic).
class RobotModel {
 public:
  RobotModel(std::string name, std::vector<Joint> joints,
             Transform4 camera_to_base = Transform4::Identity());

  const std::string& name() const { return name_; }
  std::size_t dof() const { return joints_.size(); }
  const std::vector<Joint>& joints() const { return joints_; }

  // Rigid transform mapping camera-frame points into the robot base frame.
  const Transform4& camera_to_base() const { return camera_to_base_; }

 private:
  std::string name_;
  std::vector<Joint> joints_;
  Transform4 camera_to_base_;
};

using JointConfig = std::vector<double>;

// Per-joint homogeneous transform for joint variable `theta` (the effective
// angle is theta + row.theta_offset). Throws InvalidArgumentError on
// non-finite input.
Transform4 dh_transform(double theta, const DHRow& row);

// Left-to-right product of the per-joint transforms: base frame to
// end-effector frame. `q` must have exactly robot.dof() finite entries.
Transform4 forward_kinematics(const RobotModel& robot, std::span<const double> q);

// Translation column of forward_kinematics, i.e. the end-effector frame
// origin expressed in the base frame.
Point3 end_effector_position(const RobotModel& robot, std::span<const double> q);

struct LimitViolation {
  std::size_t joint_index;
  double angle;
  JointLimits limits;
};

// Empty result means every angle lies inside its limits (bounds inclusive).
std::vector<LimitViolation> validate_joint_config(const RobotModel& robot,
                                                  std::span<const double> q);

}  // namespace spreach
