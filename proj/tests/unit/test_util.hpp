#pragma once

// Include after doctest.h; the file helpers use REQUIRE_MESSAGE.

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "spreach/kinematics.hpp"

namespace spreach::test {

inline double max_abs_diff(const Transform4& a, const Transform4& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

// Planar two-link arm, both joints free over +-pi unless narrowed.
inline RobotModel make_planar_2r(double a1 = 0.5, double a2 = 0.5,
                                 double limit = 3.14159265358979323846) {
  std::vector<Joint> joints(2);
  joints[0].dh.a = a1;
  joints[1].dh.a = a2;
  for (auto& j : joints) j.limits = {-limit, limit};
  return RobotModel("planar-2r", std::move(joints));
}

// Closed-form planar position: x = sum a_i cos(theta_1+..+theta_i), same with
// sin for y.
inline Point3 planar_2r_position(double a1, double a2, double q1, double q2) {
  return {a1 * std::cos(q1) + a2 * std::cos(q1 + q2),
          a1 * std::sin(q1) + a2 * std::sin(q1 + q2), 0.0};
}

// Second FK path for cross-checks, built from Eigen isometries instead of the
// closed-form DH matrix.
inline Transform4 fk_isometry_oracle(const RobotModel& robot, std::span<const double> q) {
  Eigen::Isometry3d t = Eigen::Isometry3d::Identity();
  for (std::size_t i = 0; i < q.size(); ++i) {
    const DHRow& row = robot.joints()[i].dh;
    Eigen::Isometry3d g = Eigen::Isometry3d::Identity();
    g.rotate(Eigen::AngleAxisd(q[i] + row.theta_offset, Eigen::Vector3d::UnitZ()));
    g.translate(Eigen::Vector3d(0.0, 0.0, row.d));
    g.translate(Eigen::Vector3d(row.a, 0.0, 0.0));
    g.rotate(Eigen::AngleAxisd(row.alpha, Eigen::Vector3d::UnitX()));
    t = t * g;
  }
  return t.matrix();
}

inline RobotModel random_robot(std::mt19937_64& rng, std::size_t max_joints = 8) {
  const std::size_t n = 1 + rng() % max_joints;
  std::uniform_real_distribution<double> angle(-3.141592653589793, 3.141592653589793);
  std::uniform_real_distribution<double> length(-2.0, 2.0);
  std::vector<Joint> joints(n);
  for (auto& j : joints) {
    j.dh = {angle(rng), length(rng), length(rng), angle(rng)};
    j.limits = {-3.141592653589793, 3.141592653589793};
  }
  return RobotModel("random", std::move(joints));
}

inline JointConfig random_config(const RobotModel& robot, std::mt19937_64& rng) {
  JointConfig q(robot.dof());
  for (std::size_t i = 0; i < q.size(); ++i) {
    const auto& limits = robot.joints()[i].limits;
    std::uniform_real_distribution<double> dist(limits.min_rad, limits.max_rad);
    q[i] = dist(rng);
  }
  return q;
}

inline std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE_MESSAGE(bool(in), "cannot open " << path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file_bytes(const std::filesystem::path& path,
                             const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  REQUIRE_MESSAGE(bool(out), "cannot write " << path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
}

inline std::filesystem::path temp_dir(const std::string& tag) {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("spreach-test-" + tag + "-" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace spreach::test
