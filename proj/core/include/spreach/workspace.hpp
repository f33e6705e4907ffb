#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spreach/geometry.hpp"
#include "spreach/kinematics.hpp"

namespace spreach {

// Axis-aligned voxel grid in the robot base frame. Voxel (ix,iy,iz) covers
// the half-open box [origin + i*res, origin + (i+1)*res); a point exactly on
// the max face of the grid is out of bounds.
struct GridSpec {
  Point3 origin = Point3::Zero();  // minimum corner, m
  double resolution = 0.02;        // m per voxel edge
  std::array<std::uint32_t, 3> dims = {1, 1, 1};
  std::uint64_t voxel_cap = kDefaultVoxelCap;

  static constexpr std::uint64_t kDefaultVoxelCap = std::uint64_t{1} << 31;

  std::uint64_t total_voxels() const {
    return std::uint64_t{dims[0]} * dims[1] * dims[2];
  }
  Point3 max_corner() const {
    return origin + resolution * Point3(dims[0], dims[1], dims[2]);
  }
  Point3 voxel_center(std::uint32_t ix, std::uint32_t iy, std::uint32_t iz) const {
    return origin + resolution * Point3(ix + 0.5, iy + 0.5, iz + 0.5);
  }
  // Linear index, x-fastest.
  std::uint64_t linear_index(std::uint32_t ix, std::uint32_t iy, std::uint32_t iz) const {
    return ix + std::uint64_t{dims[0]} * (iy + std::uint64_t{dims[1]} * iz);
  }
  // Voxel containing `p` (floor indexing), or nullopt when out of bounds.
  std::optional<std::array<std::uint32_t, 3>> voxel_of(const Point3& p) const;

  // Throws ValidationError / ResourceLimitError on bad fields.
  void validate() const;
};

struct SamplingSpec {
  enum class Strategy { kGrid, kRandom };

  Strategy strategy = Strategy::kRandom;

  // Grid strategy: inclusive linspace per joint, full Cartesian product.
  // Joint 0 varies slowest, the last joint fastest. A count of 1 picks the
  // lower limit.
  std::vector<std::uint32_t> per_joint_counts;

  // Random strategy: exactly `total_samples` configs, each joint drawn
  // uniformly from its limits; reproducible from `seed`.
  std::uint64_t total_samples = 1'000'000;
  std::uint64_t seed = 0;

  std::uint64_t sample_cap = kDefaultSampleCap;

  static constexpr std::uint64_t kDefaultSampleCap = 100'000'000;
};

struct GridMeta {
  std::string robot_name;
  std::uint64_t sample_count = 0;
  std::uint64_t seed = 0;
  std::uint8_t dilation_radius = 0;
};

// Occupancy bit per voxel, linearized x-fastest, LSB-first within a byte.
class VoxelGrid {
 public:
  VoxelGrid(GridSpec spec, GridMeta meta);

  const GridSpec& spec() const { return spec_; }
  const GridMeta& meta() const { return meta_; }
  GridMeta& meta() { return meta_; }

  bool test(std::uint32_t ix, std::uint32_t iy, std::uint32_t iz) const {
    return test_linear(spec_.linear_index(ix, iy, iz));
  }
  bool test_linear(std::uint64_t i) const {
    return (payload_[i >> 3] >> (i & 7)) & 1;
  }
  void set(std::uint32_t ix, std::uint32_t iy, std::uint32_t iz) {
    set_linear(spec_.linear_index(ix, iy, iz));
  }
  void set_linear(std::uint64_t i) { payload_[i >> 3] |= std::uint8_t(1u << (i & 7)); }

  std::uint64_t occupied_count() const;

  std::span<const std::uint8_t> payload() const { return payload_; }
  std::span<std::uint8_t> mutable_payload() { return payload_; }

  // Bit-for-bit equality including spec and meta.
  bool operator==(const VoxelGrid& other) const;

 private:
  GridSpec spec_;
  GridMeta meta_;
  std::vector<std::uint8_t> payload_;
};

// Voxel-grid membership test: true iff `p` is inside the grid bounds and its
// voxel bit is set. Total function; NaN and out-of-bounds points map to false.
bool contains(const VoxelGrid& grid, const Point3& p);

// Number of configs `spec` will produce. Validates spec against the robot
// (counts length, positive counts, caps).
std::uint64_t sample_count(const RobotModel& robot, const SamplingSpec& spec);

// Flat row-major batch of joint configs.
struct SampleBatch {
  std::size_t joint_count = 0;
  std::vector<double> values;  // size() * joint_count entries

  std::size_t size() const { return joint_count == 0 ? 0 : values.size() / joint_count; }
  std::span<const double> config(std::size_t i) const {
    return {values.data() + i * joint_count, joint_count};
  }
};

// Materializes the full sample stream. Intended for modest counts; caps apply.
SampleBatch sample_joint_space(const RobotModel& robot, const SamplingSpec& spec);

// Streams the sample sequence in batches of at most `batch_size` configs,
// in sequence order. The sequence is identical to sample_joint_space.
void for_each_sample_batch(const RobotModel& robot, const SamplingSpec& spec,
                           std::size_t batch_size,
                           const std::function<void(const SampleBatch&)>& fn);

struct BuildStats {
  std::uint64_t total_samples = 0;
  std::uint64_t out_of_bounds = 0;  // FK landed outside the grid; tallied, not fatal
  std::uint64_t occupied_pre_dilation = 0;
  std::uint64_t occupied = 0;
  double seconds = 0.0;
};

// Samples the joint space, marks the voxel containing each end-effector
// position, then dilates the occupancy by `dilation_radius_voxels` in the
// Chebyshev metric. Workers accumulate private bit sets merged by OR, so the
// result is bit-identical for any `threads` >= 1.
VoxelGrid build_workspace_grid(const RobotModel& robot, const SamplingSpec& sampling,
                               const GridSpec& grid, int dilation_radius_voxels,
                               int threads = 1, BuildStats* stats = nullptr);

// SPRM grid file, little-endian:
//   magic "SPRM", version u16 = 1, reserved u16,
//   origin 3xf64, resolution f64, dims 3xu32,
//   dilation u8, pad 3 bytes, sample_count u64, seed u64,
//   name length u16 + UTF-8 bytes,
//   ceil(nx*ny*nz/8) payload bytes, x-fastest, LSB-first within a byte.
void save_grid(const VoxelGrid& grid, std::ostream& out);
void save_grid(const VoxelGrid& grid, const std::filesystem::path& path);
VoxelGrid load_grid(std::istream& in, std::uint64_t voxel_cap = GridSpec::kDefaultVoxelCap);
VoxelGrid load_grid(const std::filesystem::path& path,
                    std::uint64_t voxel_cap = GridSpec::kDefaultVoxelCap);

}  // namespace spreach
