#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "spreach/geometry.hpp"
#include "spreach/workspace.hpp"

namespace spreach {

// Pinhole model, zero distortion. Distorted inputs must be rectified upstream.
struct CameraIntrinsics {
  double fx = 0.0;  // px
  double fy = 0.0;  // px
  double cx = 0.0;  // px
  double cy = 0.0;  // px
  int width = 0;
  int height = 0;

  // Throws ValidationError on non-positive focal lengths or dims.
  void validate() const;
};

// Egocentric depth in meters. A reading is valid iff it is finite, strictly
// positive, and below max_range; 0 and non-finite both mean "no reading".
class DepthImage {
 public:
  DepthImage(int width, int height, std::vector<float> meters,
             float max_range = kDefaultMaxRange);

  static constexpr float kDefaultMaxRange = 20.0f;

  int width() const { return width_; }
  int height() const { return height_; }
  float max_range() const { return max_range_; }
  float at(int u, int v) const { return meters_[std::size_t(v) * width_ + u]; }
  bool valid_at(int u, int v) const { return is_valid_depth(at(u, v), max_range_); }

  static bool is_valid_depth(float z, float max_range) {
    return std::isfinite(z) && z > 0.0f && z < max_range;
  }

 private:
  int width_;
  int height_;
  float max_range_;
  std::vector<float> meters_;
};

// Loads a depth image from either
//   - a 16-bit single-channel PNG in millimeters (value/1000 -> m, 0 invalid), or
//   - a raw little-endian float32 file (meters, row-major) with a JSON sidecar
//     at <path>.json declaring {"width": W, "height": H}.
// The PNG path is taken for a ".png" extension, the raw path otherwise.
DepthImage load_depth_image(const std::filesystem::path& path,
                            float max_range = DepthImage::kDefaultMaxRange);

enum class Frame : std::uint8_t { kCamera, kBase };

// Unordered-by-construction point list with per-point pixel provenance, so
// points can be scattered back onto the image without reprojecting.
struct PointCloud {
  Frame frame = Frame::kCamera;
  std::vector<Point3> points;
  std::vector<std::array<std::int32_t, 2>> pixels;  // source (u, v)

  std::size_t size() const { return points.size(); }
};

// Back-projects every valid pixel on the stride lattice (u, v multiples of
// `stride`) through the pinhole model: ((u-cx)z/fx, (v-cy)z/fy, z). Points
// come out in row-major pixel order.
PointCloud unproject_depth(const DepthImage& depth, const CameraIntrinsics& k,
                           int stride = 1);

// Maps a camera-frame cloud into the base frame with the extrinsic transform.
// `extrinsics` must be rigid.
PointCloud transform_cloud(const Transform4& extrinsics, const PointCloud& cloud);

using ReachMask = std::vector<std::uint8_t>;  // 1 = inside the reachable workspace

// Per-point voxel lookup; mask[i] == contains(grid, cloud.points[i]).
// The cloud must be in the base frame.
ReachMask filter_reachable(const PointCloud& cloud, const VoxelGrid& grid);

}  // namespace spreach
