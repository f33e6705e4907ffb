#pragma once

// Synthetic end-to-end scene with a closed-form per-pixel oracle.
//
// A planar two-link arm (links 0.4 m + 0.4 m, shoulder raised 0.6 m) sweeps
// the full disk of radius 0.8 m in the plane z = 0.6; the grid is cropped to
// y >= 0, so the effective workspace is the half-disk
//   { (x, y): x^2 + y^2 <= 0.8^2, y >= 0 }   at z = 0.6.
// The camera sits at the base (identity extrinsics) looking down +z at a
// fronto-parallel plane of constant depth 0.6 m, so every pixel unprojects
// into the workspace plane and reachability is exactly the half-disk test,
// up to voxel quantization along the arc. An invalid-depth patch in the top
// left corner exercises the third pixel class.
//
// The fixture parameters are frozen: golden images and the acceptance
// thresholds depend on them.

#include <string>
#include <vector>

#include "spreach/pointcloud.hpp"
#include "spreach/spmap.hpp"
#include "spreach/workspace.hpp"

namespace spreach::test {

inline constexpr double kHalfdiscRadius = 0.8;
inline constexpr double kHalfdiscPlaneZ = 0.6;
inline constexpr int kHalfdiscInvalidW = 40;
inline constexpr int kHalfdiscInvalidH = 20;
inline constexpr int kHalfdiscDilation = 1;

inline const char* halfdisc_robot_json() {
  return R"({
  "name": "halfdisc-2r",
  "dof": 2,
  "convention": "classic",
  "joints": [
    {"theta_offset_rad": 0.0, "d_m": 0.6, "a_m": 0.4, "alpha_rad": 0.0,
     "limit_min_rad": -3.141592653589793, "limit_max_rad": 3.141592653589793},
    {"theta_offset_rad": 0.0, "d_m": 0.0, "a_m": 0.4, "alpha_rad": 0.0,
     "limit_min_rad": -3.141592653589793, "limit_max_rad": 3.141592653589793}
  ],
  "extrinsics": [1,0,0,0, 0,1,0,0, 0,0,1,0, 0,0,0,1]
})";
}

inline RobotModel halfdisc_robot() {
  std::vector<Joint> joints(2);
  joints[0].dh.d = kHalfdiscPlaneZ;
  joints[0].dh.a = 0.4;
  joints[1].dh.a = 0.4;
  for (auto& j : joints) j.limits = {-3.141592653589793, 3.141592653589793};
  return RobotModel("halfdisc-2r", std::move(joints));
}

// Cropped to y >= 0; the z range is centered so that the sample plane and the
// float32 depth plane land in the same voxel layer.
inline GridSpec halfdisc_grid_spec() {
  GridSpec spec;
  spec.origin = Point3(-0.85, 0.0, 0.545);
  spec.resolution = 0.01;
  spec.dims = {170, 85, 10};
  return spec;
}

inline SamplingSpec halfdisc_sampling() {
  SamplingSpec sampling;
  sampling.strategy = SamplingSpec::Strategy::kRandom;
  sampling.total_samples = 400'000;
  sampling.seed = 7;
  return sampling;
}

inline VoxelGrid halfdisc_grid(int threads = 1) {
  return build_workspace_grid(halfdisc_robot(), halfdisc_sampling(),
                              halfdisc_grid_spec(), kHalfdiscDilation, threads);
}

inline CameraIntrinsics halfdisc_intrinsics() {
  return CameraIntrinsics{60.0, 60.0, 160.0, 60.0, 320, 240};
}

inline bool halfdisc_pixel_invalid(int u, int v) {
  return u < kHalfdiscInvalidW && v < kHalfdiscInvalidH;
}

inline DepthImage halfdisc_depth() {
  const CameraIntrinsics k = halfdisc_intrinsics();
  std::vector<float> meters(std::size_t(k.width) * k.height, float(kHalfdiscPlaneZ));
  for (int v = 0; v < kHalfdiscInvalidH; ++v) {
    for (int u = 0; u < kHalfdiscInvalidW; ++u) {
      meters[std::size_t(v) * k.width + u] = 0.0f;
    }
  }
  return DepthImage(k.width, k.height, std::move(meters));
}

inline ImageGray16 halfdisc_depth_png() {
  const CameraIntrinsics k = halfdisc_intrinsics();
  ImageGray16 mm;
  mm.width = k.width;
  mm.height = k.height;
  mm.pixels.assign(std::size_t(k.width) * k.height, 600);  // 0.6 m
  for (int v = 0; v < kHalfdiscInvalidH; ++v) {
    for (int u = 0; u < kHalfdiscInvalidW; ++u) {
      mm.pixels[std::size_t(v) * k.width + u] = 0;
    }
  }
  return mm;
}

inline ImageRgb8 halfdisc_rgb() {
  const CameraIntrinsics k = halfdisc_intrinsics();
  ImageRgb8 rgb;
  rgb.width = k.width;
  rgb.height = k.height;
  rgb.pixels.resize(std::size_t(3) * k.width * k.height);
  for (int v = 0; v < k.height; ++v) {
    for (int u = 0; u < k.width; ++u) {
      std::uint8_t* px = rgb.at(u, v);
      px[0] = std::uint8_t((u * 255) / (k.width - 1));
      px[1] = std::uint8_t((v * 255) / (k.height - 1));
      px[2] = std::uint8_t(((u + v) * 255) / (k.width + k.height - 2));
    }
  }
  return rgb;
}

// Analytic per-pixel oracle: exact point-in-half-disk in the depth plane.
inline PixelClass halfdisc_expected_class(int u, int v) {
  if (halfdisc_pixel_invalid(u, v)) return PixelClass::kInvalid;
  const CameraIntrinsics k = halfdisc_intrinsics();
  const double x = (u - k.cx) * kHalfdiscPlaneZ / k.fx;
  const double y = (v - k.cy) * kHalfdiscPlaneZ / k.fy;
  const bool inside =
      y >= 0.0 && x * x + y * y <= kHalfdiscRadius * kHalfdiscRadius;
  return inside ? PixelClass::kReachable : PixelClass::kUnreachable;
}

// Fraction of pixels where the pipeline agrees with the oracle.
inline double halfdisc_agreement(const SPMap& map) {
  std::uint64_t agree = 0;
  for (int v = 0; v < map.height; ++v) {
    for (int u = 0; u < map.width; ++u) {
      if (map.at(u, v) == halfdisc_expected_class(u, v)) ++agree;
    }
  }
  return double(agree) / (double(map.width) * map.height);
}

}  // namespace spreach::test
