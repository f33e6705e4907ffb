#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "spreach/image.hpp"
#include "spreach/pointcloud.hpp"
#include "spreach/workspace.hpp"

namespace spreach {

enum class PixelClass : std::uint8_t {
  kUnreachable = 0,
  kInvalid = 1,  // source pixel had no valid depth
  kReachable = 2,
};

// Per-pixel reachability classification of one egocentric view.
struct SPMap {
  int width = 0;
  int height = 0;
  std::vector<PixelClass> classes;  // row-major

  // Provenance of the inputs this map was computed from.
  std::string robot_name;
  std::uint64_t grid_hash = 0;
  std::uint64_t intrinsics_hash = 0;

  PixelClass at(int u, int v) const { return classes[std::size_t(v) * width + u]; }
  // (reachable, unreachable, invalid); always sums to width*height.
  std::array<std::uint64_t, 3> class_counts() const;
};

struct RenderStyle {
  enum class InvalidPolicy : std::uint8_t { kTreatAsUnreachable, kLeaveUntouched };

  std::array<std::uint8_t, 3> gray = {128, 128, 128};
  double gray_alpha = 0.6;  // in [0, 1]
  std::array<std::uint8_t, 3> boundary = {255, 255, 255};
  int boundary_thickness = 2;  // px, >= 1
  InvalidPolicy invalid_policy = InvalidPolicy::kTreatAsUnreachable;

  void validate() const;
};

// Opaque provenance fingerprints (FNV-1a over the serialized fields).
std::uint64_t grid_fingerprint(const VoxelGrid& grid);
std::uint64_t intrinsics_fingerprint(const CameraIntrinsics& k);

// Full classification pass: unproject every pixel (stride 1), transform into
// the base frame, look each point up in the workspace grid, and scatter the
// verdicts back through pixel provenance. Pixels without a valid depth
// reading are kInvalid regardless of grid or extrinsics.
SPMap classify_pixels(const DepthImage& depth, const CameraIntrinsics& k,
                      const Transform4& extrinsics, const VoxelGrid& grid);

// Overlay renderer. Reachable pixels are untouched; unreachable pixels (and
// invalid ones, per policy) are alpha-blended toward the style gray; the
// boundary (unreachable pixels 4-adjacent to a reachable pixel, thickened
// inward by thickness-1) is painted with the boundary color.
ImageRgb8 render_spmap(const ImageRgb8& rgb, const SPMap& map, const RenderStyle& style);

// Single-channel export: 0 = unreachable, 128 = invalid, 255 = reachable.
ImageGray8 semantic_image(const SPMap& map);

struct SPMapResult {
  SPMap map;
  ImageRgb8 rendered;
  std::vector<std::string> warnings;
};

// classify_pixels + render_spmap. If `expected_robot` is non-empty and does
// not match the grid's provenance, a warning is recorded (not fatal).
SPMapResult build_spmap(const ImageRgb8& rgb, const DepthImage& depth,
                        const CameraIntrinsics& k, const Transform4& extrinsics,
                        const VoxelGrid& grid, const RenderStyle& style,
                        std::string_view expected_robot = {});

}  // namespace spreach
