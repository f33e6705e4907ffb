#include "spreach/spmap.hpp"

#include <bit>
#include <cmath>
#include <cstring>

#include "spreach/errors.hpp"

namespace spreach {

namespace {

std::uint64_t fnv1a64(const void* data, std::size_t n, std::uint64_t h = 0xcbf29ce484222325ull) {
  const auto* bytes = static_cast<const std::uint8_t*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint64_t fnv1a64_f64(double v, std::uint64_t h) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  return fnv1a64(&bits, sizeof(bits), h);
}

// 2D Chebyshev dilation of a 0/1 mask, one sliding-window pass per axis.
void dilate_mask_2d(std::vector<std::uint8_t>& mask, int width, int height, int radius) {
  if (radius <= 0) return;
  std::vector<std::uint8_t> out(mask.size(), 0);
  // Horizontal pass.
  for (int v = 0; v < height; ++v) {
    const std::size_t row = std::size_t(v) * width;
    int window = 0;
    for (int u = 0; u <= std::min(radius, width - 1); ++u) window += mask[row + u];
    for (int u = 0; u < width; ++u) {
      if (window > 0) out[row + u] = 1;
      if (u + radius + 1 < width) window += mask[row + u + radius + 1];
      if (u - radius >= 0) window -= mask[row + u - radius];
    }
  }
  mask = out;
  std::fill(out.begin(), out.end(), 0);
  // Vertical pass.
  for (int u = 0; u < width; ++u) {
    int window = 0;
    for (int v = 0; v <= std::min(radius, height - 1); ++v) {
      window += mask[std::size_t(v) * width + u];
    }
    for (int v = 0; v < height; ++v) {
      if (window > 0) out[std::size_t(v) * width + u] = 1;
      if (v + radius + 1 < height) window += mask[std::size_t(v + radius + 1) * width + u];
      if (v - radius >= 0) window -= mask[std::size_t(v - radius) * width + u];
    }
  }
  mask = std::move(out);
}

}  // namespace

std::array<std::uint64_t, 3> SPMap::class_counts() const {
  std::array<std::uint64_t, 3> counts = {0, 0, 0};
  for (PixelClass c : classes) {
    switch (c) {
      case PixelClass::kReachable: ++counts[0]; break;
      case PixelClass::kUnreachable: ++counts[1]; break;
      case PixelClass::kInvalid: ++counts[2]; break;
    }
  }
  return counts;
}

void RenderStyle::validate() const {
  if (!(gray_alpha >= 0.0 && gray_alpha <= 1.0)) {
    throw InvalidArgumentError("render style: gray_alpha must be in [0, 1]");
  }
  if (boundary_thickness < 1) {
    throw InvalidArgumentError("render style: boundary thickness must be >= 1");
  }
}

std::uint64_t grid_fingerprint(const VoxelGrid& grid) {
  std::uint64_t h = fnv1a64(grid.meta().robot_name.data(), grid.meta().robot_name.size());
  h = fnv1a64(&grid.meta().sample_count, sizeof(std::uint64_t), h);
  h = fnv1a64(&grid.meta().seed, sizeof(std::uint64_t), h);
  h = fnv1a64(&grid.meta().dilation_radius, 1, h);
  for (int a = 0; a < 3; ++a) h = fnv1a64_f64(grid.spec().origin[a], h);
  h = fnv1a64_f64(grid.spec().resolution, h);
  h = fnv1a64(grid.spec().dims.data(), sizeof(std::uint32_t) * 3, h);
  return h;
}

std::uint64_t intrinsics_fingerprint(const CameraIntrinsics& k) {
  std::uint64_t h = fnv1a64_f64(k.fx, 0xcbf29ce484222325ull);
  h = fnv1a64_f64(k.fy, h);
  h = fnv1a64_f64(k.cx, h);
  h = fnv1a64_f64(k.cy, h);
  const std::int64_t dims[2] = {k.width, k.height};
  return fnv1a64(dims, sizeof(dims), h);
}

SPMap classify_pixels(const DepthImage& depth, const CameraIntrinsics& k,
                      const Transform4& extrinsics, const VoxelGrid& grid) {
  SPMap map;
  map.width = depth.width();
  map.height = depth.height();
  map.classes.assign(std::size_t(map.width) * map.height, PixelClass::kInvalid);
  map.robot_name = grid.meta().robot_name;
  map.grid_hash = grid_fingerprint(grid);
  map.intrinsics_hash = intrinsics_fingerprint(k);

  const PointCloud camera_cloud = unproject_depth(depth, k, /*stride=*/1);
  const PointCloud base_cloud = transform_cloud(extrinsics, camera_cloud);
  const ReachMask mask = filter_reachable(base_cloud, grid);

  for (std::size_t i = 0; i < base_cloud.size(); ++i) {
    const auto [u, v] = base_cloud.pixels[i];
    map.classes[std::size_t(v) * map.width + u] =
        mask[i] ? PixelClass::kReachable : PixelClass::kUnreachable;
  }
  return map;
}

ImageRgb8 render_spmap(const ImageRgb8& rgb, const SPMap& map, const RenderStyle& style) {
  style.validate();
  if (rgb.width != map.width || rgb.height != map.height) {
    throw InvalidArgumentError("render: image is " + std::to_string(rgb.width) + "x" +
                               std::to_string(rgb.height) + ", map is " +
                               std::to_string(map.width) + "x" +
                               std::to_string(map.height));
  }

  ImageRgb8 out = rgb;
  const double alpha = style.gray_alpha;
  for (int v = 0; v < map.height; ++v) {
    for (int u = 0; u < map.width; ++u) {
      const PixelClass c = map.at(u, v);
      const bool masked =
          c == PixelClass::kUnreachable ||
          (c == PixelClass::kInvalid &&
           style.invalid_policy == RenderStyle::InvalidPolicy::kTreatAsUnreachable);
      if (!masked) continue;
      std::uint8_t* px = out.at(u, v);
      for (int ch = 0; ch < 3; ++ch) {
        px[ch] = std::uint8_t(
            std::lround((1.0 - alpha) * px[ch] + alpha * style.gray[ch]));
      }
    }
  }

  // Boundary: unreachable pixels 4-adjacent to a reachable pixel, thickened
  // into the unreachable region.
  std::vector<std::uint8_t> boundary(map.classes.size(), 0);
  bool any_boundary = false;
  for (int v = 0; v < map.height; ++v) {
    for (int u = 0; u < map.width; ++u) {
      if (map.at(u, v) != PixelClass::kUnreachable) continue;
      const bool edge =
          (u > 0 && map.at(u - 1, v) == PixelClass::kReachable) ||
          (u + 1 < map.width && map.at(u + 1, v) == PixelClass::kReachable) ||
          (v > 0 && map.at(u, v - 1) == PixelClass::kReachable) ||
          (v + 1 < map.height && map.at(u, v + 1) == PixelClass::kReachable);
      if (edge) {
        boundary[std::size_t(v) * map.width + u] = 1;
        any_boundary = true;
      }
    }
  }
  if (any_boundary && style.boundary_thickness > 1) {
    dilate_mask_2d(boundary, map.width, map.height, style.boundary_thickness - 1);
  }
  for (int v = 0; v < map.height; ++v) {
    for (int u = 0; u < map.width; ++u) {
      if (!boundary[std::size_t(v) * map.width + u]) continue;
      if (map.at(u, v) != PixelClass::kUnreachable) continue;  // clip to the region
      std::uint8_t* px = out.at(u, v);
      px[0] = style.boundary[0];
      px[1] = style.boundary[1];
      px[2] = style.boundary[2];
    }
  }
  return out;
}

ImageGray8 semantic_image(const SPMap& map) {
  ImageGray8 out;
  out.width = map.width;
  out.height = map.height;
  out.pixels.resize(map.classes.size());
  for (std::size_t i = 0; i < map.classes.size(); ++i) {
    switch (map.classes[i]) {
      case PixelClass::kUnreachable: out.pixels[i] = 0; break;
      case PixelClass::kInvalid: out.pixels[i] = 128; break;
      case PixelClass::kReachable: out.pixels[i] = 255; break;
    }
  }
  return out;
}

SPMapResult build_spmap(const ImageRgb8& rgb, const DepthImage& depth,
                        const CameraIntrinsics& k, const Transform4& extrinsics,
                        const VoxelGrid& grid, const RenderStyle& style,
                        std::string_view expected_robot) {
  SPMapResult result;
  if (!expected_robot.empty() && grid.meta().robot_name != expected_robot) {
    result.warnings.push_back("grid was built for robot \"" + grid.meta().robot_name +
                              "\" but the scene requests \"" +
                              std::string(expected_robot) + "\"");
  }
  result.map = classify_pixels(depth, k, extrinsics, grid);
  result.rendered = render_spmap(rgb, result.map, style);
  return result;
}

}  // namespace spreach
