#include <doctest.h>

#include <numbers>

#include "spreach/errors.hpp"
#include "spreach/spmap.hpp"
#include "test_util.hpp"

using namespace spreach;
using namespace spreach::test;

namespace {

CameraIntrinsics tiny_camera() {
  return CameraIntrinsics{8.0, 8.0, 4.0, 4.0, 8, 8};
}

// Depth 1 m everywhere except an invalid 2x2 corner patch.
DepthImage tiny_depth() {
  std::vector<float> meters(64, 1.0f);
  meters[0] = 0.0f;
  meters[1] = 0.0f;
  meters[8] = 0.0f;
  meters[9] = std::numeric_limits<float>::quiet_NaN();
  return DepthImage(8, 8, std::move(meters));
}

// Grid around the unprojected frustum slab at z ~ 1 m.
GridSpec tiny_grid_spec() {
  GridSpec spec;
  spec.origin = Point3(-1.0, -1.0, 0.5);
  spec.resolution = 0.125;
  spec.dims = {16, 16, 8};
  return spec;
}

VoxelGrid full_grid() {
  VoxelGrid grid(tiny_grid_spec(), GridMeta{"tiny", 1, 0, 0});
  for (std::uint64_t i = 0; i < grid.spec().total_voxels(); ++i) grid.set_linear(i);
  return grid;
}

SPMap split_map(int width, int height, int reachable_columns) {
  SPMap map;
  map.width = width;
  map.height = height;
  map.classes.assign(std::size_t(width) * height, PixelClass::kUnreachable);
  for (int v = 0; v < height; ++v) {
    for (int u = 0; u < reachable_columns; ++u) {
      map.classes[std::size_t(v) * width + u] = PixelClass::kReachable;
    }
  }
  return map;
}

ImageRgb8 gradient_rgb(int width, int height) {
  ImageRgb8 rgb;
  rgb.width = width;
  rgb.height = height;
  rgb.pixels.resize(std::size_t(3) * width * height);
  for (int v = 0; v < height; ++v) {
    for (int u = 0; u < width; ++u) {
      std::uint8_t* px = rgb.at(u, v);
      px[0] = std::uint8_t(u * 7 % 256);
      px[1] = std::uint8_t(v * 11 % 256);
      px[2] = std::uint8_t((u + 2 * v) * 5 % 256);
    }
  }
  return rgb;
}

}  // namespace

TEST_CASE("classify: full grid marks every valid pixel reachable") {
  const SPMap map =
      classify_pixels(tiny_depth(), tiny_camera(), Transform4::Identity(), full_grid());
  const auto counts = map.class_counts();
  CHECK(counts[0] == 60);  // reachable
  CHECK(counts[1] == 0);
  CHECK(counts[2] == 4);  // the invalid patch
  CHECK(map.at(0, 0) == PixelClass::kInvalid);
  CHECK(map.at(4, 4) == PixelClass::kReachable);
}

TEST_CASE("classify: empty grid marks every valid pixel unreachable") {
  const VoxelGrid empty(tiny_grid_spec(), GridMeta{"tiny", 1, 0, 0});
  const SPMap map =
      classify_pixels(tiny_depth(), tiny_camera(), Transform4::Identity(), empty);
  const auto counts = map.class_counts();
  CHECK(counts[0] == 0);
  CHECK(counts[1] == 60);
  CHECK(counts[2] == 4);
}

TEST_CASE("classify: pixel partition always holds") {
  std::mt19937_64 rng(5);
  VoxelGrid grid(tiny_grid_spec(), GridMeta{"tiny", 1, 0, 0});
  for (int i = 0; i < 300; ++i) grid.set_linear(rng() % grid.spec().total_voxels());

  std::vector<float> meters(64);
  for (auto& z : meters) {
    const double roll = double(rng() % 100) / 100.0;
    z = roll < 0.2 ? 0.0f : float(0.6 + roll);
  }
  const DepthImage depth(8, 8, std::move(meters));
  const SPMap map = classify_pixels(depth, tiny_camera(), Transform4::Identity(), grid);
  const auto counts = map.class_counts();
  CHECK(counts[0] + counts[1] + counts[2] == 64);
}

TEST_CASE("classify: growing the grid never demotes a pixel") {
  std::mt19937_64 rng(6);
  VoxelGrid sparse(tiny_grid_spec(), GridMeta{"tiny", 1, 0, 0});
  for (int i = 0; i < 100; ++i) sparse.set_linear(rng() % sparse.spec().total_voxels());
  VoxelGrid denser = sparse;
  for (int i = 0; i < 300; ++i) denser.set_linear(rng() % denser.spec().total_voxels());

  const SPMap before =
      classify_pixels(tiny_depth(), tiny_camera(), Transform4::Identity(), sparse);
  const SPMap after =
      classify_pixels(tiny_depth(), tiny_camera(), Transform4::Identity(), denser);
  for (std::size_t i = 0; i < before.classes.size(); ++i) {
    if (before.classes[i] == PixelClass::kReachable) {
      CHECK(after.classes[i] == PixelClass::kReachable);
    }
    if (before.classes[i] == PixelClass::kInvalid) {
      CHECK(after.classes[i] == PixelClass::kInvalid);
    }
  }
}

TEST_CASE("classify: invalid pixels depend only on the depth image") {
  std::mt19937_64 rng(8);
  VoxelGrid grid(tiny_grid_spec(), GridMeta{"tiny", 1, 0, 0});
  for (int i = 0; i < 200; ++i) grid.set_linear(rng() % grid.spec().total_voxels());

  Transform4 shifted = Transform4::Identity();
  shifted(0, 3) = 0.25;
  const SPMap a =
      classify_pixels(tiny_depth(), tiny_camera(), Transform4::Identity(), full_grid());
  const SPMap b = classify_pixels(tiny_depth(), tiny_camera(), shifted, grid);
  for (std::size_t i = 0; i < a.classes.size(); ++i) {
    CHECK((a.classes[i] == PixelClass::kInvalid) == (b.classes[i] == PixelClass::kInvalid));
  }
}

TEST_CASE("render: all-reachable map returns the input bit for bit") {
  SPMap map = split_map(8, 8, 8);
  const ImageRgb8 rgb = gradient_rgb(8, 8);
  const ImageRgb8 out = render_spmap(rgb, map, RenderStyle{});
  CHECK(out.pixels == rgb.pixels);
}

TEST_CASE("render: all-unreachable with alpha 1 is uniform gray, no boundary") {
  SPMap map = split_map(8, 8, 0);
  RenderStyle style;
  style.gray_alpha = 1.0;
  const ImageRgb8 out = render_spmap(gradient_rgb(8, 8), map, style);
  for (std::size_t i = 0; i < out.pixels.size(); i += 3) {
    CHECK(out.pixels[i] == style.gray[0]);
    CHECK(out.pixels[i + 1] == style.gray[1]);
    CHECK(out.pixels[i + 2] == style.gray[2]);
  }
}

TEST_CASE("render: vertical interface gets a stripe of the declared thickness") {
  const int width = 16, height = 6, split = 8;
  const SPMap map = split_map(width, height, split);
  const ImageRgb8 rgb = ImageRgb8::filled(width, height, 10, 20, 30);

  for (int thickness = 1; thickness <= 3; ++thickness) {
    RenderStyle style;
    style.boundary_thickness = thickness;
    const ImageRgb8 out = render_spmap(rgb, map, style);
    for (int v = 0; v < height; ++v) {
      for (int u = 0; u < width; ++u) {
        const std::uint8_t* px = out.at(u, v);
        const bool is_boundary_color = px[0] == style.boundary[0] &&
                                       px[1] == style.boundary[1] &&
                                       px[2] == style.boundary[2];
        const bool expected = u >= split && u < split + thickness;
        CHECK_MESSAGE(is_boundary_color == expected,
                      "thickness " << thickness << " at (" << u << "," << v << ")");
      }
    }
  }
}

TEST_CASE("render: gray blend uses round-to-nearest") {
  SPMap map = split_map(2, 1, 0);
  RenderStyle style;  // alpha 0.6 toward 128
  const ImageRgb8 rgb = ImageRgb8::filled(2, 1, 0, 255, 100);
  const ImageRgb8 out = render_spmap(rgb, map, style);
  CHECK(out.pixels[0] == 77);   // 0.4*0 + 0.6*128 = 76.8
  CHECK(out.pixels[1] == 179);  // 0.4*255 + 0.6*128 = 178.8
  CHECK(out.pixels[2] == 117);  // 0.4*100 + 0.6*128 = 116.8
}

TEST_CASE("render: invalid policy controls graying of invalid pixels") {
  SPMap map = split_map(2, 1, 1);
  map.classes[1] = PixelClass::kInvalid;
  const ImageRgb8 rgb = ImageRgb8::filled(2, 1, 10, 20, 30);

  RenderStyle treat;
  treat.invalid_policy = RenderStyle::InvalidPolicy::kTreatAsUnreachable;
  const ImageRgb8 masked = render_spmap(rgb, map, treat);
  CHECK(masked.at(1, 0)[0] != 10);

  RenderStyle leave;
  leave.invalid_policy = RenderStyle::InvalidPolicy::kLeaveUntouched;
  const ImageRgb8 untouched = render_spmap(rgb, map, leave);
  CHECK(untouched.at(1, 0)[0] == 10);
  CHECK(untouched.at(1, 0)[1] == 20);
  CHECK(untouched.at(1, 0)[2] == 30);
  // The reachable pixel is untouched either way.
  CHECK(masked.at(0, 0)[0] == 10);
  CHECK(untouched.at(0, 0)[0] == 10);
}

TEST_CASE("render: boundary only forms against reachable neighbors") {
  // Invalid next to unreachable must not produce a boundary.
  SPMap map = split_map(4, 1, 0);
  map.classes[0] = PixelClass::kInvalid;
  RenderStyle style;
  style.gray_alpha = 1.0;
  const ImageRgb8 out = render_spmap(ImageRgb8::filled(4, 1, 0, 0, 0), map, style);
  for (int u = 0; u < 4; ++u) {
    CHECK(out.at(u, 0)[0] == style.gray[0]);
  }
}

TEST_CASE("render: dimension mismatch is rejected") {
  const SPMap map = split_map(4, 4, 2);
  CHECK_THROWS_AS(render_spmap(ImageRgb8::filled(5, 4, 0, 0, 0), map, RenderStyle{}),
                  InvalidArgumentError);
}

TEST_CASE("render style: validation") {
  RenderStyle style;
  style.gray_alpha = 1.5;
  CHECK_THROWS_AS(style.validate(), InvalidArgumentError);
  style = RenderStyle{};
  style.boundary_thickness = 0;
  CHECK_THROWS_AS(style.validate(), InvalidArgumentError);
}

TEST_CASE("semantic image: tri-level coding") {
  SPMap map = split_map(3, 1, 1);
  map.classes[2] = PixelClass::kInvalid;
  const ImageGray8 img = semantic_image(map);
  CHECK(img.pixels == std::vector<std::uint8_t>{255, 0, 128});
}

TEST_CASE("build_spmap: composition plus provenance warning") {
  const auto depth = tiny_depth();
  const auto k = tiny_camera();
  const VoxelGrid grid = full_grid();
  const ImageRgb8 rgb = gradient_rgb(8, 8);

  const SPMapResult result =
      build_spmap(rgb, depth, k, Transform4::Identity(), grid, RenderStyle{}, "tiny");
  CHECK(result.warnings.empty());
  CHECK(result.map.classes ==
        classify_pixels(depth, k, Transform4::Identity(), grid).classes);
  CHECK(result.rendered.pixels ==
        render_spmap(rgb, result.map, RenderStyle{}).pixels);
  CHECK(result.map.robot_name == "tiny");
  CHECK(result.map.grid_hash == grid_fingerprint(grid));
  CHECK(result.map.intrinsics_hash == intrinsics_fingerprint(k));

  const SPMapResult mismatched =
      build_spmap(rgb, depth, k, Transform4::Identity(), grid, RenderStyle{}, "other");
  REQUIRE(mismatched.warnings.size() == 1);
  CHECK(mismatched.warnings[0].find("other") != std::string::npos);
}

TEST_CASE("build_spmap: deterministic, including encoded bytes") {
  const auto depth = tiny_depth();
  const auto k = tiny_camera();
  const VoxelGrid grid = full_grid();
  const ImageRgb8 rgb = gradient_rgb(8, 8);

  const SPMapResult a =
      build_spmap(rgb, depth, k, Transform4::Identity(), grid, RenderStyle{});
  const SPMapResult b =
      build_spmap(rgb, depth, k, Transform4::Identity(), grid, RenderStyle{});
  CHECK(a.map.classes == b.map.classes);
  CHECK(encode_png(a.rendered) == encode_png(b.rendered));
  CHECK(encode_png(semantic_image(a.map)) == encode_png(semantic_image(b.map)));
}
