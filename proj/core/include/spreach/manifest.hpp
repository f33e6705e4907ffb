#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "spreach/image.hpp"
#include "spreach/pointcloud.hpp"
#include "spreach/reachqa.hpp"

namespace spreach {

// One scene per JSON document:
//
//   {
//     "scene_id": "kitchen-001",
//     "rgb": "rgb.png",
//     "depth": "depth.png",
//     "annotations": "objects.json",       // optional
//     "intrinsics": {"fx":..., "fy":..., "cx":..., "cy":..., "width":..., "height":...},
//     "robot": "demo-2r",
//     "extrinsics_override": [16 numbers]  // optional, row-major camera -> base
//   }
//
// Relative paths resolve against the manifest's directory. Referenced files
// must exist at load time.
struct SceneManifest {
  std::string scene_id;
  std::filesystem::path rgb_path;
  std::filesystem::path depth_path;
  std::optional<std::filesystem::path> annotations_path;
  CameraIntrinsics intrinsics;
  std::string robot;
  std::optional<Transform4> extrinsics_override;
};

SceneManifest load_scene_manifest(const std::filesystem::path& path);

// Annotation document: {"objects": [{"label": "...", "bbox": [x,y,w,h],
// "mask": [0/1 ...]}, ...]} with bbox checked against the image bounds and
// masks checked against the bbox dims.
std::vector<ObjectAnnotation> load_annotations(const std::filesystem::path& path,
                                               int image_width, int image_height);

struct SceneInputs {
  ImageRgb8 rgb;
  DepthImage depth;
};

// Loads the RGB and depth images and validates their dims against the
// manifest intrinsics. Throws ValidationError on any mismatch.
SceneInputs load_scene_inputs(const SceneManifest& manifest,
                              float max_range = DepthImage::kDefaultMaxRange);

}  // namespace spreach
