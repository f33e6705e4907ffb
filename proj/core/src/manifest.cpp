#include "spreach/manifest.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

#include "spreach/errors.hpp"

namespace spreach {

namespace {

using nlohmann::json;

json parse_file(const std::filesystem::path& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(std::string("cannot open ") + what + ": " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string(what) + " " + path.string() + ": " + e.what());
  }
}

std::filesystem::path resolve(const std::filesystem::path& base,
                              const std::filesystem::path& p) {
  return p.is_absolute() ? p : base / p;
}

void require_exists(const std::filesystem::path& p, const std::string& field) {
  if (!std::filesystem::exists(p)) {
    throw IoError("manifest." + field + ": file not found: " + p.string());
  }
}

}  // namespace

SceneManifest load_scene_manifest(const std::filesystem::path& path) {
  const json doc = parse_file(path, "scene manifest");
  if (!doc.is_object()) throw ValidationError("scene manifest: top level must be an object");
  const std::set<std::string> known = {"scene_id", "rgb",        "depth",
                                       "annotations", "intrinsics", "robot",
                                       "extrinsics_override"};
  for (const auto& [key, value] : doc.items()) {
    (void)value;
    if (!known.contains(key)) {
      throw ValidationError("scene manifest: unknown field \"" + key + "\"");
    }
  }

  auto str_field = [&](const char* field) {
    if (!doc.contains(field) || !doc.at(field).is_string()) {
      throw ValidationError(std::string("manifest.") + field + ": missing or not a string");
    }
    return doc.at(field).get<std::string>();
  };

  SceneManifest m;
  m.scene_id = str_field("scene_id");
  m.robot = str_field("robot");

  const std::filesystem::path base = path.has_parent_path()
                                         ? path.parent_path()
                                         : std::filesystem::path(".");
  m.rgb_path = resolve(base, str_field("rgb"));
  m.depth_path = resolve(base, str_field("depth"));
  require_exists(m.rgb_path, "rgb");
  require_exists(m.depth_path, "depth");
  if (doc.contains("annotations")) {
    if (!doc.at("annotations").is_string()) {
      throw ValidationError("manifest.annotations: not a string");
    }
    m.annotations_path = resolve(base, doc.at("annotations").get<std::string>());
    require_exists(*m.annotations_path, "annotations");
  }

  if (!doc.contains("intrinsics") || !doc.at("intrinsics").is_object()) {
    throw ValidationError("manifest.intrinsics: missing or not an object");
  }
  const json& k = doc.at("intrinsics");
  auto num_field = [&](const char* field) -> double {
    if (!k.contains(field) || !k.at(field).is_number()) {
      throw ValidationError(std::string("manifest.intrinsics.") + field +
                            ": missing or not a number");
    }
    return k.at(field).get<double>();
  };
  m.intrinsics.fx = num_field("fx");
  m.intrinsics.fy = num_field("fy");
  m.intrinsics.cx = num_field("cx");
  m.intrinsics.cy = num_field("cy");
  m.intrinsics.width = int(num_field("width"));
  m.intrinsics.height = int(num_field("height"));
  try {
    m.intrinsics.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("manifest.intrinsics: ") + e.what());
  }

  if (doc.contains("extrinsics_override")) {
    const json& e = doc.at("extrinsics_override");
    if (!e.is_array() || e.size() != 16) {
      throw ValidationError("manifest.extrinsics_override: expected 16 numbers");
    }
    Transform4 t;
    for (int i = 0; i < 16; ++i) {
      if (!e.at(i).is_number()) {
        throw ValidationError("manifest.extrinsics_override: entry " + std::to_string(i) +
                              " is not a number");
      }
      t(i / 4, i % 4) = e.at(i).get<double>();
    }
    require_rigid(t, "manifest.extrinsics_override");
    m.extrinsics_override = t;
  }
  return m;
}

std::vector<ObjectAnnotation> load_annotations(const std::filesystem::path& path,
                                               int image_width, int image_height) {
  const json doc = parse_file(path, "annotations");
  if (!doc.is_object() || !doc.contains("objects") || !doc.at("objects").is_array()) {
    throw ValidationError("annotations: expected {\"objects\": [...]}");
  }
  std::vector<ObjectAnnotation> out;
  const json& objects = doc.at("objects");
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const std::string where = "annotations.objects[" + std::to_string(i) + "]";
    const json& o = objects.at(i);
    if (!o.is_object()) throw ValidationError(where + ": expected an object");
    if (!o.contains("label") || !o.at("label").is_string()) {
      throw ValidationError(where + ".label: missing or not a string");
    }
    if (!o.contains("bbox") || !o.at("bbox").is_array() || o.at("bbox").size() != 4) {
      throw ValidationError(where + ".bbox: expected [x, y, w, h]");
    }
    ObjectAnnotation ann;
    ann.label = o.at("label").get<std::string>();
    int bbox[4];
    for (int b = 0; b < 4; ++b) {
      if (!o.at("bbox").at(b).is_number_integer()) {
        throw ValidationError(where + ".bbox: entries must be integers");
      }
      bbox[b] = o.at("bbox").at(b).get<int>();
    }
    ann.bbox_x = bbox[0];
    ann.bbox_y = bbox[1];
    ann.bbox_w = bbox[2];
    ann.bbox_h = bbox[3];
    if (ann.bbox_w < 1 || ann.bbox_h < 1 || ann.bbox_x < 0 || ann.bbox_y < 0 ||
        ann.bbox_x + ann.bbox_w > image_width || ann.bbox_y + ann.bbox_h > image_height) {
      throw ValidationError(where + ".bbox: outside the image bounds");
    }
    if (o.contains("mask")) {
      const json& mask = o.at("mask");
      if (!mask.is_array() || mask.size() != std::size_t(ann.bbox_w) * ann.bbox_h) {
        throw ValidationError(where + ".mask: expected bbox_w*bbox_h 0/1 entries");
      }
      ann.mask.resize(mask.size());
      bool any = false;
      for (std::size_t b = 0; b < mask.size(); ++b) {
        if (!mask.at(b).is_number_integer()) {
          throw ValidationError(where + ".mask: entries must be 0 or 1");
        }
        const int v = mask.at(b).get<int>();
        if (v != 0 && v != 1) {
          throw ValidationError(where + ".mask: entries must be 0 or 1");
        }
        ann.mask[b] = std::uint8_t(v);
        any = any || v == 1;
      }
      if (!any) throw ValidationError(where + ".mask: selects no pixels");
    }
    out.push_back(std::move(ann));
  }
  return out;
}

SceneInputs load_scene_inputs(const SceneManifest& manifest, float max_range) {
  SceneInputs inputs{read_png_rgb8(manifest.rgb_path),
                     load_depth_image(manifest.depth_path, max_range)};
  if (inputs.depth.width() != manifest.intrinsics.width ||
      inputs.depth.height() != manifest.intrinsics.height) {
    throw ValidationError(
        "manifest.intrinsics: declared " + std::to_string(manifest.intrinsics.width) +
        "x" + std::to_string(manifest.intrinsics.height) + " but depth image is " +
        std::to_string(inputs.depth.width()) + "x" + std::to_string(inputs.depth.height()));
  }
  if (inputs.rgb.width != inputs.depth.width() ||
      inputs.rgb.height != inputs.depth.height()) {
    throw ValidationError("rgb image is " + std::to_string(inputs.rgb.width) + "x" +
                          std::to_string(inputs.rgb.height) + " but depth image is " +
                          std::to_string(inputs.depth.width()) + "x" +
                          std::to_string(inputs.depth.height()));
  }
  return inputs;
}

}  // namespace spreach
