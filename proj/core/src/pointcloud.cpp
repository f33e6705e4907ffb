#include "spreach/pointcloud.hpp"

#include <fstream>
#include <string>
#include <utility>

#include <json.hpp>

#include "spreach/errors.hpp"
#include "spreach/image.hpp"

namespace spreach {

void CameraIntrinsics::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) {
    throw ValidationError("intrinsics: fx and fy must be positive");
  }
  if (!std::isfinite(fx) || !std::isfinite(fy) || !std::isfinite(cx) ||
      !std::isfinite(cy)) {
    throw ValidationError("intrinsics: parameters must be finite");
  }
  if (width < 1 || height < 1) {
    throw ValidationError("intrinsics: width and height must be >= 1");
  }
}

DepthImage::DepthImage(int width, int height, std::vector<float> meters, float max_range)
    : width_(width), height_(height), max_range_(max_range), meters_(std::move(meters)) {
  if (width_ < 1 || height_ < 1) {
    throw InvalidArgumentError("depth image: dims must be >= 1");
  }
  if (meters_.size() != std::size_t(width_) * height_) {
    throw InvalidArgumentError("depth image: buffer size does not match dims");
  }
  if (!(max_range_ > 0.0f)) {
    throw InvalidArgumentError("depth image: max range must be positive");
  }
}

DepthImage load_depth_image(const std::filesystem::path& path, float max_range) {
  if (path.extension() == ".png") {
    const ImageGray16 mm = read_png_gray16(path);
    std::vector<float> meters(mm.pixels.size());
    for (std::size_t i = 0; i < mm.pixels.size(); ++i) {
      meters[i] = float(mm.pixels[i]) / 1000.0f;  // millimeters; 0 stays invalid
    }
    return DepthImage(mm.width, mm.height, std::move(meters), max_range);
  }

  // Raw little-endian float32, row-major, with a JSON sidecar giving the dims.
  const std::filesystem::path sidecar = path.string() + ".json";
  std::ifstream meta_in(sidecar, std::ios::binary);
  if (!meta_in) throw IoError("cannot open depth sidecar: " + sidecar.string());
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(meta_in);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError("depth sidecar: " + std::string(e.what()));
  }
  if (!meta.is_object() || !meta.contains("width") || !meta.contains("height") ||
      !meta.at("width").is_number_integer() || !meta.at("height").is_number_integer()) {
    throw FormatError("depth sidecar: expected {\"width\": W, \"height\": H}");
  }
  const int width = meta.at("width").get<int>();
  const int height = meta.at("height").get<int>();
  if (width < 1 || height < 1) throw FormatError("depth sidecar: dims must be >= 1");

  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open depth file: " + path.string());
  std::vector<float> meters(std::size_t(width) * height);
  in.read(reinterpret_cast<char*>(meters.data()),
          std::streamsize(meters.size() * sizeof(float)));
  if (std::size_t(in.gcount()) != meters.size() * sizeof(float)) {
    throw CorruptionError("depth file shorter than declared dims: " + path.string());
  }
  if (in.get() != std::char_traits<char>::eof()) {
    throw CorruptionError("depth file has trailing data: " + path.string());
  }
  return DepthImage(width, height, std::move(meters), max_range);
}

PointCloud unproject_depth(const DepthImage& depth, const CameraIntrinsics& k,
                           int stride) {
  k.validate();
  if (depth.width() != k.width || depth.height() != k.height) {
    throw InvalidArgumentError("unproject: depth is " + std::to_string(depth.width()) +
                               "x" + std::to_string(depth.height()) + ", intrinsics say " +
                               std::to_string(k.width) + "x" + std::to_string(k.height));
  }
  if (stride < 1) throw InvalidArgumentError("unproject: stride must be >= 1");

  PointCloud cloud;
  cloud.frame = Frame::kCamera;
  const std::size_t expected =
      (std::size_t(depth.width() + stride - 1) / stride) *
      (std::size_t(depth.height() + stride - 1) / stride);
  cloud.points.reserve(expected);
  cloud.pixels.reserve(expected);

  for (int v = 0; v < depth.height(); v += stride) {
    for (int u = 0; u < depth.width(); u += stride) {
      if (!depth.valid_at(u, v)) continue;
      const double z = depth.at(u, v);
      cloud.points.emplace_back((u - k.cx) * z / k.fx, (v - k.cy) * z / k.fy, z);
      cloud.pixels.push_back({u, v});
    }
  }
  return cloud;
}

PointCloud transform_cloud(const Transform4& extrinsics, const PointCloud& cloud) {
  require_rigid(extrinsics, "extrinsics");
  if (cloud.frame != Frame::kCamera) {
    throw InvalidArgumentError("transform_cloud: cloud is not in the camera frame");
  }
  PointCloud out;
  out.frame = Frame::kBase;
  out.pixels = cloud.pixels;
  out.points.resize(cloud.points.size());
  const Eigen::Matrix3d r = extrinsics.topLeftCorner<3, 3>();
  const Point3 t = extrinsics.topRightCorner<3, 1>();
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    out.points[i] = r * cloud.points[i] + t;
  }
  return out;
}

ReachMask filter_reachable(const PointCloud& cloud, const VoxelGrid& grid) {
  if (cloud.frame != Frame::kBase) {
    throw InvalidArgumentError("filter_reachable: cloud must be in the base frame");
  }
  ReachMask mask(cloud.points.size(), 0);
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    mask[i] = contains(grid, cloud.points[i]) ? 1 : 0;
  }
  return mask;
}

}  // namespace spreach
