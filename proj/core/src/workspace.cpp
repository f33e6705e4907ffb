#include "spreach/workspace.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <thread>

#include "spreach/errors.hpp"

namespace spreach {

namespace {

constexpr std::size_t kBatchSamples = 1 << 18;  // bounds generator memory during builds

// Maps a raw 64-bit draw to [0, 1) with full 53-bit mantissa coverage. Used
// instead of std::uniform_real_distribution so sample streams are identical
// across standard libraries.
double unit_double(std::uint64_t x) {
  return double(x >> 11) * 0x1.0p-53;
}

double linspace_value(const JointLimits& limits, std::uint32_t k, std::uint32_t count) {
  if (count == 1 || k == 0) return limits.min_rad;
  if (k == count - 1) return limits.max_rad;  // keep the inclusive endpoint exact
  return limits.min_rad + double(k) * (limits.max_rad - limits.min_rad) / double(count - 1);
}

void validate_sampling(const RobotModel& robot, const SamplingSpec& spec) {
  if (spec.strategy == SamplingSpec::Strategy::kGrid) {
    if (spec.per_joint_counts.size() != robot.dof()) {
      throw InvalidArgumentError("sampling: per_joint_counts has " +
                                 std::to_string(spec.per_joint_counts.size()) +
                                 " entries, robot has " + std::to_string(robot.dof()) +
                                 " joints");
    }
    for (std::size_t i = 0; i < spec.per_joint_counts.size(); ++i) {
      if (spec.per_joint_counts[i] == 0) {
        throw InvalidArgumentError("sampling: per_joint_counts[" + std::to_string(i) +
                                   "] must be positive");
      }
    }
  } else {
    if (spec.total_samples == 0) {
      throw InvalidArgumentError("sampling: total_samples must be positive");
    }
  }
}

// Decodes Cartesian-product sample `index` into per-joint linspace steps;
// joint 0 varies slowest, the last joint fastest.
void grid_config_at(const RobotModel& robot, const SamplingSpec& spec,
                    std::uint64_t index, double* out) {
  const std::size_t n = robot.dof();
  for (std::size_t j = n; j-- > 0;) {
    const std::uint32_t count = spec.per_joint_counts[j];
    const auto step = std::uint32_t(index % count);
    index /= count;
    out[j] = linspace_value(robot.joints()[j].limits, step, count);
  }
}

}  // namespace

std::optional<std::array<std::uint32_t, 3>> GridSpec::voxel_of(const Point3& p) const {
  std::array<std::uint32_t, 3> idx;
  for (int a = 0; a < 3; ++a) {
    const double f = std::floor((p[a] - origin[a]) / resolution);
    // Written so NaN fails the first comparison.
    if (!(f >= 0.0) || !(f < double(dims[a]))) return std::nullopt;
    idx[a] = std::uint32_t(f);
  }
  return idx;
}

void GridSpec::validate() const {
  if (!origin.allFinite()) throw ValidationError("grid: origin must be finite");
  if (!(resolution > 0.0) || !std::isfinite(resolution)) {
    throw ValidationError("grid: resolution must be positive and finite");
  }
  for (int a = 0; a < 3; ++a) {
    if (dims[a] < 1) throw ValidationError("grid: dims must all be >= 1");
  }
  if (total_voxels() > voxel_cap) {
    throw ResourceLimitError("grid: " + std::to_string(total_voxels()) +
                             " voxels exceeds cap of " + std::to_string(voxel_cap));
  }
}

VoxelGrid::VoxelGrid(GridSpec spec, GridMeta meta)
    : spec_(std::move(spec)), meta_(std::move(meta)) {
  spec_.validate();
  payload_.assign((spec_.total_voxels() + 7) / 8, 0);
}

std::uint64_t VoxelGrid::occupied_count() const {
  std::uint64_t count = 0;
  for (std::uint8_t byte : payload_) count += std::popcount(unsigned(byte));
  return count;
}

bool VoxelGrid::operator==(const VoxelGrid& other) const {
  return spec_.origin == other.spec_.origin &&
         spec_.resolution == other.spec_.resolution && spec_.dims == other.spec_.dims &&
         meta_.robot_name == other.meta_.robot_name &&
         meta_.sample_count == other.meta_.sample_count &&
         meta_.seed == other.meta_.seed &&
         meta_.dilation_radius == other.meta_.dilation_radius &&
         payload_ == other.payload_;
}

bool contains(const VoxelGrid& grid, const Point3& p) {
  const auto idx = grid.spec().voxel_of(p);
  if (!idx) return false;
  return grid.test((*idx)[0], (*idx)[1], (*idx)[2]);
}

std::uint64_t sample_count(const RobotModel& robot, const SamplingSpec& spec) {
  validate_sampling(robot, spec);
  std::uint64_t total = 1;
  if (spec.strategy == SamplingSpec::Strategy::kGrid) {
    for (std::uint32_t c : spec.per_joint_counts) {
      if (total > spec.sample_cap / c) {
        throw ResourceLimitError("sampling: grid product exceeds cap of " +
                                 std::to_string(spec.sample_cap));
      }
      total *= c;
    }
  } else {
    total = spec.total_samples;
  }
  if (total > spec.sample_cap) {
    throw ResourceLimitError("sampling: " + std::to_string(total) +
                             " samples exceeds cap of " + std::to_string(spec.sample_cap));
  }
  return total;
}

void for_each_sample_batch(const RobotModel& robot, const SamplingSpec& spec,
                           std::size_t batch_size,
                           const std::function<void(const SampleBatch&)>& fn) {
  if (batch_size == 0) throw InvalidArgumentError("batch_size must be positive");
  const std::uint64_t total = sample_count(robot, spec);
  const std::size_t n = robot.dof();

  SampleBatch batch;
  batch.joint_count = n;
  batch.values.reserve(std::min<std::uint64_t>(total, batch_size) * n);

  std::mt19937_64 rng(spec.seed);
  std::uint64_t produced = 0;
  while (produced < total) {
    const auto count = std::size_t(std::min<std::uint64_t>(batch_size, total - produced));
    batch.values.resize(count * n);
    if (spec.strategy == SamplingSpec::Strategy::kGrid) {
      for (std::size_t i = 0; i < count; ++i) {
        grid_config_at(robot, spec, produced + i, batch.values.data() + i * n);
      }
    } else {
      for (std::size_t i = 0; i < count; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          const auto& limits = robot.joints()[j].limits;
          batch.values[i * n + j] =
              limits.min_rad + unit_double(rng()) * limits.range();
        }
      }
    }
    fn(batch);
    produced += count;
  }
}

SampleBatch sample_joint_space(const RobotModel& robot, const SamplingSpec& spec) {
  SampleBatch all;
  all.joint_count = robot.dof();
  for_each_sample_batch(robot, spec, kBatchSamples, [&](const SampleBatch& batch) {
    all.values.insert(all.values.end(), batch.values.begin(), batch.values.end());
  });
  return all;
}

namespace {

// In-place Chebyshev dilation: one sliding-window max pass per axis (a cube
// structuring element is separable). O(voxels) per pass for any radius.
void dilate_axis(const GridSpec& spec, std::vector<std::uint8_t>& bits, int axis,
                 int radius) {
  const std::uint64_t nx = spec.dims[0], ny = spec.dims[1];
  const std::uint64_t length = spec.dims[axis];
  const std::uint64_t strides[3] = {1, nx, nx * ny};
  const std::uint64_t stride = strides[axis];

  std::vector<std::uint8_t> out((spec.total_voxels() + 7) / 8, 0);
  auto get = [&](std::uint64_t i) -> bool { return (bits[i >> 3] >> (i & 7)) & 1; };
  auto set = [&](std::uint64_t i) { out[i >> 3] |= std::uint8_t(1u << (i & 7)); };

  // The two axes orthogonal to `axis`.
  const int oa = axis == 0 ? 1 : 0;
  const int ob = axis == 2 ? 1 : 2;
  for (std::uint64_t b = 0; b < spec.dims[ob]; ++b) {
    for (std::uint64_t a = 0; a < spec.dims[oa]; ++a) {
      std::uint64_t coords[3] = {0, 0, 0};
      coords[oa] = a;
      coords[ob] = b;
      const std::uint64_t base = coords[0] + nx * (coords[1] + ny * coords[2]);

      std::uint64_t window = 0;  // set bits within [i - radius, i + radius]
      const std::uint64_t lead = std::min<std::uint64_t>(radius, length - 1);
      for (std::uint64_t k = 0; k <= lead; ++k) window += get(base + k * stride);
      for (std::uint64_t i = 0; i < length; ++i) {
        if (window > 0) set(base + i * stride);
        if (i + radius + 1 < length) window += get(base + (i + radius + 1) * stride);
        if (i >= std::uint64_t(radius)) window -= get(base + (i - radius) * stride);
      }
    }
  }
  bits = std::move(out);
}

void dilate_chebyshev(const GridSpec& spec, std::vector<std::uint8_t>& bits, int radius) {
  if (radius <= 0) return;
  for (int axis = 0; axis < 3; ++axis) dilate_axis(spec, bits, axis, radius);
}

}  // namespace

VoxelGrid build_workspace_grid(const RobotModel& robot, const SamplingSpec& sampling,
                               const GridSpec& grid_spec, int dilation_radius_voxels,
                               int threads, BuildStats* stats) {
  const auto start = std::chrono::steady_clock::now();
  grid_spec.validate();
  if (dilation_radius_voxels < 0) {
    throw InvalidArgumentError("dilation radius must be non-negative");
  }
  const std::uint64_t total = sample_count(robot, sampling);
  const int worker_count = std::max(1, threads);

  GridMeta meta;
  meta.robot_name = robot.name();
  meta.sample_count = total;
  meta.seed = sampling.strategy == SamplingSpec::Strategy::kRandom ? sampling.seed : 0;
  meta.dilation_radius = std::uint8_t(std::min(dilation_radius_voxels, 255));
  VoxelGrid grid(grid_spec, meta);

  const std::size_t payload_bytes = grid.payload().size();
  // Contract: each worker owns a private bit set, merged by OR afterwards, so
  // occupancy is independent of the worker count.
  std::vector<std::vector<std::uint8_t>> worker_bits(
      worker_count, std::vector<std::uint8_t>(payload_bytes, 0));
  std::vector<std::uint64_t> worker_oob(worker_count, 0);

  for_each_sample_batch(robot, sampling, kBatchSamples, [&](const SampleBatch& batch) {
    const std::size_t count = batch.size();
    auto run = [&](int w, std::size_t begin, std::size_t end) {
      auto& bits = worker_bits[w];
      for (std::size_t i = begin; i < end; ++i) {
        const Point3 p = end_effector_position(robot, batch.config(i));
        if (const auto idx = grid_spec.voxel_of(p)) {
          const std::uint64_t bit = grid_spec.linear_index((*idx)[0], (*idx)[1], (*idx)[2]);
          bits[bit >> 3] |= std::uint8_t(1u << (bit & 7));
        } else {
          ++worker_oob[w];
        }
      }
    };
    if (worker_count == 1) {
      run(0, 0, count);
    } else {
      std::vector<std::thread> pool;
      pool.reserve(worker_count);
      for (int w = 0; w < worker_count; ++w) {
        const std::size_t begin = count * w / worker_count;
        const std::size_t end = count * (w + 1) / worker_count;
        pool.emplace_back(run, w, begin, end);
      }
      for (auto& t : pool) t.join();
    }
  });

  auto merged = grid.mutable_payload();
  for (const auto& bits : worker_bits) {
    for (std::size_t i = 0; i < payload_bytes; ++i) merged[i] |= bits[i];
  }
  std::uint64_t out_of_bounds = 0;
  for (std::uint64_t c : worker_oob) out_of_bounds += c;

  const std::uint64_t pre_dilation = grid.occupied_count();
  {
    std::vector<std::uint8_t> bits(merged.begin(), merged.end());
    dilate_chebyshev(grid_spec, bits, dilation_radius_voxels);
    std::copy(bits.begin(), bits.end(), merged.begin());
  }

  if (stats) {
    stats->total_samples = total;
    stats->out_of_bounds = out_of_bounds;
    stats->occupied_pre_dilation = pre_dilation;
    stats->occupied = grid.occupied_count();
    stats->seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  return grid;
}

// --- SPRM serialization ----------------------------------------------------

namespace {

void put_bytes(std::string& out, const void* data, std::size_t n) {
  out.append(static_cast<const char*>(data), n);
}

template <typename T>
void put_le(std::string& out, T value) {
  static_assert(std::is_integral_v<T>);
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(char(std::uint8_t(value >> (8 * i))));
  }
}

void put_f64(std::string& out, double value) {
  put_le(out, std::bit_cast<std::uint64_t>(value));
}

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  bool take(void* dst, std::size_t n) {
    in_.read(static_cast<char*>(dst), std::streamsize(n));
    return std::size_t(in_.gcount()) == n;
  }
  template <typename T>
  bool take_le(T& value) {
    std::uint8_t buf[sizeof(T)];
    if (!take(buf, sizeof(T))) return false;
    std::uintmax_t acc = 0;
    for (std::size_t i = sizeof(T); i-- > 0;) acc = (acc << 8) | buf[i];
    value = T(acc);
    return true;
  }
  bool take_f64(double& value) {
    std::uint64_t bits = 0;
    if (!take_le(bits)) return false;
    value = std::bit_cast<double>(bits);
    return true;
  }
  bool at_eof() {
    return in_.peek() == std::char_traits<char>::eof();
  }

 private:
  std::istream& in_;
};

constexpr char kMagic[4] = {'S', 'P', 'R', 'M'};
constexpr std::uint16_t kVersion = 1;

}  // namespace

void save_grid(const VoxelGrid& grid, std::ostream& out) {
  std::string header;
  put_bytes(header, kMagic, 4);
  put_le(header, kVersion);
  put_le(header, std::uint16_t(0));  // reserved
  for (int a = 0; a < 3; ++a) put_f64(header, grid.spec().origin[a]);
  put_f64(header, grid.spec().resolution);
  for (int a = 0; a < 3; ++a) put_le(header, grid.spec().dims[a]);
  put_le(header, grid.meta().dilation_radius);
  header.append(3, '\0');  // pad
  put_le(header, grid.meta().sample_count);
  put_le(header, grid.meta().seed);
  const std::string& name = grid.meta().robot_name;
  if (name.size() > 0xFFFF) throw InvalidArgumentError("robot name too long for SPRM");
  put_le(header, std::uint16_t(name.size()));
  header.append(name);

  out.write(header.data(), std::streamsize(header.size()));
  out.write(reinterpret_cast<const char*>(grid.payload().data()),
            std::streamsize(grid.payload().size()));
  if (!out) throw IoError("failed writing SPRM stream");
}

void save_grid(const VoxelGrid& grid, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  save_grid(grid, out);
  out.flush();
  if (!out) throw IoError("failed writing: " + path.string());
}

VoxelGrid load_grid(std::istream& in, std::uint64_t voxel_cap) {
  Reader r(in);
  char magic[4];
  if (!r.take(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
    throw FormatError("not an SPRM grid file (bad magic)");
  }
  std::uint16_t version = 0, reserved = 0;
  if (!r.take_le(version)) throw CorruptionError("SPRM: truncated header");
  if (version != kVersion) {
    throw FormatError("SPRM: unsupported version " + std::to_string(version));
  }
  if (!r.take_le(reserved)) throw CorruptionError("SPRM: truncated header");

  GridSpec spec;
  spec.voxel_cap = voxel_cap;
  for (int a = 0; a < 3; ++a) {
    if (!r.take_f64(spec.origin[a])) throw CorruptionError("SPRM: truncated header");
  }
  if (!r.take_f64(spec.resolution)) throw CorruptionError("SPRM: truncated header");
  for (int a = 0; a < 3; ++a) {
    if (!r.take_le(spec.dims[a])) throw CorruptionError("SPRM: truncated header");
  }
  GridMeta meta;
  std::uint8_t dilation = 0;
  char pad[3];
  if (!r.take_le(dilation) || !r.take(pad, 3) || !r.take_le(meta.sample_count) ||
      !r.take_le(meta.seed)) {
    throw CorruptionError("SPRM: truncated header");
  }
  meta.dilation_radius = dilation;
  std::uint16_t name_len = 0;
  if (!r.take_le(name_len)) throw CorruptionError("SPRM: truncated header");
  meta.robot_name.resize(name_len);
  if (name_len > 0 && !r.take(meta.robot_name.data(), name_len)) {
    throw CorruptionError("SPRM: truncated robot name");
  }

  try {
    spec.validate();
  } catch (const ResourceLimitError&) {
    throw;
  } catch (const Error& e) {
    throw CorruptionError(std::string("SPRM: inconsistent header: ") + e.what());
  }

  VoxelGrid grid(spec, meta);
  auto payload = grid.mutable_payload();
  if (!payload.empty() && !r.take(payload.data(), payload.size())) {
    throw CorruptionError("SPRM: bit payload shorter than declared dims");
  }
  if (!r.at_eof()) throw CorruptionError("SPRM: trailing data after payload");
  return grid;
}

VoxelGrid load_grid(const std::filesystem::path& path, std::uint64_t voxel_cap) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open grid file: " + path.string());
  return load_grid(in, voxel_cap);
}

}  // namespace spreach
