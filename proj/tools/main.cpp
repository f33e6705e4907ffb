// spreach CLI: robot validation, workspace grid building, S-P map rendering,
// reachability QA generation, and response scoring.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "spreach/errors.hpp"
#include "spreach/manifest.hpp"
#include "spreach/reachqa.hpp"
#include "spreach/robot_config.hpp"
#include "spreach/spmap.hpp"
#include "spreach/workspace.hpp"

namespace {

namespace fs = std::filesystem;
using namespace spreach;

constexpr int kExitOk = 0;
constexpr int kExitContract = 1;  // validation / contract / usage failures
constexpr int kExitIo = 2;        // filesystem and environment failures

int default_threads() {
  if (const char* env = std::getenv("SPREACH_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : int(hw);
}

struct StyleFlags {
  std::vector<unsigned> gray = {128, 128, 128};
  double gray_alpha = 0.6;
  std::vector<unsigned> boundary = {255, 255, 255};
  int thickness = 2;
  std::string invalid_policy = "unreachable";

  RenderStyle to_style() const {
    if (gray.size() != 3 || boundary.size() != 3) {
      throw InvalidArgumentError("--gray and --boundary take three values r,g,b");
    }
    RenderStyle style;
    for (int i = 0; i < 3; ++i) {
      if (gray[i] > 255 || boundary[i] > 255) {
        throw InvalidArgumentError("color components must be in 0..255");
      }
      style.gray[i] = std::uint8_t(gray[i]);
      style.boundary[i] = std::uint8_t(boundary[i]);
    }
    style.gray_alpha = gray_alpha;
    style.boundary_thickness = thickness;
    if (invalid_policy == "unreachable") {
      style.invalid_policy = RenderStyle::InvalidPolicy::kTreatAsUnreachable;
    } else if (invalid_policy == "untouched") {
      style.invalid_policy = RenderStyle::InvalidPolicy::kLeaveUntouched;
    } else {
      throw InvalidArgumentError("--invalid-policy must be 'unreachable' or 'untouched'");
    }
    style.validate();
    return style;
  }
};

// Extrinsics resolution order: manifest override, then the robot config.
Transform4 resolve_extrinsics(const SceneManifest& manifest,
                              const std::optional<RobotModel>& robot) {
  if (manifest.extrinsics_override) return *manifest.extrinsics_override;
  if (robot) return robot->camera_to_base();
  throw ValidationError(
      "no extrinsics: the manifest has no extrinsics_override and no --robot "
      "config was given");
}

// ---- robot validate --------------------------------------------------------

struct RobotValidateArgs {
  std::string config;
};

int run_robot_validate(const RobotValidateArgs& args) {
  const RobotModel model = load_robot_model_file(args.config);
  std::cout << "robot:        " << model.name() << "\n";
  std::cout << "dof:          " << model.dof() << "\n";
  for (std::size_t i = 0; i < model.dof(); ++i) {
    const auto& j = model.joints()[i];
    std::ostringstream line;
    line << "  joint " << i << ": theta_offset=" << j.dh.theta_offset
         << " d=" << j.dh.d << " a=" << j.dh.a << " alpha=" << j.dh.alpha
         << " limits=[" << j.limits.min_rad << ", " << j.limits.max_rad << "]";
    std::cout << line.str() << "\n";
  }
  std::cout << "extrinsics:   rigid (residual " << rigidity_error(model.camera_to_base())
            << ")\n";
  std::cout << "OK\n";
  return kExitOk;
}

// ---- workspace build -------------------------------------------------------

struct WorkspaceBuildArgs {
  std::string robot;
  std::string out;
  std::string strategy = "random";
  std::uint64_t samples = 1'000'000;
  std::uint64_t seed = 0;
  std::vector<std::uint32_t> per_joint_counts;
  double resolution = 0.02;
  std::vector<double> origin;
  std::vector<std::uint32_t> dims;
  int dilation = 1;
  int threads = 0;
  std::uint64_t voxel_cap = GridSpec::kDefaultVoxelCap;
  std::uint64_t sample_cap = SamplingSpec::kDefaultSampleCap;
};

// Conservative per-joint translation bound: rotations preserve norms, so the
// end effector stays within sum_i sqrt(a_i^2 + d_i^2) of the base.
double reach_bound(const RobotModel& model) {
  double reach = 0.0;
  for (const auto& j : model.joints()) {
    reach += std::sqrt(j.dh.a * j.dh.a + j.dh.d * j.dh.d);
  }
  return reach;
}

int run_workspace_build(const WorkspaceBuildArgs& args) {
  const RobotModel model = load_robot_model_file(args.robot);

  SamplingSpec sampling;
  sampling.sample_cap = args.sample_cap;
  if (args.strategy == "random") {
    sampling.strategy = SamplingSpec::Strategy::kRandom;
    sampling.total_samples = args.samples;
    sampling.seed = args.seed;
  } else if (args.strategy == "grid") {
    sampling.strategy = SamplingSpec::Strategy::kGrid;
    if (args.per_joint_counts.empty()) {
      throw InvalidArgumentError("--strategy grid requires --per-joint-counts");
    }
    sampling.per_joint_counts = args.per_joint_counts;
  } else {
    throw InvalidArgumentError("--strategy must be 'random' or 'grid'");
  }

  GridSpec grid;
  grid.resolution = args.resolution;
  grid.voxel_cap = args.voxel_cap;
  if (args.origin.empty() != args.dims.empty()) {
    throw InvalidArgumentError("--origin and --dims must be given together");
  }
  if (!args.origin.empty()) {
    if (args.origin.size() != 3 || args.dims.size() != 3) {
      throw InvalidArgumentError("--origin takes x,y,z and --dims takes nx,ny,nz");
    }
    grid.origin = Point3(args.origin[0], args.origin[1], args.origin[2]);
    grid.dims = {args.dims[0], args.dims[1], args.dims[2]};
  } else {
    const double half =
        reach_bound(model) + (args.dilation + 1) * args.resolution;
    const auto n = std::uint32_t(std::ceil(2.0 * half / args.resolution));
    grid.origin = Point3(-half, -half, -half);
    grid.dims = {n, n, n};
  }

  const int threads = args.threads > 0 ? args.threads : default_threads();
  BuildStats stats;
  const VoxelGrid result =
      build_workspace_grid(model, sampling, grid, args.dilation, threads, &stats);
  save_grid(result, fs::path(args.out));

  std::cout << "robot:          " << model.name() << "\n";
  std::cout << "grid:           " << grid.dims[0] << "x" << grid.dims[1] << "x"
            << grid.dims[2] << " @ " << grid.resolution << " m\n";
  std::cout << "samples:        " << stats.total_samples << " (" << stats.out_of_bounds
            << " out of bounds)\n";
  std::cout << "occupied:       " << stats.occupied_pre_dilation << " voxels, "
            << stats.occupied << " after dilation " << args.dilation << "\n";
  std::cout << "build time:     " << stats.seconds << " s (" << threads << " threads)\n";
  std::cout << "wrote " << args.out << "\n";
  return kExitOk;
}

// ---- spmap render ----------------------------------------------------------

struct SpmapRenderArgs {
  std::string manifest;
  std::string grid;
  std::string out_render;
  std::string out_semantic;
  std::string robot;  // optional extrinsics source
  StyleFlags style;
  double max_range = DepthImage::kDefaultMaxRange;
};

int run_spmap_render(const SpmapRenderArgs& args) {
  const SceneManifest manifest = load_scene_manifest(args.manifest);
  const VoxelGrid grid = load_grid(fs::path(args.grid));
  std::optional<RobotModel> robot;
  if (!args.robot.empty()) robot = load_robot_model_file(args.robot);
  const Transform4 extrinsics = resolve_extrinsics(manifest, robot);
  const SceneInputs inputs = load_scene_inputs(manifest, float(args.max_range));

  const SPMapResult result =
      build_spmap(inputs.rgb, inputs.depth, manifest.intrinsics, extrinsics, grid,
                  args.style.to_style(), manifest.robot);
  for (const std::string& w : result.warnings) std::cerr << "warning: " << w << "\n";

  write_png(fs::path(args.out_render), result.rendered);
  write_png(fs::path(args.out_semantic), semantic_image(result.map));

  const auto counts = result.map.class_counts();
  std::cout << "scene:       " << manifest.scene_id << "\n";
  std::cout << "pixels:      " << counts[0] << " reachable, " << counts[1]
            << " unreachable, " << counts[2] << " invalid\n";
  std::cout << "wrote " << args.out_render << ", " << args.out_semantic << "\n";
  return kExitOk;
}

// ---- qa generate -----------------------------------------------------------

struct QaGenerateArgs {
  std::string manifest;
  std::string manifest_dir;
  std::string grid;
  std::string out;
  std::string robot;
  std::vector<int> templates = {1, 2, 3, 4, 5};
  std::uint64_t seed = 0;
  double reach_threshold = 0.5;
  double min_valid = 0.2;
  double max_range = DepthImage::kDefaultMaxRange;
};

int run_qa_generate(const QaGenerateArgs& args) {
  std::vector<fs::path> manifest_paths;
  if (!args.manifest.empty()) manifest_paths.emplace_back(args.manifest);
  if (!args.manifest_dir.empty()) {
    if (!fs::is_directory(args.manifest_dir)) {
      throw IoError("--manifest-dir: not a directory: " + args.manifest_dir);
    }
    for (const auto& entry : fs::directory_iterator(args.manifest_dir)) {
      if (entry.is_regular_file() && entry.path().extension() == ".json") {
        manifest_paths.push_back(entry.path());
      }
    }
    std::sort(manifest_paths.begin(), manifest_paths.end());
  }
  if (manifest_paths.empty()) {
    throw InvalidArgumentError("give --manifest or a --manifest-dir with .json files");
  }

  const VoxelGrid grid = load_grid(fs::path(args.grid));
  std::optional<RobotModel> robot;
  if (!args.robot.empty()) robot = load_robot_model_file(args.robot);

  TemplateSet templates;
  for (int id : args.templates) templates.ids.push_back(TemplateId(id));
  templates.validate();
  const ReachPolicy policy{args.min_valid, args.reach_threshold};

  std::vector<QAPair> all_pairs;
  for (const fs::path& manifest_path : manifest_paths) {
    const SceneManifest manifest = load_scene_manifest(manifest_path);
    if (!manifest.annotations_path) {
      std::cerr << "warning: scene " << manifest.scene_id
                << " has no annotations, skipped\n";
      continue;
    }
    const Transform4 extrinsics = resolve_extrinsics(manifest, robot);
    const SceneInputs inputs = load_scene_inputs(manifest, float(args.max_range));
    const SPMap map = classify_pixels(inputs.depth, manifest.intrinsics, extrinsics, grid);
    if (!manifest.robot.empty() && manifest.robot != grid.meta().robot_name) {
      std::cerr << "warning: grid was built for robot \"" << grid.meta().robot_name
                << "\" but scene " << manifest.scene_id << " requests \""
                << manifest.robot << "\"\n";
    }

    const auto annotations =
        load_annotations(*manifest.annotations_path, map.width, map.height);
    std::vector<LabeledObject> objects;
    objects.reserve(annotations.size());
    for (const auto& ann : annotations) {
      const ReachLabel label = object_reachability(map, ann, policy);
      objects.push_back({ann.label, label.value, label.support});
    }

    std::vector<std::string> warnings;
    auto pairs = generate_qa_pairs(manifest.scene_id, objects, templates, args.seed,
                                   &warnings);
    for (const std::string& w : warnings) {
      std::cerr << "warning: scene " << manifest.scene_id << ": " << w << "\n";
    }
    all_pairs.insert(all_pairs.end(), std::make_move_iterator(pairs.begin()),
                     std::make_move_iterator(pairs.end()));
  }

  std::ofstream out(args.out, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + args.out);
  write_qa_jsonl(out, all_pairs);
  if (!out) throw IoError("failed writing: " + args.out);
  std::cout << "wrote " << all_pairs.size() << " pairs to " << args.out << "\n";
  return kExitOk;
}

// ---- eval score ------------------------------------------------------------

struct EvalScoreArgs {
  std::string pairs;
  std::string responses;
  std::string out;
};

int run_eval_score(const EvalScoreArgs& args) {
  std::ifstream pairs_in(args.pairs, std::ios::binary);
  if (!pairs_in) throw IoError("cannot open pairs file: " + args.pairs);
  std::ifstream responses_in(args.responses, std::ios::binary);
  if (!responses_in) throw IoError("cannot open responses file: " + args.responses);
  const auto pairs = read_qa_jsonl(pairs_in);
  const auto responses = read_responses_jsonl(responses_in);

  // Match responses to pairs by (scene_id, template_id, object), FIFO within
  // duplicate keys. Orphans on either side are a contract failure.
  using Key = std::tuple<std::string, int, std::string>;
  std::map<Key, std::vector<std::size_t>> response_index;
  for (std::size_t i = 0; i < responses.size(); ++i) {
    response_index[{responses[i].scene_id, responses[i].template_id,
                    responses[i].object}]
        .push_back(i);
  }
  std::vector<std::string> aligned(pairs.size());
  std::vector<std::string> orphans;
  for (const QAPair& pair : pairs) {
    const Key key{pair.scene_id, pair.template_id, pair.object};
    auto it = response_index.find(key);
    if (it == response_index.end() || it->second.empty()) {
      orphans.push_back("missing response: scene=" + pair.scene_id + " template=" +
                        std::to_string(pair.template_id) + " object=" + pair.object);
      continue;
    }
    aligned[&pair - pairs.data()] = responses[it->second.front()].response;
    it->second.erase(it->second.begin());
  }
  for (const auto& [key, remaining] : response_index) {
    for (std::size_t i = 0; i < remaining.size(); ++i) {
      orphans.push_back("unmatched response: scene=" + std::get<0>(key) + " template=" +
                        std::to_string(std::get<1>(key)) + " object=" + std::get<2>(key));
    }
  }
  if (!orphans.empty()) {
    for (const std::string& o : orphans) std::cerr << o << "\n";
    std::cerr << orphans.size() << " orphan record(s)\n";
    return kExitContract;
  }

  const ScoreReport report = score_responses(pairs, aligned);
  std::cout << "pairs:     " << pairs.size() << "\n";
  std::cout << "accuracy:  " << report.accuracy << "\n";
  for (const auto& [tid, ct] : report.per_template) {
    std::cout << "  template " << tid << ": " << ct.first << "/" << ct.second << "\n";
  }

  if (!args.out.empty()) {
    nlohmann::ordered_json doc;
    doc["accuracy"] = report.accuracy;
    doc["total"] = pairs.size();
    nlohmann::ordered_json per_template = nlohmann::ordered_json::object();
    for (const auto& [tid, ct] : report.per_template) {
      per_template[std::to_string(tid)] = {{"correct", ct.first}, {"total", ct.second}};
    }
    doc["per_template"] = per_template;
    std::ofstream out(args.out, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + args.out);
    out << doc.dump(2) << "\n";
    if (!out) throw IoError("failed writing: " + args.out);
    std::cout << "wrote " << args.out << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Space-physical reachability maps: workspace grids, per-pixel "
               "reachability overlays, and reachability QA datasets"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from an INI/TOML file");

  RobotValidateArgs robot_validate_args;
  auto* robot = app.add_subcommand("robot", "Robot model utilities");
  robot->require_subcommand(1);
  auto* robot_validate =
      robot->add_subcommand("validate", "Check a robot config against its invariants");
  robot_validate->add_option("config", robot_validate_args.config, "Robot config JSON")
      ->required();

  WorkspaceBuildArgs build_args;
  auto* workspace = app.add_subcommand("workspace", "Reachable workspace grids");
  workspace->require_subcommand(1);
  auto* ws_build = workspace->add_subcommand(
      "build", "Sample forward kinematics and write an SPRM occupancy grid");
  ws_build->add_option("--robot", build_args.robot, "Robot config JSON")->required();
  ws_build->add_option("--out", build_args.out, "Output SPRM path")->required();
  ws_build->add_option("--strategy", build_args.strategy, "random|grid")
      ->default_str("random");
  ws_build->add_option("--samples", build_args.samples, "Random-strategy sample count")
      ->check(CLI::PositiveNumber);
  ws_build->add_option("--seed", build_args.seed, "Random-strategy seed");
  ws_build
      ->add_option("--per-joint-counts", build_args.per_joint_counts,
                   "Grid-strategy linspace counts, one per joint")
      ->delimiter(',');
  ws_build->add_option("--resolution", build_args.resolution, "Voxel edge, m")
      ->check(CLI::PositiveNumber);
  ws_build->add_option("--origin", build_args.origin, "Grid min corner x,y,z (m)")
      ->delimiter(',');
  ws_build->add_option("--dims", build_args.dims, "Voxel counts nx,ny,nz")
      ->delimiter(',');
  ws_build->add_option("--dilation", build_args.dilation, "Chebyshev dilation radius")
      ->check(CLI::NonNegativeNumber);
  ws_build->add_option("--threads", build_args.threads,
                       "Worker threads (default: SPREACH_THREADS or hardware)");
  ws_build->add_option("--voxel-cap", build_args.voxel_cap, "Max total voxels");
  ws_build->add_option("--sample-cap", build_args.sample_cap, "Max total samples");

  SpmapRenderArgs render_args;
  auto* spmap = app.add_subcommand("spmap", "Space-physical reachability maps");
  spmap->require_subcommand(1);
  auto* spmap_render = spmap->add_subcommand(
      "render", "Classify a scene per pixel and write overlay + semantic PNGs");
  spmap_render->add_option("--manifest", render_args.manifest, "Scene manifest JSON")
      ->required();
  spmap_render->add_option("--grid", render_args.grid, "SPRM grid path")->required();
  spmap_render->add_option("--out-render", render_args.out_render, "Overlay PNG path")
      ->required();
  spmap_render
      ->add_option("--out-semantic", render_args.out_semantic, "Semantic PNG path")
      ->required();
  spmap_render->add_option("--robot", render_args.robot,
                           "Robot config JSON (extrinsics source when the manifest "
                           "has no override)");
  spmap_render->add_option("--gray", render_args.style.gray, "Mask color r,g,b")
      ->delimiter(',');
  spmap_render->add_option("--gray-alpha", render_args.style.gray_alpha,
                           "Mask opacity in [0,1]");
  spmap_render->add_option("--boundary", render_args.style.boundary,
                           "Boundary color r,g,b")
      ->delimiter(',');
  spmap_render->add_option("--thickness", render_args.style.thickness,
                           "Boundary thickness, px");
  spmap_render->add_option("--invalid-policy", render_args.style.invalid_policy,
                           "unreachable|untouched");
  spmap_render->add_option("--max-range", render_args.max_range, "Depth validity cap, m");

  QaGenerateArgs qa_args;
  auto* qa = app.add_subcommand("qa", "Reachability question-answer datasets");
  qa->require_subcommand(1);
  auto* qa_generate =
      qa->add_subcommand("generate", "Label annotated objects and emit QA JSONL");
  qa_generate->add_option("--manifest", qa_args.manifest, "Scene manifest JSON");
  qa_generate->add_option("--manifest-dir", qa_args.manifest_dir,
                          "Directory of scene manifests");
  qa_generate->add_option("--grid", qa_args.grid, "SPRM grid path")->required();
  qa_generate->add_option("--out", qa_args.out, "Output JSONL path")->required();
  qa_generate->add_option("--robot", qa_args.robot,
                          "Robot config JSON (extrinsics source)");
  qa_generate->add_option("--templates", qa_args.templates, "Template ids, e.g. 1,2,5")
      ->delimiter(',');
  qa_generate->add_option("--seed", qa_args.seed, "Comparative-partner seed");
  qa_generate->add_option("--reach-threshold", qa_args.reach_threshold,
                          "Reachable iff support >= this");
  qa_generate->add_option("--min-valid", qa_args.min_valid,
                          "Below this valid fraction, objects are indeterminate");
  qa_generate->add_option("--max-range", qa_args.max_range, "Depth validity cap, m");

  EvalScoreArgs score_args;
  auto* eval = app.add_subcommand("eval", "Scoring");
  eval->require_subcommand(1);
  auto* eval_score = eval->add_subcommand(
      "score", "Match responses against QA pairs and report accuracy");
  eval_score->add_option("--pairs", score_args.pairs, "QA pairs JSONL")->required();
  eval_score->add_option("--responses", score_args.responses, "Responses JSONL")
      ->required();
  eval_score->add_option("--out", score_args.out, "Optional JSON report path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitContract;
  }

  try {
    if (robot_validate->parsed()) return run_robot_validate(robot_validate_args);
    if (ws_build->parsed()) return run_workspace_build(build_args);
    if (spmap_render->parsed()) return run_spmap_render(render_args);
    if (qa_generate->parsed()) return run_qa_generate(qa_args);
    if (eval_score->parsed()) return run_eval_score(score_args);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitContract;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitContract;
  }
  return kExitContract;
}
