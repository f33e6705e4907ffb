#include <benchmark/benchmark.h>

#include "spreach/spmap.hpp"

using namespace spreach;

namespace {

struct Scene {
  VoxelGrid grid;
  DepthImage depth;
  CameraIntrinsics k;
};

Scene make_scene(int width, int height) {
  std::vector<Joint> joints(2);
  joints[0].dh.d = 0.6;
  joints[0].dh.a = 0.4;
  joints[1].dh.a = 0.4;
  for (auto& j : joints) j.limits = {-3.141592653589793, 3.141592653589793};
  const RobotModel robot("bench-2r", std::move(joints));

  GridSpec spec;
  spec.origin = Point3(-0.85, -0.85, 0.545);
  spec.resolution = 0.01;
  spec.dims = {170, 170, 10};
  SamplingSpec sampling;
  sampling.total_samples = 200000;
  sampling.seed = 9;

  std::vector<float> meters(std::size_t(width) * height, 0.6f);
  return Scene{build_workspace_grid(robot, sampling, spec, 1),
               DepthImage(width, height, std::move(meters)),
               CameraIntrinsics{double(width) / 4, double(width) / 4,
                                width / 2.0, height / 2.0, width, height}};
}

void BM_ClassifyPixels(benchmark::State& state) {
  const int width = int(state.range(0));
  const int height = width * 3 / 4;
  const Scene scene = make_scene(width, height);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        classify_pixels(scene.depth, scene.k, Transform4::Identity(), scene.grid));
  }
  state.SetItemsProcessed(state.iterations() * width * height);
}
BENCHMARK(BM_ClassifyPixels)->Arg(320)->Arg(640)->Arg(1280);

void BM_RenderSpmap(benchmark::State& state) {
  const int width = int(state.range(0));
  const int height = width * 3 / 4;
  const Scene scene = make_scene(width, height);
  const SPMap map = classify_pixels(scene.depth, scene.k, Transform4::Identity(),
                                    scene.grid);
  const ImageRgb8 rgb = ImageRgb8::filled(width, height, 90, 120, 150);
  const RenderStyle style;
  for (auto _ : state) {
    benchmark::DoNotOptimize(render_spmap(rgb, map, style));
  }
  state.SetItemsProcessed(state.iterations() * width * height);
}
BENCHMARK(BM_RenderSpmap)->Arg(320)->Arg(640)->Arg(1280);

}  // namespace
