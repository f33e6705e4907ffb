#include <benchmark/benchmark.h>

#include <random>

#include "spreach/workspace.hpp"

using namespace spreach;

namespace {

RobotModel planar_2r() {
  std::vector<Joint> joints(2);
  joints[0].dh.a = 0.5;
  joints[1].dh.a = 0.5;
  for (auto& j : joints) j.limits = {-3.141592653589793, 3.141592653589793};
  return RobotModel("planar-2r", std::move(joints));
}

GridSpec planar_grid() {
  GridSpec grid;
  grid.origin = Point3(-1.05, -1.05, -0.03);
  grid.resolution = 0.02;
  grid.dims = {105, 105, 3};
  return grid;
}

void BM_BuildWorkspaceGrid(benchmark::State& state) {
  const RobotModel robot = planar_2r();
  SamplingSpec sampling;
  sampling.total_samples = std::uint64_t(state.range(0));
  sampling.seed = 42;
  const GridSpec grid = planar_grid();
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_workspace_grid(robot, sampling, grid, 1,
                                                  int(state.range(1))));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BuildWorkspaceGrid)
    ->Args({100000, 1})
    ->Args({1000000, 1})
    ->Args({1000000, 4});

void BM_Contains(benchmark::State& state) {
  const RobotModel robot = planar_2r();
  SamplingSpec sampling;
  sampling.total_samples = 200000;
  sampling.seed = 42;
  const VoxelGrid grid = build_workspace_grid(robot, sampling, planar_grid(), 1);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> coord(-1.2, 1.2);
  std::vector<Point3> points(4096);
  for (auto& p : points) p = Point3(coord(rng), coord(rng), 0.0);

  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(contains(grid, points[i++ & 4095]));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Contains);

void BM_SampleJointSpace(benchmark::State& state) {
  const RobotModel robot = planar_2r();
  SamplingSpec sampling;
  sampling.total_samples = std::uint64_t(state.range(0));
  sampling.seed = 42;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_joint_space(robot, sampling));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SampleJointSpace)->Arg(100000);

}  // namespace

BENCHMARK_MAIN();
