#include "lidarcal/ground.hpp"
#include "lidarcal/icpn.hpp"
#include "lidarcal/kdtree.hpp"
#include "lidarcal/octree.hpp"
#include "lidarcal/pipeline.hpp"
#include "lidarcal/planar_search.hpp"
#include "lidarcal/scene.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

using namespace lidarcal;

PointCloud random_cloud(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-20.0, 20.0);
  PointCloud cloud;
  cloud.points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    cloud.points.emplace_back(coord(rng), coord(rng), coord(rng));
  }
  return cloud;
}

PointCloud standard_capture() {
  const Scene scene = generate_scene(SceneSpec::standard());
  const RigSpec rig = RigSpec::standard();
  return capture_sensor(scene, rig, rig.master()).cloud;
}

void BM_KdTreeBuild(benchmark::State& state) {
  const PointCloud cloud = random_cloud(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) {
    KdTree tree(cloud);
    benchmark::DoNotOptimize(tree.size());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_KdTreeBuild)->Range(1 << 10, 1 << 16)->Complexity();

void BM_KdTreeKnn40(benchmark::State& state) {
  const PointCloud cloud = random_cloud(static_cast<std::size_t>(state.range(0)), 2);
  const KdTree tree(cloud);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> coord(-20.0, 20.0);
  for (auto _ : state) {
    const Point3 query(coord(rng), coord(rng), coord(rng));
    benchmark::DoNotOptimize(tree.knn(query, 40));
  }
}
BENCHMARK(BM_KdTreeKnn40)->Range(1 << 12, 1 << 16);

void BM_FitGroundPlane(benchmark::State& state) {
  const PointCloud cloud = standard_capture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_ground_plane(cloud, 0.05, 500, 7).inlier_count);
  }
}
BENCHMARK(BM_FitGroundPlane);

void BM_ReducedCost(benchmark::State& state) {
  const PointCloud cloud = standard_capture();
  const Plane plane = fit_ground_plane(cloud, 0.05, 500, 7);
  const PointCloud ng = voxel_downsample(remove_ground(cloud, plane, 0.05), 0.3);
  const KdTree index(ng);
  PlanarSearchConfig cfg;
  double yaw = 0.0;
  for (auto _ : state) {
    yaw += 0.001;
    benchmark::DoNotOptimize(reduced_cost(index, ng, yaw, 0.01, -0.01, cfg));
  }
}
BENCHMARK(BM_ReducedCost);

void BM_EstimateNormals(benchmark::State& state) {
  const PointCloud cloud = standard_capture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimate_normals(cloud, 40).size());
  }
}
BENCHMARK(BM_EstimateNormals);

void BM_IcpnRefine(benchmark::State& state) {
  const PointCloud cloud = standard_capture();
  const auto master = estimate_normals(cloud, 40);
  EulerPose off;
  off.yaw = deg_to_rad(1.0);
  off.x = 0.05;
  const PointCloud slave = apply(euler_to_transform(off), cloud);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        icpn_refine(master, slave, RigidTransform::identity(), IcpnConfig{}).iterations_used);
  }
}
BENCHMARK(BM_IcpnRefine);

void BM_OctreeVolume(benchmark::State& state) {
  const PointCloud cloud = random_cloud(static_cast<std::size_t>(state.range(0)), 4);
  const OctreeScanConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(octree_volume(cloud, cfg).occupied_leaf_count);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_OctreeVolume)->Range(1 << 12, 1 << 16)->Complexity();

void BM_OctreeRefine(benchmark::State& state) {
  const PointCloud master = standard_capture();
  EulerPose off;
  off.yaw = deg_to_rad(0.3);
  const PointCloud slave = apply(euler_to_transform(off), master);
  const OctreeScanConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        octree_refine(master, slave, RigidTransform::identity(), cfg).translation.x());
  }
}
BENCHMARK(BM_OctreeRefine);

void BM_CalibratePair(benchmark::State& state) {
  const Scene scene = generate_scene(SceneSpec::standard());
  const RigSpec rig = RigSpec::standard();
  const PointCloud master = capture_sensor(scene, rig, rig.sensors[0]).cloud;
  const PointCloud slave = capture_sensor(scene, rig, rig.sensors[1]).cloud;
  const RigidTransform truth = rig.sensors[0].pose.inverse() * rig.sensors[1].pose;

  PerturbationSpec pspec;
  pspec.seed = 5;
  const auto [guess, deviation] = perturb(truth, pspec);
  (void)deviation;
  const PointCloud placed = apply(guess, slave);
  PipelineConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(calibrate_pair(master, placed, cfg).first.translation.x());
  }
}
BENCHMARK(BM_CalibratePair);

}  // namespace

BENCHMARK_MAIN();
