#include "lidarcal/scene.hpp"

#include "lidarcal/error.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace lidarcal {
namespace {

TEST(GenerateScene, GroundOnlyCountsAndPlacement) {
  SceneSpec spec;
  spec.ground_size_x = 40.0;
  spec.ground_size_y = 40.0;
  spec.density = 10.0;
  spec.noise_sigma = 0.0;
  spec.seed = 1;
  const Scene scene = generate_scene(spec);
  ASSERT_EQ(scene.points.size(), 16000u);
  for (std::size_t i = 0; i < scene.points.size(); ++i) {
    EXPECT_EQ(scene.labels[i], 0);
    EXPECT_EQ(scene.points[i].z(), 0.0);
    EXPECT_LE(std::abs(scene.points[i].x()), 20.0);
    EXPECT_LE(std::abs(scene.points[i].y()), 20.0);
  }
}

TEST(GenerateScene, WallAreaTimesDensity) {
  SceneSpec spec;
  spec.ground_size_x = 1.0;
  spec.ground_size_y = 1.0;
  spec.density = 10.0;
  spec.noise_sigma = 0.0;
  spec.seed = 2;
  spec.primitives = {{PrimitiveType::kWall, 3.0, -2.0, deg_to_rad(30.0), 10.0, 2.0, 0.0}};
  const Scene scene = generate_scene(spec);

  std::size_t wall_count = 0;
  const Eigen::Vector3d normal(-std::sin(deg_to_rad(30.0)), std::cos(deg_to_rad(30.0)), 0.0);
  for (std::size_t i = 0; i < scene.points.size(); ++i) {
    if (scene.labels[i] != 1) continue;
    ++wall_count;
    const Eigen::Vector3d rel = scene.points[i] - Point3(3.0, -2.0, 0.0);
    EXPECT_NEAR(normal.dot(rel), 0.0, 1e-12);  // on the wall plane
    EXPECT_GE(scene.points[i].z(), 0.0);
    EXPECT_LE(scene.points[i].z(), 2.0);
  }
  EXPECT_EQ(wall_count, 200u);
}

TEST(GenerateScene, DeterministicPerSeed) {
  SceneSpec spec = SceneSpec::standard();
  const Scene a = generate_scene(spec);
  const Scene b = generate_scene(spec);
  ASSERT_EQ(a.points.size(), b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    EXPECT_EQ(a.points[i], b.points[i]);
    EXPECT_EQ(a.labels[i], b.labels[i]);
  }
}

TEST(GenerateScene, ZeroDensityIsAnError) {
  SceneSpec spec;
  spec.density = 0.0;
  EXPECT_THROW(generate_scene(spec), CalibError);
}

TEST(Capture, IdentitySensorSeesTheWorldCloud) {
  SceneSpec spec;
  spec.ground_size_x = 10.0;
  spec.ground_size_y = 10.0;
  spec.density = 5.0;
  spec.seed = 3;
  const Scene scene = generate_scene(spec);

  RigSpec rig;
  rig.max_range = 1e6;
  rig.fov_deg = 360.0;
  rig.sensors = {{"top", true, RigidTransform::identity()}};
  const CaptureResult cap = capture_sensor(scene, rig, rig.sensors[0]);
  ASSERT_EQ(cap.cloud.size(), scene.points.size());
  for (std::size_t i = 0; i < scene.points.size(); ++i) {
    EXPECT_EQ(cap.cloud.points[i], scene.points[i]);
  }
  EXPECT_EQ(cap.cloud.frame_id, "top");
}

TEST(Capture, TranslatedSensorShiftsZ) {
  Scene scene;
  scene.points = {{1.0, 2.0, 0.0}, {-3.0, 0.0, 0.0}};
  scene.labels = {0, 0};
  RigSpec rig;
  rig.fov_deg = 360.0;
  SensorSpec sensor{"top", true, RigidTransform::identity()};
  sensor.pose.translation = Eigen::Vector3d(0.0, 0.0, 2.0);
  const CaptureResult cap = capture_sensor(scene, rig, sensor);
  ASSERT_EQ(cap.cloud.size(), 2u);
  EXPECT_DOUBLE_EQ(cap.cloud.points[0].z(), -2.0);
  EXPECT_DOUBLE_EQ(cap.cloud.points[1].z(), -2.0);
}

// Oracle: the capture is the inverse pose; applying the pose must give back
// the world points.
TEST(Capture, RoundTripsThroughTheGroundTruthPose) {
  const Scene scene = generate_scene(SceneSpec::standard());
  const RigSpec rig = RigSpec::standard();
  for (const SensorSpec& sensor : rig.sensors) {
    const CaptureResult cap = capture_sensor(scene, rig, sensor);
    ASSERT_GT(cap.cloud.size(), 0u);
    const PointCloud in_world = apply(sensor.pose, cap.cloud);
    // Captured points are a subset of the scene in original order; walk both.
    std::size_t scene_i = 0;
    for (const Point3& p : in_world.points) {
      while (scene_i < scene.points.size() &&
             (scene.points[scene_i] - p).cwiseAbs().maxCoeff() > 1e-9) {
        ++scene_i;
      }
      ASSERT_LT(scene_i, scene.points.size());
      ++scene_i;
    }
  }
}

TEST(Capture, RangeAndFovFilter) {
  SceneSpec spec;
  spec.ground_size_x = 30.0;
  spec.ground_size_y = 30.0;
  spec.density = 5.0;
  spec.seed = 5;
  const Scene scene = generate_scene(spec);

  RigSpec rig;
  rig.max_range = 8.0;
  rig.fov_deg = 90.0;
  SensorSpec sensor{"top", true, RigidTransform::identity()};
  sensor.pose.translation = Eigen::Vector3d(0.0, 0.0, 2.0);
  const CaptureResult cap = capture_sensor(scene, rig, sensor);
  EXPECT_GT(cap.cloud.size(), 0u);
  EXPECT_LT(cap.cloud.size(), scene.points.size());
  for (const Point3& q : cap.cloud.points) {
    EXPECT_LE(q.norm(), 8.0 + 1e-12);
    EXPECT_LE(std::abs(std::atan2(q.z(), std::hypot(q.x(), q.y()))), deg_to_rad(45.0) + 1e-12);
  }
}

TEST(Capture, SparseFlagBelowTwoHundredReturns) {
  Scene scene;
  for (int i = 0; i < 150; ++i) {
    scene.points.emplace_back(0.1 * i, 0.0, 0.0);
    scene.labels.push_back(0);
  }
  RigSpec rig;
  rig.fov_deg = 360.0;
  SensorSpec sensor{"top", true, RigidTransform::identity()};
  EXPECT_TRUE(capture_sensor(scene, rig, sensor).sparse);
}

TEST(Perturb, ZeroBoundsReturnTheGroundTruth) {
  EulerPose pose;
  pose.pitch = 0.3;
  pose.yaw = -1.0;
  pose.x = 2.0;
  const RigidTransform gt = euler_to_transform(pose);
  PerturbationSpec spec;
  spec.rotation_bound_deg = 0.0;
  spec.translation_bound = 0.0;
  const auto [guess, deviation] = perturb(gt, spec);
  EXPECT_EQ(guess.rotation, gt.rotation);
  EXPECT_EQ(guess.translation, gt.translation);
  EXPECT_EQ(deviation.pitch, 0.0);
  EXPECT_EQ(deviation.x, 0.0);
}

// Statistical check of the sampler: all draws in bounds, mean near zero.
TEST(Perturb, DrawsAreBoundedWithNearZeroMean) {
  const RigidTransform gt = RigidTransform::identity();
  const double rot_bound = deg_to_rad(45.0);
  const int n = 1000;
  double sums[6] = {0, 0, 0, 0, 0, 0};
  for (int i = 0; i < n; ++i) {
    PerturbationSpec spec;
    spec.seed = 1000 + i;
    const auto [guess, d] = perturb(gt, spec);
    (void)guess;
    EXPECT_LE(std::abs(d.pitch), rot_bound);
    EXPECT_LE(std::abs(d.roll), rot_bound);
    EXPECT_LE(std::abs(d.yaw), rot_bound);
    EXPECT_LE(std::abs(d.x), 0.1);
    EXPECT_LE(std::abs(d.y), 0.1);
    EXPECT_LE(std::abs(d.z), 0.1);
    sums[0] += d.pitch;
    sums[1] += d.roll;
    sums[2] += d.yaw;
    sums[3] += d.x;
    sums[4] += d.y;
    sums[5] += d.z;
  }
  // Uniform(-b, b): se of the mean is b / sqrt(3 n).
  const double rot_se = rot_bound / std::sqrt(3.0 * n);
  const double trans_se = 0.1 / std::sqrt(3.0 * n);
  for (int axis = 0; axis < 3; ++axis) {
    EXPECT_LE(std::abs(sums[axis] / n), 3.0 * rot_se);
    EXPECT_LE(std::abs(sums[3 + axis] / n), 3.0 * trans_se);
  }
}

TEST(Perturb, SameSeedSameDraw) {
  PerturbationSpec spec;
  spec.seed = 424242;
  const RigidTransform gt = RigidTransform::identity();
  const auto [a, da] = perturb(gt, spec);
  const auto [b, db] = perturb(gt, spec);
  EXPECT_EQ(a.rotation, b.rotation);
  EXPECT_EQ(da.yaw, db.yaw);
}

TEST(RigSpec, ExactlyOneMasterEnforced) {
  RigSpec rig = RigSpec::standard();
  EXPECT_EQ(rig.master().frame_id, "top");
  rig.sensors[1].master = true;
  EXPECT_THROW(rig.master(), CalibError);
  RigSpec none;
  none.sensors = {{"a", false, RigidTransform::identity()}};
  EXPECT_THROW(none.master(), CalibError);
}

}  // namespace
}  // namespace lidarcal
