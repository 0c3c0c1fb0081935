#include "lidarcal/spec_io.hpp"

#include "lidarcal/error.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

namespace lidarcal {
namespace {

class SpecIoTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("lidarcal_spec_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  std::filesystem::path dir_;
};

TEST_F(SpecIoTest, SceneRoundTrip) {
  const SceneSpec spec = SceneSpec::standard();
  save_scene_spec(spec, path("scene.txt"));
  const SceneSpec back = load_scene_spec(path("scene.txt"));
  EXPECT_EQ(back.seed, spec.seed);
  EXPECT_DOUBLE_EQ(back.density, spec.density);
  EXPECT_DOUBLE_EQ(back.noise_sigma, spec.noise_sigma);
  EXPECT_DOUBLE_EQ(back.ground_size_x, spec.ground_size_x);
  ASSERT_EQ(back.primitives.size(), spec.primitives.size());
  for (std::size_t i = 0; i < spec.primitives.size(); ++i) {
    EXPECT_EQ(back.primitives[i].type, spec.primitives[i].type);
    EXPECT_NEAR(back.primitives[i].yaw, spec.primitives[i].yaw, 1e-12);
    EXPECT_DOUBLE_EQ(back.primitives[i].a, spec.primitives[i].a);
  }
}

TEST_F(SpecIoTest, ShippedStandardSceneMatchesBuiltin) {
  const SceneSpec file = load_scene_spec(std::string(LIDARCAL_DATA_DIR) + "/standard_scene.txt");
  const SceneSpec code = SceneSpec::standard();
  EXPECT_EQ(file.seed, code.seed);
  EXPECT_DOUBLE_EQ(file.density, code.density);
  EXPECT_DOUBLE_EQ(file.noise_sigma, code.noise_sigma);
  ASSERT_EQ(file.primitives.size(), code.primitives.size());
  for (std::size_t i = 0; i < code.primitives.size(); ++i) {
    EXPECT_EQ(file.primitives[i].type, code.primitives[i].type);
    EXPECT_DOUBLE_EQ(file.primitives[i].cx, code.primitives[i].cx);
    EXPECT_DOUBLE_EQ(file.primitives[i].cy, code.primitives[i].cy);
    EXPECT_NEAR(file.primitives[i].yaw, code.primitives[i].yaw, 1e-12);
  }
}

TEST_F(SpecIoTest, ShippedStandardRigMatchesBuiltin) {
  const RigSpec file = load_rig_spec(std::string(LIDARCAL_DATA_DIR) + "/standard_rig.txt");
  const RigSpec code = RigSpec::standard();
  ASSERT_EQ(file.sensors.size(), code.sensors.size());
  for (std::size_t i = 0; i < code.sensors.size(); ++i) {
    EXPECT_EQ(file.sensors[i].frame_id, code.sensors[i].frame_id);
    EXPECT_EQ(file.sensors[i].master, code.sensors[i].master);
    EXPECT_LT((file.sensors[i].pose.rotation - code.sensors[i].pose.rotation)
                  .cwiseAbs()
                  .maxCoeff(),
              1e-9);
    EXPECT_LT((file.sensors[i].pose.translation - code.sensors[i].pose.translation).norm(),
              1e-9);
  }
}

TEST_F(SpecIoTest, RigRoundTrip) {
  const RigSpec rig = RigSpec::standard();
  save_rig_spec(rig, path("rig.txt"));
  const RigSpec back = load_rig_spec(path("rig.txt"));
  ASSERT_EQ(back.sensors.size(), rig.sensors.size());
  EXPECT_EQ(back.master().frame_id, "top");
  for (std::size_t i = 0; i < rig.sensors.size(); ++i) {
    EXPECT_LT((back.sensors[i].pose.rotation - rig.sensors[i].pose.rotation)
                  .cwiseAbs()
                  .maxCoeff(),
              1e-9);
  }
}

TEST_F(SpecIoTest, PerturbationRoundTrip) {
  PerturbationSpec spec;
  spec.rotation_bound_deg = 30.0;
  spec.translation_bound = 0.2;
  spec.seed = 77;
  save_perturbation_spec(spec, path("perturb.txt"));
  const PerturbationSpec back = load_perturbation_spec(path("perturb.txt"));
  EXPECT_DOUBLE_EQ(back.rotation_bound_deg, 30.0);
  EXPECT_DOUBLE_EQ(back.translation_bound, 0.2);
  EXPECT_EQ(back.seed, 77u);
}

TEST_F(SpecIoTest, PipelineConfigOverridesDefaults) {
  std::ofstream out(path("cfg.txt"));
  out << "# overrides\n"
      << "ground_epsilon 0.08\n"
      << "ransac_iterations 250\n"
      << "planar_coarse_step_deg 1\n"
      << "icpn_enabled 0\n"
      << "octree_halvings 2\n"
      << "success_rot_threshold_deg 0.25\n";
  out.close();
  const PipelineConfig cfg = load_pipeline_config(path("cfg.txt"));
  EXPECT_DOUBLE_EQ(cfg.ground_epsilon, 0.08);
  EXPECT_EQ(cfg.ransac_iterations, 250);
  EXPECT_NEAR(cfg.planar.coarse_step, deg_to_rad(1.0), 1e-12);
  EXPECT_FALSE(cfg.run_icpn);
  EXPECT_TRUE(cfg.run_octree);
  EXPECT_EQ(cfg.octree.halvings, 2);
  EXPECT_DOUBLE_EQ(cfg.success_rot_threshold_deg, 0.25);
  // Untouched keys keep their defaults.
  EXPECT_DOUBLE_EQ(cfg.planar.xy_range, 0.5);
  EXPECT_EQ(cfg.icpn.max_iterations, 50);
}

TEST_F(SpecIoTest, UnknownKeyNamesTheLine) {
  std::ofstream out(path("bad.txt"));
  out << "ground_epsilon 0.05\nnonsense 12\n";
  out.close();
  try {
    load_pipeline_config(path("bad.txt"));
    FAIL() << "expected parse error";
  } catch (const CalibError& err) {
    EXPECT_EQ(err.code(), ErrorCode::kParseError);
    EXPECT_NE(std::string(err.what()).find(":2:"), std::string::npos);
    EXPECT_NE(std::string(err.what()).find("nonsense"), std::string::npos);
  }
}

TEST_F(SpecIoTest, PosesRoundTrip) {
  NamedPoses poses;
  EulerPose a;
  a.pitch = deg_to_rad(2.0);
  a.yaw = deg_to_rad(180.0);
  a.x = 2.2;
  a.z = -1.4;
  poses.emplace_back("front", a);
  EulerPose b;
  b.roll = deg_to_rad(-1.0);
  b.y = -1.0;
  poses.emplace_back("right", b);

  save_poses(poses, path("poses.txt"));
  const NamedPoses back = load_poses(path("poses.txt"));
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].first, "front");
  EXPECT_NEAR(back[0].second.pitch, a.pitch, 1e-12);
  EXPECT_NEAR(back[0].second.yaw, a.yaw, 1e-12);
  EXPECT_DOUBLE_EQ(back[0].second.x, 2.2);
  EXPECT_EQ(back[1].first, "right");
  EXPECT_NEAR(back[1].second.roll, b.roll, 1e-12);
}

TEST_F(SpecIoTest, MissingFileIsIoError) {
  EXPECT_THROW(load_scene_spec(path("missing.txt")), CalibError);
}

TEST_F(SpecIoTest, MalformedPrimitiveNamesTheLine) {
  std::ofstream out(path("scene.txt"));
  out << "ground 10 10\nwall 1 2 3\n";
  out.close();
  try {
    load_scene_spec(path("scene.txt"));
    FAIL() << "expected parse error";
  } catch (const CalibError& err) {
    EXPECT_NE(std::string(err.what()).find(":2:"), std::string::npos);
  }
}

}  // namespace
}  // namespace lidarcal
