#include "lidarcal/icpn.hpp"

#include "lidarcal/error.hpp"
#include "lidarcal/scene.hpp"

#include <gtest/gtest.h>

#include <random>

namespace lidarcal {
namespace {

// Planar-rich capture in the master frame: ground plus walls and boxes.
PointCloud refinement_cloud(std::uint64_t seed) {
  SceneSpec spec;
  spec.ground_size_x = 30.0;
  spec.ground_size_y = 30.0;
  spec.density = 4.0;
  spec.noise_sigma = 0.0;
  spec.seed = seed;
  spec.primitives = {
      {PrimitiveType::kWall, 8.0, 2.0, deg_to_rad(15.0), 10.0, 2.5, 0.0},
      {PrimitiveType::kWall, -6.0, -7.0, deg_to_rad(80.0), 6.0, 2.0, 0.0},
      {PrimitiveType::kBox, 3.0, -7.0, deg_to_rad(30.0), 2.0, 2.0, 1.5, },
      {PrimitiveType::kBox, -8.0, 6.0, 0.0, 2.5, 1.5, 2.0},
  };
  const Scene scene = generate_scene(spec);
  PointCloud cloud;
  cloud.points = scene.points;
  // Sensor above the scene, as in a capture.
  RigidTransform drop;
  drop.translation = Eigen::Vector3d(0.0, 0.0, -2.0);
  return apply(drop, cloud);
}

TEST(Icpn, ExactOverlapConvergesImmediately) {
  const PointCloud cloud = refinement_cloud(501);
  const auto master = estimate_normals(cloud, 40);
  const IcpnResult result = icpn_refine(master, cloud, RigidTransform::identity(), IcpnConfig{});
  EXPECT_TRUE(result.converged);
  EXPECT_LE(result.iterations_used, 2);
  EXPECT_LT(result.final_cost, 1e-12);
  EXPECT_LT((result.transform.rotation - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff(),
            1e-9);
}

// Oracle: the generator's transform. slave = T^-1(master) so the refined
// pose must equal T.
TEST(Icpn, RecoversKnownSmallTransform) {
  const PointCloud cloud = refinement_cloud(503);
  const auto master = estimate_normals(cloud, 40);

  EulerPose pose;
  pose.pitch = deg_to_rad(1.2);
  pose.roll = deg_to_rad(-0.8);
  pose.yaw = deg_to_rad(1.5);
  pose.x = 0.03;
  pose.y = -0.04;
  pose.z = 0.02;
  const RigidTransform truth = euler_to_transform(pose);
  const PointCloud slave = apply(truth.inverse(), cloud);

  const IcpnResult result = icpn_refine(master, slave, RigidTransform::identity(), IcpnConfig{});
  EXPECT_TRUE(result.converged);
  const EulerPose err = transform_to_euler(truth.inverse() * result.transform);
  EXPECT_LT(std::abs(err.pitch), deg_to_rad(0.1));
  EXPECT_LT(std::abs(err.roll), deg_to_rad(0.1));
  EXPECT_LT(std::abs(err.yaw), deg_to_rad(0.1));
  EXPECT_LT(std::abs(err.x), 0.005);
  EXPECT_LT(std::abs(err.y), 0.005);
  EXPECT_LT(std::abs(err.z), 0.005);
}

TEST(Icpn, DisjointPlacementStarves) {
  const PointCloud cloud = refinement_cloud(507);
  const auto master = estimate_normals(cloud, 40);
  RigidTransform away;
  away.translation = Eigen::Vector3d(500.0, 0.0, 0.0);
  const PointCloud slave = apply(away, cloud);
  try {
    icpn_refine(master, slave, RigidTransform::identity(), IcpnConfig{});
    FAIL() << "expected correspondence-starvation";
  } catch (const CalibError& err) {
    EXPECT_EQ(err.code(), ErrorCode::kCorrespondenceStarvation);
  }
}

TEST(Icpn, AcceptedCostsNeverIncrease) {
  const PointCloud cloud = refinement_cloud(509);
  const auto master = estimate_normals(cloud, 40);
  std::mt19937_64 rng(511);
  std::uniform_real_distribution<double> angle(-deg_to_rad(4.0), deg_to_rad(4.0));
  std::uniform_real_distribution<double> shift(-0.1, 0.1);
  for (int rep = 0; rep < 8; ++rep) {
    EulerPose pose;
    pose.pitch = angle(rng);
    pose.roll = angle(rng);
    pose.yaw = angle(rng);
    pose.x = shift(rng);
    pose.y = shift(rng);
    pose.z = shift(rng);
    const PointCloud slave = apply(euler_to_transform(pose), cloud);
    const IcpnResult result =
        icpn_refine(master, slave, RigidTransform::identity(), IcpnConfig{});
    for (std::size_t i = 1; i < result.accepted_costs.size(); ++i) {
      EXPECT_LE(result.accepted_costs[i], result.accepted_costs[i - 1] + 1e-15);
    }
    EXPECT_LE(result.final_cost, result.accepted_costs.front());
  }
}

// Finite-difference check of the small-angle linearization: on a frozen
// correspondence set, the quadratic model from (J, r) must predict the true
// cost change of a small pose increment within 10%.
TEST(Icpn, LinearizationMatchesFiniteDifference) {
  const PointCloud cloud = refinement_cloud(521);
  const auto master = estimate_normals(cloud, 40);
  std::vector<Point3> master_positions;
  for (const auto& op : master) master_positions.push_back(op.position);
  const KdTree index(std::move(master_positions));

  EulerPose start;
  start.pitch = deg_to_rad(0.4);
  start.yaw = deg_to_rad(-0.5);
  start.x = 0.02;
  const RigidTransform pose = euler_to_transform(start);
  const PointCloud slave = apply(pose.inverse(), cloud);

  // Frozen pairs at the identity pose of the slave.
  struct Pair {
    Point3 q;
    Point3 target;
    Eigen::Vector3d normal;
  };
  std::vector<Pair> pairs;
  for (const Point3& p : slave.points) {
    const Neighbor nn = index.nearest(p);
    if (nn.distance > 0.5) continue;
    pairs.push_back({p, master[nn.index].position, master[nn.index].normal});
  }
  ASSERT_GT(pairs.size(), 100u);

  auto cost_at = [&](const RigidTransform& t) {
    double sum = 0.0;
    for (const Pair& pair : pairs) {
      const double r = pair.normal.dot(t * pair.q - pair.target);
      sum += r * r;
    }
    return sum / static_cast<double>(pairs.size());
  };

  std::mt19937_64 rng(523);
  std::uniform_real_distribution<double> small(-0.004, 0.004);
  for (int rep = 0; rep < 20; ++rep) {
    Eigen::Matrix<double, 6, 1> delta;
    for (int i = 0; i < 6; ++i) delta[i] = small(rng);

    // Quadratic model around the identity increment.
    double linear = 0.0, quad = 0.0;
    for (const Pair& pair : pairs) {
      const double r = pair.normal.dot(pair.q - pair.target);
      Eigen::Matrix<double, 6, 1> j;
      j.head<3>() = pair.q.cross(pair.normal);
      j.tail<3>() = pair.normal;
      const double jd = j.dot(delta);
      linear += 2.0 * r * jd;
      quad += jd * jd;
    }
    const double n = static_cast<double>(pairs.size());
    const double predicted = (linear + quad) / n;

    const Eigen::Vector3d omega = delta.head<3>();
    RigidTransform inc = rodrigues(omega.normalized(), omega.norm());
    inc.translation = delta.tail<3>();
    const double actual = cost_at(inc) - cost_at(RigidTransform::identity());
    EXPECT_NEAR(predicted, actual, 0.1 * std::abs(actual) + 1e-9);
  }
}

TEST(Icpn, CostAtReturnedPoseNotWorseThanInput) {
  const PointCloud cloud = refinement_cloud(541);
  const auto master = estimate_normals(cloud, 40);
  std::vector<Point3> master_positions;
  for (const auto& op : master) master_positions.push_back(op.position);
  const KdTree index(std::move(master_positions));

  EulerPose pose;
  pose.pitch = deg_to_rad(2.0);
  pose.roll = deg_to_rad(-1.0);
  pose.x = 0.08;
  const RigidTransform initial = euler_to_transform(pose);
  const IcpnConfig cfg;
  const auto slave_normals = estimate_normals(cloud, cfg.normal_k);

  const IcpnResult result = icpn_refine(master, cloud, initial, cfg);
  const double before = point_to_plane_cost(master, index, slave_normals, initial, cfg);
  const double after = point_to_plane_cost(master, index, slave_normals, result.transform, cfg);
  EXPECT_LE(after, before + 1e-15);
}

}  // namespace
}  // namespace lidarcal
