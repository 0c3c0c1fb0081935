#include "lidarcal/scene.hpp"

#include "lidarcal/error.hpp"

#include <cmath>
#include <random>

namespace lidarcal {

namespace {

constexpr std::size_t kSparseThreshold = 200;

using Rng = std::mt19937_64;

// Samples `count` points on the rectangle origin + u*edge_u + v*edge_v,
// u, v uniform in [0, 1].
void sample_rect(Rng& rng, const Point3& origin, const Eigen::Vector3d& edge_u,
                 const Eigen::Vector3d& edge_v, long count, int label, Scene& out) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (long i = 0; i < count; ++i) {
    const double u = unit(rng);
    const double v = unit(rng);
    out.points.push_back(origin + u * edge_u + v * edge_v);
    out.labels.push_back(label);
  }
}

void sample_primitive(Rng& rng, const Primitive& prim, double density, int label, Scene& out) {
  const Eigen::Vector3d dir(std::cos(prim.yaw), std::sin(prim.yaw), 0.0);
  const Eigen::Vector3d side(-std::sin(prim.yaw), std::cos(prim.yaw), 0.0);
  const Eigen::Vector3d up(0.0, 0.0, 1.0);
  const Point3 base(prim.cx, prim.cy, 0.0);

  switch (prim.type) {
    case PrimitiveType::kWall: {
      const long count = std::lround(prim.a * prim.b * density);
      sample_rect(rng, base - 0.5 * prim.a * dir, prim.a * dir, prim.b * up, count, label, out);
      break;
    }
    case PrimitiveType::kBox: {
      const double sx = prim.a, sy = prim.b, sz = prim.c;
      const Point3 corner = base - 0.5 * sx * dir - 0.5 * sy * side;
      // Four sides then the top; the bottom face sits on the ground.
      sample_rect(rng, corner, sx * dir, sz * up, std::lround(sx * sz * density), label, out);
      sample_rect(rng, corner + sy * side, sx * dir, sz * up, std::lround(sx * sz * density),
                  label, out);
      sample_rect(rng, corner, sy * side, sz * up, std::lround(sy * sz * density), label, out);
      sample_rect(rng, corner + sx * dir, sy * side, sz * up,
                  std::lround(sy * sz * density), label, out);
      sample_rect(rng, corner + sz * up, sx * dir, sy * side,
                  std::lround(sx * sy * density), label, out);
      break;
    }
    case PrimitiveType::kPole: {
      const double radius = prim.a, height = prim.b;
      const long count = std::lround(2.0 * M_PI * radius * height * density);
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      for (long i = 0; i < count; ++i) {
        const double theta = 2.0 * M_PI * unit(rng);
        const double z = height * unit(rng);
        out.points.push_back(base + Point3(radius * std::cos(theta), radius * std::sin(theta), z));
        out.labels.push_back(label);
      }
      break;
    }
  }
}

}  // namespace

Scene generate_scene(const SceneSpec& spec) {
  if (spec.density <= 0.0) {
    throw CalibError(ErrorCode::kInvalidArgument, "generate_scene: density must be positive");
  }
  if (spec.ground_size_x <= 0.0 || spec.ground_size_y <= 0.0) {
    throw CalibError(ErrorCode::kInvalidArgument, "generate_scene: ground extent must be positive");
  }

  Rng rng(spec.seed);
  Scene scene;

  const long ground_count = std::lround(spec.ground_size_x * spec.ground_size_y * spec.density);
  sample_rect(rng, Point3(-0.5 * spec.ground_size_x, -0.5 * spec.ground_size_y, 0.0),
              Eigen::Vector3d(spec.ground_size_x, 0.0, 0.0),
              Eigen::Vector3d(0.0, spec.ground_size_y, 0.0), ground_count, 0, scene);

  int label = 1;
  for (const Primitive& prim : spec.primitives) {
    sample_primitive(rng, prim, spec.density, label++, scene);
  }

  if (spec.noise_sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, spec.noise_sigma);
    for (Point3& p : scene.points) {
      p.x() += noise(rng);
      p.y() += noise(rng);
      p.z() += noise(rng);
    }
  }
  return scene;
}

CaptureResult capture_sensor(const Scene& scene, const RigSpec& rig, const SensorSpec& sensor) {
  const RigidTransform world_to_sensor = sensor.pose.inverse();
  const double half_fov = deg_to_rad(rig.fov_deg) / 2.0;

  CaptureResult out;
  out.cloud.frame_id = sensor.frame_id;
  for (std::size_t i = 0; i < scene.points.size(); ++i) {
    const Point3 q = world_to_sensor * scene.points[i];
    const double range = q.norm();
    if (range > rig.max_range) continue;
    const double elevation = std::atan2(q.z(), std::hypot(q.x(), q.y()));
    if (std::abs(elevation) > half_fov) continue;
    out.cloud.points.push_back(q);
    out.labels.push_back(scene.labels[i]);
  }
  out.sparse = out.cloud.size() < kSparseThreshold;
  return out;
}

std::vector<CaptureResult> capture(const Scene& scene, const RigSpec& rig) {
  std::vector<CaptureResult> out;
  out.reserve(rig.sensors.size());
  for (const SensorSpec& sensor : rig.sensors) {
    out.push_back(capture_sensor(scene, rig, sensor));
  }
  return out;
}

std::pair<RigidTransform, EulerPose> perturb(const RigidTransform& gt,
                                             const PerturbationSpec& spec) {
  if (spec.rotation_bound_deg < 0.0 || spec.translation_bound < 0.0) {
    throw CalibError(ErrorCode::kInvalidArgument, "perturb: bounds must be non-negative");
  }
  Rng rng(spec.seed);
  const double rot_bound = deg_to_rad(spec.rotation_bound_deg);
  std::uniform_real_distribution<double> rot(-rot_bound, rot_bound);
  std::uniform_real_distribution<double> trans(-spec.translation_bound, spec.translation_bound);

  EulerPose deviation;
  if (spec.rotation_bound_deg > 0.0) {
    deviation.pitch = rot(rng);
    deviation.roll = rot(rng);
    deviation.yaw = rot(rng);
  }
  if (spec.translation_bound > 0.0) {
    deviation.x = trans(rng);
    deviation.y = trans(rng);
    deviation.z = trans(rng);
  }
  // Left composition: the deviation displaces the pose in the frame the
  // calibration works in, so each bound is a per-axis bound on the residual
  // the pipeline has to recover.
  return {euler_to_transform(deviation) * gt, deviation};
}

const SensorSpec& RigSpec::master() const {
  const SensorSpec* found = nullptr;
  for (const SensorSpec& sensor : sensors) {
    if (sensor.master) {
      if (found != nullptr) {
        throw CalibError(ErrorCode::kInvalidArgument, "RigSpec: more than one master sensor");
      }
      found = &sensor;
    }
  }
  if (found == nullptr) {
    throw CalibError(ErrorCode::kInvalidArgument, "RigSpec: no master sensor");
  }
  return *found;
}

SceneSpec SceneSpec::standard() {
  SceneSpec spec;
  spec.ground_size_x = 40.0;
  spec.ground_size_y = 40.0;
  spec.density = 4.0;
  spec.noise_sigma = 0.01;
  spec.seed = 9021;
  spec.primitives = {
      {PrimitiveType::kWall, 12.0, 5.0, deg_to_rad(10.0), 10.0, 3.0, 0.0},
      {PrimitiveType::kWall, -8.0, -10.0, deg_to_rad(100.0), 8.0, 2.5, 0.0},
      {PrimitiveType::kWall, 3.0, 14.0, deg_to_rad(-35.0), 12.0, 3.0, 0.0},
      {PrimitiveType::kBox, 6.0, -7.0, deg_to_rad(25.0), 2.0, 3.0, 1.5},
      {PrimitiveType::kBox, -12.0, 6.0, deg_to_rad(70.0), 3.0, 2.0, 2.0},
      {PrimitiveType::kBox, -4.0, -3.0, 0.0, 1.5, 1.5, 1.0},
      {PrimitiveType::kBox, 10.0, 10.0, deg_to_rad(-50.0), 2.0, 2.0, 2.5},
      {PrimitiveType::kPole, 15.0, -3.0, 0.0, 0.15, 4.0, 0.0},
      {PrimitiveType::kPole, -15.0, -14.0, 0.0, 0.15, 5.0, 0.0},
      {PrimitiveType::kPole, 2.0, -13.0, 0.0, 0.20, 4.0, 0.0},
      {PrimitiveType::kPole, -6.0, 12.0, 0.0, 0.15, 6.0, 0.0},
      {PrimitiveType::kPole, 14.0, 3.0, 0.0, 0.20, 5.0, 0.0},
      {PrimitiveType::kPole, -2.0, 5.0, 0.0, 0.12, 4.0, 0.0},
  };
  return spec;
}

RigSpec RigSpec::standard() {
  auto pose = [](double pitch_deg, double roll_deg, double yaw_deg, double x, double y,
                 double z) {
    EulerPose p;
    p.pitch = deg_to_rad(pitch_deg);
    p.roll = deg_to_rad(roll_deg);
    p.yaw = deg_to_rad(yaw_deg);
    p.x = x;
    p.y = y;
    p.z = z;
    return euler_to_transform(p);
  };

  RigSpec rig;
  rig.max_range = 100.0;
  rig.fov_deg = 180.0;
  rig.sensors = {
      {"top", true, pose(0.0, 0.0, 0.0, 0.0, 0.0, 2.0)},
      {"front", false, pose(2.0, 0.0, 0.0, 2.2, 0.0, 0.6)},
      {"back", false, pose(-1.5, 0.5, 180.0, -2.2, 0.0, 0.6)},
      {"left", false, pose(0.0, 1.0, 90.0, 0.0, 1.0, 0.8)},
      {"right", false, pose(1.0, -1.0, -90.0, 0.0, -1.0, 0.8)},
  };
  return rig;
}

}  // namespace lidarcal
