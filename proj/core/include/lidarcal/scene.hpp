#pragma once

#include "lidarcal/geometry.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace lidarcal {

enum class PrimitiveType { kWall, kBox, kPole };

// Upright scene primitive standing on the ground plane z = 0.
//   wall: a = length, b = height          (single vertical rectangle)
//   box:  a = size_x, b = size_y, c = size_z (four sides + top)
//   pole: a = radius, b = height          (cylinder side surface)
struct Primitive {
  PrimitiveType type = PrimitiveType::kWall;
  double cx = 0.0;
  double cy = 0.0;
  double yaw = 0.0;  // radians about z
  double a = 1.0;
  double b = 1.0;
  double c = 1.0;
};

struct SceneSpec {
  double ground_size_x = 40.0;  // meters, centered on the origin
  double ground_size_y = 40.0;
  double density = 10.0;  // points per m^2
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
  std::vector<Primitive> primitives;

  // The fixed asymmetric scene every acceptance number is quoted against:
  // ground + 3 walls + 4 boxes + 6 poles. Mirrored in data/standard_scene.txt.
  static SceneSpec standard();
};

// World-frame surface samples; labels[i] is 0 for ground, otherwise 1-based
// primitive index.
struct Scene {
  std::vector<Point3> points;
  std::vector<int> labels;
};

struct SensorSpec {
  std::string frame_id;
  bool master = false;
  RigidTransform pose;  // sensor -> world (vehicle) frame
};

struct RigSpec {
  std::vector<SensorSpec> sensors;
  double max_range = 100.0;  // meters
  double fov_deg = 180.0;    // full vertical field of view

  // One master "top" sensor and four slaves. Mirrored in data/standard_rig.txt.
  static RigSpec standard();

  const SensorSpec& master() const;  // throws unless exactly one master
};

struct PerturbationSpec {
  double rotation_bound_deg = 45.0;
  double translation_bound = 0.10;  // meters
  std::uint64_t seed = 0;
};

struct CaptureResult {
  PointCloud cloud;          // sensor frame
  std::vector<int> labels;   // parallel to cloud.points
  bool sparse = false;       // fewer than 200 returns
};

// Uniform surface sampling at spec.density plus isotropic Gaussian noise.
// Point counts are round(area * density) per surface. Deterministic per seed.
Scene generate_scene(const SceneSpec& spec);

// World points within range and the vertical field of view, expressed in the
// sensor frame via the inverse ground-truth pose.
CaptureResult capture_sensor(const Scene& scene, const RigSpec& rig, const SensorSpec& sensor);
std::vector<CaptureResult> capture(const Scene& scene, const RigSpec& rig);

// Uniform per-axis deviations within the bounds, composed onto the ground
// truth. Returns the perturbed pose (the initial extrinsic guess handed to
// the pipeline) and the injected deviation. Deterministic per seed.
std::pair<RigidTransform, EulerPose> perturb(const RigidTransform& gt,
                                             const PerturbationSpec& spec);

}  // namespace lidarcal
