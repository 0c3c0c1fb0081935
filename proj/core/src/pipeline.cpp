#include "lidarcal/pipeline.hpp"

#include "lidarcal/error.hpp"

#include <chrono>
#include <cmath>
#include <limits>

namespace lidarcal {

namespace {

// Stage-trace cost: mean squared NN residual between the prepared (non-ground,
// downsampled) clouds under `pose`, gated like the planar search.
double trace_cost(const KdTree& master_index, const PointCloud& slave_ng,
                  const RigidTransform& pose, double gate) {
  const double gate_sq = gate * gate;
  double sum = 0.0;
  std::size_t count = 0;
  for (const Point3& p : slave_ng.points) {
    const Neighbor nn = master_index.nearest(pose * p);
    const double d_sq = nn.distance * nn.distance;
    if (d_sq <= gate_sq) {
      sum += d_sq;
      ++count;
    }
  }
  return count == 0 ? std::numeric_limits<double>::infinity()
                    : sum / static_cast<double>(count);
}

FailureReason reason_from(const CalibError& err) {
  switch (err.code()) {
    case ErrorCode::kDegenerateScene:
      return FailureReason::kDegenerateScene;
    case ErrorCode::kNoOverlap:
      return FailureReason::kNoOverlap;
    case ErrorCode::kCorrespondenceStarvation:
      return FailureReason::kCorrespondenceStarvation;
    case ErrorCode::kAmbiguousGround:
      return FailureReason::kAmbiguousGround;
    case ErrorCode::kNoGroundFound:
      return FailureReason::kNoGroundFound;
    default:
      throw err;  // programming error, not a trial outcome
  }
}

// Splitmix-style mixer deriving independent per-(trial, slave) seeds.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t trial, std::uint64_t slave) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ull * (trial + 1) + 0xBF58476D1CE4E5B9ull * (slave + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

const StageRecord& StageTrace::stage(const std::string& name) const {
  for (const StageRecord& record : stages) {
    if (record.name == name) return record;
  }
  throw CalibError(ErrorCode::kInvalidArgument, "StageTrace: no stage named " + name);
}

std::pair<RigidTransform, StageTrace> calibrate_pair(const PointCloud& master,
                                                     const PointCloud& slave,
                                                     const PipelineConfig& cfg) {
  if (master.empty() || slave.empty()) {
    throw CalibError(ErrorCode::kInvalidArgument, "calibrate_pair: empty cloud");
  }

  // Stage 1a: ground planes, rotation onto the master plane, side check.
  const Plane master_plane =
      fit_ground_plane(master, cfg.ground_epsilon, cfg.ransac_iterations, cfg.seed);
  const Plane slave_plane =
      fit_ground_plane(slave, cfg.ground_epsilon, cfg.ransac_iterations, cfg.seed + 1);
  GroundAlignment alignment = align_ground(master_plane, slave_plane);
  alignment = verify_ground_side(slave, alignment, master_plane, cfg.ground_epsilon);

  // Non-ground clouds, downsampled once, drive the planar search; the stage
  // trace scores every pose with the NN cost over the full clouds instead,
  // where refinement gains are not masked by downsampling asymmetry.
  const PointCloud master_ng = voxel_downsample(
      remove_ground(master, master_plane, cfg.ground_epsilon), cfg.planar.downsample_voxel);
  const PointCloud slave_ng = voxel_downsample(
      remove_ground(slave, slave_plane, cfg.ground_epsilon), cfg.planar.downsample_voxel);
  const KdTree master_index(master);
  const double gate = cfg.planar.max_correspondence_dist;

  StageTrace trace;
  trace.ground_flip_applied = alignment.flip_applied;
  auto record_stage = [&](const std::string& name, const RigidTransform& pose) {
    trace.stages.push_back({name, pose, trace_cost(master_index, slave, pose, gate)});
  };

  record_stage("initial", RigidTransform::identity());
  record_stage("ground", alignment.transform);

  // Stage 1b: yaw/x/y on the ground-aligned non-ground cloud.
  const PointCloud slave_ng_aligned = apply(alignment.transform, slave_ng);
  const PlanarEstimate planar = search_planar(master_ng, slave_ng_aligned, cfg.planar);
  trace.planar_low_confidence = planar.low_confidence;

  RigidTransform planar_transform = rodrigues(Eigen::Vector3d::UnitZ(), planar.yaw);
  planar_transform.translation = Eigen::Vector3d(planar.x, planar.y, 0.0);
  RigidTransform pose = planar_transform * alignment.transform;
  record_stage("rough", pose);

  // Stage 2a: point-to-plane ICP against master normals on the full clouds.
  if (cfg.run_icpn) {
    const std::vector<OrientedPoint> master_normals =
        estimate_normals(master, master_index, cfg.icpn.normal_k, Point3::Zero());
    const IcpnResult icpn = icpn_refine(master_normals, slave, pose, cfg.icpn);
    pose = icpn.transform;
    record_stage("icpn", pose);
  }

  // Stage 2b: occupied-volume minimization over all six parameters.
  if (cfg.run_octree) {
    pose = octree_refine(master, slave, pose, cfg.octree);
    record_stage("octree", pose);
  }

  return {pose, trace};
}

EulerPose pose_error(const RigidTransform& truth, const RigidTransform& estimate) {
  return transform_to_euler(truth.inverse() * estimate);
}

bool within_tolerance(const EulerPose& error, double rot_deg, double trans_m) {
  const double rot = deg_to_rad(rot_deg);
  return std::abs(error.pitch) < rot && std::abs(error.roll) < rot &&
         std::abs(error.yaw) < rot && std::abs(error.x) < trans_m &&
         std::abs(error.y) < trans_m && std::abs(error.z) < trans_m;
}

CalibrationReport run_experiment(const SceneSpec& scene_spec, const RigSpec& rig,
                                 const PerturbationSpec& perturbation, int trials,
                                 const PipelineConfig& cfg) {
  if (trials < 1) {
    throw CalibError(ErrorCode::kInvalidArgument, "run_experiment: trials must be >= 1");
  }

  const Scene scene = generate_scene(scene_spec);
  const SensorSpec& master_sensor = rig.master();
  const RigidTransform master_from_world = master_sensor.pose.inverse();

  // Captures are taken once at the nominal mounting; each trial perturbs the
  // extrinsic belief, hands the pipeline the slave cloud placed by that wrong
  // guess, and scores the composed estimate against the true extrinsic.
  const CaptureResult master_capture = capture_sensor(scene, rig, master_sensor);
  struct SlaveData {
    std::string frame_id;
    PointCloud cloud;          // sensor frame
    RigidTransform truth;      // slave -> master
  };
  std::vector<SlaveData> slaves;
  for (const SensorSpec& sensor : rig.sensors) {
    if (sensor.master) continue;
    CaptureResult cap = capture_sensor(scene, rig, sensor);
    slaves.push_back({sensor.frame_id, std::move(cap.cloud), master_from_world * sensor.pose});
  }

  CalibrationReport report;
  report.master_id = master_sensor.frame_id;
  report.trial_count = trials;
  report.threshold_rot_deg = cfg.success_rot_threshold_deg;
  report.threshold_trans_m = cfg.success_trans_threshold;
  report.include_timing = false;

  for (int trial = 0; trial < trials; ++trial) {
    for (std::size_t index = 0; index < slaves.size(); ++index) {
      const SlaveData& slave = slaves[index];

      PerturbationSpec trial_spec = perturbation;
      trial_spec.seed = derive_seed(perturbation.seed, trial, index);
      const auto [initial_guess, deviation] = perturb(slave.truth, trial_spec);

      TrialRecord record;
      record.trial = trial;
      record.slave_id = slave.frame_id;
      record.has_truth = true;
      record.injected = deviation;

      PipelineConfig trial_cfg = cfg;
      trial_cfg.seed = derive_seed(cfg.seed + 1, trial, index);

      const auto start = std::chrono::steady_clock::now();
      try {
        const PointCloud placed = apply(initial_guess, slave.cloud);
        const auto [residual, trace] = calibrate_pair(master_capture.cloud, placed, trial_cfg);
        const RigidTransform estimate = residual * initial_guess;
        record.has_estimate = true;
        record.estimate = transform_to_euler(estimate);
        record.error = pose_error(slave.truth, estimate);
        record.cost_rough = trace.stage("rough").cost;
        record.cost_icpn = cfg.run_icpn ? trace.stage("icpn").cost : record.cost_rough;
        record.cost_octree = cfg.run_octree ? trace.stage("octree").cost : record.cost_icpn;
        record.success = within_tolerance(record.error, cfg.success_rot_threshold_deg,
                                          cfg.success_trans_threshold);
        record.reason = record.success ? FailureReason::kNone : FailureReason::kOutOfTolerance;
      } catch (const CalibError& err) {
        record.success = false;
        record.reason = reason_from(err);
      }
      record.time_ms = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - start)
                           .count();
      report.records.push_back(record);
    }
  }
  return report;
}

}  // namespace lidarcal
