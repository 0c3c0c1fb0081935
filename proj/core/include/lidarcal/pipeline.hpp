#pragma once

#include "lidarcal/geometry.hpp"
#include "lidarcal/ground.hpp"
#include "lidarcal/icpn.hpp"
#include "lidarcal/octree.hpp"
#include "lidarcal/planar_search.hpp"
#include "lidarcal/report.hpp"
#include "lidarcal/scene.hpp"

#include <string>
#include <vector>

namespace lidarcal {

struct PipelineConfig {
  double ground_epsilon = 0.05;  // plane thickness, meters
  int ransac_iterations = 500;
  std::uint64_t seed = 0;
  PlanarSearchConfig planar;
  IcpnConfig icpn;
  OctreeScanConfig octree;
  bool run_icpn = true;
  bool run_octree = true;
  double success_rot_threshold_deg = 0.5;
  double success_trans_threshold = 0.05;  // meters
};

// Pose and cost after each stage; cost is the mean squared gated NN residual
// between the downsampled non-ground clouds (+inf when nothing corresponds).
struct StageRecord {
  std::string name;  // initial | ground | rough | icpn | octree
  RigidTransform pose;
  double cost = 0.0;
};

struct StageTrace {
  std::vector<StageRecord> stages;
  bool planar_low_confidence = false;
  bool ground_flip_applied = false;

  const StageRecord& stage(const std::string& name) const;  // throws if absent
};

struct TrialOutcome {
  std::string slave_id;
  bool success = false;
  FailureReason reason = FailureReason::kNone;
  EulerPose error;  // valid when an estimate was produced
};

// Runs ground alignment, planar yaw/x/y search, ICPN and the octree scan,
// composing the slave->master transform; the trace records the pose and cost
// after every stage. Stage errors propagate as CalibError.
std::pair<RigidTransform, StageTrace> calibrate_pair(const PointCloud& master,
                                                     const PointCloud& slave,
                                                     const PipelineConfig& cfg);

// Euler decomposition of truth^-1 * estimate (per-axis error, near identity
// for a good estimate).
EulerPose pose_error(const RigidTransform& truth, const RigidTransform& estimate);

// True when every rotation axis is below rot_deg and every translation axis
// below trans_m in magnitude.
bool within_tolerance(const EulerPose& error, double rot_deg, double trans_m);

// Perturb -> capture -> calibrate -> score for every (trial, slave). Stage
// failures are recorded per trial, never thrown. Fully reproducible from the
// spec seeds; the report excludes timing for this reason.
CalibrationReport run_experiment(const SceneSpec& scene_spec, const RigSpec& rig,
                                 const PerturbationSpec& perturbation, int trials,
                                 const PipelineConfig& cfg);

}  // namespace lidarcal
