#pragma once

#include "lidarcal/geometry.hpp"

#include <string>
#include <vector>

namespace lidarcal {

// Why a trial did not succeed. kOutOfTolerance marks trials that finished the
// whole pipeline but missed the per-axis thresholds; the other reasons name
// the stage error that stopped the trial.
enum class FailureReason {
  kNone,
  kDegenerateScene,
  kNoOverlap,
  kCorrespondenceStarvation,
  kAmbiguousGround,
  kNoGroundFound,
  kOutOfTolerance,
};

const char* failure_reason_name(FailureReason reason);

struct TrialRecord {
  int trial = 0;
  std::string slave_id;
  bool success = false;
  FailureReason reason = FailureReason::kNone;
  bool has_truth = false;     // injected/error fields valid
  bool has_estimate = false;  // estimate/cost fields valid
  EulerPose injected;         // deviation composed onto the ground truth
  EulerPose estimate;         // recovered slave->master pose
  EulerPose error;            // euler of truth^-1 * estimate
  double cost_rough = 0.0;    // mean squared NN residual after each stage, m^2
  double cost_icpn = 0.0;
  double cost_octree = 0.0;
  double time_ms = 0.0;
};

// Table-shaped calibration results: one record per (trial, slave), plus
// per-slave mean/std aggregates over the six axes when several trials are
// present. Angles are serialized in degrees, translations in meters.
struct CalibrationReport {
  std::string master_id;
  int trial_count = 0;
  double threshold_rot_deg = 0.5;
  double threshold_trans_m = 0.05;
  bool include_timing = false;  // timing lines break byte-reproducibility
  std::vector<TrialRecord> records;
};

// Deterministic rendering: stable field order, %.9g floats, records sorted by
// (trial, slave id). Throws kInvalidArgument for an empty record list.
std::string render_report(const CalibrationReport& report);

// render_report to a file. Throws kIoError on unwritable paths.
void write_report(const CalibrationReport& report, const std::string& path);

}  // namespace lidarcal
