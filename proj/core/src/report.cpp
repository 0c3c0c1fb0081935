#include "lidarcal/report.hpp"

#include "lidarcal/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace lidarcal {

const char* failure_reason_name(FailureReason reason) {
  switch (reason) {
    case FailureReason::kNone:
      return "none";
    case FailureReason::kDegenerateScene:
      return "degenerate-scene";
    case FailureReason::kNoOverlap:
      return "no-overlap";
    case FailureReason::kCorrespondenceStarvation:
      return "correspondence-starvation";
    case FailureReason::kAmbiguousGround:
      return "ambiguous-ground";
    case FailureReason::kNoGroundFound:
      return "no-ground-found";
    case FailureReason::kOutOfTolerance:
      return "out-of-tolerance";
  }
  return "unknown";
}

namespace {

std::string fmt(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.9g", v);
  return buffer;
}

// pitch roll yaw in degrees, x y z in meters.
std::string pose_fields(const EulerPose& p) {
  std::ostringstream out;
  out << fmt(rad_to_deg(p.pitch)) << ' ' << fmt(rad_to_deg(p.roll)) << ' '
      << fmt(rad_to_deg(p.yaw)) << ' ' << fmt(p.x) << ' ' << fmt(p.y) << ' ' << fmt(p.z);
  return out.str();
}

std::array<double, 6> axes_of(const EulerPose& p) {
  return {rad_to_deg(p.pitch), rad_to_deg(p.roll), rad_to_deg(p.yaw), p.x, p.y, p.z};
}

void emit_aggregate(std::ostringstream& out, const std::string& slave, const std::string& kind,
                    const std::vector<const TrialRecord*>& records) {
  out << "aggregate " << slave << ' ' << kind << " count " << records.size() << '\n';
  if (records.empty()) return;
  std::array<double, 6> mean{};
  for (const TrialRecord* r : records) {
    const auto axes = axes_of(r->error);
    for (int i = 0; i < 6; ++i) mean[i] += axes[i];
  }
  for (int i = 0; i < 6; ++i) mean[i] /= static_cast<double>(records.size());
  std::array<double, 6> var{};
  for (const TrialRecord* r : records) {
    const auto axes = axes_of(r->error);
    for (int i = 0; i < 6; ++i) var[i] += (axes[i] - mean[i]) * (axes[i] - mean[i]);
  }
  out << "aggregate " << slave << ' ' << kind << " mean_error";
  for (int i = 0; i < 6; ++i) out << ' ' << fmt(mean[i]);
  out << '\n';
  out << "aggregate " << slave << ' ' << kind << " std_error";
  for (int i = 0; i < 6; ++i) {
    out << ' ' << fmt(std::sqrt(var[i] / static_cast<double>(records.size())));
  }
  out << '\n';
}

}  // namespace

std::string render_report(const CalibrationReport& report) {
  if (report.records.empty()) {
    throw CalibError(ErrorCode::kInvalidArgument, "render_report: empty record list");
  }

  std::vector<const TrialRecord*> sorted;
  sorted.reserve(report.records.size());
  for (const TrialRecord& r : report.records) sorted.push_back(&r);
  std::stable_sort(sorted.begin(), sorted.end(), [](const TrialRecord* a, const TrialRecord* b) {
    if (a->trial != b->trial) return a->trial < b->trial;
    return a->slave_id < b->slave_id;
  });

  std::vector<std::string> slaves;
  for (const TrialRecord* r : sorted) {
    if (std::find(slaves.begin(), slaves.end(), r->slave_id) == slaves.end()) {
      slaves.push_back(r->slave_id);
    }
  }
  std::sort(slaves.begin(), slaves.end());

  std::ostringstream out;
  out << "report_version 1\n";
  out << "master " << report.master_id << '\n';
  out << "trials " << report.trial_count << '\n';
  out << "slaves " << slaves.size();
  for (const std::string& s : slaves) out << ' ' << s;
  out << '\n';
  out << "threshold_rot_deg " << fmt(report.threshold_rot_deg) << '\n';
  out << "threshold_trans_m " << fmt(report.threshold_trans_m) << '\n';
  out << "angles_unit deg\n";

  std::size_t success_count = 0;
  for (const TrialRecord* r : sorted) {
    const std::string head = "trial " + std::to_string(r->trial) + " slave " + r->slave_id;
    out << head << " success " << (r->success ? 1 : 0) << " reason "
        << failure_reason_name(r->reason) << '\n';
    if (r->has_truth) out << head << " injected " << pose_fields(r->injected) << '\n';
    if (r->has_estimate) {
      out << head << " estimate " << pose_fields(r->estimate) << '\n';
      out << head << " cost rough " << fmt(r->cost_rough) << " icpn " << fmt(r->cost_icpn)
          << " octree " << fmt(r->cost_octree) << '\n';
    }
    if (r->has_truth && r->has_estimate) out << head << " error " << pose_fields(r->error) << '\n';
    if (report.include_timing) out << head << " time_ms " << fmt(r->time_ms) << '\n';
    if (r->success) ++success_count;
  }

  // Table-style mean/std per slave, over all completed trials and over the
  // successful ones, once there is something to average.
  if (report.trial_count > 1) {
    for (const std::string& slave : slaves) {
      std::vector<const TrialRecord*> all, ok;
      for (const TrialRecord* r : sorted) {
        if (r->slave_id != slave || !r->has_truth || !r->has_estimate) continue;
        all.push_back(r);
        if (r->success) ok.push_back(r);
      }
      emit_aggregate(out, slave, "all", all);
      emit_aggregate(out, slave, "success_only", ok);
    }
  }

  out << "summary records " << sorted.size() << '\n';
  out << "summary success_count " << success_count << '\n';
  out << "summary success_rate "
      << fmt(static_cast<double>(success_count) / static_cast<double>(sorted.size())) << '\n';
  for (int reason = 1; reason <= static_cast<int>(FailureReason::kOutOfTolerance); ++reason) {
    std::size_t count = 0;
    for (const TrialRecord* r : sorted) {
      if (static_cast<int>(r->reason) == reason) ++count;
    }
    if (count > 0) {
      out << "summary failures " << failure_reason_name(static_cast<FailureReason>(reason))
          << ' ' << count << '\n';
    }
  }
  return out.str();
}

void write_report(const CalibrationReport& report, const std::string& path) {
  const std::string text = render_report(report);
  std::ofstream out(path);
  if (!out) {
    throw CalibError(ErrorCode::kIoError, "cannot write " + path);
  }
  out << text;
  if (!out) {
    throw CalibError(ErrorCode::kIoError, "write failed for " + path);
  }
}

}  // namespace lidarcal
