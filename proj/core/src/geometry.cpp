#include "lidarcal/geometry.hpp"

#include "lidarcal/error.hpp"

#include <cmath>

namespace lidarcal {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return "invalid-argument";
    case ErrorCode::kNoGroundFound:
      return "no-ground-found";
    case ErrorCode::kAmbiguousGround:
      return "ambiguous-ground";
    case ErrorCode::kDegenerateScene:
      return "degenerate-scene";
    case ErrorCode::kNoOverlap:
      return "no-overlap";
    case ErrorCode::kCorrespondenceStarvation:
      return "correspondence-starvation";
    case ErrorCode::kDegenerateDecomposition:
      return "degenerate-decomposition";
    case ErrorCode::kParseError:
      return "parse-error";
    case ErrorCode::kIoError:
      return "io-error";
  }
  return "unknown";
}

RigidTransform rodrigues(const Eigen::Vector3d& axis, double angle) {
  if (!axis.allFinite() || !std::isfinite(angle)) {
    throw CalibError(ErrorCode::kInvalidArgument, "rodrigues: non-finite axis or angle");
  }
  if (std::abs(axis.norm() - 1.0) > 1e-9) {
    throw CalibError(ErrorCode::kInvalidArgument, "rodrigues: axis must be unit length");
  }
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  Eigen::Matrix3d k;
  k << 0.0, -axis.z(), axis.y(),
      axis.z(), 0.0, -axis.x(),
      -axis.y(), axis.x(), 0.0;
  RigidTransform t;
  t.rotation = c * Eigen::Matrix3d::Identity() + s * k + (1.0 - c) * (axis * axis.transpose());
  return t;
}

RigidTransform euler_to_transform(const EulerPose& pose) {
  const double cp = std::cos(pose.pitch), sp = std::sin(pose.pitch);
  const double cr = std::cos(pose.roll), sr = std::sin(pose.roll);
  const double cy = std::cos(pose.yaw), sy = std::sin(pose.yaw);
  RigidTransform t;
  // Rz(yaw) * Ry(pitch) * Rx(roll), expanded.
  t.rotation << cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr,
      sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr,
      -sp, cp * sr, cp * cr;
  t.translation = Eigen::Vector3d(pose.x, pose.y, pose.z);
  return t;
}

EulerPose transform_to_euler(const RigidTransform& t) {
  const Eigen::Matrix3d& r = t.rotation;
  const double sp = -r(2, 0);
  if (std::abs(sp) >= std::sin(M_PI / 2.0 - 1e-6)) {
    throw CalibError(ErrorCode::kDegenerateDecomposition,
                     "transform_to_euler: pitch within 1e-6 of +-pi/2");
  }
  EulerPose pose;
  pose.pitch = std::asin(sp);
  pose.roll = std::atan2(r(2, 1), r(2, 2));
  pose.yaw = std::atan2(r(1, 0), r(0, 0));
  pose.x = t.translation.x();
  pose.y = t.translation.y();
  pose.z = t.translation.z();
  return pose;
}

PointCloud apply(const RigidTransform& t, const PointCloud& cloud) {
  PointCloud out;
  out.frame_id = cloud.frame_id;
  out.points.reserve(cloud.points.size());
  for (const Point3& p : cloud.points) {
    out.points.push_back(t * p);
  }
  return out;
}

bool is_rigid(const RigidTransform& t, double tol) {
  if (!t.rotation.allFinite() || !t.translation.allFinite()) return false;
  const Eigen::Matrix3d gram = t.rotation * t.rotation.transpose();
  if ((gram - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > tol) return false;
  return std::abs(t.rotation.determinant() - 1.0) <= tol;
}

double wrap_angle(double angle) {
  double a = std::remainder(angle, 2.0 * M_PI);
  if (a <= -M_PI) a += 2.0 * M_PI;
  return a;
}

}  // namespace lidarcal
