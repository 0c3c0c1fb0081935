#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <string>
#include <vector>

namespace lidarcal {

using Point3 = Eigen::Vector3d;

// A set of LiDAR returns expressed in one sensor frame. Frames are
// right-handed, x forward, y left, z up; coordinates are meters.
struct PointCloud {
  std::vector<Point3> points;
  std::string frame_id;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

// SE(3) pose stored as rotation matrix + translation vector. The rotation is
// kept orthonormal by construction (rodrigues / euler_to_transform); raw
// member access skips validation so composition stays cheap in inner loops.
struct RigidTransform {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  static RigidTransform identity() { return {}; }

  Point3 operator*(const Point3& p) const { return rotation * p + translation; }

  // Composition: (a * b)(p) == a(b(p)).
  RigidTransform operator*(const RigidTransform& other) const {
    return {rotation * other.rotation, rotation * other.translation + translation};
  }

  RigidTransform inverse() const {
    Eigen::Matrix3d rt = rotation.transpose();
    return {rt, -(rt * translation)};
  }

  Eigen::Matrix4d matrix() const {
    Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
    m.block<3, 3>(0, 0) = rotation;
    m.block<3, 1>(0, 3) = translation;
    return m;
  }
};

// Intrinsic Z(yaw)*Y(pitch)*X(roll) decomposition; angles in radians,
// translation in meters. This convention is fixed project-wide.
struct EulerPose {
  double pitch = 0.0;
  double roll = 0.0;
  double yaw = 0.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

// Rotation by `angle` about the unit vector `axis`.
// Throws kInvalidArgument if the axis is not finite and unit length (1e-9).
RigidTransform rodrigues(const Eigen::Vector3d& axis, double angle);

RigidTransform euler_to_transform(const EulerPose& pose);

// Inverse of euler_to_transform. Throws kDegenerateDecomposition near gimbal
// lock (|pitch| >= pi/2 - 1e-6).
EulerPose transform_to_euler(const RigidTransform& t);

PointCloud apply(const RigidTransform& t, const PointCloud& cloud);

// True when rotation*rotation^T == I and det(rotation) == +1 within tol.
bool is_rigid(const RigidTransform& t, double tol = 1e-9);

inline double deg_to_rad(double deg) { return deg * M_PI / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / M_PI; }

// Wraps an angle into (-pi, pi].
double wrap_angle(double angle);

}  // namespace lidarcal
