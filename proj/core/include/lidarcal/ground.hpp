#pragma once

#include "lidarcal/geometry.hpp"

#include <cstdint>
#include <vector>

namespace lidarcal {

// Ground plane a*x + b*y + c*z + d = 0 with unit normal (a, b, c). The
// normal is oriented so the owning sensor's origin lies on the positive side.
struct Plane {
  double a = 0.0;
  double b = 0.0;
  double c = 1.0;
  double d = 0.0;
  std::size_t inlier_count = 0;
  std::vector<std::size_t> inlier_ids;

  Eigen::Vector3d normal() const { return {a, b, c}; }
  double signed_distance(const Point3& p) const { return a * p.x() + b * p.y() + c * p.z() + d; }
};

// Pitch/roll/z correction mapping a slave cloud's ground plane onto the
// master's. residual_inlier_fraction is filled by verify_ground_side: among
// the transformed slave points clearly off the master plane, the fraction on
// the upper (master-normal) side.
struct GroundAlignment {
  RigidTransform transform;
  bool flip_applied = false;
  double residual_inlier_fraction = -1.0;  // -1 until verified
};

// RANSAC over 3-point samples maximizing inliers within thickness epsilon,
// then a least-squares refit on the winning inlier set. Deterministic for a
// given (cloud, epsilon, iterations, seed).
// Throws kNoGroundFound when the cloud is too small, no non-collinear sample
// exists, or the best inlier fraction is below 10%; kInvalidArgument for
// non-positive epsilon/iterations.
Plane fit_ground_plane(const PointCloud& cloud, double epsilon, int iterations,
                       std::uint64_t seed);

// Rotation taking the slave plane normal onto the master's (axis from the
// cross product, angle from the dot product, Rodrigues construction) plus a
// translation along the master normal cancelling the offset difference.
// Anti-parallel normals get a pi rotation about an in-plane axis.
GroundAlignment align_ground(const Plane& master, const Plane& slave);

// Checks which side of the master plane the transformed slave's off-plane
// points fall on; applies the +-pi flip (about an in-plane axis through the
// master plane) when they land underneath, and records the verification
// score. Throws kAmbiguousGround when neither branch verifies or when the
// alignment failed to put any slave points onto the master plane.
GroundAlignment verify_ground_side(const PointCloud& slave_cloud,
                                   const GroundAlignment& alignment, const Plane& master,
                                   double epsilon);

}  // namespace lidarcal
