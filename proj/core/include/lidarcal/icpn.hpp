#pragma once

#include "lidarcal/geometry.hpp"
#include "lidarcal/kdtree.hpp"
#include "lidarcal/normals.hpp"

#include <vector>

namespace lidarcal {

struct IcpnConfig {
  int max_iterations = 50;
  double max_correspondence_dist = 0.5;   // meters
  double normal_angle_gate = deg_to_rad(45.0);
  double convergence_translation = 1e-4;  // meters
  double convergence_rotation = 1e-5;     // radians
  std::size_t normal_k = 40;
};

struct IcpnResult {
  RigidTransform transform;  // refined slave->master pose (increment already composed)
  int iterations_used = 0;
  double final_cost = 0.0;  // mean squared point-to-plane residual, m^2
  bool converged = false;
  std::vector<double> accepted_costs;  // non-increasing by construction
};

// Point-to-plane ICP against master-side normals. Correspondences are nearest
// neighbors gated by distance and by the angle between the master normal and
// the slave point's rotated normal; each iteration solves the linearized
// normal equations and accepts the step only if the re-gated cost does not
// increase (halving the increment up to three times otherwise).
// Throws kCorrespondenceStarvation when fewer than 10 pairs survive gating.
IcpnResult icpn_refine(const std::vector<OrientedPoint>& master, const PointCloud& slave,
                       const RigidTransform& initial, const IcpnConfig& cfg);

// Mean squared point-to-plane residual of `slave` under `pose`, using the
// same gating as icpn_refine. Pair count is returned through `count`.
double point_to_plane_cost(const std::vector<OrientedPoint>& master, const KdTree& master_index,
                           const std::vector<OrientedPoint>& slave_normals,
                           const RigidTransform& pose, const IcpnConfig& cfg,
                           std::size_t* count = nullptr);

}  // namespace lidarcal
