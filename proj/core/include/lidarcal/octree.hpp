#pragma once

#include "lidarcal/geometry.hpp"

#include <vector>

namespace lidarcal {

struct OctreeScanConfig {
  int max_depth = 8;
  double target_leaf_side = 0.1;            // meters
  double angle_step_init = deg_to_rad(0.5);
  double trans_step_init = 0.05;            // meters
  int halvings = 4;                         // full passes; steps halve after each
  int sweep_halfwidth = 4;                  // steps swept each side per parameter
};

// Occupancy accounting of one cube hierarchy: a cube is cut into eight equal
// children level by level, and a cube is occupied when it contains at least
// one point. occupied_volume is always occupied_leaf_count * leaf_side^3.
struct OctreeVolume {
  Eigen::Vector3d root_min = Eigen::Vector3d::Zero();  // lattice-snapped corner
  Eigen::Vector3d root_center = Eigen::Vector3d::Zero();
  double root_side = 0.0;
  int depth = 0;
  double leaf_side = 0.0;
  std::size_t occupied_leaf_count = 0;
  double occupied_volume = 0.0;
  // occupied_per_level[l] = occupied cubes at depth l (level 0 is the root).
  std::vector<std::size_t> occupied_per_level;
};

// Builds the octree over the merged cloud. The root cube covers the bounding
// box expanded 5% and its corner snaps to multiples of the leaf side, so the
// voxel lattice stays fixed in the world while poses change. Depth is capped
// at max_depth, otherwise chosen so the leaf side reaches target_leaf_side.
OctreeVolume octree_volume(const PointCloud& merged, const OctreeScanConfig& cfg);

// Coordinate descent over (yaw, pitch, roll, x, y, z) minimizing the occupied
// leaf volume of master + transformed slave; each parameter is swept
// +-sweep_halfwidth steps around the incumbent, steps halve after every full
// pass. Ties keep the incumbent, so a flat objective returns `initial`.
RigidTransform octree_refine(const PointCloud& master, const PointCloud& slave,
                             const RigidTransform& initial, const OctreeScanConfig& cfg);

}  // namespace lidarcal
