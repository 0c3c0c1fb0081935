#pragma once

#include "lidarcal/geometry.hpp"
#include "lidarcal/ground.hpp"
#include "lidarcal/kdtree.hpp"

namespace lidarcal {

struct PlanarSearchConfig {
  double yaw_range = 2.0 * M_PI;           // searched span, centered on zero
  double coarse_step = deg_to_rad(2.0);
  int refine_levels = 6;                   // step halves once per level
  double xy_range = 0.5;                   // meters, each side
  double xy_step = 0.05;
  double max_correspondence_dist = 1.0;
  double downsample_voxel = 0.3;
};

struct PlanarEstimate {
  double yaw = 0.0;
  double x = 0.0;
  double y = 0.0;
  double cost = 0.0;  // mean squared gated NN residual, m^2
  std::size_t correspondence_count = 0;
  // Set when the coarse yaw sweep was nearly flat (best/median cost > 0.8);
  // rotationally symmetric scenes make yaw unobservable.
  bool low_confidence = false;
};

// Points farther than epsilon from the plane. Throws kDegenerateScene when
// fewer than 100 points survive.
PointCloud remove_ground(const PointCloud& cloud, const Plane& plane, double epsilon);

// Voxel-grid centroid downsampling; output order follows first appearance.
PointCloud voxel_downsample(const PointCloud& cloud, double voxel);

// Mean squared distance from each transformed slave point (Rz(yaw), then
// (x, y, 0)) to its master nearest neighbor, over pairs within
// max_correspondence_dist. Returns +inf when no pair qualifies.
double reduced_cost(const KdTree& master_index, const PointCloud& slave_ng, double yaw,
                    double x, double y, const PlanarSearchConfig& cfg);

// Coarse-to-fine interval-halving scan: yaw first on the coarse grid, then
// alternating x / y sweeps, each refined by halving around the incumbent.
// Deterministic; ties prefer smaller |yaw|, then |x|, then |y|.
// Throws kNoOverlap when every coarse sample has no correspondences.
PlanarEstimate search_planar(const PointCloud& master_ng, const PointCloud& slave_ng,
                             const PlanarSearchConfig& cfg);

}  // namespace lidarcal
