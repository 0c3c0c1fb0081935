#include "lidarcal/octree.hpp"

#include "lidarcal/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <unordered_set>

namespace lidarcal {

namespace {

struct GridLayout {
  Eigen::Vector3d root_min;
  double root_side;
  int depth;
  double leaf_side;
};

// Root side = smallest power-of-two multiple of the target leaf covering the
// bounding box plus margin; the extra 2*target slack absorbs corner snapping.
GridLayout layout_grid(const Eigen::Vector3d& lo, const Eigen::Vector3d& hi,
                       const OctreeScanConfig& cfg) {
  const double extent = (hi - lo).maxCoeff();
  const double required = std::max(extent * 1.05 + 2.0 * cfg.target_leaf_side,
                                   cfg.target_leaf_side);
  const int depth_needed =
      std::max(0, static_cast<int>(std::ceil(std::log2(required / cfg.target_leaf_side))));
  GridLayout grid;
  grid.root_side = cfg.target_leaf_side * std::ldexp(1.0, depth_needed);
  grid.depth = std::min(cfg.max_depth, depth_needed);
  grid.leaf_side = grid.root_side / std::ldexp(1.0, grid.depth);
  const Eigen::Vector3d center = 0.5 * (lo + hi);
  for (int axis = 0; axis < 3; ++axis) {
    grid.root_min[axis] =
        std::floor((center[axis] - 0.5 * grid.root_side) / grid.leaf_side) * grid.leaf_side;
  }
  return grid;
}

// Leaf cell coordinate of one point along one axis, clamped into the cube.
std::int64_t leaf_cell(double v, double origin, double leaf, std::int64_t cells) {
  const auto c = static_cast<std::int64_t>(std::floor((v - origin) / leaf));
  return std::clamp<std::int64_t>(c, 0, cells - 1);
}

// Interleaves the leaf coordinates so that each 3-bit group selects one child
// octant; dropping the lowest 3*(depth - l) bits yields the cube at depth l.
// This is the equal-eighths cut expressed on the integer lattice, which keeps
// leaf occupancy bit-exact against flat voxel counting on the same grid.
std::uint64_t morton_code(std::int64_t x, std::int64_t y, std::int64_t z, int depth) {
  std::uint64_t code = 0;
  for (int bit = depth - 1; bit >= 0; --bit) {
    code = (code << 3) | static_cast<std::uint64_t>(((x >> bit) & 1) | (((y >> bit) & 1) << 1) |
                                                    (((z >> bit) & 1) << 2));
  }
  return code;
}

}  // namespace

OctreeVolume octree_volume(const PointCloud& merged, const OctreeScanConfig& cfg) {
  if (merged.empty()) {
    throw CalibError(ErrorCode::kInvalidArgument, "octree_volume: empty cloud");
  }
  if (cfg.max_depth < 0 || cfg.max_depth > 20 || cfg.target_leaf_side <= 0.0) {
    throw CalibError(ErrorCode::kInvalidArgument, "octree_volume: bad config");
  }

  Eigen::Vector3d lo = merged.points.front();
  Eigen::Vector3d hi = lo;
  for (const Point3& p : merged.points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const GridLayout grid = layout_grid(lo, hi, cfg);

  OctreeVolume out;
  out.root_min = grid.root_min;
  out.root_side = grid.root_side;
  out.root_center = grid.root_min + Eigen::Vector3d::Constant(0.5 * grid.root_side);
  out.depth = grid.depth;
  out.leaf_side = grid.leaf_side;
  out.occupied_per_level.assign(grid.depth + 1, 0);

  const std::int64_t cells = std::int64_t{1} << grid.depth;
  std::vector<std::uint64_t> codes;
  codes.reserve(merged.size());
  for (const Point3& p : merged.points) {
    codes.push_back(morton_code(leaf_cell(p.x(), grid.root_min.x(), grid.leaf_side, cells),
                                leaf_cell(p.y(), grid.root_min.y(), grid.leaf_side, cells),
                                leaf_cell(p.z(), grid.root_min.z(), grid.leaf_side, cells),
                                grid.depth));
  }
  std::sort(codes.begin(), codes.end());

  out.occupied_per_level[0] = 1;  // the root cube holds every point
  for (int level = 1; level <= grid.depth; ++level) {
    const int shift = 3 * (grid.depth - level);
    std::size_t distinct = 1;
    for (std::size_t i = 1; i < codes.size(); ++i) {
      if ((codes[i] >> shift) != (codes[i - 1] >> shift)) ++distinct;
    }
    out.occupied_per_level[level] = distinct;
  }
  out.occupied_leaf_count = out.occupied_per_level[grid.depth];
  out.occupied_volume = static_cast<double>(out.occupied_leaf_count) * grid.leaf_side *
                        grid.leaf_side * grid.leaf_side;
  return out;
}

namespace {

std::int64_t pack_key(std::int64_t x, std::int64_t y, std::int64_t z) {
  return ((x & 0x1FFFFF) << 42) | ((y & 0x1FFFFF) << 21) | (z & 0x1FFFFF);
}

// Leaf-lattice occupancy counter with a grid fixed for the whole refinement
// run, so candidate poses are scored on one consistent objective.
class MergedVolume {
 public:
  MergedVolume(const PointCloud& master, const Eigen::Vector3d& origin, double leaf)
      : origin_(origin), leaf_(leaf) {
    master_keys_.reserve(master.size());
    for (const Point3& p : master.points) master_keys_.insert(key_of(p));
  }

  std::size_t count(const PointCloud& slave, const RigidTransform& pose) {
    slave_keys_.clear();
    slave_keys_.reserve(slave.size());
    for (const Point3& p : slave.points) slave_keys_.push_back(key_of(pose * p));
    std::sort(slave_keys_.begin(), slave_keys_.end());
    slave_keys_.erase(std::unique(slave_keys_.begin(), slave_keys_.end()), slave_keys_.end());
    std::size_t extra = 0;
    for (const std::int64_t key : slave_keys_) {
      if (!master_keys_.contains(key)) ++extra;
    }
    return master_keys_.size() + extra;
  }

 private:
  std::int64_t key_of(const Point3& p) const {
    return pack_key(static_cast<std::int64_t>(std::floor((p.x() - origin_.x()) / leaf_)),
                    static_cast<std::int64_t>(std::floor((p.y() - origin_.y()) / leaf_)),
                    static_cast<std::int64_t>(std::floor((p.z() - origin_.z()) / leaf_)));
  }

  Eigen::Vector3d origin_;
  double leaf_;
  std::unordered_set<std::int64_t> master_keys_;
  std::vector<std::int64_t> slave_keys_;
};

}  // namespace

RigidTransform octree_refine(const PointCloud& master, const PointCloud& slave,
                             const RigidTransform& initial, const OctreeScanConfig& cfg) {
  if (master.empty() || slave.empty()) {
    throw CalibError(ErrorCode::kInvalidArgument, "octree_refine: empty cloud");
  }
  if (cfg.halvings < 1 || cfg.sweep_halfwidth < 1) {
    throw CalibError(ErrorCode::kInvalidArgument, "octree_refine: bad config");
  }

  Eigen::Vector3d lo = master.points.front();
  Eigen::Vector3d hi = lo;
  for (const Point3& p : master.points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  for (const Point3& p : slave.points) {
    const Point3 q = initial * p;
    lo = lo.cwiseMin(q);
    hi = hi.cwiseMax(q);
  }
  const GridLayout grid = layout_grid(lo, hi, cfg);
  MergedVolume volume(master, grid.root_min, grid.leaf_side);

  EulerPose pose = transform_to_euler(initial);
  std::size_t best = volume.count(slave, euler_to_transform(pose));

  double angle_step = cfg.angle_step_init;
  double trans_step = cfg.trans_step_init;
  bool moved = false;
  std::array<double*, 6> params = {&pose.yaw, &pose.pitch, &pose.roll,
                                   &pose.x, &pose.y, &pose.z};
  for (int pass = 0; pass < cfg.halvings; ++pass) {
    for (int pi = 0; pi < 6; ++pi) {
      const double step = pi < 3 ? angle_step : trans_step;
      const double center = *params[pi];
      double best_value = center;
      for (int off = -cfg.sweep_halfwidth; off <= cfg.sweep_halfwidth; ++off) {
        if (off == 0) continue;
        *params[pi] = center + off * step;
        const std::size_t count = volume.count(slave, euler_to_transform(pose));
        if (count < best) {
          best = count;
          best_value = *params[pi];
          moved = true;
        }
      }
      *params[pi] = best_value;
    }
    angle_step *= 0.5;
    trans_step *= 0.5;
  }
  // A wholly flat sweep keeps the input pose bit-for-bit rather than its
  // Euler round-trip.
  return moved ? euler_to_transform(pose) : initial;
}

}  // namespace lidarcal
