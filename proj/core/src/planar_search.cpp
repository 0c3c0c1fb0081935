#include "lidarcal/planar_search.hpp"

#include "lidarcal/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace lidarcal {

namespace {

constexpr std::size_t kMinNonGroundPoints = 100;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kFlatCostRatio = 0.8;

struct CostSample {
  double cost = kInf;
  std::size_t count = 0;
};

CostSample evaluate(const KdTree& master_index, const PointCloud& slave, double yaw, double x,
                    double y, double gate) {
  const double c = std::cos(yaw), s = std::sin(yaw);
  const double gate_sq = gate * gate;
  double sum = 0.0;
  std::size_t count = 0;
  for (const Point3& p : slave.points) {
    const Point3 q(c * p.x() - s * p.y() + x, s * p.x() + c * p.y() + y, p.z());
    const Neighbor nn = master_index.nearest(q);
    const double d_sq = nn.distance * nn.distance;
    if (d_sq <= gate_sq) {
      sum += d_sq;
      ++count;
    }
  }
  CostSample out;
  out.count = count;
  if (count > 0) out.cost = sum / static_cast<double>(count);
  return out;
}

}  // namespace

PointCloud remove_ground(const PointCloud& cloud, const Plane& plane, double epsilon) {
  if (epsilon <= 0.0) {
    throw CalibError(ErrorCode::kInvalidArgument, "remove_ground: epsilon must be positive");
  }
  PointCloud out;
  out.frame_id = cloud.frame_id;
  for (const Point3& p : cloud.points) {
    if (std::abs(plane.signed_distance(p)) > epsilon) out.points.push_back(p);
  }
  if (out.size() < kMinNonGroundPoints) {
    throw CalibError(ErrorCode::kDegenerateScene,
                     "remove_ground: fewer than " + std::to_string(kMinNonGroundPoints) +
                         " non-ground points");
  }
  return out;
}

PointCloud voxel_downsample(const PointCloud& cloud, double voxel) {
  if (voxel <= 0.0) {
    throw CalibError(ErrorCode::kInvalidArgument, "voxel_downsample: voxel must be positive");
  }
  struct Cell {
    Eigen::Vector3d sum = Eigen::Vector3d::Zero();
    std::size_t count = 0;
  };
  std::unordered_map<std::int64_t, std::size_t> slot;
  std::vector<Cell> cells;  // first-appearance order keeps output deterministic
  for (const Point3& p : cloud.points) {
    const auto ix = static_cast<std::int64_t>(std::floor(p.x() / voxel));
    const auto iy = static_cast<std::int64_t>(std::floor(p.y() / voxel));
    const auto iz = static_cast<std::int64_t>(std::floor(p.z() / voxel));
    const std::int64_t key = ((ix & 0x1FFFFF) << 42) | ((iy & 0x1FFFFF) << 21) | (iz & 0x1FFFFF);
    auto [it, inserted] = slot.try_emplace(key, cells.size());
    if (inserted) cells.emplace_back();
    Cell& cell = cells[it->second];
    cell.sum += p;
    cell.count += 1;
  }
  PointCloud out;
  out.frame_id = cloud.frame_id;
  out.points.reserve(cells.size());
  for (const Cell& cell : cells) {
    out.points.push_back(cell.sum / static_cast<double>(cell.count));
  }
  return out;
}

double reduced_cost(const KdTree& master_index, const PointCloud& slave_ng, double yaw,
                    double x, double y, const PlanarSearchConfig& cfg) {
  return evaluate(master_index, slave_ng, yaw, x, y, cfg.max_correspondence_dist).cost;
}

PlanarEstimate search_planar(const PointCloud& master_ng, const PointCloud& slave_ng,
                             const PlanarSearchConfig& cfg) {
  if (master_ng.empty() || slave_ng.empty()) {
    throw CalibError(ErrorCode::kInvalidArgument, "search_planar: empty cloud");
  }
  if (cfg.coarse_step <= 0.0 || cfg.xy_step <= 0.0 || cfg.refine_levels < 1) {
    throw CalibError(ErrorCode::kInvalidArgument, "search_planar: bad config");
  }

  const KdTree index(master_ng);
  const double gate = cfg.max_correspondence_dist;

  PlanarEstimate best;
  best.cost = kInf;

  // Coarse yaw grid centered on zero; a full circle skips the duplicate +pi
  // sample. x = y = 0 during the yaw stage.
  const bool full_circle = cfg.yaw_range >= 2.0 * M_PI - 1e-12;
  const long half = full_circle
                        ? std::lround(std::floor(M_PI / cfg.coarse_step + 1e-9))
                        : std::lround(std::floor(cfg.yaw_range / 2.0 / cfg.coarse_step + 1e-9));
  std::vector<double> coarse_costs;
  for (long i = -half; i <= (full_circle ? half - 1 : half); ++i) {
    const double yaw = static_cast<double>(i) * cfg.coarse_step;
    const CostSample sample = evaluate(index, slave_ng, yaw, 0.0, 0.0, gate);
    if (sample.count > 0) coarse_costs.push_back(sample.cost);
    if (sample.cost < best.cost ||
        (sample.cost == best.cost && std::abs(wrap_angle(yaw)) < std::abs(wrap_angle(best.yaw)))) {
      best.cost = sample.cost;
      best.yaw = yaw;
      best.correspondence_count = sample.count;
    }
  }
  if (coarse_costs.empty()) {
    throw CalibError(ErrorCode::kNoOverlap,
                     "search_planar: no correspondences at any coarse yaw sample");
  }

  std::sort(coarse_costs.begin(), coarse_costs.end());
  const double median = coarse_costs[coarse_costs.size() / 2];
  best.low_confidence = median > 0.0 && best.cost / median > kFlatCostRatio;

  // Interval halving around the incumbent yaw.
  double step = cfg.coarse_step;
  for (int level = 0; level < cfg.refine_levels; ++level) {
    step *= 0.5;
    const double center = best.yaw;
    for (int off : {-2, -1, 1, 2}) {
      const double yaw = center + off * step;
      const CostSample sample = evaluate(index, slave_ng, yaw, 0.0, 0.0, gate);
      if (sample.cost < best.cost ||
          (sample.cost == best.cost &&
           std::abs(wrap_angle(yaw)) < std::abs(wrap_angle(best.yaw)))) {
        best.cost = sample.cost;
        best.yaw = yaw;
        best.correspondence_count = sample.count;
      }
    }
  }

  // x then y: full sweep at the coarse step, then the same halving scheme.
  auto try_xy = [&](double x, double y) {
    const CostSample sample = evaluate(index, slave_ng, best.yaw, x, y, gate);
    const double v = x != best.x ? x : y;
    const double inc = x != best.x ? best.x : best.y;
    if (sample.cost < best.cost || (sample.cost == best.cost && std::abs(v) < std::abs(inc))) {
      best.cost = sample.cost;
      best.x = x;
      best.y = y;
      best.correspondence_count = sample.count;
    }
  };

  const long xy_half = std::lround(std::floor(cfg.xy_range / cfg.xy_step + 1e-9));
  for (long j = -xy_half; j <= xy_half; ++j) try_xy(j * cfg.xy_step, best.y);
  for (long j = -xy_half; j <= xy_half; ++j) try_xy(best.x, j * cfg.xy_step);
  double xy_step = cfg.xy_step;
  for (int level = 0; level < cfg.refine_levels; ++level) {
    xy_step *= 0.5;
    const double cx = best.x;
    for (int off : {-2, -1, 1, 2}) try_xy(cx + off * xy_step, best.y);
    const double cy = best.y;
    for (int off : {-2, -1, 1, 2}) try_xy(best.x, cy + off * xy_step);
  }

  best.yaw = wrap_angle(best.yaw);
  return best;
}

}  // namespace lidarcal
