#include "lidarcal/icpn.hpp"

#include "lidarcal/error.hpp"

#include <Eigen/Cholesky>

#include <cmath>

namespace lidarcal {

namespace {

constexpr std::size_t kMinCorrespondences = 10;
constexpr int kMaxHalvings = 3;

struct NormalEquations {
  Eigen::Matrix<double, 6, 6> jtj = Eigen::Matrix<double, 6, 6>::Zero();
  Eigen::Matrix<double, 6, 1> jtr = Eigen::Matrix<double, 6, 1>::Zero();
  double cost = 0.0;
  std::size_t count = 0;
};

// One full correspondence pass at `pose`. Residual r = n_m . (R p_s + t - p_m)
// with the Jacobian row [ (q x n)^T  n^T ] for the increment (omega, t).
NormalEquations correspondence_pass(const std::vector<OrientedPoint>& master,
                                    const KdTree& index,
                                    const std::vector<OrientedPoint>& slave_normals,
                                    const RigidTransform& pose, const IcpnConfig& cfg,
                                    bool build_system) {
  NormalEquations eq;
  const double gate = cfg.max_correspondence_dist;
  const double cos_gate = std::cos(cfg.normal_angle_gate);
  double sum = 0.0;
  for (const OrientedPoint& sp : slave_normals) {
    const Point3 q = pose * sp.position;
    const Neighbor nn = index.nearest(q);
    if (nn.distance > gate) continue;
    const OrientedPoint& mp = master[nn.index];
    // Point-to-plane is insensitive to the normal sign, so gate on the
    // unsigned angle; sensor-facing orientation may disagree between frames.
    const Eigen::Vector3d rotated = pose.rotation * sp.normal;
    if (std::abs(mp.normal.dot(rotated)) < cos_gate) continue;

    const double r = mp.normal.dot(q - mp.position);
    sum += r * r;
    ++eq.count;
    if (build_system) {
      Eigen::Matrix<double, 6, 1> j;
      j.head<3>() = q.cross(mp.normal);
      j.tail<3>() = mp.normal;
      eq.jtj.noalias() += j * j.transpose();
      eq.jtr.noalias() += j * r;
    }
  }
  if (eq.count > 0) eq.cost = sum / static_cast<double>(eq.count);
  return eq;
}

RigidTransform increment_transform(const Eigen::Matrix<double, 6, 1>& delta) {
  const Eigen::Vector3d omega = delta.head<3>();
  const double angle = omega.norm();
  RigidTransform t;
  if (angle > 0.0) t = rodrigues(omega / angle, angle);
  t.translation = delta.tail<3>();
  return t;
}

}  // namespace

double point_to_plane_cost(const std::vector<OrientedPoint>& master, const KdTree& master_index,
                           const std::vector<OrientedPoint>& slave_normals,
                           const RigidTransform& pose, const IcpnConfig& cfg,
                           std::size_t* count) {
  const NormalEquations eq =
      correspondence_pass(master, master_index, slave_normals, pose, cfg, false);
  if (count != nullptr) *count = eq.count;
  if (eq.count == 0) return std::numeric_limits<double>::infinity();
  return eq.cost;
}

IcpnResult icpn_refine(const std::vector<OrientedPoint>& master, const PointCloud& slave,
                       const RigidTransform& initial, const IcpnConfig& cfg) {
  if (master.empty() || slave.empty()) {
    throw CalibError(ErrorCode::kInvalidArgument, "icpn_refine: empty input");
  }
  if (cfg.max_iterations < 1 || cfg.max_correspondence_dist <= 0.0) {
    throw CalibError(ErrorCode::kInvalidArgument, "icpn_refine: bad config");
  }

  std::vector<Point3> master_positions;
  master_positions.reserve(master.size());
  for (const OrientedPoint& mp : master) master_positions.push_back(mp.position);
  const KdTree index(std::move(master_positions));

  // Slave normals in the slave frame; rotated by the current pose inside the
  // correspondence pass.
  const std::vector<OrientedPoint> slave_normals = estimate_normals(slave, cfg.normal_k);

  IcpnResult result;
  result.transform = initial;

  NormalEquations eq = correspondence_pass(master, index, slave_normals, result.transform, cfg, true);
  if (eq.count < kMinCorrespondences) {
    throw CalibError(ErrorCode::kCorrespondenceStarvation,
                     "icpn_refine: " + std::to_string(eq.count) + " correspondences");
  }
  result.final_cost = eq.cost;
  result.accepted_costs.push_back(eq.cost);

  for (int iter = 0; iter < cfg.max_iterations; ++iter) {
    result.iterations_used = iter + 1;

    Eigen::Matrix<double, 6, 1> delta = eq.jtj.ldlt().solve(-eq.jtr);
    if (!delta.allFinite()) break;

    double scale = 1.0;
    bool accepted = false;
    RigidTransform candidate;
    NormalEquations cand_eq;
    for (int attempt = 0; attempt <= kMaxHalvings; ++attempt) {
      candidate = increment_transform(scale * delta) * result.transform;
      cand_eq = correspondence_pass(master, index, slave_normals, candidate, cfg, true);
      if (cand_eq.count >= kMinCorrespondences && cand_eq.cost <= result.final_cost) {
        accepted = true;
        break;
      }
      scale *= 0.5;
    }
    if (!accepted) break;  // best-so-far stands, converged stays false

    result.transform = candidate;
    result.final_cost = cand_eq.cost;
    result.accepted_costs.push_back(cand_eq.cost);
    eq = cand_eq;

    if ((scale * delta).head<3>().norm() < cfg.convergence_rotation &&
        (scale * delta).tail<3>().norm() < cfg.convergence_translation) {
      result.converged = true;
      break;
    }
  }
  return result;
}

}  // namespace lidarcal
