#include "lidarcal/ground.hpp"

#include "lidarcal/error.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

namespace lidarcal {

namespace {

constexpr std::size_t kMinCloudSize = 50;
constexpr double kMinInlierFraction = 0.10;
// Off-plane side score below which the +-pi flip branch is tried. The two
// branches' scores sum to one (the flip mirrors signed distances), so any
// value above 0.5 makes a near-even straddle fail both ways.
constexpr double kSideScoreThreshold = 0.6;
// Minimum fraction of slave points that must land on the master plane for the
// alignment to count as overlapping at all.
constexpr double kMinOnPlaneFraction = 0.05;

// Deterministic unit vector orthogonal to n: cross with the basis axis least
// aligned with n.
Eigen::Vector3d in_plane_axis(const Eigen::Vector3d& n) {
  int dim = 0;
  n.cwiseAbs().minCoeff(&dim);
  return n.cross(Eigen::Vector3d::Unit(dim)).normalized();
}

void orient_toward_origin(Plane& plane) {
  // Origin on the positive side: a*0 + b*0 + c*0 + d >= 0.
  if (plane.d < 0.0 || (plane.d == 0.0 && plane.c < 0.0)) {
    plane.a = -plane.a;
    plane.b = -plane.b;
    plane.c = -plane.c;
    plane.d = -plane.d;
  }
}

}  // namespace

Plane fit_ground_plane(const PointCloud& cloud, double epsilon, int iterations,
                       std::uint64_t seed) {
  if (epsilon <= 0.0 || iterations < 1) {
    throw CalibError(ErrorCode::kInvalidArgument,
                     "fit_ground_plane: epsilon and iterations must be positive");
  }
  const std::size_t n = cloud.size();
  if (n < kMinCloudSize) {
    throw CalibError(ErrorCode::kNoGroundFound,
                     "fit_ground_plane: cloud smaller than " + std::to_string(kMinCloudSize));
  }

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);

  Eigen::Vector3d best_normal = Eigen::Vector3d::Zero();
  double best_offset = 0.0;
  std::size_t best_count = 0;

  for (int it = 0; it < iterations; ++it) {
    const std::size_t i = pick(rng);
    const std::size_t j = pick(rng);
    const std::size_t k = pick(rng);
    if (i == j || j == k || i == k) continue;

    const Point3& p0 = cloud.points[i];
    Eigen::Vector3d normal = (cloud.points[j] - p0).cross(cloud.points[k] - p0);
    const double norm = normal.norm();
    if (norm < 1e-12) continue;  // collinear sample
    normal /= norm;
    const double offset = -normal.dot(p0);

    std::size_t count = 0;
    for (const Point3& p : cloud.points) {
      if (std::abs(normal.dot(p) + offset) <= epsilon) ++count;
    }
    if (count > best_count) {
      best_count = count;
      best_normal = normal;
      best_offset = offset;
    }
  }

  if (best_count < 3 || static_cast<double>(best_count) < kMinInlierFraction * n) {
    throw CalibError(ErrorCode::kNoGroundFound,
                     "fit_ground_plane: no dominant plane within epsilon");
  }

  // Least-squares refit on the winning inlier set.
  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  std::size_t count = 0;
  for (const Point3& p : cloud.points) {
    if (std::abs(best_normal.dot(p) + best_offset) <= epsilon) {
      centroid += p;
      ++count;
    }
  }
  centroid /= static_cast<double>(count);

  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const Point3& p : cloud.points) {
    if (std::abs(best_normal.dot(p) + best_offset) <= epsilon) {
      const Eigen::Vector3d d = p - centroid;
      cov += d * d.transpose();
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver;
  solver.computeDirect(cov);
  Eigen::Vector3d normal = solver.eigenvectors().col(0).normalized();
  if (normal.dot(best_normal) < 0.0) normal = -normal;

  Plane plane;
  plane.a = normal.x();
  plane.b = normal.y();
  plane.c = normal.z();
  plane.d = -normal.dot(centroid);
  orient_toward_origin(plane);

  for (std::size_t idx = 0; idx < n; ++idx) {
    if (std::abs(plane.signed_distance(cloud.points[idx])) <= epsilon) {
      plane.inlier_ids.push_back(idx);
    }
  }
  plane.inlier_count = plane.inlier_ids.size();
  if (plane.inlier_count < 3 ||
      static_cast<double>(plane.inlier_count) < kMinInlierFraction * n) {
    throw CalibError(ErrorCode::kNoGroundFound, "fit_ground_plane: refit lost the inlier set");
  }
  return plane;
}

GroundAlignment align_ground(const Plane& master, const Plane& slave) {
  const Eigen::Vector3d n_m = master.normal();
  const Eigen::Vector3d n_s = slave.normal();

  GroundAlignment out;
  const Eigen::Vector3d cross = n_s.cross(n_m);
  const double sin_angle = cross.norm();
  const double cos_angle = n_s.dot(n_m);

  RigidTransform rotation;
  if (sin_angle < 1e-12) {
    if (cos_angle > 0.0) {
      rotation = RigidTransform::identity();
    } else {
      rotation = rodrigues(in_plane_axis(n_m), M_PI);
      out.flip_applied = true;
    }
  } else {
    rotation = rodrigues(cross / sin_angle, std::atan2(sin_angle, cos_angle));
  }

  // Rotating about the origin leaves the plane offset unchanged, so after the
  // rotation the slave plane is {n_m, slave.d}; sliding along the master
  // normal by (slave.d - master.d) makes the offsets coincide.
  rotation.translation = (slave.d - master.d) * n_m;
  out.transform = rotation;
  return out;
}

namespace {

struct SideScore {
  double above_fraction;  // among off-plane points, fraction on the + side
  double on_plane_fraction;
  std::size_t off_plane;
};

SideScore score_side(const PointCloud& cloud, const RigidTransform& t, const Plane& master,
                     double epsilon) {
  std::size_t above = 0, below = 0, on = 0;
  for (const Point3& p : cloud.points) {
    const double dist = master.signed_distance(t * p);
    if (std::abs(dist) <= epsilon) {
      ++on;
    } else if (dist > 0.0) {
      ++above;
    } else {
      ++below;
    }
  }
  SideScore s;
  s.off_plane = above + below;
  s.above_fraction = s.off_plane == 0 ? 1.0
                                      : static_cast<double>(above) /
                                            static_cast<double>(s.off_plane);
  s.on_plane_fraction = cloud.empty() ? 0.0
                                      : static_cast<double>(on) /
                                            static_cast<double>(cloud.size());
  return s;
}

}  // namespace

GroundAlignment verify_ground_side(const PointCloud& slave_cloud,
                                   const GroundAlignment& alignment, const Plane& master,
                                   double epsilon) {
  if (slave_cloud.empty() || epsilon <= 0.0) {
    throw CalibError(ErrorCode::kInvalidArgument, "verify_ground_side: bad inputs");
  }

  const SideScore original = score_side(slave_cloud, alignment.transform, master, epsilon);
  if (original.on_plane_fraction < kMinOnPlaneFraction) {
    throw CalibError(ErrorCode::kAmbiguousGround,
                     "verify_ground_side: alignment left no slave points on the master plane");
  }

  GroundAlignment verified = alignment;
  if (original.off_plane == 0) {
    // Nothing but ground; direction is unverifiable here and the scene check
    // downstream will reject the cloud as degenerate.
    verified.residual_inlier_fraction = original.above_fraction;
    return verified;
  }

  if (original.above_fraction >= kSideScoreThreshold) {
    verified.residual_inlier_fraction = original.above_fraction;
    return verified;
  }

  // The cloud landed upside down: rotate by pi about an in-plane axis through
  // the master plane, which maps the plane onto itself and swaps the sides.
  const Eigen::Vector3d n_m = master.normal();
  const Eigen::Vector3d plane_point = -master.d * n_m;
  RigidTransform flip = rodrigues(in_plane_axis(n_m), M_PI);
  flip.translation = plane_point - flip.rotation * plane_point;

  GroundAlignment flipped = alignment;
  flipped.transform = flip * alignment.transform;
  flipped.flip_applied = true;

  const SideScore corrected = score_side(slave_cloud, flipped.transform, master, epsilon);
  if (corrected.above_fraction < kSideScoreThreshold) {
    throw CalibError(ErrorCode::kAmbiguousGround,
                     "verify_ground_side: neither flip candidate verifies");
  }
  flipped.residual_inlier_fraction = corrected.above_fraction;
  return flipped;
}

}  // namespace lidarcal
