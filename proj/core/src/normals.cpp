#include "lidarcal/normals.hpp"

#include "lidarcal/error.hpp"

#include <Eigen/Eigenvalues>

namespace lidarcal {

std::vector<OrientedPoint> estimate_normals(const PointCloud& cloud, std::size_t k,
                                            const Point3& sensor_origin) {
  if (k < 3 || cloud.size() < k) {
    throw CalibError(ErrorCode::kInvalidArgument,
                     "estimate_normals: need cloud size >= k >= 3");
  }
  KdTree index(cloud);
  return estimate_normals(cloud, index, k, sensor_origin);
}

std::vector<OrientedPoint> estimate_normals(const PointCloud& cloud, const KdTree& index,
                                            std::size_t k, const Point3& sensor_origin) {
  if (k < 3 || cloud.size() < k) {
    throw CalibError(ErrorCode::kInvalidArgument,
                     "estimate_normals: need cloud size >= k >= 3");
  }
  std::vector<OrientedPoint> out;
  out.reserve(cloud.size());
  std::vector<Neighbor> nn;
  for (const Point3& p : cloud.points) {
    nn = index.knn(p, k);
    Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
    for (const Neighbor& n : nn) centroid += index.points()[n.index];
    centroid /= static_cast<double>(nn.size());

    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (const Neighbor& n : nn) {
      const Eigen::Vector3d d = index.points()[n.index] - centroid;
      cov += d * d.transpose();
    }

    // Eigenvalues come out sorted ascending, so col(0) is the surface normal;
    // the fixed ordering also pins the direction for rank-deficient patches.
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver;
    solver.computeDirect(cov);
    Eigen::Vector3d normal = solver.eigenvectors().col(0);
    normal.normalize();
    if (normal.dot(sensor_origin - p) < 0.0) normal = -normal;
    out.push_back({p, normal});
  }
  return out;
}

}  // namespace lidarcal
