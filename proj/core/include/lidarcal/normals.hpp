#pragma once

#include "lidarcal/geometry.hpp"
#include "lidarcal/kdtree.hpp"

#include <vector>

namespace lidarcal {

struct OrientedPoint {
  Point3 position;
  Eigen::Vector3d normal;  // unit length, oriented toward the sensor origin
};

// Per-point surface normals from PCA over the k nearest neighbors (the query
// point counts as one of the k). The normal is the eigenvector of the
// neighborhood covariance with the smallest eigenvalue, flipped so that
// normal . (sensor_origin - position) >= 0.
// Throws kInvalidArgument when the cloud has fewer than k points or k < 3.
std::vector<OrientedPoint> estimate_normals(const PointCloud& cloud, std::size_t k = 40,
                                            const Point3& sensor_origin = Point3::Zero());

// Same, reusing a prebuilt index over `cloud`.
std::vector<OrientedPoint> estimate_normals(const PointCloud& cloud, const KdTree& index,
                                            std::size_t k, const Point3& sensor_origin);

}  // namespace lidarcal
