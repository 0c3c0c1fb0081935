#pragma once

#include "lidarcal/geometry.hpp"

#include <cstdint>
#include <vector>

namespace lidarcal {

struct Neighbor {
  std::size_t index;
  double distance;  // euclidean, meters
};

// Exact 3D k-d tree. Queries return the same ids and distances as a
// brute-force linear scan, with ties ordered by (distance, index). The tree
// is immutable after construction and safe to query from many threads.
class KdTree {
 public:
  explicit KdTree(const PointCloud& cloud);
  explicit KdTree(std::vector<Point3> points);

  // k nearest neighbors, sorted ascending by (distance, index).
  // k larger than the point count returns every point.
  std::vector<Neighbor> knn(const Point3& query, std::size_t k) const;

  Neighbor nearest(const Point3& query) const;

  std::size_t size() const { return points_.size(); }
  const std::vector<Point3>& points() const { return points_; }

 private:
  struct Node {
    double split_value = 0.0;
    std::int32_t split_dim = -1;  // -1 marks a leaf
    std::uint32_t left = 0;       // child node id, or range begin for leaves
    std::uint32_t right = 0;      // child node id, or range end for leaves
  };

  // Max-heap entry ordered by (squared distance, index).
  struct HeapEntry {
    double dist_sq;
    std::uint32_t index;
    bool operator<(const HeapEntry& o) const {
      if (dist_sq != o.dist_sq) return dist_sq < o.dist_sq;
      return index < o.index;
    }
  };

  std::uint32_t build(std::uint32_t begin, std::uint32_t end);
  void search(std::uint32_t node_id, const Point3& query, std::size_t k,
              std::vector<HeapEntry>& heap) const;

  static constexpr std::uint32_t kLeafSize = 16;

  std::vector<Point3> points_;
  std::vector<std::uint32_t> order_;  // permutation of point ids, leaf ranges index it
  std::vector<Node> nodes_;
  std::uint32_t root_ = 0;
};

}  // namespace lidarcal
