#include "lidarcal/kdtree.hpp"

#include "lidarcal/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace lidarcal {

KdTree::KdTree(const PointCloud& cloud) : KdTree(cloud.points) {}

KdTree::KdTree(std::vector<Point3> points) : points_(std::move(points)) {
  if (points_.empty()) {
    throw CalibError(ErrorCode::kInvalidArgument, "KdTree: empty cloud");
  }
  order_.resize(points_.size());
  std::iota(order_.begin(), order_.end(), 0u);
  nodes_.reserve(2 * points_.size() / kLeafSize + 2);
  root_ = build(0, static_cast<std::uint32_t>(points_.size()));
}

std::uint32_t KdTree::build(std::uint32_t begin, std::uint32_t end) {
  const std::uint32_t id = static_cast<std::uint32_t>(nodes_.size());
  nodes_.emplace_back();
  if (end - begin <= kLeafSize) {
    nodes_[id].split_dim = -1;
    nodes_[id].left = begin;
    nodes_[id].right = end;
    return id;
  }

  // Split along the widest extent; ties fall to the lower axis index.
  Eigen::Vector3d lo = points_[order_[begin]];
  Eigen::Vector3d hi = lo;
  for (std::uint32_t i = begin + 1; i < end; ++i) {
    lo = lo.cwiseMin(points_[order_[i]]);
    hi = hi.cwiseMax(points_[order_[i]]);
  }
  int dim = 0;
  (hi - lo).maxCoeff(&dim);

  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) {
                     const double ca = points_[a][dim], cb = points_[b][dim];
                     if (ca != cb) return ca < cb;
                     return a < b;
                   });

  nodes_[id].split_dim = dim;
  nodes_[id].split_value = points_[order_[mid]][dim];
  const std::uint32_t left = build(begin, mid);
  const std::uint32_t right = build(mid, end);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

void KdTree::search(std::uint32_t node_id, const Point3& query, std::size_t k,
                    std::vector<HeapEntry>& heap) const {
  const Node& node = nodes_[node_id];
  if (node.split_dim < 0) {
    for (std::uint32_t i = node.left; i < node.right; ++i) {
      const std::uint32_t idx = order_[i];
      const HeapEntry cand{(points_[idx] - query).squaredNorm(), idx};
      if (heap.size() < k) {
        heap.push_back(cand);
        std::push_heap(heap.begin(), heap.end());
      } else if (cand < heap.front()) {
        std::pop_heap(heap.begin(), heap.end());
        heap.back() = cand;
        std::push_heap(heap.begin(), heap.end());
      }
    }
    return;
  }

  const double delta = query[node.split_dim] - node.split_value;
  const std::uint32_t near = delta < 0.0 ? node.left : node.right;
  const std::uint32_t far = delta < 0.0 ? node.right : node.left;
  search(near, query, k, heap);
  // Descend the far side unless every point there is strictly worse than the
  // current k-th best; <= keeps exactness under distance ties.
  if (heap.size() < k || delta * delta <= heap.front().dist_sq) {
    search(far, query, k, heap);
  }
}

std::vector<Neighbor> KdTree::knn(const Point3& query, std::size_t k) const {
  if (k == 0) {
    throw CalibError(ErrorCode::kInvalidArgument, "KdTree::knn: k must be positive");
  }
  k = std::min(k, points_.size());
  std::vector<HeapEntry> heap;
  heap.reserve(k);
  search(root_, query, k, heap);
  std::sort(heap.begin(), heap.end());
  std::vector<Neighbor> out;
  out.reserve(heap.size());
  for (const HeapEntry& e : heap) {
    out.push_back({e.index, std::sqrt(e.dist_sq)});
  }
  return out;
}

Neighbor KdTree::nearest(const Point3& query) const {
  std::vector<HeapEntry> heap;
  heap.reserve(1);
  search(root_, query, 1, heap);
  return {heap.front().index, std::sqrt(heap.front().dist_sq)};
}

}  // namespace lidarcal
