#ifndef GALILEO_MAP_BASELINES_HPP
#define GALILEO_MAP_BASELINES_HPP

#include <algorithm>
#include <vector>

#include "galileo/map/ioctree.hpp"

namespace galileo {

/// Linear scan; the exactness reference.
class BruteForceMap {
 public:
  void insert(const MapPoint& p) { points_.push_back(p); }
  void insert(std::span<const MapPoint> pts) { points_.insert(points_.end(), pts.begin(), pts.end()); }
  std::size_t size() const { return points_.size(); }
  std::size_t memory_bytes() const { return points_.capacity() * sizeof(MapPoint); }

  std::vector<Neighbor> knn(const Vec3& query, std::size_t k) const {
    if (k == 0) throw DomainError("knn: k must be at least 1");
    std::vector<Neighbor> all;
    all.reserve(points_.size());
    for (const MapPoint& p : points_) all.push_back({p, (p.position - query).squaredNorm()});
    const std::size_t n = std::min(k, all.size());
    std::partial_sort(all.begin(), all.begin() + n, all.end(), neighbor_less);
    all.resize(n);
    return all;
  }

 private:
  std::vector<MapPoint> points_;
};

/// Point k-d tree with cyclic split axes, grown by insertion and never
/// rebalanced. A simple incremental baseline.
class IncrementalKdTree {
 public:
  void insert(const MapPoint& p) {
    const auto id = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back({p, -1, -1});
    if (id == 0) return;
    std::int32_t cur = 0;
    int axis = 0;
    for (;;) {
      Node& n = nodes_[cur];
      std::int32_t& next = p.position[axis] < n.point.position[axis] ? n.left : n.right;
      if (next < 0) {
        next = id;
        return;
      }
      cur = next;
      axis = (axis + 1) % 3;
    }
  }
  void insert(std::span<const MapPoint> pts) {
    for (const auto& p : pts) insert(p);
  }
  std::size_t size() const { return nodes_.size(); }
  std::size_t memory_bytes() const { return nodes_.capacity() * sizeof(Node); }

  std::vector<Neighbor> knn(const Vec3& query, std::size_t k) const {
    if (k == 0) throw DomainError("knn: k must be at least 1");
    std::vector<Neighbor> heap;
    if (nodes_.empty()) return heap;
    heap.reserve(k + 1);
    search(0, 0, query, k, heap);
    std::sort_heap(heap.begin(), heap.end(), neighbor_less);
    return heap;
  }

 private:
  struct Node {
    MapPoint point;
    std::int32_t left, right;
  };

  void search(std::int32_t id, int axis, const Vec3& q, std::size_t k, std::vector<Neighbor>& heap) const {
    while (id >= 0) {
      const Node& n = nodes_[id];
      const Neighbor cand{n.point, (n.point.position - q).squaredNorm()};
      if (heap.size() < k) {
        heap.push_back(cand);
        std::push_heap(heap.begin(), heap.end(), neighbor_less);
      } else if (neighbor_less(cand, heap.front())) {
        std::pop_heap(heap.begin(), heap.end(), neighbor_less);
        heap.back() = cand;
        std::push_heap(heap.begin(), heap.end(), neighbor_less);
      }
      const double diff = q[axis] - n.point.position[axis];
      const std::int32_t near = diff < 0 ? n.left : n.right;
      const std::int32_t far = diff < 0 ? n.right : n.left;
      const int next_axis = (axis + 1) % 3;
      search(near, next_axis, q, k, heap);
      if (heap.size() < k || diff * diff <= heap.front().dist2) {
        id = far;
        axis = next_axis;
      } else {
        return;
      }
    }
  }

  std::vector<Node> nodes_;
};

}  // namespace galileo

#endif  // GALILEO_MAP_BASELINES_HPP
