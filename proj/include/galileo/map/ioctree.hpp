#ifndef GALILEO_MAP_IOCTREE_HPP
#define GALILEO_MAP_IOCTREE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "galileo/common.hpp"

namespace galileo {

struct MapPoint {
  Vec3 position = Vec3::Zero();
  std::uint64_t ordinal = 0;  // insertion order; breaks distance ties
};

struct Neighbor {
  MapPoint point;
  double dist2 = 0.0;

  double distance() const { return std::sqrt(dist2); }
};

/// Orders neighbours by (squared distance, ordinal).
inline bool neighbor_less(const Neighbor& a, const Neighbor& b) {
  return a.dist2 < b.dist2 || (a.dist2 == b.dist2 && a.point.ordinal < b.point.ordinal);
}

struct OctreeParams {
  double initial_half_extent = 512.0;
  std::size_t bucket_size = 32;
  double min_extent = 0.2;
  Vec3 initial_center = Vec3::Zero();

  void validate() const {
    if (!(initial_half_extent > 0.0) || bucket_size == 0 || !(min_extent > 0.0) ||
        !(min_extent < initial_half_extent) || !initial_center.allFinite()) {
      throw InvariantError("OctreeParams: extents and bucket size must be positive, min_extent < half extent");
    }
  }
};

/// Bit b is set iff point[b] >= center[b] (x -> bit 0, y -> bit 1, z -> bit 2).
inline int morton_child_index(const Vec3& point, const Vec3& center) {
  return (point.x() >= center.x() ? 1 : 0) | (point.y() >= center.y() ? 2 : 0) |
         (point.z() >= center.z() ? 4 : 0);
}

struct InsertReport {
  std::size_t inserted = 0;
  std::size_t rejected_nonfinite = 0;
  std::size_t rejected_saturated = 0;  // landed in a full leaf at min_extent

  std::size_t rejected() const { return rejected_nonfinite + rejected_saturated; }
};

struct TreeStats {
  std::size_t nodes = 0;
  std::size_t points = 0;
  int max_depth = 0;
  std::size_t memory_bytes = 0;
};

struct AuditReport {
  bool ok = true;
  std::vector<std::string> problems;

  void fail(std::string msg) {
    ok = false;
    problems.push_back(std::move(msg));
  }
};

/// Incremental octree. A full leaf above min_extent becomes an internal node
/// but keeps its points (no reallocation); later points descend into children.
/// Full leaves at min_extent reject, which downsamples dense regions.
class IOctree {
 public:
  struct Node {
    Vec3 center;
    double half_extent;
    std::array<std::int32_t, 8> children;
    bool subdivided = false;
    std::vector<MapPoint> bucket;

    Node(const Vec3& c, double h) : center(c), half_extent(h) { children.fill(-1); }

    bool contains(const Vec3& p) const {
      return (p.array() >= (center.array() - half_extent)).all() &&
             (p.array() < (center.array() + half_extent)).all();
    }
  };

  // Accounting constants for the memory estimate.
  static constexpr std::size_t kNodeBytes = sizeof(Node);
  static constexpr std::size_t kPointBytes = sizeof(MapPoint);
  // Root doublings are capped; beyond this a point is too far to index.
  static constexpr int kMaxRootExpansions = 40;

  explicit IOctree(const OctreeParams& params = {}) : params_(params) {
    params_.validate();
    nodes_.emplace_back(params_.initial_center, params_.initial_half_extent);
  }

  const OctreeParams& params() const { return params_; }
  std::size_t size() const { return point_count_; }
  bool empty() const { return point_count_ == 0; }
  int root_expansions() const { return root_expansions_; }
  const Node& root() const { return nodes_[root_]; }
  const Node& node(std::int32_t i) const { return nodes_[i]; }

  /// Inserts `points` in order. Accepted points get consecutive ordinals and are
  /// appended to `accepted` when given.
  InsertReport insert(std::span<const Vec3> points, std::vector<MapPoint>* accepted = nullptr) {
    InsertReport report;
    for (const Vec3& p : points) {
      if (!p.allFinite()) {
        ++report.rejected_nonfinite;
        continue;
      }
      if (!grow_to_contain(p)) {
        ++report.rejected_nonfinite;
        continue;
      }
      const MapPoint mp{p, next_ordinal_};
      if (insert_one(mp)) {
        ++next_ordinal_;
        ++point_count_;
        ++report.inserted;
        if (accepted) accepted->push_back(mp);
      } else {
        ++report.rejected_saturated;
      }
    }
    return report;
  }

  InsertReport insert(const Vec3& p, std::vector<MapPoint>* accepted = nullptr) {
    return insert(std::span<const Vec3>(&p, 1), accepted);
  }

  /// Exact k nearest neighbours, best-first over octants, sorted by (distance, ordinal).
  std::vector<Neighbor> knn(const Vec3& query, std::size_t k) const {
    if (k == 0) throw DomainError("knn: k must be at least 1");
    std::vector<Neighbor> heap;  // max-heap under neighbor_less
    if (point_count_ == 0) return heap;
    heap.reserve(k + 1);

    using Entry = std::pair<double, std::int32_t>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
    open.emplace(box_distance2(nodes_[root_], query), root_);
    while (!open.empty()) {
      const auto [bound, id] = open.top();
      open.pop();
      // Equal bounds may still hold a lower-ordinal tie, so only strict excess prunes.
      if (heap.size() == k && bound > heap.front().dist2) break;
      const Node& n = nodes_[id];
      for (const MapPoint& mp : n.bucket) {
        const Neighbor cand{mp, (mp.position - query).squaredNorm()};
        if (heap.size() < k) {
          heap.push_back(cand);
          std::push_heap(heap.begin(), heap.end(), neighbor_less);
        } else if (neighbor_less(cand, heap.front())) {
          std::pop_heap(heap.begin(), heap.end(), neighbor_less);
          heap.back() = cand;
          std::push_heap(heap.begin(), heap.end(), neighbor_less);
        }
      }
      if (!n.subdivided) continue;
      for (std::int32_t c : n.children) {
        if (c < 0) continue;
        const double d2 = box_distance2(nodes_[c], query);
        if (heap.size() < k || d2 <= heap.front().dist2) open.emplace(d2, c);
      }
    }
    std::sort_heap(heap.begin(), heap.end(), neighbor_less);
    return heap;
  }

  TreeStats stats() const {
    TreeStats s;
    s.nodes = nodes_.size();
    s.points = point_count_;
    s.max_depth = depth_below(root_);
    s.memory_bytes = s.nodes * kNodeBytes + s.points * kPointBytes;
    return s;
  }

  /// Every stored point inside its node's half-open box, children in the octant
  /// named by their index, point count consistent, ordinals unique.
  AuditReport audit() const {
    AuditReport rep;
    std::size_t counted = 0;
    std::vector<bool> seen(next_ordinal_, false);
    std::vector<std::int32_t> stack{root_};
    while (!stack.empty()) {
      const std::int32_t id = stack.back();
      stack.pop_back();
      const Node& n = nodes_[id];
      for (const MapPoint& mp : n.bucket) {
        ++counted;
        if (!n.contains(mp.position)) rep.fail(fmt::format("point {} outside node {}", mp.ordinal, id));
        if (mp.ordinal >= seen.size() || seen[mp.ordinal]) {
          rep.fail(fmt::format("ordinal {} invalid or duplicated", mp.ordinal));
        } else {
          seen[mp.ordinal] = true;
        }
      }
      if (!n.subdivided && n.bucket.size() > params_.bucket_size) {
        rep.fail(fmt::format("leaf {} holds {} points", id, n.bucket.size()));
      }
      for (int i = 0; i < 8; ++i) {
        const std::int32_t c = n.children[i];
        if (c < 0) continue;
        if (!n.subdivided) rep.fail(fmt::format("leaf {} has children", id));
        const Node& ch = nodes_[c];
        if (morton_child_index(ch.center, n.center) != i || ch.half_extent != n.half_extent / 2) {
          rep.fail(fmt::format("child {} of node {} misplaced", i, id));
        }
        stack.push_back(c);
      }
    }
    if (counted != point_count_) {
      rep.fail(fmt::format("stored {} points but counted {}", point_count_, counted));
    }
    return rep;
  }

  /// Visits every stored point (stale buckets included) with the index of its
  /// node, depth first. Node indices are stable across inserts.
  template <typename Fn>
  void for_each_stored(Fn&& fn) const {
    std::vector<std::int32_t> stack{root_};
    while (!stack.empty()) {
      const std::int32_t id = stack.back();
      stack.pop_back();
      const Node& n = nodes_[id];
      for (const MapPoint& mp : n.bucket) fn(mp, id);
      for (int i = 7; i >= 0; --i)
        if (n.children[i] >= 0) stack.push_back(n.children[i]);
    }
  }

  template <typename Fn>
  void for_each_point(Fn&& fn) const {
    for_each_stored([&](const MapPoint& mp, std::int32_t) { fn(mp); });
  }

  /// CSV dump of x,y,z,ordinal sorted by ordinal.
  void dump_csv(const std::string& path) const {
    std::vector<MapPoint> pts;
    pts.reserve(point_count_);
    for_each_point([&](const MapPoint& p) { pts.push_back(p); });
    std::sort(pts.begin(), pts.end(), [](const MapPoint& a, const MapPoint& b) { return a.ordinal < b.ordinal; });
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path);
    out << "x,y,z,ordinal\n";
    for (const auto& p : pts) {
      out << fmt::format("{:.17g},{:.17g},{:.17g},{}\n", p.position.x(), p.position.y(), p.position.z(),
                         p.ordinal);
    }
  }

 private:
  static double box_distance2(const Node& n, const Vec3& q) {
    const Eigen::Array3d d =
        ((q - n.center).array().abs() - n.half_extent).max(0.0);
    return d.matrix().squaredNorm();
  }

  bool grow_to_contain(const Vec3& p) {
    while (!nodes_[root_].contains(p)) {
      if (root_expansions_ >= kMaxRootExpansions) return false;
      const Vec3 c = nodes_[root_].center;
      const double h = nodes_[root_].half_extent;
      Vec3 step;
      for (int a = 0; a < 3; ++a) step[a] = p[a] >= c[a] ? h : -h;
      Node parent(c + step, 2.0 * h);
      parent.subdivided = true;
      parent.children[morton_child_index(c, parent.center)] = root_;
      nodes_.push_back(std::move(parent));
      root_ = static_cast<std::int32_t>(nodes_.size() - 1);
      ++root_expansions_;
    }
    return true;
  }

  bool insert_one(const MapPoint& mp) {
    std::int32_t id = root_;
    for (;;) {
      Node& n = nodes_[id];
      if (!n.subdivided) {
        if (n.bucket.size() < params_.bucket_size) {
          n.bucket.push_back(mp);
          return true;
        }
        if (!(n.half_extent > params_.min_extent)) return false;
        n.subdivided = true;  // existing bucket stays where it is
      }
      const int oct = morton_child_index(mp.position, n.center);
      std::int32_t c = n.children[oct];
      if (c < 0) {
        const double h = n.half_extent / 2;
        Vec3 center = n.center;
        for (int a = 0; a < 3; ++a) center[a] += (oct >> a) & 1 ? h : -h;
        c = static_cast<std::int32_t>(nodes_.size());
        nodes_[id].children[oct] = c;  // n may dangle after emplace_back
        nodes_.emplace_back(center, h);
      }
      id = c;
    }
  }

  int depth_below(std::int32_t id) const {
    int best = 0;
    std::vector<std::pair<std::int32_t, int>> stack{{id, 0}};
    while (!stack.empty()) {
      const auto [n, d] = stack.back();
      stack.pop_back();
      best = std::max(best, d);
      for (std::int32_t c : nodes_[n].children)
        if (c >= 0) stack.emplace_back(c, d + 1);
    }
    return best;
  }

  OctreeParams params_;
  std::vector<Node> nodes_;
  std::int32_t root_ = 0;
  std::uint64_t next_ordinal_ = 0;
  std::size_t point_count_ = 0;
  int root_expansions_ = 0;
};

}  // namespace galileo

#endif  // GALILEO_MAP_IOCTREE_HPP
