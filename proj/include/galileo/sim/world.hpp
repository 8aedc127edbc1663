#ifndef GALILEO_SIM_WORLD_HPP
#define GALILEO_SIM_WORLD_HPP

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "galileo/common.hpp"

namespace galileo::sim {

/// Parallelogram corner + a*edge_u + b*edge_v, a, b in [0, 1].
struct Patch {
  Vec3 corner;
  Vec3 edge_u;
  Vec3 edge_v;

  Vec3 normal() const { return edge_u.cross(edge_v).normalized(); }
};

struct Box {
  Vec3 lo;
  Vec3 hi;
};

struct RayHit {
  double range;
  Vec3 normal;
};

class World {
 public:
  std::vector<Patch> patches;
  std::vector<Box> boxes;

  void validate() const {
    for (const Patch& p : patches) {
      if (!p.corner.allFinite() || !p.edge_u.allFinite() || !p.edge_v.allFinite() ||
          p.edge_u.cross(p.edge_v).norm() < 1e-12) {
        throw InvariantError("World: degenerate or non-finite patch");
      }
    }
    for (const Box& b : boxes) {
      if (!b.lo.allFinite() || !b.hi.allFinite() || !(b.hi.array() > b.lo.array()).all()) {
        throw InvariantError("World: box needs lo < hi on every axis");
      }
    }
  }

  bool empty() const { return patches.empty() && boxes.empty(); }

  /// Closest hit along origin + t dir (dir unit), t in (min_range, max_range].
  std::optional<RayHit> raycast(const Vec3& origin, const Vec3& dir, double min_range,
                                double max_range) const {
    std::optional<RayHit> best;
    auto consider = [&](double t, const Vec3& n) {
      if (t > min_range && t <= max_range && (!best || t < best->range)) best = RayHit{t, n};
    };
    for (const Patch& p : patches) {
      const Vec3 n = p.edge_u.cross(p.edge_v);
      const double denom = n.dot(dir);
      if (std::abs(denom) < 1e-12 * n.norm()) continue;
      const double t = n.dot(p.corner - origin) / denom;
      if (!(t > 0.0)) continue;
      const Vec3 rel = origin + t * dir - p.corner;
      const double uu = p.edge_u.squaredNorm(), uv = p.edge_u.dot(p.edge_v), vv = p.edge_v.squaredNorm();
      const double ru = rel.dot(p.edge_u), rv = rel.dot(p.edge_v);
      const double det = uu * vv - uv * uv;
      const double a = (ru * vv - rv * uv) / det;
      const double b = (rv * uu - ru * uv) / det;
      if (a < 0.0 || a > 1.0 || b < 0.0 || b > 1.0) continue;
      consider(t, n.normalized());
    }
    for (const Box& b : boxes) {
      double t_near = -std::numeric_limits<double>::infinity();
      double t_far = std::numeric_limits<double>::infinity();
      int axis_near = 0, axis_far = 0;
      bool miss = false;
      for (int a = 0; a < 3; ++a) {
        if (std::abs(dir[a]) < 1e-300) {
          if (origin[a] < b.lo[a] || origin[a] > b.hi[a]) miss = true;
          continue;
        }
        double t0 = (b.lo[a] - origin[a]) / dir[a];
        double t1 = (b.hi[a] - origin[a]) / dir[a];
        if (t0 > t1) std::swap(t0, t1);
        if (t0 > t_near) {
          t_near = t0;
          axis_near = a;
        }
        if (t1 < t_far) {
          t_far = t1;
          axis_far = a;
        }
      }
      if (miss || t_near > t_far) continue;
      // From inside a box (a room) the exit face is the visible one.
      const bool inside = t_near <= 0.0;
      const double t = inside ? t_far : t_near;
      const int axis = inside ? axis_far : axis_near;
      Vec3 n = Vec3::Zero();
      n[axis] = dir[axis] > 0 ? -1.0 : 1.0;
      consider(t, n);
    }
    return best;
  }

  /// Points on every surface on a grid of the given spacing.
  std::vector<Vec3> sample_surfaces(double spacing) const {
    std::vector<Vec3> out;
    auto grid = [&](const Vec3& c, const Vec3& u, const Vec3& v) {
      const int nu = std::max(1, static_cast<int>(std::ceil(u.norm() / spacing)));
      const int nv = std::max(1, static_cast<int>(std::ceil(v.norm() / spacing)));
      for (int i = 0; i <= nu; ++i)
        for (int j = 0; j <= nv; ++j) out.push_back(c + u * (double(i) / nu) + v * (double(j) / nv));
    };
    for (const Patch& p : patches) grid(p.corner, p.edge_u, p.edge_v);
    for (const Box& b : boxes) {
      const Vec3 d = b.hi - b.lo;
      const Vec3 ex(d.x(), 0, 0), ey(0, d.y(), 0), ez(0, 0, d.z());
      grid(b.lo, ex, ey);
      grid(b.lo + ez, ex, ey);
      grid(b.lo, ex, ez);
      grid(b.lo + ey, ex, ez);
      grid(b.lo, ey, ez);
      grid(b.lo + ex, ey, ez);
    }
    return out;
  }
};

/// Closed room (floor, ceiling, four walls) with a few pillars and crates.
inline World box_room() {
  World w;
  const Vec3 lo(-16, -11, -2), hi(16, 11, 5);
  const Vec3 d = hi - lo;
  const Vec3 ex(d.x(), 0, 0), ey(0, d.y(), 0), ez(0, 0, d.z());
  w.patches = {
      {lo, ex, ey},       {lo + ez, ey, ex},  // floor, ceiling
      {lo, ez, ex},       {lo + ey, ex, ez},  // y walls
      {lo, ey, ez},       {lo + ex, ez, ey},  // x walls
  };
  w.boxes = {
      {Vec3(-3.5, -1.0, -2), Vec3(-2.5, 0.0, 5)},
      {Vec3(2.5, 0.5, -2), Vec3(3.5, 1.5, 5)},
      {Vec3(-12, 6, -2), Vec3(-9, 8, 0.5)},
      {Vec3(10, -8, -2), Vec3(12, -5, 1.0)},
      {Vec3(-1.0, 7.5, -2), Vec3(1.0, 9.0, 2.0)},
      {Vec3(7, 7, -2), Vec3(8, 8, 5)},
  };
  w.validate();
  return w;
}

/// Long corridor along +x with two inward-leaning walls and nothing else, so
/// the walls constrain cross-track and height but not the along-track axis.
inline World corridor(double length = 400.0, double x0 = -100.0) {
  World w;
  const Vec3 along(length, 0, 0);
  // left wall rises from (y=-4, z=-2) to (y=-2.5, z=4); right wall mirrored
  w.patches = {
      {Vec3(x0, -4.0, -2.0), along, Vec3(0, 1.5, 6.0)},
      {Vec3(x0, 4.0, -2.0), Vec3(0, -1.5, 6.0), along},
  };
  w.validate();
  return w;
}

/// One wall facing -x at distance d.
inline World single_wall(double d = 5.0) {
  World w;
  w.patches = {{Vec3(d, -20, -20), Vec3(0, 40, 0), Vec3(0, 0, 40)}};
  w.validate();
  return w;
}

}  // namespace galileo::sim

#endif  // GALILEO_SIM_WORLD_HPP
