#ifndef GALILEO_EVAL_BENCH_TREE_HPP
#define GALILEO_EVAL_BENCH_TREE_HPP

#include <chrono>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "galileo/map/baselines.hpp"
#include "galileo/sim/rng.hpp"

namespace galileo::eval {

struct BenchParams {
  int frames = 2000;
  int points_per_frame = 50;
  int queries_per_frame = 10;
  std::size_t k = 5;
  // A sensor-like stream: each frame draws points uniformly in a cube of
  // half-size `window` whose center sweeps along x from -extent to +extent.
  double extent = 100.0;
  double window = 10.0;
  std::uint64_t seed = 1;
  bool run_kd = true;
  OctreeParams octree{128.0, 32, 0.2};
};

struct BenchRow {
  int frame = 0;
  std::size_t map_size = 0;
  double octree_us = 0.0;  // insert + queries
  double brute_us = 0.0;
  double kd_us = 0.0;
  std::size_t octree_bytes = 0;
  std::size_t brute_bytes = 0;
  std::size_t kd_bytes = 0;
};

struct BenchSummary {
  std::vector<BenchRow> rows;
  bool gate_passed = true;
  std::string mismatch;  // first disagreement, if any
};

/// Feeds the same synthetic stream to every engine and times insert + kNN per
/// frame. Any disagreement stops the run: timings are only meaningful when
/// all engines return identical neighbors (ordinals and distances).
inline BenchSummary bench_tree(const BenchParams& p) {
  using Clock = std::chrono::steady_clock;
  auto us = [](Clock::time_point a, Clock::time_point b) {
    return std::chrono::duration<double, std::micro>(b - a).count();
  };
  BenchSummary out;
  IOctree tree(p.octree);
  BruteForceMap brute;
  IncrementalKdTree kd;
  std::vector<Vec3> pts;
  std::vector<Vec3> queries;
  std::vector<MapPoint> accepted;
  std::vector<std::vector<Neighbor>> ref(static_cast<std::size_t>(p.queries_per_frame));
  for (int f = 0; f < p.frames; ++f) {
    auto gen = sim::stream_engine(p.seed, sim::Stream::Bench, static_cast<std::uint64_t>(f));
    std::uniform_real_distribution<double> u(-p.window, p.window);
    const Vec3 center(-p.extent + 2.0 * p.extent * f / std::max(1, p.frames - 1), 0.0, 0.0);
    pts.clear();
    queries.clear();
    for (int i = 0; i < p.points_per_frame; ++i) pts.push_back(center + Vec3(u(gen), u(gen), u(gen)));
    for (int i = 0; i < p.queries_per_frame; ++i) queries.push_back(center + Vec3(u(gen), u(gen), u(gen)));

    BenchRow row;
    row.frame = f;
    accepted.clear();
    auto t0 = Clock::now();
    tree.insert(pts, &accepted);
    for (std::size_t q = 0; q < queries.size(); ++q) ref[q] = tree.knn(queries[q], p.k);
    auto t1 = Clock::now();
    row.octree_us = us(t0, t1);

    auto check = [&](const char* engine, std::size_t q, const std::vector<Neighbor>& got) {
      const auto& want = ref[q];
      bool same = got.size() == want.size();
      for (std::size_t i = 0; same && i < got.size(); ++i) {
        same = got[i].point.ordinal == want[i].point.ordinal && got[i].dist2 == want[i].dist2;
      }
      if (!same && out.gate_passed) {
        out.gate_passed = false;
        out.mismatch = fmt::format("frame {} query {}: {} disagrees with i-octree", f, q, engine);
      }
    };

    t0 = Clock::now();
    brute.insert(accepted);
    std::vector<std::vector<Neighbor>> got(queries.size());
    for (std::size_t q = 0; q < queries.size(); ++q) got[q] = brute.knn(queries[q], p.k);
    t1 = Clock::now();
    row.brute_us = us(t0, t1);
    for (std::size_t q = 0; q < queries.size(); ++q) check("brute-force", q, got[q]);

    if (p.run_kd) {
      t0 = Clock::now();
      kd.insert(accepted);
      for (std::size_t q = 0; q < queries.size(); ++q) got[q] = kd.knn(queries[q], p.k);
      t1 = Clock::now();
      row.kd_us = us(t0, t1);
      for (std::size_t q = 0; q < queries.size(); ++q) check("k-d tree", q, got[q]);
    }

    row.map_size = tree.size();
    row.octree_bytes = tree.stats().memory_bytes;
    row.brute_bytes = brute.memory_bytes();
    row.kd_bytes = kd.memory_bytes();
    out.rows.push_back(row);
    if (!out.gate_passed) break;
  }
  return out;
}

/// Mean per-frame times over frames whose map holds at least `min_size` points.
struct BenchMeans {
  std::size_t frames = 0;
  double octree_us = 0.0;
  double brute_us = 0.0;
  double kd_us = 0.0;
};

inline BenchMeans bench_means(const std::vector<BenchRow>& rows, std::size_t min_size) {
  BenchMeans m;
  for (const BenchRow& r : rows) {
    if (r.map_size < min_size) continue;
    ++m.frames;
    m.octree_us += r.octree_us;
    m.brute_us += r.brute_us;
    m.kd_us += r.kd_us;
  }
  if (m.frames > 0) {
    m.octree_us /= double(m.frames);
    m.brute_us /= double(m.frames);
    m.kd_us /= double(m.frames);
  }
  return m;
}

/// Coefficient of determination of the least-squares line y = a + b x.
inline double linear_r2(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  if (x.size() < 3 || x.size() != y.size()) return 0.0;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy * sxy / (sxx * syy);
}

inline double octree_memory_r2(const std::vector<BenchRow>& rows) {
  std::vector<double> x, y;
  for (const BenchRow& r : rows) {
    x.push_back(static_cast<double>(r.map_size));
    y.push_back(static_cast<double>(r.octree_bytes));
  }
  return linear_r2(x, y);
}

inline void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
  out << "frame,map_size,octree_us,brute_us,kd_us,octree_bytes,brute_bytes,kd_bytes\n";
  for (const BenchRow& r : rows) {
    out << fmt::format("{},{},{:.3f},{:.3f},{:.3f},{},{},{}\n", r.frame, r.map_size, r.octree_us, r.brute_us,
                       r.kd_us, r.octree_bytes, r.brute_bytes, r.kd_bytes);
  }
}

}  // namespace galileo::eval

#endif  // GALILEO_EVAL_BENCH_TREE_HPP
