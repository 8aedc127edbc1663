// Acceptance run: one PASS/FAIL line per criterion, exit status 0 only if all pass.

#include <boost/math/distributions/chi_squared.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>

#include <fmt/format.h>

#include "galileo/galileo.hpp"
#include "test_util.hpp"

using namespace galileo;
using galileo::testing::max_abs_diff;
using galileo::testing::Rng;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------- 1

Outcome lie_suite() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(1001);
  double so3_rt = 0.0, se3_rt = 0.0, gal_rt = 0.0, gal_series = 0.0, adj = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Vec3 th = rng.angle_axis(0.0, kPi - 1e-3);
    so3_rt = std::max(so3_rt, (so3::log(so3::exp(th)) - th).norm());

    Vec6 xi;
    xi << rng.vec<3>(3.0), rng.angle_axis(0.0, kPi - 1e-3);
    se3_rt = std::max(se3_rt, (se3::log(se3::exp(xi)) - xi).norm());

    const GalTangent tau = rng.gal_tangent(2.0);
    gal_rt = std::max(gal_rt, (sgal3::log(sgal3::exp(tau)) - tau).norm());

    const GalTangent small = rng.gal_tangent(1.0);
    gal_series = std::max(gal_series, max_abs_diff(sgal3::exp(small).matrix(),
                                                   galileo::testing::series_exp<Mat5>(sgal3::wedge(small), 30)));

    const GalileanFrame g = rng.frame();
    adj = std::max(adj, max_abs_diff((g * sgal3::exp(small)).matrix(),
                                     (sgal3::exp(sgal3::adjoint(g) * small) * g).matrix()));
  }
  const double secs = seconds_since(t0);
  const bool pass = so3_rt < 1e-9 && se3_rt < 1e-9 && gal_rt < 1e-9 && gal_series < 1e-10 && adj < 1e-9 && secs < 5.0;
  return {pass, fmt::format("round-trip so3 {:.1e} se3 {:.1e} sgal3 {:.1e}; series {:.1e}; adjoint {:.1e}; {:.2f} s",
                            so3_rt, se3_rt, gal_rt, gal_series, adj, secs)};
}

// ---------------------------------------------------------------- 2

Outcome jacobian_suite() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  int min_configs = 1 << 30;
  std::string parts;
  for (const auto& r : diagnostics::run_all_audits(100, 2002)) {
    worst = std::max(worst, r.max_defect);
    min_configs = std::min(min_configs, r.configs);
    parts += fmt::format("{} {:.1e}; ", r.name, r.max_defect);
  }
  const double secs = seconds_since(t0);
  return {worst < 1e-5 && min_configs >= 100 && secs < 30.0,
          fmt::format("{}max {:.1e} over >= {} configs each; {:.2f} s", parts, worst, min_configs, secs)};
}

// ---------------------------------------------------------------- 3

// Angle-based reference for y - x.
SphereTangent reference_ominus(const SpherePoint& y, const SpherePoint& x) {
  const Vec3 c = x.vector().cross(y.vector());
  const double angle = std::atan2(c.norm(), x.vector().dot(y.vector()));
  return s2::basis(x).transpose() * (c.normalized() * angle);
}

Outcome s2_suite() {
  Rng rng(3003);
  const double r = SpherePoint::kDefaultRadius;
  double norm_err = 0.0, rt = 0.0, seam = 0.0;
  bool antipodal = true;
  for (int i = 0; i < 1000; ++i) {
    const SpherePoint x(rng.unit() * r, r);
    const Vec2 dir = Vec2(rng.normal(), rng.normal()).normalized();
    const SphereTangent big = dir * rng.uniform(0.0, 10.0);
    norm_err = std::max(norm_err, std::abs(s2::oplus(x, big).vector().norm() - r));
    const SphereTangent tau = dir * rng.uniform(0.0, kPi - 1e-3);
    rt = std::max(rt, (s2::ominus(s2::oplus(x, tau), x) - tau).norm());
    const SphereTangent anti = s2::ominus(SpherePoint(-x.vector(), r), x);
    antipodal &= anti[0] == kPi && anti[1] == 0.0;
    const Vec3 axis = s2::basis(x) * Vec2(rng.normal(), rng.normal()).normalized();
    for (double f : {1.0 - 1e-6, 1.0 + 1e-6}) {
      const SpherePoint y = SpherePoint::projected(so3::exp(axis * s2::kFirstOrderThreshold * f) * x.vector(), r);
      seam = std::max(seam, (s2::ominus(y, x) - reference_ominus(y, x)).norm());
    }
  }
  return {norm_err <= 1e-12 && rt < 1e-8 && antipodal && seam < 1e-10,
          fmt::format("norm {:.1e}; round-trip {:.1e}; antipodal (pi, 0) {}; seam {:.1e}", norm_err, rt,
                      antipodal ? "exact" : "WRONG", seam)};
}

// ---------------------------------------------------------------- 4

bool same_neighbors(const std::vector<Neighbor>& a, const std::vector<Neighbor>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].point.ordinal != b[i].point.ordinal || a[i].dist2 != b[i].dist2) return false;
  }
  return true;
}

Outcome octree_suite() {
  Rng rng(4004);
  std::vector<Vec3> pts;
  for (int i = 0; i < 49000; ++i) pts.push_back(rng.vec<3>(50.0));
  for (int i = 0; i < 1000; ++i) pts.emplace_back(i % 10, (i / 10) % 10, i / 100);  // lattice: exact ties
  IOctree tree;
  std::vector<MapPoint> accepted;
  const InsertReport rep = tree.insert(pts, &accepted);
  BruteForceMap brute;
  brute.insert(accepted);
  int mismatches = 0;
  for (int q = 0; q < 1000; ++q) {
    const Vec3 query = q % 5 == 0 ? Vec3(rng.uniform(0, 9), rng.uniform(0, 9), rng.uniform(0, 9)).array().round().matrix()
                                  : rng.vec<3>(60.0);
    for (std::size_t k : {1u, 5u, 20u}) mismatches += !same_neighbors(tree.knn(query, k), brute.knn(query, k));
  }
  const AuditReport audit = tree.audit();
  const bool accounting = rep.inserted + rep.rejected() == pts.size() && tree.size() == rep.inserted &&
                          tree.stats().points == rep.inserted;

  Rng rng2(4005);
  std::vector<Vec3> big;
  for (int i = 0; i < 100000; ++i) big.push_back(rng2.vec<3>(50.0));
  const auto t0 = std::chrono::steady_clock::now();
  IOctree t2;
  t2.insert(big);
  std::size_t found = 0;
  for (int q = 0; q < 100000; ++q) found += t2.knn(rng2.vec<3>(50.0), 5).size();
  const double secs = seconds_since(t0);
  return {mismatches == 0 && audit.ok && accounting && found == 500000 && secs < 5.0,
          fmt::format("{} mismatches in 3000 queries vs brute force; audit {}; accounting {}; 100k insert + 100k "
                      "queries {:.2f} s",
                      mismatches, audit.ok ? "ok" : audit.problems.front(), accounting ? "ok" : "BROKEN", secs)};
}

// ---------------------------------------------------------------- 5

// One iterated update against the closed-form Kalman update on the bias
// block, where the measurement model is exactly linear.
double linear_kalman_defect() {
  Rng rng(5005);
  FilterState fs;
  fs.nominal = rng.nav_state();
  ErrorVector d = ErrorVector::Constant(1e-3);
  d[idx::kIota] = 0.0;
  fs.covariance = d.asDiagonal();
  Mat6 a = Mat6::Random() * 0.05;
  const Mat6 p6 = a * a.transpose() + Mat6::Identity() * 1e-3;
  fs.covariance.block<6, 6>(idx::kGyroBias, idx::kGyroBias) = p6;
  const int m = 10;
  const Eigen::Matrix<double, 10, 6> h6 = Eigen::Matrix<double, 10, 6>::Random();
  Eigen::VectorXd y(m), var(m);
  for (int i = 0; i < m; ++i) {
    y[i] = rng.normal(0.1);
    var[i] = 1e-3 * (1 + i);
  }
  auto provider = [&](const NavState& x) {
    Vec6 b;
    b << x.gyro_bias, x.accel_bias;
    MeasurementBatch batch;
    batch.resize(m);
    batch.residuals = h6 * b - y;
    batch.jacobian.setZero();
    batch.jacobian.middleCols<6>(idx::kGyroBias) = h6;
    batch.noise_variance = var;
    return batch;
  };
  Vec6 b0;
  b0 << fs.nominal.gyro_bias, fs.nominal.accel_bias;
  const Eigen::MatrixXd s = h6 * p6 * h6.transpose() + Eigen::MatrixXd(var.asDiagonal());
  const Eigen::MatrixXd k = p6 * h6.transpose() * s.inverse();
  const Vec6 b_post = b0 + k * (y - h6 * b0);
  const Mat6 p_post = (Mat6::Identity() - k * h6) * p6;
  const UpdateResult r = iterated_update(fs, provider, UpdateOptions{1e-4, 1});
  Vec6 b;
  b << r.state.nominal.gyro_bias, r.state.nominal.accel_bias;
  return std::max((b - b_post).cwiseAbs().maxCoeff(),
                  max_abs_diff(r.state.covariance.block<6, 6>(idx::kGyroBias, idx::kGyroBias), p_post));
}

Outcome consistency_suite() {
  std::string parts;
  bool pass = true;
  for (std::uint64_t seed : {1, 2, 3}) {
    eval::ConsistencySpec cs;
    cs.seed = seed;
    const eval::ConsistencyRun run = eval::run_consistency(cs);
    const boost::math::chi_squared chi(run.dof);
    const double lo = boost::math::quantile(chi, 0.00135), hi = boost::math::quantile(chi, 0.99865);
    std::size_t inside = 0;
    double mean = 0.0;
    for (double v : run.nees) {
      inside += v >= lo && v <= hi;
      mean += v;
    }
    const double frac = double(inside) / double(run.nees.size());
    mean /= double(run.nees.size());
    pass &= frac >= 0.9 && run.covariance_valid;
    parts += fmt::format("seed {}: {:.0f}% in [{:.1f}, {:.1f}] (dof {}, mean {:.1f}); ", seed, 100 * frac, lo, hi,
                         run.dof, mean);
  }
  const double kalman = linear_kalman_defect();
  pass &= kalman < 1e-9;
  return {pass, fmt::format("{}linear Kalman defect {:.1e}", parts, kalman)};
}

// ---------------------------------------------------------------- 6

bool same_trajectory(const std::vector<StampedPose>& a, const std::vector<StampedPose>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].stamp != b[i].stamp || a[i].pose.translation != b[i].pose.translation ||
        a[i].pose.rotation.matrix() != b[i].pose.rotation.matrix()) {
      return false;
    }
  }
  return true;
}

io::RunConfig default_config(const sim::SimulationSpec& spec) {
  io::RunConfig cfg;
  cfg.pipeline.noise = spec.imu.noise;
  return cfg;
}

Outcome figure_eight() {
  sim::SimulationSpec spec;
  spec.profile = sim::TrajectoryProfile::defaults(sim::ProfileKind::FigureEight);
  spec.world = sim::WorldKind::BoxRoom;
  spec.seed = 1;
  const sim::Simulation s = sim::simulate(spec);
  const io::RunConfig cfg = default_config(spec);

  const auto t0 = std::chrono::steady_clock::now();
  const RunResult a = run_pipeline(s.dataset, cfg);
  const double secs = seconds_since(t0);
  const RunResult b = run_pipeline(s.dataset, cfg);
  const RunResult dr = run_dead_reckoning(s.dataset, cfg);
  const bool deterministic = same_trajectory(a.trajectory, b.trajectory) &&
                             same_trajectory(sim::simulate(spec).dataset.truth, s.dataset.truth);
  const double ape = eval::ape_rmse(a.trajectory, s.dataset.truth, eval::Alignment::FirstPose);
  const double ape_dr = eval::ape_rmse(dr.trajectory, s.dataset.truth, eval::Alignment::FirstPose);
  return {ape < 0.05 && ape_dr >= 10.0 * ape && deterministic && secs < 60.0,
          fmt::format("APE {:.4f} m, dead reckoning {:.2f} m ({:.0f}x); deterministic {}; {:.1f} s", ape, ape_dr,
                      ape_dr / ape, deterministic ? "yes" : "NO", secs)};
}

// ---------------------------------------------------------------- 7

Outcome corridor() {
  sim::SimulationSpec spec;
  spec.profile = sim::TrajectoryProfile::defaults(sim::ProfileKind::CorridorTransit);
  spec.world = sim::WorldKind::Corridor;
  spec.seed = 1;
  const sim::Simulation s = sim::simulate(spec);
  io::RunConfig cfg = default_config(spec);

  auto finite = [](const FilterState& fs) { return fs.nominal.gamma.matrix().allFinite() && fs.covariance.allFinite(); };
  RunResult gal, dec;
  try {
    gal = run_pipeline(s.dataset, cfg);
    cfg.pipeline.propagation = Propagation::Decoupled;
    dec = run_pipeline(s.dataset, cfg);
  } catch (const DivergenceError& e) {
    return {false, fmt::format("diverged: {}", e.what())};
  }

  std::size_t updated = 0, along = 0;
  for (const FrameReport& f : gal.reports) {
    if (f.iterations == 0) continue;
    ++updated;
    along += f.degeneracy.weakest_world_axis == 0;
  }
  const double axis_frac = updated ? double(along) / double(updated) : 0.0;
  const eval::PositionErrors pe = eval::position_errors(gal.trajectory, s.dataset.truth, eval::Alignment::FirstPose);
  const eval::PositionErrors pd = eval::position_errors(dec.trajectory, s.dataset.truth, eval::Alignment::FirstPose);
  const double cross = eval::axis_rmse(pe.errors, 1), vert = eval::axis_rmse(pe.errors, 2);
  const double along_err = pe.errors.back().x();

  const std::filesystem::path dir = std::filesystem::temp_directory_path() / "galileo_acceptance";
  std::filesystem::create_directories(dir);
  io::write_tum((dir / "corridor_galilean.tum").string(), gal.trajectory);
  io::write_tum((dir / "corridor_decoupled.tum").string(), dec.trajectory);
  io::write_tum((dir / "corridor_truth.tum").string(), s.dataset.truth);

  const bool stable = finite(gal.final_state) && gal.covariance_valid_throughout && finite(dec.final_state);
  const bool pass = stable && axis_frac >= 0.9 && cross < 0.1 && vert < 0.1 && dec.trajectory.size() == gal.trajectory.size();
  return {pass,
          fmt::format("finite/PSD {}; weakest axis = along-track in {:.0f}% of frames; cross-track {:.4f} m, "
                      "vertical {:.4f} m; along-track end error {:.2f} m (reported); decoupled cross {:.4f} vertical "
                      "{:.4f} along {:.2f}; trajectories in {}",
                      stable ? "yes" : "NO", 100 * axis_frac, cross, vert, along_err, eval::axis_rmse(pd.errors, 1),
                      eval::axis_rmse(pd.errors, 2), pd.errors.back().x(), dir.string())};
}

// ---------------------------------------------------------------- 8

Outcome tree_benchmark() {
  eval::BenchParams p;  // 2000 frames
  const auto t0 = std::chrono::steady_clock::now();
  const eval::BenchSummary s = eval::bench_tree(p);
  const double secs = seconds_since(t0);
  if (!s.gate_passed) return {false, "correctness gate failed: " + s.mismatch};
  const eval::BenchMeans m = eval::bench_means(s.rows, 50000);
  const double r2 = eval::octree_memory_r2(s.rows);
  return {m.frames > 0 && m.octree_us < m.brute_us && r2 > 0.99,
          fmt::format("{} frames at >= 50k points: octree {:.0f} us, brute {:.0f} us, kd {:.0f} us; memory R^2 "
                      "{:.5f}; gate ok; {:.1f} s",
                      m.frames, m.octree_us, m.brute_us, m.kd_us, r2, secs)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 lie-core", lie_suite},         {"2 jacobians", jacobian_suite}, {"3 s2", s2_suite},
      {"4 octree", octree_suite},        {"5 consistency", consistency_suite},
      {"6 figure-eight", figure_eight},  {"7 corridor", corridor},      {"8 tree-bench", tree_benchmark},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, fmt::format("exception: {}", e.what())};
    }
    failed += !o.pass;
    std::printf("%s %-15s %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", int(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
