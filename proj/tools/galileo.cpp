// galileo: simulate datasets, run the odometry, evaluate trajectories,
// benchmark the map index and audit Jacobians.
//
// Exit codes: 0 success, 1 divergence (or a failed check), 2 I/O or usage error.

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>

#include "galileo/galileo.hpp"

using namespace galileo;

namespace {

constexpr int kOk = 0;
constexpr int kDiverged = 1;
constexpr int kIoError = 2;

void configure_logging() {
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::info);
  if (const char* env = std::getenv("GALILEO_LOG")) {
    const std::string s(env);
    const auto level = spdlog::level::from_str(s);
    // from_str maps unknown names to "off"; only honour it when asked for
    if (level != spdlog::level::off || s == "off") spdlog::set_level(level);
  }
}

struct SimulateArgs {
  std::string profile = "figure-eight";
  std::string world;
  std::optional<double> duration;
  std::uint64_t seed = 1;
  std::string out;
  bool noiseless = false;
};

int cmd_simulate(const SimulateArgs& a) {
  sim::SimulationSpec spec;
  const sim::ProfileKind kind = sim::parse_profile(a.profile);
  spec.profile = sim::TrajectoryProfile::defaults(kind);
  if (a.duration) spec.profile.duration = *a.duration;
  spec.world = a.world.empty() ? sim::default_world(kind) : sim::parse_world(a.world);
  spec.seed = a.seed;
  if (a.noiseless) {
    spec.imu = sim::ImuSimParams::noiseless();
    spec.lidar.range_noise = 0.0;
  }
  const sim::Simulation s = sim::simulate(spec);
  io::write_dataset(a.out, s.dataset);
  std::size_t points = 0;
  for (const LidarScan& sc : s.dataset.scans) points += sc.points.size();
  spdlog::info("wrote {}: {} IMU samples, {} scans, {} points ({} in {}, seed {})", a.out, s.dataset.imu.size(),
               s.dataset.scans.size(), points, a.profile, sim::world_name(spec.world), a.seed);
  return kOk;
}

struct RunArgs {
  std::string dataset;
  std::string config;
  std::vector<std::string> overrides;
  std::string out;
  std::string frames;
  bool dead_reckoning = false;
};

int cmd_run(const RunArgs& a) {
  io::KeyValueFile kv;
  if (!a.config.empty()) kv = io::KeyValueFile::load(a.config);
  for (const std::string& o : a.overrides) kv.apply_override(o);
  const io::RunConfig cfg = io::run_config_from(kv);
  const io::Dataset ds = io::read_dataset(a.dataset);
  spdlog::debug("{} IMU samples, {} scans, propagation {}", ds.imu.size(), ds.scans.size(),
                io::propagation_name(cfg.pipeline.propagation));

  const RunResult r = a.dead_reckoning ? run_dead_reckoning(ds, cfg) : run_pipeline(ds, cfg);
  io::write_tum(a.out, r.trajectory);
  if (!a.frames.empty()) io::write_frames_csv(a.frames, r.reports);

  double total_us = 0.0, iters = 0.0;
  std::size_t degenerate = 0;
  for (const FrameReport& f : r.reports) {
    total_us += f.predict_us + f.deskew_us + f.downsample_us + f.update_us + f.insert_us;
    iters += f.iterations;
    degenerate += f.degenerate;
    spdlog::trace("t={:.3f} iters={} valid={}/{} map={}", f.stamp, f.iterations, f.valid, f.downsampled,
                  f.map_size);
  }
  const double n = std::max<double>(1.0, static_cast<double>(r.reports.size()));
  spdlog::info("{} frames, {:.2f} ms/frame, {:.2f} iterations/frame, {} degenerate, map {} points", r.reports.size(),
               total_us / n / 1000.0, iters / n, degenerate, r.reports.empty() ? 0 : r.reports.back().map_size);
  if (!r.covariance_valid_throughout) spdlog::warn("covariance left the PSD cone during the run");
  spdlog::info("trajectory written to {}", a.out);
  return kOk;
}

struct EvalArgs {
  std::string estimate;
  std::string truth;
  std::string frames;
  std::string alignment = "first-pose";
};

int cmd_eval(const EvalArgs& a) {
  std::string truth_path = a.truth;
  if (std::filesystem::is_directory(truth_path)) truth_path = (std::filesystem::path(truth_path) / "truth.tum").string();
  const auto est = io::read_tum(a.estimate);
  const auto gt = io::read_tum(truth_path);
  const eval::Alignment align = a.alignment == "none" ? eval::Alignment::None : eval::Alignment::FirstPose;
  const eval::PositionErrors pe = eval::position_errors(est, gt, align);
  fmt::print("ape_rmse {:.6f}\n", eval::rmse(pe.errors));
  fmt::print("ape_rmse_x {:.6f}\nape_rmse_y {:.6f}\nape_rmse_z {:.6f}\n", eval::axis_rmse(pe.errors, 0),
             eval::axis_rmse(pe.errors, 1), eval::axis_rmse(pe.errors, 2));
  fmt::print("end_to_end_drift {:.6f}\n", (pe.errors.back() - pe.errors.front()).norm());
  fmt::print("samples {}\n", pe.errors.size());
  if (!a.frames.empty()) {
    const io::FramesSummary f = io::summarize_frames(a.frames);
    fmt::print("frames {}\nmean_frame_us {:.1f}\nmean_update_us {:.1f}\nmean_iterations {:.3f}\n", f.frames,
               f.mean_total_us, f.mean_update_us, f.mean_iterations);
    fmt::print("mean_valid_ratio {:.4f}\ndegenerate_frames {}\nmap_points {}\nmap_bytes {}\n", f.mean_valid_ratio,
               f.degenerate_frames, f.final_map_size, f.final_map_bytes);
  }
  return kOk;
}

struct BenchArgs {
  eval::BenchParams params;
  std::string out;
  bool no_kd = false;
};

int cmd_bench(BenchArgs a) {
  a.params.run_kd = !a.no_kd;
  const eval::BenchSummary s = eval::bench_tree(a.params);
  if (!s.gate_passed) {
    spdlog::error("engines disagree, no timings reported: {}", s.mismatch);
    return kDiverged;
  }
  if (a.out.empty()) {
    eval::write_bench_csv(std::cout, s.rows);
  } else {
    std::ofstream out(a.out, std::ios::binary);
    if (!out) throw IoError(fmt::format("cannot write '{}'", a.out));
    eval::write_bench_csv(out, s.rows);
  }
  const eval::BenchMeans m = eval::bench_means(s.rows, 50000);
  spdlog::info("frames with map >= 50k: {}; mean us octree {:.1f}, brute {:.1f}, kd {:.1f}", m.frames,
               m.octree_us, m.brute_us, m.kd_us);
  spdlog::info("octree memory vs points R^2 = {:.6f}", eval::octree_memory_r2(s.rows));
  return kOk;
}

int cmd_check_jacobians(int configs, std::uint64_t seed, double tolerance) {
  bool ok = true;
  for (const auto& r : diagnostics::run_all_audits(configs, seed)) {
    const bool pass = r.max_defect < tolerance;
    ok &= pass;
    fmt::print("{:<30} configs {:>5}  max defect {:.3e}  {}\n", r.name, r.configs, r.max_defect,
               pass ? "ok" : "FAIL");
  }
  return ok ? kOk : kDiverged;
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();
  CLI::App app{"galileo: LiDAR-inertial odometry on the Galilean group"};
  app.require_subcommand(1);

  SimulateArgs sa;
  auto* sim_cmd = app.add_subcommand("simulate", "Simulate a dataset directory");
  sim_cmd->add_option("--profile", sa.profile, "static | constant-velocity | figure-eight | corridor-transit")
      ->check(CLI::IsMember({"static", "constant-velocity", "figure-eight", "corridor-transit"}));
  sim_cmd->add_option("--world", sa.world, "box-room | corridor | single-wall (default per profile)")
      ->check(CLI::IsMember({"box-room", "corridor", "single-wall"}));
  sim_cmd->add_option("--duration", sa.duration, "Seconds (default per profile)");
  sim_cmd->add_option("--seed", sa.seed, "RNG seed");
  sim_cmd->add_option("--out", sa.out, "Output directory")->required();
  sim_cmd->add_flag("--noiseless", sa.noiseless, "No sensor noise, zero biases");

  RunArgs ra;
  auto* run_cmd = app.add_subcommand("run", "Run the odometry on a dataset");
  run_cmd->add_option("--dataset", ra.dataset, "Dataset directory")->required();
  run_cmd->add_option("--config", ra.config, "key = value configuration file");
  run_cmd->add_option("--set", ra.overrides, "Override a configuration key (key=value), repeatable");
  run_cmd->add_option("--out", ra.out, "Trajectory output (TUM)")->required();
  run_cmd->add_option("--frames", ra.frames, "Per-frame report output (CSV)");
  run_cmd->add_flag("--dead-reckoning", ra.dead_reckoning, "IMU propagation only");

  EvalArgs ea;
  auto* eval_cmd = app.add_subcommand("eval", "APE and drift of a trajectory against ground truth");
  eval_cmd->add_option("--estimate", ea.estimate, "Estimated trajectory (TUM)")->required();
  eval_cmd->add_option("--truth", ea.truth, "Ground truth (TUM file or dataset directory)")->required();
  eval_cmd->add_option("--frames", ea.frames, "Per-frame report from `run` to summarize");
  eval_cmd->add_option("--alignment", ea.alignment, "first-pose | none")
      ->check(CLI::IsMember({"first-pose", "none"}));

  BenchArgs ba;
  auto* bench_cmd = app.add_subcommand("bench-tree", "Benchmark map engines on a synthetic stream");
  bench_cmd->add_option("--frames", ba.params.frames, "Frames in the stream");
  bench_cmd->add_option("--points", ba.params.points_per_frame, "Points inserted per frame");
  bench_cmd->add_option("--queries", ba.params.queries_per_frame, "kNN queries per frame");
  bench_cmd->add_option("--k", ba.params.k, "Neighbors per query");
  bench_cmd->add_option("--seed", ba.params.seed, "RNG seed");
  bench_cmd->add_option("--out", ba.out, "CSV output (default stdout)");
  bench_cmd->add_flag("--no-kd", ba.no_kd, "Skip the k-d tree baseline");

  int configs = 100;
  std::uint64_t audit_seed = 1;
  double tolerance = 1e-5;
  auto* jac_cmd = app.add_subcommand("check-jacobians", "Finite-difference audit of every analytic Jacobian");
  jac_cmd->add_option("--configs", configs, "Random configurations per suite")->check(CLI::PositiveNumber);
  jac_cmd->add_option("--seed", audit_seed, "RNG seed");
  jac_cmd->add_option("--tolerance", tolerance, "Largest accepted defect");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kIoError;
  }

  try {
    if (sim_cmd->parsed()) return cmd_simulate(sa);
    if (run_cmd->parsed()) return cmd_run(ra);
    if (eval_cmd->parsed()) return cmd_eval(ea);
    if (bench_cmd->parsed()) return cmd_bench(ba);
    if (jac_cmd->parsed()) return cmd_check_jacobians(configs, audit_seed, tolerance);
  } catch (const DivergenceError& e) {
    spdlog::error("diverged: {}", e.what());
    return kDiverged;
  } catch (const IoError& e) {
    spdlog::error("{}", e.what());
    return kIoError;
  } catch (const Error& e) {
    // bad configuration values, datasets the pipeline cannot start on
    spdlog::error("{}", e.what());
    return kIoError;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kIoError;
  }
  return kOk;
}
