#ifndef GALILEO_EVAL_CONSISTENCY_HPP
#define GALILEO_EVAL_CONSISTENCY_HPP

#include <random>
#include <vector>

#include "galileo/lio/runner.hpp"
#include "galileo/sim/simulate.hpp"

namespace galileo::eval {

/// NEES on every dimension with nonzero variance (the frozen time offset is skipped).
inline double nees(const ErrorVector& err, const Mat24& cov, int* dof = nullptr) {
  std::vector<int> active;
  for (int i = 0; i < idx::kDim; ++i) {
    if (cov(i, i) > kFrozenVariance) active.push_back(i);
  }
  const int n = static_cast<int>(active.size());
  Eigen::MatrixXd p(n, n);
  Eigen::VectorXd e(n);
  for (int r = 0; r < n; ++r) {
    e[r] = err[active[r]];
    for (int c = 0; c < n; ++c) p(r, c) = cov(active[r], active[c]);
  }
  if (dof) *dof = n;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(p);
  return e.dot(ldlt.solve(e));
}

struct ConsistencySpec {
  std::uint64_t seed = 1;
  double duration = 10.0;
  double map_spacing = 0.1;  // m, prior map sampled from the true surfaces
  InitialUncertainty uncertainty;
};

struct ConsistencyRun {
  std::vector<double> stamps;
  std::vector<double> nees;
  int dof = 0;
  bool covariance_valid = true;
};

/// Filter consistency on a synthetic figure-eight in the box room. The map is
/// a fixed survey of the true surfaces, so the pose is absolutely observable
/// and the posterior covariance has a truth to be compared against. The filter
/// starts from truth perturbed by one draw from its initial covariance.
inline ConsistencyRun run_consistency(const ConsistencySpec& cs) {
  sim::SimulationSpec spec;
  spec.profile = sim::TrajectoryProfile::defaults(sim::ProfileKind::FigureEight);
  spec.profile.duration = cs.duration;
  spec.world = sim::WorldKind::BoxRoom;
  spec.seed = cs.seed;
  const sim::Simulation s = sim::simulate(spec);
  const io::Dataset& ds = s.dataset;

  PipelineConfig cfg;  // default sigma_lidar
  cfg.noise = spec.imu.noise;
  cfg.residuals.plane.plane_tolerance = 0.01;  // survey points are exact; reject fits across edges
  cfg.map_insert_enabled = false;

  auto truth_state = [&](std::size_t i, double stamp_time) {
    NavState x;
    const sim::KinematicState& k = s.truth[i];
    x.gamma = GalileanFrame(k.rotation, k.velocity, k.position, stamp_time);
    x.extrinsic = ds.extrinsic;
    x.gyro_bias = s.biases[i].gyro;
    x.accel_bias = s.biases[i].accel;
    x.gravity = SpherePoint(spec.imu.gravity, spec.imu.gravity.norm());
    return x;
  };

  FilterState fs;
  fs.covariance = initial_covariance(cs.uncertainty);
  fs.stamp = 0.0;
  {
    auto gen = sim::stream_engine(cs.seed, sim::Stream::Initial);
    std::normal_distribution<double> n01(0.0, 1.0);
    ErrorVector z;
    for (int i = 0; i < idx::kDim; ++i) z[i] = n01(gen);
    // diagonal P0: the square root is elementwise
    const ErrorVector d = fs.covariance.diagonal().cwiseSqrt().cwiseProduct(z);
    fs.nominal = oplus(truth_state(0, 0.0), d);
  }

  LioOdometry odo(cfg, fs);
  odo.preload_map(sim::make_world(spec.world).sample_surfaces(cs.map_spacing));

  ConsistencyRun out;
  std::size_t next_imu = 0;
  for (const LidarScan& scan : ds.scans) {
    while (next_imu < ds.imu.size() && (next_imu == 0 || ds.imu[next_imu - 1].stamp <= scan.end_stamp())) {
      odo.add_imu(ds.imu[next_imu++]);
    }
    odo.process_scan(scan);
    const FilterState& st = odo.state();
    const auto i = static_cast<std::size_t>(std::llround(st.stamp * spec.imu.rate));
    const NavState truth = truth_state(std::min(i, s.truth.size() - 1), st.nominal.gamma.time);
    int dof = 0;
    out.stamps.push_back(st.stamp);
    out.nees.push_back(nees(ominus(truth, st.nominal), st.covariance, &dof));
    out.dof = dof;
    if (!covariance_is_valid(st.covariance, 1e-8, 1e-8)) out.covariance_valid = false;
  }
  return out;
}

}  // namespace galileo::eval

#endif  // GALILEO_EVAL_CONSISTENCY_HPP
