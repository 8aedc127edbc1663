#ifndef GALILEO_LIO_PLANE_HPP
#define GALILEO_LIO_PLANE_HPP

#include <cmath>
#include <span>
#include <vector>

#include <Eigen/Eigenvalues>

#include "galileo/filter/ieskf.hpp"
#include "galileo/map/ioctree.hpp"

namespace galileo {

struct PlaneParams {
  int k = 5;
  double plane_tolerance = 0.1;        // m, every neighbor within this of the plane
  double max_neighbor_distance = 5.0;  // m, farthest neighbor from the query
  // second / largest scatter eigenvalue; below this the neighborhood counts as a line
  double min_spread_ratio = 1e-10;

  void validate() const {
    if (k < 3 || !(plane_tolerance > 0.0) || !(max_neighbor_distance > 0.0)) {
      throw InvariantError("PlaneParams: need k >= 3 and positive tolerances");
    }
  }
};

struct PlaneFit {
  Vec3 normal = Vec3::UnitZ();
  Vec3 point = Vec3::Zero();  // centroid of the neighbors
  bool valid = false;
  double residual = 0.0;  // largest |distance| of a neighbor to the plane
};

/// Centroid plus the smallest-eigenvalue eigenvector of the scatter matrix.
inline PlaneFit fit_plane(std::span<const Vec3> neighbors, const Vec3& query,
                          const PlaneParams& params = {}) {
  PlaneFit fit;
  if (neighbors.size() < 3) return fit;
  Vec3 centroid = Vec3::Zero();
  for (const Vec3& p : neighbors) centroid += p;
  centroid /= static_cast<double>(neighbors.size());
  Mat3 scatter = Mat3::Zero();
  for (const Vec3& p : neighbors) scatter += (p - centroid) * (p - centroid).transpose();
  Eigen::SelfAdjointEigenSolver<Mat3> es(scatter);
  const Vec3 ev = es.eigenvalues();
  // collinear or coincident neighborhoods have no unique normal
  if (!(ev[1] > params.min_spread_ratio * std::max(ev[2], 1e-300)) || !(ev[2] > 0.0)) return fit;
  fit.normal = es.eigenvectors().col(0).normalized();
  fit.point = centroid;
  double worst = 0.0;
  double farthest = 0.0;
  for (const Vec3& p : neighbors) {
    worst = std::max(worst, std::abs(fit.normal.dot(p - centroid)));
    farthest = std::max(farthest, (p - query).norm());
  }
  fit.residual = worst;
  fit.valid = worst < params.plane_tolerance && farthest < params.max_neighbor_distance;
  return fit;
}

struct PointResidual {
  double z = 0.0;
  Eigen::Matrix<double, 1, idx::kDim> h = Eigen::Matrix<double, 1, idx::kDim>::Zero();
};

/// z = u^T (pi(Gamma) T_L p - q) and its row on the 24-dim error state.
inline PointResidual point_residual(const NavState& x, const Vec3& p, const PlaneFit& fit) {
  const Mat3& r = x.rotation().matrix();
  const Mat3& rl = x.extrinsic.rotation.matrix();
  const Vec3 pb = x.extrinsic * p;
  const Vec3 pw = r * pb + x.position();
  const Vec3& u = fit.normal;
  PointResidual out;
  out.z = u.dot(pw - fit.point);
  const Eigen::RowVector3d ur = u.transpose() * r;
  out.h.segment<3>(idx::kRho) = ur;
  out.h.segment<3>(idx::kTheta) = -ur * skew(pb);
  out.h[idx::kIota] = u.dot(x.velocity());
  out.h.segment<3>(idx::kExtRho) = ur * rl;
  out.h.segment<3>(idx::kExtTheta) = -ur * rl * skew(p);
  return out;
}

struct ResidualParams {
  PlaneParams plane;
  double sigma_lidar = 0.05;        // m, per residual
  double max_point_residual = 1.0;  // m, larger |z| is treated as a bad association
};

/// Point-to-plane rows for every LiDAR-frame point with a valid map plane.
inline MeasurementBatch build_residuals(const NavState& x, std::span<const Vec3> cloud,
                                        const IOctree& map, const ResidualParams& params = {}) {
  MeasurementBatch batch;
  batch.candidates = cloud.size();
  if (map.size() == 0 || cloud.empty()) {
    batch.resize(0);
    return batch;
  }
  const Pose3 world_from_lidar = sgal3::project_se3(x.gamma) * x.extrinsic;
  std::vector<PointResidual> rows;
  rows.reserve(cloud.size());
  std::vector<Vec3> nbr;
  for (const Vec3& p : cloud) {
    const Vec3 q = world_from_lidar * p;
    const std::vector<Neighbor> nn = map.knn(q, static_cast<std::size_t>(params.plane.k));
    if (nn.size() < static_cast<std::size_t>(params.plane.k)) continue;
    nbr.clear();
    for (const Neighbor& n : nn) nbr.push_back(n.point.position);
    const PlaneFit fit = fit_plane(nbr, q, params.plane);
    if (!fit.valid) continue;
    PointResidual res = point_residual(x, p, fit);
    if (std::abs(res.z) > params.max_point_residual) continue;
    rows.push_back(res);
  }
  batch.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    batch.residuals[static_cast<Eigen::Index>(i)] = rows[i].z;
    batch.jacobian.row(static_cast<Eigen::Index>(i)) = rows[i].h;
  }
  batch.noise_variance.setConstant(params.sigma_lidar * params.sigma_lidar);
  return batch;
}

/// Observability of the pose from one batch: eigen-analysis of the
/// (rho, theta) block of H^T V^-1 H.
struct DegeneracyReport {
  Vec6 eigenvalues = Vec6::Zero();  // ascending
  Vec6 weakest = Vec6::Zero();      // eigenvector of the smallest eigenvalue, (rho, theta)
  double ratio = 0.0;               // smallest / largest
  Vec3 weakest_translation_world = Vec3::Zero();
  int weakest_world_axis = -1;      // 0 x, 1 y, 2 z; -1 when rotation dominates
  bool degenerate = false;
};

inline constexpr double kDegeneracyRatio = 1e-6;

inline DegeneracyReport analyze_degeneracy(const MeasurementBatch& batch, const Rot3& rotation,
                                           double threshold = kDegeneracyRatio) {
  DegeneracyReport rep;
  if (batch.rows() == 0) {
    rep.degenerate = true;
    return rep;
  }
  const Eigen::VectorXd v_inv = batch.noise_variance.cwiseInverse();
  Eigen::Matrix<double, Eigen::Dynamic, 6> a(batch.rows(), 6);
  a.leftCols<3>() = batch.jacobian.middleCols<3>(idx::kRho);
  a.rightCols<3>() = batch.jacobian.middleCols<3>(idx::kTheta);
  const Mat6 info = a.transpose() * v_inv.asDiagonal() * a;
  Eigen::SelfAdjointEigenSolver<Mat6> es(info);
  rep.eigenvalues = es.eigenvalues();
  rep.weakest = es.eigenvectors().col(0);
  const double top = rep.eigenvalues[5];
  rep.ratio = top > 0.0 ? std::max(rep.eigenvalues[0], 0.0) / top : 0.0;
  rep.degenerate = rep.ratio < threshold;
  const Vec3 t = rep.weakest.head<3>();
  if (t.norm() > rep.weakest.tail<3>().norm()) {
    rep.weakest_translation_world = (rotation * t).normalized();
    rep.weakest_translation_world.cwiseAbs().maxCoeff(&rep.weakest_world_axis);
  }
  return rep;
}

}  // namespace galileo

#endif  // GALILEO_LIO_PLANE_HPP
