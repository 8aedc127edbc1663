#ifndef GALILEO_IO_DATASET_HPP
#define GALILEO_IO_DATASET_HPP

#include <cmath>
#include <filesystem>
#include <limits>
#include <fstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "galileo/io/keyvalue.hpp"
#include "galileo/io/tum.hpp"

namespace galileo::io {

/// On disk:
///   imu.csv            stamp,wx,wy,wz,ax,ay,az
///   scans/index.csv    scan_id,start_stamp
///   scans/NNNNNN.csv   x,y,z,offset_s,intensity   (LiDAR frame)
///   truth.tum          IMU body poses
///   calib.cfg          extrinsic, scan period, simulator settings
struct Dataset {
  std::vector<ImuSample> imu;
  std::vector<LidarScan> scans;
  std::vector<StampedPose> truth;
  Pose3 extrinsic;  // LiDAR in IMU
  double scan_period = 0.1;
  KeyValueFile meta;  // free-form simulator settings, written to calib.cfg
};

namespace detail {

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(trim(cur));
  return out;
}

inline std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw IoError(fmt::format("cannot write '{}'", p.string()));
  return out;
}

inline std::ifstream open_in(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw IoError(fmt::format("cannot open '{}'", p.string()));
  return in;
}

// Reads a CSV with the given header; returns the numeric rows (empty fields as NaN).
inline std::vector<std::vector<double>> read_csv(const std::filesystem::path& p, const std::string& header,
                                                 std::size_t min_fields) {
  std::ifstream in = open_in(p);
  std::string line;
  if (!std::getline(in, line) || trim(line) != header) {
    throw IoError(fmt::format("{}: expected header '{}'", p.string(), header));
  }
  std::vector<std::vector<double>> rows;
  int n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (trim(line).empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() < min_fields) throw IoError(fmt::format("{}:{}: too few fields", p.string(), n));
    std::vector<double> row;
    for (const auto& f : fields) {
      row.push_back(f.empty() ? std::numeric_limits<double>::quiet_NaN()
                              : parse_double(f, fmt::format("{}:{}", p.string(), n)));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace detail

inline std::string scan_file_name(std::size_t id) { return fmt::format("{:06d}.csv", id); }

inline void write_dataset(const std::string& dir, const Dataset& ds) {
  namespace fs = std::filesystem;
  const fs::path root(dir);
  std::error_code ec;
  fs::create_directories(root / "scans", ec);
  if (ec) throw IoError(fmt::format("cannot create '{}': {}", dir, ec.message()));

  {
    auto out = detail::open_out(root / "imu.csv");
    out << "stamp,wx,wy,wz,ax,ay,az\n";
    for (const ImuSample& s : ds.imu) {
      out << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", s.stamp, s.gyro.x(),
                         s.gyro.y(), s.gyro.z(), s.accel.x(), s.accel.y(), s.accel.z());
    }
  }
  {
    auto index = detail::open_out(root / "scans" / "index.csv");
    index << "scan_id,start_stamp\n";
    for (std::size_t i = 0; i < ds.scans.size(); ++i) {
      index << fmt::format("{},{:.17g}\n", i, ds.scans[i].start_stamp);
      auto out = detail::open_out(root / "scans" / scan_file_name(i));
      out << "x,y,z,offset_s,intensity\n";
      for (const LidarPoint& p : ds.scans[i].points) {
        out << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{}\n", p.position.x(), p.position.y(), p.position.z(),
                           p.offset, p.intensity ? fmt::format("{:.17g}", *p.intensity) : std::string());
      }
    }
  }
  write_tum((root / "truth.tum").string(), ds.truth);
  {
    KeyValueFile calib = ds.meta;
    const Vec3& t = ds.extrinsic.translation;
    const Eigen::Quaterniond q = ds.extrinsic.rotation.quaternion();
    calib.set("extrinsic_translation", fmt::format("{:.17g} {:.17g} {:.17g}", t.x(), t.y(), t.z()));
    calib.set("extrinsic_rotation_xyzw", fmt::format("{:.17g} {:.17g} {:.17g} {:.17g}", q.x(), q.y(), q.z(), q.w()));
    calib.set("scan_period", fmt::format("{:.17g}", ds.scan_period));
    auto out = detail::open_out(root / "calib.cfg");
    calib.write(out);
  }
}

inline Dataset read_dataset(const std::string& dir) {
  namespace fs = std::filesystem;
  const fs::path root(dir);
  if (!fs::is_directory(root)) throw IoError(fmt::format("'{}' is not a dataset directory", dir));
  Dataset ds;
  ds.meta = KeyValueFile::load((root / "calib.cfg").string());
  const auto tv = ds.meta.get_vector("extrinsic_translation", {0, 0, 0});
  const auto qv = ds.meta.get_vector("extrinsic_rotation_xyzw", {0, 0, 0, 1});
  if (tv.size() != 3 || qv.size() != 4) throw IoError("calib.cfg: malformed extrinsic");
  ds.extrinsic = Pose3(Rot3::from_quaternion(Eigen::Quaterniond(qv[3], qv[0], qv[1], qv[2])),
                       Vec3(tv[0], tv[1], tv[2]));
  ds.scan_period = ds.meta.get_double("scan_period", 0.1);
  if (!(ds.scan_period > 0.0)) throw IoError("calib.cfg: scan_period must be positive");

  for (const auto& r : detail::read_csv(root / "imu.csv", "stamp,wx,wy,wz,ax,ay,az", 7)) {
    ImuSample s;
    s.stamp = r[0];
    s.gyro = Vec3(r[1], r[2], r[3]);
    s.accel = Vec3(r[4], r[5], r[6]);
    if (!s.gyro.allFinite() || !s.accel.allFinite() || !std::isfinite(s.stamp)) {
      throw IoError("imu.csv: non-finite sample");
    }
    if (!ds.imu.empty() && !(s.stamp > ds.imu.back().stamp)) throw IoError("imu.csv: stamps must increase");
    ds.imu.push_back(s);
  }
  for (const auto& r : detail::read_csv(root / "scans" / "index.csv", "scan_id,start_stamp", 2)) {
    const auto id = static_cast<std::size_t>(r[0]);
    LidarScan scan;
    scan.start_stamp = r[1];
    scan.period = ds.scan_period;
    for (const auto& p : detail::read_csv(root / "scans" / scan_file_name(id), "x,y,z,offset_s,intensity", 4)) {
      LidarPoint lp;
      lp.position = Vec3(p[0], p[1], p[2]);
      lp.offset = p[3];
      if (p.size() > 4 && std::isfinite(p[4])) lp.intensity = p[4];
      scan.points.push_back(lp);
    }
    try {
      scan.validate();
    } catch (const InvariantError& e) {
      throw IoError(fmt::format("scan {}: {}", id, e.what()));
    }
    ds.scans.push_back(std::move(scan));
  }
  if (fs::exists(root / "truth.tum")) ds.truth = read_tum((root / "truth.tum").string());
  return ds;
}

}  // namespace galileo::io

#endif  // GALILEO_IO_DATASET_HPP
