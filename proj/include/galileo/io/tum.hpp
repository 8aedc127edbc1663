#ifndef GALILEO_IO_TUM_HPP
#define GALILEO_IO_TUM_HPP

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "galileo/io/keyvalue.hpp"
#include "galileo/lio/odometry.hpp"

namespace galileo::io {

/// One pose per line: stamp x y z qx qy qz qw (Hamilton, scalar last).
inline void write_tum(std::ostream& out, const std::vector<StampedPose>& poses) {
  for (const StampedPose& sp : poses) {
    const Vec3& t = sp.pose.translation;
    const Eigen::Quaterniond q = sp.pose.rotation.quaternion();
    out << fmt::format("{:.17g} {:.17g} {:.17g} {:.17g} {:.17g} {:.17g} {:.17g} {:.17g}\n", sp.stamp, t.x(),
                       t.y(), t.z(), q.x(), q.y(), q.z(), q.w());
  }
}

inline void write_tum(const std::string& path, const std::vector<StampedPose>& poses) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(fmt::format("cannot write '{}'", path));
  write_tum(out, poses);
  if (!out) throw IoError(fmt::format("write failed for '{}'", path));
}

inline std::vector<StampedPose> read_tum(std::istream& in, const std::string& origin = "<stream>") {
  std::vector<StampedPose> out;
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string tok[8];
    double v[8];
    for (int i = 0; i < 8; ++i) {
      if (!(ls >> tok[i])) throw IoError(fmt::format("{}:{}: expected 8 fields", origin, n));
      v[i] = parse_double(tok[i], fmt::format("{}:{}", origin, n));
    }
    const Eigen::Quaterniond q(v[7], v[4], v[5], v[6]);
    if (!(q.norm() > 0.5)) throw IoError(fmt::format("{}:{}: quaternion is not unit", origin, n));
    out.push_back({v[0], Pose3(Rot3::from_quaternion(q), Vec3(v[1], v[2], v[3]))});
  }
  return out;
}

inline std::vector<StampedPose> read_tum(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path));
  return read_tum(in, path);
}

}  // namespace galileo::io

#endif  // GALILEO_IO_TUM_HPP
