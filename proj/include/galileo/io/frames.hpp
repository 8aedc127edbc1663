#ifndef GALILEO_IO_FRAMES_HPP
#define GALILEO_IO_FRAMES_HPP

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "galileo/io/keyvalue.hpp"
#include "galileo/lio/odometry.hpp"

namespace galileo::io {

inline constexpr const char* kFramesHeader =
    "stamp,predict_us,deskew_us,downsample_us,update_us,insert_us,total_us,iterations,converged,degenerate,"
    "imu_gap,points,dropped,downsampled,valid,valid_ratio,inserted,map_size,map_bytes,degeneracy_ratio,"
    "weakest_axis";

/// One row per processed scan.
inline void write_frames_csv(std::ostream& out, const std::vector<FrameReport>& reports) {
  out << kFramesHeader << '\n';
  for (const FrameReport& r : reports) {
    const double total = r.predict_us + r.deskew_us + r.downsample_us + r.update_us + r.insert_us;
    out << fmt::format("{:.9f},{:.1f},{:.1f},{:.1f},{:.1f},{:.1f},{:.1f},{},{:d},{:d},{:d},{},{},{},{},{:.6f},{},{},{},{:.6g},{}\n",
                       r.stamp, r.predict_us, r.deskew_us, r.downsample_us, r.update_us, r.insert_us, total,
                       r.iterations, r.converged, r.degenerate, r.imu_gap, r.points, r.dropped, r.downsampled,
                       r.valid, r.valid_ratio, r.inserted, r.map_size, r.map_bytes, r.degeneracy.ratio,
                       r.degeneracy.weakest_world_axis);
  }
}

inline void write_frames_csv(const std::string& path, const std::vector<FrameReport>& reports) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(fmt::format("cannot write '{}'", path));
  write_frames_csv(out, reports);
  if (!out) throw IoError(fmt::format("write failed for '{}'", path));
}

/// Column means and last values of a frames file, for evaluation summaries.
struct FramesSummary {
  std::size_t frames = 0;
  double mean_total_us = 0.0;
  double mean_update_us = 0.0;
  double mean_iterations = 0.0;
  double mean_valid_ratio = 0.0;
  std::size_t final_map_size = 0;
  std::size_t final_map_bytes = 0;
  std::size_t degenerate_frames = 0;
};

inline FramesSummary summarize_frames(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path));
  std::string line;
  if (!std::getline(in, line) || trim(line) != kFramesHeader) {
    throw IoError(fmt::format("{}: unexpected header", path));
  }
  FramesSummary s;
  int n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (trim(line).empty()) continue;
    std::vector<double> v;
    std::stringstream ls(line);
    std::string tok;
    while (std::getline(ls, tok, ',')) v.push_back(parse_double(tok, fmt::format("{}:{}", path, n)));
    if (v.size() != 21) throw IoError(fmt::format("{}:{}: expected 21 columns", path, n));
    ++s.frames;
    s.mean_total_us += v[6];
    s.mean_update_us += v[4];
    s.mean_iterations += v[7];
    s.mean_valid_ratio += v[15];
    s.degenerate_frames += v[9] != 0.0;
    s.final_map_size = static_cast<std::size_t>(v[17]);
    s.final_map_bytes = static_cast<std::size_t>(v[18]);
  }
  if (s.frames > 0) {
    const auto k = static_cast<double>(s.frames);
    s.mean_total_us /= k;
    s.mean_update_us /= k;
    s.mean_iterations /= k;
    s.mean_valid_ratio /= k;
  }
  return s;
}

}  // namespace galileo::io

#endif  // GALILEO_IO_FRAMES_HPP
