#include "fpnni/io/csv.hpp"

#include <fstream>

#include <fmt/format.h>

#include "fpnni/io/config.hpp"

namespace fpnni::io {

std::string csv_header(std::size_t dimension) {
  std::string h = "t";
  for (std::size_t i = 1; i <= dimension; ++i) h += fmt::format(",x_{}", i);
  return h + ",segment,is_impulse_node";
}

namespace {

void row(std::string& buf, double t, std::span<const double> x, std::size_t segment, bool impulse) {
  fmt::format_to(std::back_inserter(buf), "{:.17g}", t);
  for (double v : x) fmt::format_to(std::back_inserter(buf), ",{:.17g}", v);
  fmt::format_to(std::back_inserter(buf), ",{},{}\n", segment, impulse ? 1 : 0);
}

}  // namespace

void write_trajectory_csv(std::ostream& out, const fode::Trajectory& traj) {
  std::string buf = csv_header(traj.dimension()) + "\n";
  for (std::size_t i = 0; i < traj.node_count(); ++i) {
    const double t = traj.times()[i];
    if (traj.is_impulse(i)) {
      row(buf, t, traj.left(i), traj.segment(i) - 1, true);
      row(buf, t, traj.right(i), traj.segment(i), true);
    } else {
      row(buf, t, traj.right(i), traj.segment(i), false);
    }
  }
  out << buf;
}

void write_trajectory_csv(const std::filesystem::path& path, const fode::Trajectory& traj) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  write_trajectory_csv(out, traj);
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace fpnni::io
