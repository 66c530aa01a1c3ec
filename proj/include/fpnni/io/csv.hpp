#pragma once

#include <filesystem>
#include <ostream>
#include <string>

#include "fpnni/fode.hpp"

namespace fpnni::io {

/// Column layout version of trajectory CSV files.
inline constexpr int kCsvSchemaVersion = 1;

/// t,x_1,...,x_n,segment,is_impulse_node
std::string csv_header(std::size_t dimension);

/// One row per node; impulse nodes get two rows, the left limit (previous
/// segment) then the right limit. Values carry 17 significant digits.
void write_trajectory_csv(std::ostream& out, const fode::Trajectory& traj);
void write_trajectory_csv(const std::filesystem::path& path, const fode::Trajectory& traj);

}  // namespace fpnni::io
