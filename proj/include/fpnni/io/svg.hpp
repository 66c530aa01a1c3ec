#pragma once

#include <filesystem>
#include <ostream>
#include <span>
#include <string>

#include "fpnni/fode.hpp"

namespace fpnni::io {

struct PlotOptions {
  std::string title;
  int width = 800;
  int height = 480;
};

/// Static line chart of every component of every trajectory against time,
/// with a legend and dashed vertical lines at the impulse instants.
void write_svg(std::ostream& out, std::span<const fode::Trajectory> trajectories,
               const PlotOptions& opts = {});
void write_svg(const std::filesystem::path& path, std::span<const fode::Trajectory> trajectories,
               const PlotOptions& opts = {});

}  // namespace fpnni::io
