#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "fpnni/fode.hpp"

namespace fpnni::io {

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);

struct CertificateSummary {
  std::string theorem;
  bool pass;
};

struct RunManifest {
  std::string command;
  std::string config_path;
  std::string config_digest;  // fnv1a of the config bytes, 16 hex digits
  fode::SolverConfig solver;
  std::string simd_backend;
  std::vector<std::string> outputs;
  std::vector<CertificateSummary> certificates;
  double wall_seconds = 0.0;
};

std::string manifest_json(const RunManifest& m);
void write_manifest(const std::filesystem::path& path, const RunManifest& m);

}  // namespace fpnni::io
