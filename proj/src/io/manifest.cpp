#include "fpnni/io/manifest.hpp"

#include <fstream>

#include <fmt/format.h>
#include <json.hpp>

#include "fpnni/io/config.hpp"
#include "fpnni/io/csv.hpp"

namespace fpnni::io {

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string manifest_json(const RunManifest& m) {
  nlohmann::json certs = nlohmann::json::array();
  for (const auto& c : m.certificates) certs.push_back({{"theorem", c.theorem}, {"pass", c.pass}});
  const nlohmann::json j = {
      {"command", m.command},
      {"config", {{"path", m.config_path}, {"digest_fnv1a64", m.config_digest}}},
      {"solver",
       {{"steps_per_unit_time", m.solver.steps_per_unit_time},
        {"corrector_iterations", m.solver.corrector_iterations},
        {"quadrature", m.solver.quadrature == fode::Quadrature::ProductTrapezoid ? "trapezoid" : "rectangle"},
        {"simd_backend", m.simd_backend}}},
      {"outputs", m.outputs},
      {"certificates", certs},
      {"wall_seconds", m.wall_seconds},
      {"schema", {{"config", kConfigSchemaVersion}, {"csv", kCsvSchemaVersion}}}};
  return j.dump(2);
}

void write_manifest(const std::filesystem::path& path, const RunManifest& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << manifest_json(m) << "\n";
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace fpnni::io
