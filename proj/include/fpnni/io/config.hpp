#pragma once

// Declarative system configuration (YAML, schema_version 1).

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fpnni/convex.hpp"
#include "fpnni/error.hpp"
#include "fpnni/fode.hpp"
#include "fpnni/linalg.hpp"
#include "fpnni/model.hpp"
#include "fpnni/stability.hpp"

namespace fpnni::io {

using linalg::Matrix;
using linalg::Vector;

inline constexpr int kConfigSchemaVersion = 1;

/// Invalid configuration. `line()` is 1-based, 0 when unknown; `field()` is
/// the dotted path of the offending key.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& message, std::string field, int line = 0);
  const std::string& field() const noexcept { return field_; }
  int line() const noexcept { return line_; }
  const std::string& message() const noexcept { return message_; }

 private:
  std::string message_;
  std::string field_;
  int line_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

struct ImpulseSpec {
  /// Absent means the system has no impulses.
  std::optional<Matrix> sigma;
  /// Explicit jump anchor; absent means "use the computed equilibrium".
  std::optional<Vector> anchor;
  /// Either explicit times or a count placed at t_k = k T / (m + 1).
  std::vector<double> times;
  std::optional<std::size_t> count;
};

struct SimulationSpec {
  double horizon = 1.0;
  std::vector<Vector> initial_states;
  fode::SolverConfig solver;
};

struct CertificateSpec {
  std::optional<Matrix> q;
  stability::ScalarParams scalars;
  std::optional<double> bound_radius;
  double slack = 0.05;
  int search_budget = 2000;
  std::uint64_t seed = 0;
};

struct OutputSpec {
  std::string dir = "out";
  std::string stem = "trajectory";
};

struct SystemConfig {
  std::string name;
  double alpha = 0.5;
  Matrix a = Matrix(1, 1);
  Vector b;
  double rho = 1.0;
  convex::ConvexSet set = convex::ConvexSet::cube(1, -1.0, 1.0);
  ImpulseSpec impulses;
  SimulationSpec simulation;
  CertificateSpec certificate;
  OutputSpec output;

  /// Impulse instants on [0, horizon] (count rule resolved).
  std::vector<double> impulse_times() const;
  /// The system as configured; the anchor stays unresolved when not given.
  model::FpnniSystem system() const;
  /// Same, with the anchor resolved to the computed equilibrium when absent.
  model::FpnniSystem resolved_system() const;
};

SystemConfig parse_config(std::string_view text, std::string_view source = "<config>");
SystemConfig load_config(const std::filesystem::path& path);

/// YAML text that parse_config maps back to an equivalent SystemConfig.
std::string serialize_config(const SystemConfig& cfg);

bool equivalent(const SystemConfig& lhs, const SystemConfig& rhs);

}  // namespace fpnni::io
