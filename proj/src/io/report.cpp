#include "fpnni/io/report.hpp"

#include <fstream>

#include <fmt/format.h>
#include <json.hpp>

#include "fpnni/io/config.hpp"

namespace fpnni::io {

namespace {

using nlohmann::json;

json to_json(const stability::CertificateReport& r) {
  json margins = json::array();
  for (const auto& m : r.margins) {
    margins.push_back({{"name", m.name},
                       {"value", m.value},
                       {"relation", stability::to_string(m.relation)},
                       {"bound", m.bound},
                       {"tolerance", m.tol},
                       {"slack", m.slack()},
                       {"satisfied", m.satisfied()}});
  }
  json computed = json::object();
  for (const auto& [name, mat] : r.computed) computed[name] = mat.to_rows();
  return {{"theorem", stability::to_string(r.theorem)},
          {"tag", stability::tag(r.theorem)},
          {"pass", r.pass},
          {"margins", margins},
          {"computed", computed},
          {"decay_rate", r.decay_rate ? json(*r.decay_rate) : json(nullptr)},
          {"notes", r.notes}};
}

}  // namespace

std::string report_json(const stability::CertificateReport& report, int indent) {
  return to_json(report).dump(indent);
}

std::string reports_json(std::span<const stability::CertificateReport> reports, int indent) {
  json arr = json::array();
  for (const auto& r : reports) arr.push_back(to_json(r));
  return arr.dump(indent);
}

void write_reports_json(const std::filesystem::path& path,
                        std::span<const stability::CertificateReport> reports) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << reports_json(reports) << "\n";
  if (!out) throw IoError("write failed for " + path.string());
}

std::string render_report(const stability::CertificateReport& r, bool color) {
  auto paint = [&](const std::string& text, const char* code) {
    return color ? fmt::format("\x1b[{}m{}\x1b[0m", code, text) : text;
  };
  std::string s = fmt::format("Theorem {} ({}): {}\n", stability::tag(r.theorem),
                              stability::to_string(r.theorem),
                              r.pass ? paint("PASS", "32") : paint("FAIL", "31"));
  for (const auto& m : r.margins) {
    std::string cond = fmt::format("{:.6g} {} {:g}", m.value, stability::to_string(m.relation), m.bound);
    if (m.tol > 0.0) cond += fmt::format(" (tol {:.1e})", m.tol);
    s += fmt::format("  {:<24} {:<36} {}\n", m.name, cond, m.satisfied() ? "ok" : paint("violated", "31"));
  }
  for (const auto& [name, mat] : r.computed) {
    s += fmt::format("  {} =", name);
    for (std::size_t i = 0; i < mat.rows(); ++i) {
      s += i ? "\n" + std::string(name.size() + 5, ' ') : " ";
      s += "[";
      for (std::size_t j = 0; j < mat.cols(); ++j) s += fmt::format("{}{:>12.6g}", j ? " " : "", mat(i, j) + 0.0);
      s += "]";
    }
    s += "\n";
  }
  if (r.decay_rate) s += fmt::format("  decay rate: {:.6g}\n", *r.decay_rate);
  for (const auto& n : r.notes) s += "  note: " + n + "\n";
  return s;
}

}  // namespace fpnni::io
