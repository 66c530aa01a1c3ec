#pragma once

#include <filesystem>
#include <span>
#include <string>

#include "fpnni/stability.hpp"

namespace fpnni::io {

/// JSON document for one report.
std::string report_json(const stability::CertificateReport& report, int indent = 2);
/// JSON array of reports.
std::string reports_json(std::span<const stability::CertificateReport> reports, int indent = 2);
void write_reports_json(const std::filesystem::path& path,
                        std::span<const stability::CertificateReport> reports);

/// Human-readable rendering; ANSI colors only when `color` is set.
std::string render_report(const stability::CertificateReport& report, bool color);

}  // namespace fpnni::io
