#include "fpnni/io/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>

#include <fmt/format.h>

#include "fpnni/io/config.hpp"

namespace fpnni::io {

namespace {

constexpr std::array<const char*, 8> kPalette = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                                 "#9467bd", "#8c564b", "#e377c2", "#17becf"};

// Round step for about `target` ticks over [lo, hi].
double nice_step(double lo, double hi, int target) {
  const double raw = (hi - lo) / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double f : {1.0, 2.0, 2.5, 5.0, 10.0}) {
    if (raw <= f * mag) return f * mag;
  }
  return 10.0 * mag;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

void write_svg(std::ostream& out, std::span<const fode::Trajectory> trajectories, const PlotOptions& opts) {
  const double left = 70, right = 150, top = 40, bottom = 50;
  const double pw = opts.width - left - right;
  const double ph = opts.height - top - bottom;

  double t_max = 0.0;
  double y_lo = std::numeric_limits<double>::infinity();
  double y_hi = -y_lo;
  std::set<double> impulse_times;
  for (const auto& tr : trajectories) {
    t_max = std::max(t_max, tr.horizon());
    for (std::size_t i = 0; i < tr.node_count(); ++i) {
      for (auto side : {tr.left(i), tr.right(i)}) {
        for (double v : side) {
          y_lo = std::min(y_lo, v);
          y_hi = std::max(y_hi, v);
        }
      }
      if (tr.is_impulse(i)) impulse_times.insert(tr.times()[i]);
    }
  }
  if (!(y_hi > y_lo)) {
    const double c = std::isfinite(y_lo) ? y_lo : 0.0;
    y_lo = c - 1.0;
    y_hi = c + 1.0;
  }
  if (!(t_max > 0.0)) t_max = 1.0;
  const double pad = 0.05 * (y_hi - y_lo);
  y_lo -= pad;
  y_hi += pad;

  auto sx = [&](double t) { return left + pw * t / t_max; };
  auto sy = [&](double y) { return top + ph * (y_hi - y) / (y_hi - y_lo); };

  std::string s;
  auto add = [&](const std::string& line) { s += line + "\n"; };
  add(fmt::format(R"(<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}" font-family="sans-serif" font-size="12">)",
                  opts.width, opts.height, opts.width, opts.height));
  add(R"(<rect width="100%" height="100%" fill="white"/>)");
  if (!opts.title.empty()) {
    add(fmt::format(R"(<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>)", left + pw / 2,
                    escape(opts.title)));
  }

  // Axes and ticks.
  add(fmt::format(R"(<g stroke="black" fill="none"><line x1="{0}" y1="{1}" x2="{0}" y2="{2}"/><line x1="{0}" y1="{2}" x2="{3}" y2="{2}"/></g>)",
                  left, top, top + ph, left + pw));
  const double tx = nice_step(0.0, t_max, 8);
  for (double t = 0.0; t <= t_max * (1 + 1e-12); t += tx) {
    add(fmt::format(R"(<line x1="{0:.2f}" y1="{1}" x2="{0:.2f}" y2="{2}" stroke="black"/><text x="{0:.2f}" y="{3}" text-anchor="middle">{4:g}</text>)",
                    sx(t), top + ph, top + ph + 5, top + ph + 18, t));
  }
  const double ty = nice_step(y_lo, y_hi, 6);
  for (double y = std::ceil(y_lo / ty) * ty; y <= y_hi; y += ty) {
    const double yy = std::abs(y) < 1e-12 * ty ? 0.0 : y;
    add(fmt::format(R"(<line x1="{0}" y1="{1:.2f}" x2="{2}" y2="{1:.2f}" stroke="black"/><text x="{3}" y="{4:.2f}" text-anchor="end">{5:g}</text>)",
                    left - 5, sy(yy), left, left - 8, sy(yy) + 4, yy));
  }
  add(fmt::format(R"(<text x="{}" y="{}" text-anchor="middle">t</text>)", left + pw / 2, opts.height - 10));

  for (double t : impulse_times) {
    add(fmt::format(R"(<line x1="{0:.2f}" y1="{1}" x2="{0:.2f}" y2="{2}" stroke="#888" stroke-dasharray="4 3"/>)",
                    sx(t), top, top + ph));
  }

  // One polyline per component; impulse nodes contribute both limits, so
  // jumps show up as vertical strokes.
  std::size_t series = 0;
  for (std::size_t k = 0; k < trajectories.size(); ++k) {
    const auto& tr = trajectories[k];
    for (std::size_t c = 0; c < tr.dimension(); ++c, ++series) {
      const char* color = kPalette[series % kPalette.size()];
      std::string pts;
      for (std::size_t i = 0; i < tr.node_count(); ++i) {
        const double x = sx(tr.times()[i]);
        pts += fmt::format("{:.2f},{:.2f} ", x, sy(tr.left(i)[c]));
        if (tr.is_impulse(i)) pts += fmt::format("{:.2f},{:.2f} ", x, sy(tr.right(i)[c]));
      }
      add(fmt::format(R"(<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>)", color, pts));
      const double ly = top + 10 + 18.0 * static_cast<double>(series);
      const std::string label = trajectories.size() > 1 ? fmt::format("x_{} (run {})", c + 1, k)
                                                        : fmt::format("x_{}", c + 1);
      add(fmt::format(R"(<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{}" stroke-width="2"/><text x="{}" y="{}">{}</text>)",
                      left + pw + 15, ly, left + pw + 35, ly, color, left + pw + 40, ly + 4, label));
    }
  }
  add("</svg>");
  out << s;
}

void write_svg(const std::filesystem::path& path, std::span<const fode::Trajectory> trajectories,
               const PlotOptions& opts) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  write_svg(out, trajectories, opts);
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace fpnni::io
