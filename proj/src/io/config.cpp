#include "fpnni/io/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include <fmt/format.h>

namespace fpnni::io {

ConfigError::ConfigError(const std::string& message, std::string field, int line)
    : Error(line > 0 ? fmt::format("{}: line {}: {}", field, line, message)
                     : fmt::format("{}: {}", field, message)),
      message_(message),
      field_(std::move(field)),
      line_(line) {}

namespace {

int line_of(const YAML::Node& n) {
  const auto mark = n.Mark();
  return mark.line >= 0 ? mark.line + 1 : 0;
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

// A mapping node with its dotted path; tracks which keys were consumed so
// unknown keys can be rejected.
class Table {
 public:
  Table(YAML::Node node, std::string path, int fallback_line)
      : node_(std::move(node)), path_(std::move(path)), line_(fallback_line) {
    if (node_.IsDefined() && !node_.IsNull() && !node_.IsMap()) fail("expected a mapping");
  }

  const std::string& path() const { return path_; }
  int line() const { return node_.IsDefined() ? line_of(node_) : line_; }

  bool has(const std::string& key) const {
    return node_.IsMap() && node_[key].IsDefined() && !node_[key].IsNull();
  }

  YAML::Node get(const std::string& key) {
    seen_.insert(key);
    if (!has(key)) throw ConfigError("missing required key", join(path_, key), line());
    return node_[key];
  }

  std::optional<YAML::Node> find(const std::string& key) {
    seen_.insert(key);
    if (!has(key)) return std::nullopt;
    return node_[key];
  }

  Table sub(const std::string& key, bool required = false) {
    if (required) return Table(get(key), join(path_, key), line());
    auto n = find(key);
    return Table(n ? *n : YAML::Node(), join(path_, key), line());
  }

  void reject_unknown() const {
    if (!node_.IsMap()) return;
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!seen_.count(key)) throw ConfigError("unknown key", join(path_, key), line_of(kv.first));
    }
  }

  [[noreturn]] void fail(const std::string& msg) const { throw ConfigError(msg, path_, line()); }

 private:
  YAML::Node node_;
  std::string path_;
  int line_;
  std::set<std::string> seen_;
};

double to_double(const YAML::Node& n, const std::string& field) {
  if (!n.IsScalar()) throw ConfigError("expected a number", field, line_of(n));
  double v = 0.0;
  if (!YAML::convert<double>::decode(n, v)) throw ConfigError("expected a number", field, line_of(n));
  if (!std::isfinite(v)) throw ConfigError("must be finite", field, line_of(n));
  return v;
}

long long to_int(const YAML::Node& n, const std::string& field) {
  if (!n.IsScalar()) throw ConfigError("expected an integer", field, line_of(n));
  long long v = 0;
  if (!YAML::convert<long long>::decode(n, v)) throw ConfigError("expected an integer", field, line_of(n));
  return v;
}

std::string to_string_value(const YAML::Node& n, const std::string& field) {
  if (!n.IsScalar()) throw ConfigError("expected a string", field, line_of(n));
  return n.Scalar();
}

Vector to_vector(const YAML::Node& n, const std::string& field) {
  if (!n.IsSequence()) throw ConfigError("expected a list of numbers", field, line_of(n));
  Vector v;
  for (std::size_t i = 0; i < n.size(); ++i) v.push_back(to_double(n[i], fmt::format("{}[{}]", field, i)));
  return v;
}

Vector to_vector(const YAML::Node& n, const std::string& field, std::size_t dim) {
  Vector v = to_vector(n, field);
  if (v.size() != dim) {
    throw ConfigError(fmt::format("expected {} entries, got {}", dim, v.size()), field, line_of(n));
  }
  return v;
}

Matrix to_matrix(const YAML::Node& n, const std::string& field, std::size_t dim) {
  if (!n.IsSequence() || n.size() != dim) {
    throw ConfigError(fmt::format("expected a {0}x{0} matrix as a list of rows", dim), field, line_of(n));
  }
  std::vector<Vector> rows;
  for (std::size_t i = 0; i < dim; ++i) rows.push_back(to_vector(n[i], fmt::format("{}[{}]", field, i), dim));
  return Matrix::from_rows(rows);
}

template <class F>
auto wrap(const std::string& field, int line, F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what(), field, line);
  }
}

convex::ConvexSet parse_set(Table t, std::size_t n) {
  const auto type = to_string_value(t.get("type"), join(t.path(), "type"));
  const int line = t.line();
  auto vec = [&](const char* key) { return to_vector(t.get(key), join(t.path(), key), n); };
  auto num = [&](const char* key) { return to_double(t.get(key), join(t.path(), key)); };
  convex::ConvexSet out = convex::ConvexSet::cube(1, 0.0, 0.0);
  if (type == "box") {
    auto lo = vec("lower");
    auto hi = vec("upper");
    out = wrap(t.path(), line, [&] { return convex::ConvexSet::box(lo, hi); });
  } else if (type == "ball") {
    auto c = vec("center");
    const double r = num("radius");
    out = wrap(t.path(), line, [&] { return convex::ConvexSet::ball(c, r); });
  } else if (type == "halfspace") {
    auto normal = vec("normal");
    const double offset = num("offset");
    out = wrap(t.path(), line, [&] { return convex::ConvexSet::halfspace(normal, offset); });
  } else if (type == "polyhedron") {
    const auto list = t.get("halfspaces");
    const auto lpath = join(t.path(), "halfspaces");
    if (!list.IsSequence() || list.size() == 0) throw ConfigError("expected a nonempty list", lpath, line_of(list));
    std::vector<convex::Halfspace> hs;
    for (std::size_t i = 0; i < list.size(); ++i) {
      Table h(list[i], fmt::format("{}[{}]", lpath, i), line_of(list));
      hs.push_back({to_vector(h.get("normal"), join(h.path(), "normal"), n),
                    to_double(h.get("offset"), join(h.path(), "offset"))});
      h.reject_unknown();
    }
    auto interior = vec("interior");
    out = wrap(t.path(), line, [&] { return convex::ConvexSet::polyhedron(hs, interior); });
  } else {
    throw ConfigError("unknown set type '" + type + "' (box, ball, halfspace, polyhedron)",
                      join(t.path(), "type"), line);
  }
  t.reject_unknown();
  return out;
}

std::string num(double v) { return fmt::format("{}", v); }

std::string vec_text(std::span<const double> v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + num(v[i]);
  return s + "]";
}

std::string mat_text(const Matrix& m) {
  std::string s = "[";
  for (std::size_t i = 0; i < m.rows(); ++i) {
    s += i ? ", " : "";
    s += vec_text(m.data().subspan(i * m.cols(), m.cols()));
  }
  return s + "]";
}

// YAML double-quoted string.
std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

bool same_set(const convex::ConvexSet& a, const convex::ConvexSet& b) {
  if (a.kind() != b.kind() || a.dimension() != b.dimension()) return false;
  auto near = [](std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (std::abs(x[i] - y[i]) > 1e-12 * std::max(1.0, std::abs(x[i]))) return false;
    }
    return true;
  };
  auto near1 = [&](double x, double y) { return near(std::span(&x, 1), std::span(&y, 1)); };
  return std::visit(
      [&](const auto& sa) {
        using T = std::decay_t<decltype(sa)>;
        const auto& sb = std::get<T>(b.shape());
        if constexpr (std::is_same_v<T, convex::Box>) {
          return near(sa.lower, sb.lower) && near(sa.upper, sb.upper);
        } else if constexpr (std::is_same_v<T, convex::Ball>) {
          return near(sa.center, sb.center) && near1(sa.radius, sb.radius);
        } else if constexpr (std::is_same_v<T, convex::Halfspace>) {
          return near(sa.normal, sb.normal) && near1(sa.offset, sb.offset);
        } else {
          if (sa.halfspaces.size() != sb.halfspaces.size() || !near(sa.interior, sb.interior)) return false;
          for (std::size_t i = 0; i < sa.halfspaces.size(); ++i) {
            if (!near(sa.halfspaces[i].normal, sb.halfspaces[i].normal) ||
                !near1(sa.halfspaces[i].offset, sb.halfspaces[i].offset)) {
              return false;
            }
          }
          return true;
        }
      },
      a.shape());
}

}  // namespace

std::vector<double> SystemConfig::impulse_times() const {
  if (impulses.count) {
    std::vector<double> t(*impulses.count);
    const double denom = static_cast<double>(*impulses.count + 1);
    for (std::size_t k = 0; k < t.size(); ++k) t[k] = static_cast<double>(k + 1) * simulation.horizon / denom;
    return t;
  }
  return impulses.times;
}

model::FpnniSystem SystemConfig::system() const {
  model::SigmaForm form{impulses.sigma.value_or(Matrix(b.size(), b.size())), impulses.anchor};
  return model::FpnniSystem(alpha, a, b, rho, set, impulse_times(), std::move(form));
}

model::FpnniSystem SystemConfig::resolved_system() const {
  auto sys = system();
  if (sys.anchor()) return sys;
  const Vector start = simulation.initial_states.empty() ? Vector(b.size(), 0.0)
                                                          : simulation.initial_states.front();
  return sys.with_anchor(model::equilibrium(sys, start).x);
}

SystemConfig parse_config(std::string_view text, std::string_view source) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    throw ConfigError(e.msg, std::string(source), e.mark.line >= 0 ? e.mark.line + 1 : 0);
  }
  if (!root.IsMap()) throw ConfigError("top level must be a mapping", std::string(source), 1);

  Table top(root, "", 1);
  const auto version_node = top.get("schema_version");
  if (to_int(version_node, "schema_version") != kConfigSchemaVersion) {
    throw ConfigError(fmt::format("unsupported schema version (this build reads {})", kConfigSchemaVersion),
                      "schema_version", line_of(version_node));
  }

  SystemConfig cfg;
  if (auto n = top.find("name")) cfg.name = to_string_value(*n, "name");

  // system
  Table sys = top.sub("system", true);
  const auto b_node = sys.get("b");
  cfg.b = to_vector(b_node, "system.b");
  const std::size_t n = cfg.b.size();
  if (n == 0) throw ConfigError("must be nonempty", "system.b", line_of(b_node));
  const auto alpha_node = sys.get("alpha");
  cfg.alpha = to_double(alpha_node, "system.alpha");
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) {
    throw ConfigError("must lie in (0, 1)", "system.alpha", line_of(alpha_node));
  }
  const auto rho_node = sys.get("rho");
  cfg.rho = to_double(rho_node, "system.rho");
  if (!(cfg.rho > 0.0)) throw ConfigError("must be > 0", "system.rho", line_of(rho_node));
  cfg.a = to_matrix(sys.get("A"), "system.A", n);
  cfg.set = parse_set(sys.sub("K", true), n);
  sys.reject_unknown();

  // simulation (horizon is needed to place the impulse count rule)
  Table sim = top.sub("simulation", true);
  const auto horizon_node = sim.get("horizon");
  cfg.simulation.horizon = to_double(horizon_node, "simulation.horizon");
  if (!(cfg.simulation.horizon > 0.0)) {
    throw ConfigError("must be > 0", "simulation.horizon", line_of(horizon_node));
  }
  if (auto x0 = sim.find("x0")) {
    if (!x0->IsSequence()) throw ConfigError("expected a list of states", "simulation.x0", line_of(*x0));
    for (std::size_t i = 0; i < x0->size(); ++i) {
      cfg.simulation.initial_states.push_back(to_vector((*x0)[i], fmt::format("simulation.x0[{}]", i), n));
    }
  }
  if (auto s = sim.find("steps_per_unit_time")) {
    const auto v = to_int(*s, "simulation.steps_per_unit_time");
    if (v < 10 || v > 1'000'000) {
      throw ConfigError("must lie in [10, 1000000]", "simulation.steps_per_unit_time", line_of(*s));
    }
    cfg.simulation.solver.steps_per_unit_time = static_cast<int>(v);
  }
  if (auto s = sim.find("corrector_iterations")) {
    const auto v = to_int(*s, "simulation.corrector_iterations");
    if (v < 1 || v > 100) throw ConfigError("must lie in [1, 100]", "simulation.corrector_iterations", line_of(*s));
    cfg.simulation.solver.corrector_iterations = static_cast<int>(v);
  }
  if (auto s = sim.find("quadrature")) {
    const auto q = to_string_value(*s, "simulation.quadrature");
    if (q == "trapezoid") {
      cfg.simulation.solver.quadrature = fode::Quadrature::ProductTrapezoid;
    } else if (q == "rectangle") {
      cfg.simulation.solver.quadrature = fode::Quadrature::ProductRectangle;
    } else {
      throw ConfigError("expected 'trapezoid' or 'rectangle'", "simulation.quadrature", line_of(*s));
    }
  }
  sim.reject_unknown();

  // impulses
  Table imp = top.sub("impulses");
  if (auto s = imp.find("sigma")) cfg.impulses.sigma = to_matrix(*s, "impulses.sigma", n);
  if (auto s = imp.find("anchor")) cfg.impulses.anchor = to_vector(*s, "impulses.anchor", n);
  const auto times = imp.find("times");
  const auto count = imp.find("count");
  if (times && count) throw ConfigError("give either 'times' or 'count', not both", "impulses", imp.line());
  if ((times || count) && !cfg.impulses.sigma) {
    throw ConfigError("impulse instants need a jump matrix 'sigma'", "impulses", imp.line());
  }
  if (times) {
    cfg.impulses.times = to_vector(*times, "impulses.times");
    wrap("impulses.times", line_of(*times), [&] {
      fode::ImpulseSchedule(cfg.impulses.times, [](std::size_t, std::span<const double> x) {
        return Vector(x.size(), 0.0);
      }).validate(cfg.simulation.horizon);
      return 0;
    });
  }
  if (count) {
    const auto m = to_int(*count, "impulses.count");
    if (m < 0 || m > 100'000) throw ConfigError("must lie in [0, 100000]", "impulses.count", line_of(*count));
    cfg.impulses.count = static_cast<std::size_t>(m);
  }
  imp.reject_unknown();

  // certificate
  Table cert = top.sub("certificate");
  if (auto q = cert.find("Q")) {
    cfg.certificate.q = to_matrix(*q, "certificate.Q", n);
    wrap("certificate.Q", line_of(*q), [&] {
      const auto& m = *cfg.certificate.q;
      if (!(m == m.transpose())) throw NotSymmetric("must be symmetric");
      if (!linalg::is_positive_definite(m, 1e-12).holds) throw NotPositiveDefinite("must be positive definite");
      return 0;
    });
  }
  auto& sc = cfg.certificate.scalars;
  auto scalar = [&](const char* key, double& dst, bool unit_interval) {
    if (auto v = cert.find(key)) {
      dst = to_double(*v, join("certificate", key));
      const bool ok = unit_interval ? (dst > 0.0 && dst <= 1.0) : dst > 0.0;
      if (!ok) throw ConfigError(unit_interval ? "must lie in (0, 1]" : "must be > 0", join("certificate", key), line_of(*v));
    }
  };
  scalar("rho1", sc.rho1, false);
  scalar("eta1", sc.eta1, true);
  scalar("rho2", sc.rho2, false);
  scalar("mu2", sc.mu2, false);
  scalar("eta2", sc.eta2, true);
  if (auto v = cert.find("bound_radius")) {
    cfg.certificate.bound_radius = to_double(*v, "certificate.bound_radius");
    if (!(*cfg.certificate.bound_radius > 0.0)) throw ConfigError("must be > 0", "certificate.bound_radius", line_of(*v));
  }
  if (auto v = cert.find("slack")) {
    cfg.certificate.slack = to_double(*v, "certificate.slack");
    if (!(cfg.certificate.slack >= 0.0)) throw ConfigError("must be >= 0", "certificate.slack", line_of(*v));
  }
  if (auto v = cert.find("search_budget")) {
    const auto b = to_int(*v, "certificate.search_budget");
    if (b < 1 || b > 10'000'000) throw ConfigError("must lie in [1, 10000000]", "certificate.search_budget", line_of(*v));
    cfg.certificate.search_budget = static_cast<int>(b);
  }
  if (auto v = cert.find("seed")) {
    const auto s = to_int(*v, "certificate.seed");
    if (s < 0) throw ConfigError("must be >= 0", "certificate.seed", line_of(*v));
    cfg.certificate.seed = static_cast<std::uint64_t>(s);
  }
  cert.reject_unknown();

  // output
  Table out = top.sub("output");
  if (auto v = out.find("dir")) cfg.output.dir = to_string_value(*v, "output.dir");
  if (auto v = out.find("stem")) {
    cfg.output.stem = to_string_value(*v, "output.stem");
    if (cfg.output.stem.empty() || cfg.output.stem.find('/') != std::string::npos) {
      throw ConfigError("must be a nonempty file name stem", "output.stem", line_of(*v));
    }
  }
  out.reject_unknown();
  top.reject_unknown();

  // Whole-system invariants (dimension agreement, anchor residual).
  wrap("system", line_of(root["system"]), [&] { return cfg.system(); });
  return cfg;
}

SystemConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

std::string serialize_config(const SystemConfig& cfg) {
  std::string s;
  auto line = [&](std::string text) { s += std::move(text) + "\n"; };
  line(fmt::format("schema_version: {}", kConfigSchemaVersion));
  if (!cfg.name.empty()) line("name: " + quoted(cfg.name));

  line("system:");
  line("  alpha: " + num(cfg.alpha));
  line("  rho: " + num(cfg.rho));
  line("  A: " + mat_text(cfg.a));
  line("  b: " + vec_text(cfg.b));
  line("  K:");
  std::visit(
      [&](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, convex::Box>) {
          line("    type: box");
          line("    lower: " + vec_text(k.lower));
          line("    upper: " + vec_text(k.upper));
        } else if constexpr (std::is_same_v<T, convex::Ball>) {
          line("    type: ball");
          line("    center: " + vec_text(k.center));
          line("    radius: " + num(k.radius));
        } else if constexpr (std::is_same_v<T, convex::Halfspace>) {
          line("    type: halfspace");
          line("    normal: " + vec_text(k.normal));
          line("    offset: " + num(k.offset));
        } else {
          line("    type: polyhedron");
          line("    halfspaces:");
          for (const auto& h : k.halfspaces) {
            line("      - normal: " + vec_text(h.normal));
            line("        offset: " + num(h.offset));
          }
          line("    interior: " + vec_text(k.interior));
        }
      },
      cfg.set.shape());

  if (cfg.impulses.sigma) {
    line("impulses:");
    line("  sigma: " + mat_text(*cfg.impulses.sigma));
    if (cfg.impulses.anchor) line("  anchor: " + vec_text(*cfg.impulses.anchor));
    if (cfg.impulses.count) {
      line(fmt::format("  count: {}", *cfg.impulses.count));
    } else if (!cfg.impulses.times.empty()) {
      line("  times: " + vec_text(cfg.impulses.times));
    }
  }

  const auto& sim = cfg.simulation;
  line("simulation:");
  line("  horizon: " + num(sim.horizon));
  if (!sim.initial_states.empty()) {
    line("  x0:");
    for (const auto& x : sim.initial_states) line("    - " + vec_text(x));
  }
  line(fmt::format("  steps_per_unit_time: {}", sim.solver.steps_per_unit_time));
  line(fmt::format("  corrector_iterations: {}", sim.solver.corrector_iterations));
  line(std::string("  quadrature: ") +
       (sim.solver.quadrature == fode::Quadrature::ProductTrapezoid ? "trapezoid" : "rectangle"));

  const auto& c = cfg.certificate;
  line("certificate:");
  if (c.q) line("  Q: " + mat_text(*c.q));
  line("  rho1: " + num(c.scalars.rho1));
  line("  eta1: " + num(c.scalars.eta1));
  line("  rho2: " + num(c.scalars.rho2));
  line("  mu2: " + num(c.scalars.mu2));
  line("  eta2: " + num(c.scalars.eta2));
  if (c.bound_radius) line("  bound_radius: " + num(*c.bound_radius));
  line("  slack: " + num(c.slack));
  line(fmt::format("  search_budget: {}", c.search_budget));
  line(fmt::format("  seed: {}", c.seed));

  line("output:");
  line("  dir: " + quoted(cfg.output.dir));
  line("  stem: " + quoted(cfg.output.stem));
  return s;
}

bool equivalent(const SystemConfig& l, const SystemConfig& r) {
  const auto& ls = l.simulation;
  const auto& rs = r.simulation;
  const auto& lc = l.certificate;
  const auto& rc = r.certificate;
  return l.name == r.name && l.alpha == r.alpha && l.a == r.a && l.b == r.b && l.rho == r.rho &&
         same_set(l.set, r.set) && l.impulses.sigma == r.impulses.sigma &&
         l.impulses.anchor == r.impulses.anchor && l.impulse_times() == r.impulse_times() &&
         l.impulses.count == r.impulses.count && ls.horizon == rs.horizon &&
         ls.initial_states == rs.initial_states &&
         ls.solver.steps_per_unit_time == rs.solver.steps_per_unit_time &&
         ls.solver.corrector_iterations == rs.solver.corrector_iterations &&
         ls.solver.quadrature == rs.solver.quadrature && lc.q == rc.q &&
         lc.scalars.rho1 == rc.scalars.rho1 && lc.scalars.eta1 == rc.scalars.eta1 &&
         lc.scalars.rho2 == rc.scalars.rho2 && lc.scalars.mu2 == rc.scalars.mu2 &&
         lc.scalars.eta2 == rc.scalars.eta2 && lc.bound_radius == rc.bound_radius &&
         lc.slack == rc.slack && lc.search_budget == rc.search_budget && lc.seed == rc.seed &&
         l.output.dir == r.output.dir && l.output.stem == r.output.stem;
}

}  // namespace fpnni::io
