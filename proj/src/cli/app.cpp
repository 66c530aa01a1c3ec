#include "fpnni/cli/app.hpp"

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "fpnni/io/config.hpp"
#include "fpnni/io/csv.hpp"
#include "fpnni/io/manifest.hpp"
#include "fpnni/io/report.hpp"
#include "fpnni/io/svg.hpp"
#include "fpnni/mlf.hpp"
#include "fpnni/simd/kernels.hpp"
#include "fpnni/stability.hpp"

#ifndef FPNNI_VERSION
#define FPNNI_VERSION "0.0.0"
#endif

namespace fpnni::cli {

namespace {

namespace fs = std::filesystem;
using linalg::Matrix;
using linalg::Vector;

struct Options {
  std::string config;
  std::optional<std::string> out_dir;
  std::optional<int> steps;
  std::optional<double> horizon;
  std::optional<std::uint64_t> seed;
  int threads = 1;

  // check
  std::string theorem;
  std::optional<double> slack;
  std::optional<double> radius;
  std::optional<double> rho1, eta1, rho2, mu2, eta2;
  bool json = false;

  // equilibrium
  double tol = 1e-10;
  int max_iter = 100'000;

  // mlf
  double alpha = 0.5;
  double beta = 1.0;
  std::vector<double> z;

  // search-q
  std::optional<int> budget;
};

std::string fmt_num(double v) { return fmt::format("{:.8g}", v + 0.0); }

std::string fmt_vec(std::span<const double> v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt_num(v[i]);
  return s + ")";
}

bool use_color(const std::ostream& out) {
  if (std::getenv("NO_COLOR") != nullptr) return false;
  return &out == &std::cout && ::isatty(STDOUT_FILENO);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io::IoError("cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Loaded {
  io::SystemConfig cfg;
  std::string digest;
};

Loaded load(const Options& o) {
  const std::string text = read_file(o.config);
  Loaded l{io::parse_config(text, o.config), fmt::format("{:016x}", io::fnv1a(text))};
  auto& cfg = l.cfg;
  if (o.steps) {
    if (*o.steps < 10) throw io::ConfigError("must be >= 10", "--steps");
    cfg.simulation.solver.steps_per_unit_time = *o.steps;
  }
  if (o.horizon) {
    if (!(*o.horizon > 0.0) || !std::isfinite(*o.horizon)) throw io::ConfigError("must be > 0", "--horizon");
    cfg.simulation.horizon = *o.horizon;
    try {
      fode::ImpulseSchedule(cfg.impulse_times(), [](std::size_t, std::span<const double> x) {
        return Vector(x.size(), 0.0);
      }).validate(cfg.simulation.horizon);
    } catch (const ScheduleError& e) {
      throw io::ConfigError(e.what(), "--horizon");
    }
  }
  if (o.seed) cfg.certificate.seed = *o.seed;
  if (o.budget) {
    if (*o.budget < 1) throw io::ConfigError("must be >= 1", "--budget");
    cfg.certificate.search_budget = *o.budget;
  }
  if (o.slack) {
    if (!(*o.slack >= 0.0)) throw io::ConfigError("must be >= 0", "--slack");
    cfg.certificate.slack = *o.slack;
  }
  if (o.radius) {
    if (!(*o.radius > 0.0)) throw io::ConfigError("must be > 0", "--radius");
    cfg.certificate.bound_radius = *o.radius;
  }
  auto& sc = cfg.certificate.scalars;
  auto scalar = [](const std::optional<double>& v, double& dst, const char* flag, bool unit) {
    if (!v) return;
    if (!(*v > 0.0) || (unit && *v > 1.0)) throw io::ConfigError(unit ? "must lie in (0, 1]" : "must be > 0", flag);
    dst = *v;
  };
  scalar(o.rho1, sc.rho1, "--rho1", false);
  scalar(o.eta1, sc.eta1, "--eta1", true);
  scalar(o.rho2, sc.rho2, "--rho2", false);
  scalar(o.mu2, sc.mu2, "--mu2", false);
  scalar(o.eta2, sc.eta2, "--eta2", true);
  return l;
}

void require_states(const io::SystemConfig& cfg) {
  if (cfg.simulation.initial_states.empty()) {
    throw io::ConfigError("at least one initial state is required", "simulation.x0");
  }
}

// Simulates every initial state, fanning out over `threads` workers; results
// keep the order of the initial states.
std::vector<fode::Trajectory> sweep(const model::FpnniSystem& sys, const io::SystemConfig& cfg, int threads) {
  const auto& states = cfg.simulation.initial_states;
  std::vector<std::optional<fode::Trajectory>> results(states.size());
  std::vector<std::exception_ptr> errors(states.size());
  auto work = [&](std::size_t i) {
    try {
      results[i] = model::simulate(sys, states[i], cfg.simulation.horizon, cfg.simulation.solver);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  const auto workers = std::min<std::size_t>(threads <= 0 ? std::max(1u, std::thread::hardware_concurrency())
                                                          : static_cast<unsigned>(threads),
                                             states.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < states.size(); ++i) work(i);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < states.size(); i += workers) work(i);
      });
    }
    for (auto& t : pool) t.join();
  }
  std::vector<fode::Trajectory> out;
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    out.push_back(std::move(*results[i]));
  }
  return out;
}

double default_radius(const io::SystemConfig& cfg) {
  if (cfg.certificate.bound_radius) return *cfg.certificate.bound_radius;
  double r = 0.0;
  for (const auto& x : cfg.simulation.initial_states) r = std::max(r, linalg::norm2(x));
  return std::max(r, 1.0);
}

fs::path out_dir(const Options& o, const io::SystemConfig& cfg) {
  const fs::path dir = o.out_dir ? fs::path(*o.out_dir) : fs::path(cfg.output.dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw io::IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  return dir;
}

int cmd_simulate(const Options& o, std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto [cfg, digest] = load(o);
  require_states(cfg);
  const auto sys = cfg.resolved_system();
  const double horizon = cfg.simulation.horizon;

  const auto exist = stability::check_existence(sys, horizon, model::sigma_bounds(sys, default_radius(cfg)),
                                                sys.impulse_times().size());
  if (!exist.pass) {
    out << fmt::format("note: the existence condition does not hold on [0, {}] (contraction lhs {:.4g}, "
                       "impulse lhs {:.4g}); solving anyway\n",
                       fmt_num(horizon), exist.margins[0].value, exist.margins[1].value);
  }

  const auto trajs = sweep(sys, cfg, o.threads);
  const fs::path dir = out_dir(o, cfg);

  io::RunManifest manifest;
  manifest.command = "simulate";
  manifest.config_path = o.config;
  manifest.config_digest = digest;
  manifest.solver = cfg.simulation.solver;
  manifest.simd_backend = std::string(simd::to_string(simd::kernels().backend));
  manifest.certificates.push_back({stability::tag(exist.theorem), exist.pass});

  for (std::size_t i = 0; i < trajs.size(); ++i) {
    const fs::path csv = dir / (trajs.size() == 1 ? cfg.output.stem + ".csv"
                                                  : fmt::format("{}_{}.csv", cfg.output.stem, i));
    io::write_trajectory_csv(csv, trajs[i]);
    manifest.outputs.push_back(csv.string());
    const auto& tr = trajs[i];
    out << fmt::format("run {}: x0 = {} -> x(T) = {}\n", i, fmt_vec(cfg.simulation.initial_states[i]),
                       fmt_vec(tr.right(tr.node_count() - 1)));
  }
  const fs::path svg = dir / (cfg.output.stem + ".svg");
  io::write_svg(svg, trajs, {cfg.name.empty() ? cfg.output.stem : cfg.name});
  manifest.outputs.push_back(svg.string());

  const fs::path man = dir / "manifest.json";
  manifest.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  manifest.outputs.push_back(man.string());
  io::write_manifest(man, manifest);
  for (const auto& f : manifest.outputs) out << "wrote " << f << "\n";
  return kExitOk;
}

int cmd_equilibrium(const Options& o, std::ostream& out) {
  const auto [cfg, digest] = load(o);
  const auto sys = cfg.system();
  const Vector start = cfg.simulation.initial_states.empty() ? Vector(sys.dimension(), 0.0)
                                                              : cfg.simulation.initial_states.front();
  const auto r = model::equilibrium(sys, start, o.tol, o.max_iter);
  out << "x* = " << fmt_vec(r.x) << "\n";
  out << fmt::format("residual = {:.3e}\niterations = {}\n", r.residual, r.iterations);
  return kExitOk;
}

int cmd_check(const Options& o, std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto theorem = stability::theorem_from_tag(o.theorem);
  if (!theorem) throw io::ConfigError("expected one of 3.2a, 3.2b, 3.3, 4.1, 4.2", "--theorem");
  const auto [cfg, digest] = load(o);
  const auto sys = cfg.resolved_system();
  const double horizon = cfg.simulation.horizon;
  const std::size_t m = sys.impulse_times().size();
  const Matrix q = cfg.certificate.q.value_or(Matrix::identity(sys.dimension()));
  const bool color = use_color(out);

  stability::CertificateReport report;
  std::vector<fode::Trajectory> trajs;
  switch (*theorem) {
    case stability::Theorem::ExistenceSadovskii:
      report = stability::check_existence(sys, horizon, model::sigma_bounds(sys, default_radius(cfg)), m);
      break;
    case stability::Theorem::UniquenessBanach:
      report = stability::check_uniqueness(sys, horizon, model::sigma_bounds(sys, default_radius(cfg)).l2, m);
      break;
    case stability::Theorem::Boundedness: {
      require_states(cfg);
      trajs = sweep(sys, cfg, o.threads);
      std::optional<double> radius = cfg.certificate.bound_radius;
      if (!radius) {
        double r = 0.0;
        for (const auto& tr : trajs) {
          for (std::size_t i = 0; i < tr.node_count(); ++i) r = std::max(r, linalg::norm2(tr.left(i)));
        }
        radius = r;
      }
      report = stability::check_boundedness(sys, trajs, model::sigma_bounds(sys, *radius), radius);
      if (!cfg.certificate.bound_radius) {
        report.notes.push_back(fmt::format("jump-bound radius taken from the simulated states: {:.6g}", *radius));
      }
      break;
    }
    case stability::Theorem::MLStability41:
      report = stability::check_thm41(sys, q, cfg.certificate.scalars);
      break;
    case stability::Theorem::MLStability42:
      report = stability::check_thm42(sys, q, cfg.certificate.scalars);
      break;
  }
  out << io::render_report(report, color);

  bool ok = report.pass;
  if (report.decay_rate && !cfg.simulation.initial_states.empty()) {
    trajs = sweep(sys, cfg, o.threads);
    const auto x_star = *sys.anchor();
    for (std::size_t i = 0; i < trajs.size(); ++i) {
      const auto env = stability::verify_decay_envelope(trajs[i], q, x_star, *report.decay_rate, sys.alpha(),
                                                        cfg.certificate.slack);
      out << fmt::format("  decay envelope run {}: {} (worst ratio {:.4f} at t = {:.4g}, worst impulse ratio {:.4f}, slack {:g})\n",
                         i, env.holds ? "holds" : "violated", env.worst_ratio, env.worst_time,
                         env.worst_impulse_ratio, cfg.certificate.slack);
      ok = ok && env.holds;
    }
  }
  if (o.json) out << io::report_json(report) << "\n";

  if (o.out_dir) {
    const fs::path dir = out_dir(o, cfg);
    io::RunManifest manifest;
    manifest.command = "check " + o.theorem;
    manifest.config_path = o.config;
    manifest.config_digest = digest;
    manifest.solver = cfg.simulation.solver;
    manifest.simd_backend = std::string(simd::to_string(simd::kernels().backend));
    manifest.certificates.push_back({stability::tag(report.theorem), report.pass});
    const fs::path rep = dir / "report.json";
    io::write_reports_json(rep, std::span(&report, 1));
    manifest.outputs.push_back(rep.string());
    const fs::path man = dir / "manifest.json";
    manifest.outputs.push_back(man.string());
    manifest.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    io::write_manifest(man, manifest);
  }
  return ok ? kExitOk : kExitCheckFailed;
}

int cmd_mlf(const Options& o, std::ostream& out) {
  for (double z : o.z) {
    const auto r = mlf::evaluate({o.alpha, o.beta}, z);
    out << fmt::format("E_{{{:g},{:g}}}({:g}) = {:.17g}  [{}, est. error {:.1e}]\n", o.alpha, o.beta, z, r.value,
                       mlf::to_string(r.method), r.error_estimate);
  }
  return kExitOk;
}

int cmd_search_q(const Options& o, std::ostream& out) {
  const auto [cfg, digest] = load(o);
  const auto sys = cfg.resolved_system();
  const auto found = stability::search_q(sys, cfg.certificate.scalars, cfg.certificate.search_budget,
                                         cfg.certificate.seed);
  if (!found) {
    out << fmt::format("no certificate found within budget ({} evaluations, seed {})\n",
                       cfg.certificate.search_budget, cfg.certificate.seed);
    return kExitCheckFailed;
  }
  out << fmt::format("found Q after {} evaluations:\n", found->evaluations);
  for (std::size_t i = 0; i < found->q.rows(); ++i) {
    std::string row = "  [";
    for (std::size_t j = 0; j < found->q.cols(); ++j) row += fmt::format("{}{:.10g}", j ? ", " : "", found->q(i, j));
    out << row << "]\n";
  }
  out << io::render_report(found->report, use_color(out));
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fractional-order projection neural networks with impulses"};
  app.set_version_flag("--version", fmt::format("fpnni {} (config schema {}, csv schema {})", FPNNI_VERSION,
                                                io::kConfigSchemaVersion, io::kCsvSchemaVersion));
  app.require_subcommand(1);
  Options o;

  auto add_config = [&](CLI::App* sub) {
    sub->add_option("-c,--config", o.config, "System configuration (YAML)")->required();
  };
  auto add_solver = [&](CLI::App* sub) {
    sub->add_option("--steps", o.steps, "Integrator steps per unit time");
    sub->add_option("--horizon", o.horizon, "Override the simulation horizon T");
    sub->add_option("--threads", o.threads, "Worker threads for the initial-state sweep (0 = all cores)");
  };

  auto* simulate = app.add_subcommand("simulate", "Integrate the system and write CSV/SVG output");
  add_config(simulate);
  add_solver(simulate);
  simulate->add_option("-o,--out-dir", o.out_dir, "Output directory");

  auto* equil = app.add_subcommand("equilibrium", "Compute the equilibrium by projection iteration");
  add_config(equil);
  equil->add_option("--tol", o.tol, "Residual tolerance");
  equil->add_option("--max-iter", o.max_iter, "Iteration cap");

  auto* check = app.add_subcommand("check", "Evaluate a theorem's sufficient condition");
  add_config(check);
  add_solver(check);
  check->add_option("-t,--theorem", o.theorem, "3.2a, 3.2b, 3.3, 4.1 or 4.2")->required();
  check->add_option("--slack", o.slack, "Multiplicative slack of the decay-envelope check");
  check->add_option("--radius", o.radius, "Ball radius assumed by the jump bound");
  check->add_option("--rho1", o.rho1);
  check->add_option("--eta1", o.eta1);
  check->add_option("--rho2", o.rho2);
  check->add_option("--mu2", o.mu2);
  check->add_option("--eta2", o.eta2);
  check->add_option("-o,--out-dir", o.out_dir, "Write report.json and manifest.json here");
  check->add_flag("--json", o.json, "Also print the report as JSON");

  auto* mlf_cmd = app.add_subcommand("mlf", "Evaluate the Mittag-Leffler function");
  mlf_cmd->add_option("-a,--alpha", o.alpha, "alpha in (0, 2]")->required();
  mlf_cmd->add_option("-b,--beta", o.beta, "beta > 0");
  mlf_cmd->add_option("-z,--z", o.z, "Argument(s)")->required()->allow_extra_args();

  auto* search = app.add_subcommand("search-q", "Search for a Lyapunov matrix Q passing the LMI test");
  add_config(search);
  search->add_option("--budget", o.budget, "Candidate evaluations");
  search->add_option("--seed", o.seed, "Seed of the random phase");
  for (auto* sub : {simulate, check}) sub->add_option("--seed", o.seed, "Seed recorded for reproducibility");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    if (*simulate) return cmd_simulate(o, out);
    if (*equil) return cmd_equilibrium(o, out);
    if (*check) return cmd_check(o, out);
    if (*mlf_cmd) return cmd_mlf(o, out);
    if (*search) return cmd_search_q(o, out);
  } catch (const io::ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const io::IoError& e) {
    err << "io error: " << e.what() << "\n";
    return kExitIoError;
  } catch (const InvalidArgument& e) {
    // Bad command-line values (e.g. alpha out of range for mlf).
    err << "invalid argument: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const Error& e) {
    err << "solver error: " << e.what() << "\n";
    return kExitSolverError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitSolverError;
  }
  return kExitConfigError;
}

}  // namespace fpnni::cli
