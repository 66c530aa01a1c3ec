#include "fpnni/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include <fmt/format.h>

#include "fpnni/error.hpp"
#include "fpnni/mlf.hpp"

namespace fpnni::stability {

namespace {

constexpr int kGridPoints = 41;
constexpr double kGridLow = 1e-2;
constexpr double kGridHigh = 1e2;

void require_spd(const Matrix& q, std::size_t n) {
  if (q.rows() != n || q.cols() != n) throw DimensionMismatch("Q must be n x n");
  const auto e = linalg::sym_eigen(q);
  if (e.min() <= 1e-12) {
    throw NotPositiveDefinite("Q must be symmetric positive definite (lambda_min = " +
                              std::to_string(e.min()) + ")");
  }
}

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) throw InvalidArgument(std::string(name) + " must be > 0");
}

void require_eta(double v, const char* name) {
  if (!(v > 0.0 && v <= 1.0)) throw InvalidArgument(std::string(name) + " must lie in (0, 1]");
}

void finalize(CertificateReport& r) {
  r.pass = std::all_of(r.margins.begin(), r.margins.end(),
                       [](const Margin& m) { return m.satisfied(); });
}

double horizon_power_term(const FpnniSystem& sys, double horizon) {
  return std::pow(horizon, sys.alpha()) / mlf::gamma_fn(sys.alpha() + 1.0);
}

void note_jump_bound_caveat(const FpnniSystem& sys, CertificateReport& r) {
  if (sys.sigma_form() && !sys.impulse_times().empty()) {
    r.notes.emplace_back(
        "sigma-form jumps -sigma(x - x*) are unbounded on R^n; the jump bound l1 only holds on "
        "the ball the caller assumed for it");
  }
}

// Largest eigenvalue scaled by the semidefiniteness tolerance basis.
double normalized_top(const Matrix& s) {
  return linalg::sym_eigen(s).max() / std::max(1.0, linalg::frobenius_norm(s));
}

Matrix block_2x2(const Matrix& a, const Matrix& b, const Matrix& c, const Matrix& d) {
  const std::size_t n = a.rows();
  Matrix out(2 * n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      out(i, j) = a(i, j);
      out(i, n + j) = b(i, j);
      out(n + i, j) = c(i, j);
      out(n + i, n + j) = d(i, j);
    }
  }
  return out;
}

}  // namespace

bool Margin::satisfied() const {
  switch (relation) {
    case Relation::Less: return value < bound;
    case Relation::LessEqual: return value <= bound + tol;
    case Relation::Greater: return value > bound + tol;
  }
  return false;
}

double Margin::slack() const {
  return relation == Relation::Greater ? value - bound : bound - value;
}

const Margin& CertificateReport::margin(std::string_view name) const {
  for (const auto& m : margins) {
    if (m.name == name) return m;
  }
  throw OutOfRange("no margin named " + std::string(name));
}

const Matrix& CertificateReport::matrix(std::string_view name) const {
  for (const auto& [key, m] : computed) {
    if (key == name) return m;
  }
  throw OutOfRange("no computed matrix named " + std::string(name));
}

double nsd_tolerance(const Matrix& s) {
  return kNsdRelTol * std::max(1.0, linalg::frobenius_norm(s));
}

CertificateReport check_existence(const FpnniSystem& sys, double horizon, const BoundParams& bounds,
                                  std::size_t m) {
  require_positive(horizon, "T");
  const double tp = horizon_power_term(sys, horizon);
  const double norm_m = linalg::spectral_norm(sys.iteration_matrix());

  CertificateReport r;
  r.theorem = Theorem::ExistenceSadovskii;
  r.margins.push_back({"contraction_lhs", (1.0 + norm_m) * tp, Relation::Less, 1.0});
  r.margins.push_back({"impulse_lhs", static_cast<double>(m) * bounds.l2 + tp, Relation::Less, 1.0});
  r.computed.emplace_back("I_minus_rhoA", sys.iteration_matrix());
  note_jump_bound_caveat(sys, r);
  finalize(r);
  return r;
}

CertificateReport check_uniqueness(const FpnniSystem& sys, double horizon, double l2, std::size_t m) {
  require_positive(horizon, "T");
  if (!(l2 >= 0.0)) throw InvalidArgument("l2 must be >= 0");
  const double tp = horizon_power_term(sys, horizon);
  const double norm_m = linalg::spectral_norm(sys.iteration_matrix());
  const double kappa2 = static_cast<double>(m) * l2 + (1.0 + norm_m) * tp;

  CertificateReport r;
  r.theorem = Theorem::UniquenessBanach;
  r.margins.push_back({"kappa2", kappa2, Relation::Less, 1.0});
  r.computed.emplace_back("I_minus_rhoA", sys.iteration_matrix());
  note_jump_bound_caveat(sys, r);
  finalize(r);
  return r;
}

CertificateReport check_boundedness(const FpnniSystem& sys,
                                    std::span<const fode::Trajectory> trajectories,
                                    const BoundParams& bounds, std::optional<double> radius) {
  CertificateReport r;
  r.theorem = Theorem::Boundedness;
  double worst = 0.0;
  double worst_time = 0.0;
  double max_prejump = 0.0;
  double max_envelope_end = 0.0;

  for (const auto& traj : trajectories) {
    const auto x0 = traj.left(0);
    for (std::size_t i = 0; i < traj.node_count(); ++i) {
      const double t = traj.times()[i];
      const double env = model::boundedness_envelope(sys, x0, bounds, t);
      const double nl = linalg::norm2(traj.left(i));
      const double nr = linalg::norm2(traj.right(i));
      const double ratio = std::max(nl, nr) / env;
      if (ratio > worst) {
        worst = ratio;
        worst_time = t;
      }
      if (traj.is_impulse(i)) max_prejump = std::max(max_prejump, nl);
      if (i + 1 == traj.node_count()) max_envelope_end = std::max(max_envelope_end, env);
    }
  }

  r.margins.push_back({"max_norm_over_envelope", worst, Relation::LessEqual, 1.0});
  if (radius && sys.sigma_form() && !sys.impulse_times().empty()) {
    r.margins.push_back({"max_prejump_norm", max_prejump, Relation::LessEqual, *radius});
  }
  r.notes.push_back(fmt::format("worst ratio at t = {:.6g}; envelope at the horizon = {:.6g}", worst_time,
                                max_envelope_end));
  note_jump_bound_caveat(sys, r);
  finalize(r);
  return r;
}

CertificateReport check_thm41(const FpnniSystem& sys, const Matrix& q, const ScalarParams& p) {
  const std::size_t n = sys.dimension();
  require_spd(q, n);
  require_positive(p.rho1, "rho1");
  require_eta(p.eta1, "eta1");

  const Matrix id = Matrix::identity(n);
  const Matrix m = sys.iteration_matrix();
  const Matrix sigma = sys.sigma();
  const auto roots = linalg::spd_sqrt(q);

  const Matrix pi = (-2.0) * q + (1.0 / p.rho1) * (q * q) + p.rho1 * (m.transpose() * m);
  const Matrix s1 = linalg::symmetrize((-1.0) * (roots.neg_half * pi * roots.neg_half));
  const Matrix jump = id - sigma;
  const Matrix s2 = linalg::symmetrize(roots.neg_half * jump.transpose() * q * jump * roots.neg_half -
                                       p.eta1 * id);

  const double xi1 = linalg::sym_eigen(s1).min();
  const double s2_top = linalg::sym_eigen(s2).max();

  CertificateReport r;
  r.theorem = Theorem::MLStability41;
  r.margins.push_back({"lambda_min_S1", xi1, Relation::Greater, 0.0});
  r.margins.push_back({"lambda_max_S2", s2_top, Relation::LessEqual, 0.0, nsd_tolerance(s2)});
  r.computed.emplace_back("M", m);
  r.computed.emplace_back("Pi", pi);
  r.computed.emplace_back("S1", s1);
  r.computed.emplace_back("S2", s2);
  finalize(r);
  if (r.pass) r.decay_rate = xi1;
  return r;
}

CertificateReport check_thm42(const FpnniSystem& sys, const Matrix& q, const ScalarParams& p) {
  const std::size_t n = sys.dimension();
  require_spd(q, n);
  require_positive(p.rho2, "rho2");
  require_positive(p.mu2, "mu2");
  require_eta(p.eta2, "eta2");

  const Matrix id = Matrix::identity(n);
  const Matrix m = sys.iteration_matrix();
  const Matrix mtm = m.transpose() * m;
  const Matrix jump = id - sys.sigma();

  const Matrix linear = (-2.0 + p.mu2) * q + p.rho2 * mtm;
  const Matrix s45 = linalg::symmetrize(linear + (1.0 / p.rho2) * (q * q));
  const Matrix s46 = linalg::symmetrize(jump.transpose() * q * jump - p.eta2 * q);
  const Matrix schur = linalg::symmetrize(block_2x2(linear, q, q, (-p.rho2) * id));

  CertificateReport r;
  r.theorem = Theorem::MLStability42;
  r.margins.push_back({"lambda_max_S45", linalg::sym_eigen(s45).max(), Relation::LessEqual, 0.0,
                       nsd_tolerance(s45)});
  r.margins.push_back({"lambda_max_S46", linalg::sym_eigen(s46).max(), Relation::LessEqual, 0.0,
                       nsd_tolerance(s46)});
  const Margin schur_margin{"lambda_max_schur", linalg::sym_eigen(schur).max(), Relation::LessEqual,
                            0.0, nsd_tolerance(schur)};
  r.margins.push_back(schur_margin);
  r.computed.emplace_back("M", m);
  r.computed.emplace_back("S45", s45);
  r.computed.emplace_back("S46", s46);
  r.computed.emplace_back("Schur45", schur);
  if (schur_margin.satisfied() != r.margins[0].satisfied()) {
    r.notes.emplace_back("direct and Schur-complement forms of the LMI disagree at the tolerance "
                         "boundary");
  }
  finalize(r);
  if (r.pass) r.decay_rate = p.mu2;
  return r;
}

std::optional<QSearchResult> search_q(const FpnniSystem& sys, const ScalarParams& p, int budget,
                                      std::uint64_t seed) {
  if (budget < 1) throw InvalidArgument("search_q: budget must be >= 1");
  const std::size_t n = sys.dimension();
  int evaluations = 0;

  struct Scored {
    Matrix q;
    double merit;
  };
  std::optional<QSearchResult> found;

  // Evaluates a candidate; returns its merit (max normalized top eigenvalue,
  // <= 0 is feasible) or +inf when not SPD.
  auto score = [&](const Matrix& q) -> double {
    ++evaluations;
    const auto e = linalg::sym_eigen(q);
    if (e.min() <= 1e-12) return std::numeric_limits<double>::infinity();
    CertificateReport rep = check_thm42(sys, q, p);
    const double merit = std::max(normalized_top(rep.matrix("S45")), normalized_top(rep.matrix("S46")));
    if (rep.pass && !found) found = QSearchResult{q, std::move(rep), evaluations};
    return merit;
  };
  auto done = [&] { return found.has_value() || evaluations >= budget; };

  Scored best{Matrix::identity(n), score(Matrix::identity(n))};
  if (done()) return found;

  std::vector<double> grid(kGridPoints);
  for (int i = 0; i < kGridPoints; ++i) {
    const double u = static_cast<double>(i) / (kGridPoints - 1);
    grid[i] = kGridLow * std::pow(kGridHigh / kGridLow, u);
  }

  // Scalar multiples of I.
  for (double c : grid) {
    const Matrix q = c * Matrix::identity(n);
    const double s = score(q);
    if (s < best.merit) best = {q, s};
    if (done()) return found;
  }

  // Coordinate descent over the diagonal.
  std::vector<double> diag(n);
  for (std::size_t i = 0; i < n; ++i) diag[i] = best.q(i, i);
  bool improved = true;
  while (improved) {
    improved = false;
    for (std::size_t i = 0; i < n; ++i) {
      for (double g : grid) {
        std::vector<double> trial = diag;
        trial[i] = g;
        const Matrix q = Matrix::diagonal(trial);
        const double s = score(q);
        if (s < best.merit) {
          best = {q, s};
          diag = trial;
          improved = true;
        }
        if (done()) return found;
      }
    }
  }

  // Random symmetric perturbations around the best candidate.
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  double mean_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean_diag += best.q(i, i) / static_cast<double>(n);
  double step = 0.2 * mean_diag;
  while (!done()) {
    Matrix e(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) e(i, j) = e(j, i) = normal(rng);
    }
    const Matrix q = best.q + step * e;
    const double s = score(q);
    if (s < best.merit) {
      best = {q, s};
    } else {
      step = std::max(step * 0.98, 1e-4 * mean_diag);
    }
  }
  return found;
}

DecayEnvelopeCheck verify_decay_envelope(const fode::Trajectory& traj, const Matrix& q,
                                         std::span<const double> x_star, double lambda,
                                         double alpha, double slack) {
  if (!(lambda > 0.0)) throw InvalidArgument("verify_decay_envelope: lambda must be > 0");
  if (!(slack >= 0.0)) throw InvalidArgument("verify_decay_envelope: slack must be >= 0");
  if (x_star.size() != traj.dimension()) throw DimensionMismatch("x* dimension mismatch");

  auto lyapunov = [&](std::span<const double> x) {
    return linalg::quadratic_form(q, linalg::sub(x, x_star));
  };
  auto ratio_of = [](double num, double den) {
    if (num == 0.0) return 0.0;
    return den > 0.0 ? num / den : std::numeric_limits<double>::infinity();
  };

  const double v0 = lyapunov(traj.left(0));
  DecayEnvelopeCheck out{true, 0.0, 0.0, 0.0, 0};
  for (std::size_t i = 0; i < traj.node_count(); ++i) {
    const double t = traj.times()[i];
    const double envelope = v0 * mlf::mittag_leffler(alpha, -lambda * std::pow(t, alpha));
    const double vl = lyapunov(traj.left(i));
    const double vr = lyapunov(traj.right(i));
    for (double v : {vl, vr}) {
      const double ratio = ratio_of(v, envelope);
      ++out.samples;
      if (ratio > out.worst_ratio) {
        out.worst_ratio = ratio;
        out.worst_time = t;
      }
    }
    if (traj.is_impulse(i)) {
      out.worst_impulse_ratio = std::max(out.worst_impulse_ratio, ratio_of(vr, vl));
    }
  }
  out.holds = out.worst_ratio <= 1.0 + slack && out.worst_impulse_ratio <= 1.0 + slack;
  return out;
}

const char* to_string(Theorem t) {
  switch (t) {
    case Theorem::ExistenceSadovskii: return "Existence-Sadovskii";
    case Theorem::UniquenessBanach: return "Uniqueness-Banach";
    case Theorem::Boundedness: return "Boundedness";
    case Theorem::MLStability41: return "MLStability-4.1";
    case Theorem::MLStability42: return "MLStability-4.2";
  }
  return "unknown";
}

const char* tag(Theorem t) {
  switch (t) {
    case Theorem::ExistenceSadovskii: return "3.2a";
    case Theorem::UniquenessBanach: return "3.2b";
    case Theorem::Boundedness: return "3.3";
    case Theorem::MLStability41: return "4.1";
    case Theorem::MLStability42: return "4.2";
  }
  return "?";
}

std::optional<Theorem> theorem_from_tag(std::string_view s) {
  for (Theorem t : {Theorem::ExistenceSadovskii, Theorem::UniquenessBanach, Theorem::Boundedness,
                    Theorem::MLStability41, Theorem::MLStability42}) {
    if (s == tag(t)) return t;
  }
  return std::nullopt;
}

const char* to_string(Relation r) {
  switch (r) {
    case Relation::Less: return "<";
    case Relation::LessEqual: return "<=";
    case Relation::Greater: return ">";
  }
  return "?";
}

}  // namespace fpnni::stability
