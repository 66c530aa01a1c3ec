#pragma once

// Certificate checkers for the existence, uniqueness, boundedness and
// Mittag-Leffler stability conditions of an FpnniSystem, plus a heuristic
// search for a Lyapunov matrix Q and an empirical decay-envelope verifier.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fpnni/fode.hpp"
#include "fpnni/linalg.hpp"
#include "fpnni/model.hpp"

namespace fpnni::stability {

using linalg::Matrix;
using linalg::Vector;
using model::BoundParams;
using model::FpnniSystem;

enum class Theorem {
  ExistenceSadovskii,  // "3.2a"
  UniquenessBanach,    // "3.2b"
  Boundedness,         // "3.3"
  MLStability41,       // "4.1"
  MLStability42,       // "4.2"
};

enum class Relation { Less, LessEqual, Greater };

/// One checked inequality `value <relation> bound` with an absolute tolerance
/// that widens LessEqual and tightens Greater. Less is strict with no tolerance.
struct Margin {
  std::string name;
  double value;
  Relation relation;
  double bound;
  double tol = 0.0;

  bool satisfied() const;
  /// Signed distance to the boundary, positive when satisfied.
  double slack() const;
};

struct CertificateReport {
  Theorem theorem = Theorem::ExistenceSadovskii;
  bool pass = false;
  std::vector<Margin> margins;
  std::vector<std::pair<std::string, Matrix>> computed;
  std::optional<double> decay_rate;
  std::vector<std::string> notes;

  const Margin& margin(std::string_view name) const;
  const Matrix& matrix(std::string_view name) const;
};

/// Scalars of the stability conditions. rho1/eta1 belong to the
/// eigenvalue test, rho2/mu2/eta2 to the LMI test.
struct ScalarParams {
  double rho1 = 1.0;
  double eta1 = 1.0;
  double rho2 = 1.0;
  double mu2 = 0.1;
  double eta2 = 1.0;
};

/// lambda_max(S) <= kNsdRelTol * max(1, ||S||_F) counts as S <= 0.
inline constexpr double kNsdRelTol = 1e-10;
double nsd_tolerance(const Matrix& s);

/// Sadovskii-type existence: (1 + ||I - rho A||) T^a / Gamma(a + 1) < 1 and
/// m l2 + T^a / Gamma(a + 1) < 1.
CertificateReport check_existence(const FpnniSystem& sys, double horizon, const BoundParams& bounds,
                                  std::size_t m);

/// Banach-type uniqueness: kappa2 = m l2 + (1 + ||I - rho A||) T^a / Gamma(a + 1) < 1.
CertificateReport check_uniqueness(const FpnniSystem& sys, double horizon, double l2, std::size_t m);

/// Every node of every trajectory below the boundedness envelope (both
/// one-sided limits at impulses). With sigma-form impulses and a radius, also
/// checks that pre-jump states stayed in the ball the jump bound assumes.
CertificateReport check_boundedness(const FpnniSystem& sys,
                                    std::span<const fode::Trajectory> trajectories,
                                    const BoundParams& bounds,
                                    std::optional<double> radius = std::nullopt);

/// Eigenvalue test with M = I - rho A:
///   Pi = -2Q + Q^2 / rho1 + rho1 M^T M,  S1 = -Q^{-1/2} Pi Q^{-1/2}  (need lambda_min > 0)
///   S2 = Q^{-1/2} (I - sigma)^T Q (I - sigma) Q^{-1/2} - eta1 I     (need <= 0)
/// decay_rate = lambda_min(S1) on pass. Throws NotPositiveDefinite for Q.
CertificateReport check_thm41(const FpnniSystem& sys, const Matrix& q, const ScalarParams& p);

/// LMI test:
///   S45 = -2Q + Q^2 / rho2 + rho2 M^T M + mu2 Q <= 0
///   S46 = (I - sigma)^T Q (I - sigma) - eta2 Q <= 0
/// plus the equivalent Schur-complement block form of S45,
///   [[-2Q + rho2 M^T M + mu2 Q, Q], [Q, -rho2 I]] <= 0.
/// decay_rate = mu2 on pass.
CertificateReport check_thm42(const FpnniSystem& sys, const Matrix& q, const ScalarParams& p);

struct QSearchResult {
  Matrix q;
  CertificateReport report;
  int evaluations;
};

/// Bounded heuristic search for Q passing check_thm42: Q = I, then diagonal Q
/// on a log grid over [1e-2, 1e2] by coordinate descent, then seeded random
/// symmetric perturbations of the best diagonal. Absence does not prove
/// infeasibility.
std::optional<QSearchResult> search_q(const FpnniSystem& sys, const ScalarParams& p, int budget,
                                      std::uint64_t seed = 0);

struct DecayEnvelopeCheck {
  bool holds;
  /// max over samples of V(t) / (V(0) E_a(-lambda t^a)).
  double worst_ratio;
  double worst_time;
  /// max over impulses of V(t_k+) / V(t_k-).
  double worst_impulse_ratio;
  std::size_t samples;
};

/// V(t) = (x(t) - x*)^T Q (x(t) - x*) at every node (both one-sided limits at
/// impulses). Holds iff V(t) <= (1 + slack) V(0) E_a(-lambda t^a) everywhere
/// and V(t_k+) <= (1 + slack) V(t_k-) at every impulse.
DecayEnvelopeCheck verify_decay_envelope(const fode::Trajectory& traj, const Matrix& q,
                                         std::span<const double> x_star, double lambda,
                                         double alpha, double slack);

const char* to_string(Theorem t);
/// Short tags used on the command line: 3.2a, 3.2b, 3.3, 4.1, 4.2.
const char* tag(Theorem t);
std::optional<Theorem> theorem_from_tag(std::string_view tag);
const char* to_string(Relation r);

}  // namespace fpnni::stability
