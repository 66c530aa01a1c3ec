#pragma once

// Fractional-order projection neural network with impulses:
//
//   D^alpha x = -x + P_K(x - rho A x - rho b),   x(t_k+) = x(t_k-) + U_k(x(t_k-))
//
// with either the affine sigma-form jump U_k(x) = -sigma (x - x*) or a
// caller-supplied jump rule.

#include <cstddef>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "fpnni/convex.hpp"
#include "fpnni/fode.hpp"
#include "fpnni/linalg.hpp"

namespace fpnni::model {

using convex::ConvexSet;
using linalg::Matrix;
using linalg::Vector;

/// U_k(x) = -sigma (x - anchor). The anchor is normally the equilibrium and
/// may be left unresolved until one has been computed.
struct SigmaForm {
  Matrix sigma;
  std::optional<Vector> anchor;
};

struct GenericJump {
  fode::JumpRule rule;
};

using ImpulseForm = std::variant<SigmaForm, GenericJump>;

/// Anchors must satisfy the equilibrium equation to this residual.
inline constexpr double kAnchorResidualTol = 1e-8;

class FpnniSystem {
 public:
  /// Validates dimensions, alpha in (0, 1), rho > 0 and, when a sigma-form
  /// anchor is given, its equilibrium residual. Throws InvalidArgument or
  /// DimensionMismatch.
  FpnniSystem(double alpha, Matrix a, Vector b, double rho, ConvexSet k,
              std::vector<double> impulse_times, ImpulseForm form);

  double alpha() const noexcept { return alpha_; }
  const Matrix& a() const noexcept { return a_; }
  const Vector& b() const noexcept { return b_; }
  double rho() const noexcept { return rho_; }
  const ConvexSet& set() const noexcept { return k_; }
  std::size_t dimension() const noexcept { return b_.size(); }
  const std::vector<double>& impulse_times() const noexcept { return impulse_times_; }
  const ImpulseForm& impulse_form() const noexcept { return form_; }

  bool sigma_form() const noexcept { return std::holds_alternative<SigmaForm>(form_); }
  /// sigma of a sigma-form system; the zero matrix for a system without impulses.
  /// Throws InvalidArgument for generic jump rules.
  Matrix sigma() const;
  std::optional<Vector> anchor() const;

  /// I - rho A
  Matrix iteration_matrix() const;

  FpnniSystem with_anchor(Vector anchor) const;
  FpnniSystem with_impulse_times(std::vector<double> times) const;

  /// Schedule bound to this system's jump rule.
  fode::ImpulseSchedule schedule() const;

 private:
  double alpha_;
  Matrix a_;
  Vector b_;
  double rho_;
  ConvexSet k_;
  std::vector<double> impulse_times_;
  ImpulseForm form_;
};

/// -x + P_K(x - rho (A x + b))
Vector rhs(const FpnniSystem& sys, std::span<const double> x);
/// The same map in the form the integrator consumes.
fode::Rhs rhs_function(const FpnniSystem& sys);

/// rhs for y = x - x*:  -y + P_K(y - rho A y + x* - rho A x* - rho b) - P_K(x* - rho A x* - rho b)
fode::Rhs shifted_rhs_function(const FpnniSystem& sys, std::span<const double> x_star);

/// ||-x + P_K(x - rho (A x + b))||
double equilibrium_residual(const FpnniSystem& sys, std::span<const double> x);

struct EquilibriumResult {
  Vector x;
  double residual;
  int iterations;
  double damping;  // theta in effect at termination
  Vector start;
};

/// Projection fixed-point iteration x <- (1 - theta) x + theta P_K(x - rho(Ax + b)).
/// theta starts at 1 and halves (down to 1/16) when the residual has not
/// decreased for 50 iterations. Throws NoConvergence with the last residual.
EquilibriumResult equilibrium(const FpnniSystem& sys, std::span<const double> x_init,
                              double tol = 1e-10, int max_iter = 100'000);

/// -sigma (x_left - x*). Throws AnchorUnresolved without an anchor and
/// InvalidArgument for non-sigma systems.
Vector sigma_jump(const FpnniSystem& sys, std::size_t k, std::span<const double> x_left);

/// Jump bound l1, jump Lipschitz constant l2 and a point psi of K.
struct BoundParams {
  double l1 = 0.0;
  double l2 = 0.0;
  Vector psi;
};

/// Bounds for sigma-form jumps on the ball ||x|| <= radius:
/// l1 = ||sigma|| (radius + ||x*||), l2 = ||sigma||, psi = P_K(0). The jump
/// bound only holds while the trajectory stays inside that ball.
BoundParams sigma_bounds(const FpnniSystem& sys, double radius);

/// a(t) E_alpha((1 + ||I - rho A||) t^alpha) with
/// a(t) = ||x0|| + m l1 + (rho ||b|| + ||psi||) t^alpha / Gamma(alpha + 1),
/// m = number of impulses. Throws InvalidArgument if psi is not in K, and
/// DomainError when the Mittag-Leffler argument leaves its domain.
double boundedness_envelope(const FpnniSystem& sys, std::span<const double> x0,
                            const BoundParams& bounds, double t);

/// Integrate the system from x0 over [0, horizon].
fode::Trajectory simulate(const FpnniSystem& sys, std::span<const double> x0, double horizon,
                          const fode::SolverConfig& cfg = {});

}  // namespace fpnni::model
