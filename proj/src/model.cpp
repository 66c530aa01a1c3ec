#include "fpnni/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <string>

#include "fpnni/error.hpp"
#include "fpnni/mlf.hpp"

namespace fpnni::model {

namespace {

constexpr int kStallWindow = 50;
constexpr double kMinDamping = 1.0 / 16.0;

// P_K(x - rho (A x + b))
Vector projected_step(const FpnniSystem& sys, std::span<const double> x) {
  Vector y = sys.a() * x;
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = x[i] - sys.rho() * (y[i] + sys.b()[i]);
  return sys.set().project(y);
}

void require_dim(const FpnniSystem& sys, std::span<const double> x) {
  if (x.size() != sys.dimension()) {
    throw DimensionMismatch("state of length " + std::to_string(x.size()) +
                            " for a system of dimension " + std::to_string(sys.dimension()));
  }
}

}  // namespace

FpnniSystem::FpnniSystem(double alpha, Matrix a, Vector b, double rho, ConvexSet k,
                         std::vector<double> impulse_times, ImpulseForm form)
    : alpha_(alpha),
      a_(std::move(a)),
      b_(std::move(b)),
      rho_(rho),
      k_(std::move(k)),
      impulse_times_(std::move(impulse_times)),
      form_(std::move(form)) {
  if (!(alpha_ > 0.0 && alpha_ < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
  if (!(rho_ > 0.0) || !std::isfinite(rho_)) throw InvalidArgument("rho must be > 0");
  const std::size_t n = b_.size();
  if (n == 0) throw InvalidArgument("b must be nonempty");
  if (!linalg::all_finite(b_)) throw InvalidArgument("b must be finite");
  if (a_.rows() != n || a_.cols() != n) throw DimensionMismatch("A must be n x n with n = len(b)");
  if (k_.dimension() != n) throw DimensionMismatch("K must have the dimension of b");

  if (const auto* s = std::get_if<SigmaForm>(&form_)) {
    if (s->sigma.rows() != n || s->sigma.cols() != n) throw DimensionMismatch("sigma must be n x n");
    if (s->anchor) {
      require_dim(*this, *s->anchor);
      const double r = equilibrium_residual(*this, *s->anchor);
      if (!(r <= kAnchorResidualTol)) {
        throw InvalidArgument("sigma-form anchor is not an equilibrium (residual " +
                              std::to_string(r) + ")");
      }
    }
  } else if (!std::get<GenericJump>(form_).rule && !impulse_times_.empty()) {
    throw InvalidArgument("generic impulse form needs a jump rule");
  }
}

Matrix FpnniSystem::sigma() const {
  if (const auto* s = std::get_if<SigmaForm>(&form_)) return s->sigma;
  if (impulse_times_.empty()) return Matrix(dimension(), dimension());
  throw InvalidArgument("system does not use sigma-form impulses");
}

std::optional<Vector> FpnniSystem::anchor() const {
  if (const auto* s = std::get_if<SigmaForm>(&form_)) return s->anchor;
  return std::nullopt;
}

Matrix FpnniSystem::iteration_matrix() const {
  return Matrix::identity(dimension()) - rho_ * a_;
}

FpnniSystem FpnniSystem::with_anchor(Vector anchor) const {
  const auto* s = std::get_if<SigmaForm>(&form_);
  if (!s) throw InvalidArgument("with_anchor requires sigma-form impulses");
  return FpnniSystem(alpha_, a_, b_, rho_, k_, impulse_times_, SigmaForm{s->sigma, std::move(anchor)});
}

FpnniSystem FpnniSystem::with_impulse_times(std::vector<double> times) const {
  return FpnniSystem(alpha_, a_, b_, rho_, k_, std::move(times), form_);
}

fode::ImpulseSchedule FpnniSystem::schedule() const {
  if (impulse_times_.empty()) return {};
  if (const auto* g = std::get_if<GenericJump>(&form_)) {
    return fode::ImpulseSchedule(impulse_times_, g->rule);
  }
  // Copy so the schedule does not dangle if the system goes away.
  auto self = std::make_shared<const FpnniSystem>(*this);
  return fode::ImpulseSchedule(impulse_times_, [self](std::size_t k, std::span<const double> x) {
    return sigma_jump(*self, k, x);
  });
}

Vector rhs(const FpnniSystem& sys, std::span<const double> x) {
  require_dim(sys, x);
  Vector p = projected_step(sys, x);
  for (std::size_t i = 0; i < p.size(); ++i) p[i] -= x[i];
  return p;
}

fode::Rhs rhs_function(const FpnniSystem& sys) {
  auto self = std::make_shared<const FpnniSystem>(sys);
  return [self](double, std::span<const double> x, std::span<double> out) {
    const Vector f = rhs(*self, x);
    std::copy(f.begin(), f.end(), out.begin());
  };
}

fode::Rhs shifted_rhs_function(const FpnniSystem& sys, std::span<const double> x_star) {
  require_dim(sys, x_star);
  auto self = std::make_shared<const FpnniSystem>(sys);
  // c = x* - rho A x* - rho b, and P_K(c)
  Vector c = sys.a() * x_star;
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = x_star[i] - sys.rho() * (c[i] + sys.b()[i]);
  Vector pc = sys.set().project(c);
  return [self, c = std::move(c), pc = std::move(pc)](double, std::span<const double> y,
                                                      std::span<double> out) {
    Vector arg = self->a() * y;
    for (std::size_t i = 0; i < arg.size(); ++i) arg[i] = y[i] - self->rho() * arg[i] + c[i];
    const Vector p = self->set().project(arg);
    for (std::size_t i = 0; i < p.size(); ++i) out[i] = -y[i] + (p[i] - pc[i]);
  };
}

double equilibrium_residual(const FpnniSystem& sys, std::span<const double> x) {
  return linalg::norm2(rhs(sys, x));
}

EquilibriumResult equilibrium(const FpnniSystem& sys, std::span<const double> x_init, double tol,
                              int max_iter) {
  require_dim(sys, x_init);
  if (!(tol > 0.0)) throw InvalidArgument("equilibrium: tol must be > 0");
  if (!linalg::all_finite(x_init)) throw InvalidArgument("equilibrium: start point must be finite");

  Vector x(x_init.begin(), x_init.end());
  double theta = 1.0;
  double best = std::numeric_limits<double>::infinity();
  int since_best = 0;
  double residual = std::numeric_limits<double>::infinity();

  for (int it = 0; it <= max_iter; ++it) {
    const Vector p = projected_step(sys, x);
    residual = linalg::norm2(linalg::sub(p, x));
    if (!std::isfinite(residual)) break;
    if (residual <= tol) {
      return {std::move(x), residual, it, theta, Vector(x_init.begin(), x_init.end())};
    }
    if (residual < best) {
      best = residual;
      since_best = 0;
    } else if (++since_best >= kStallWindow) {
      if (theta <= kMinDamping) break;
      theta *= 0.5;
      since_best = 0;
      best = residual;
    }
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = (1.0 - theta) * x[i] + theta * p[i];
  }
  throw NoConvergence("equilibrium iteration did not reach tol = " + std::to_string(tol) +
                          " (last residual " + std::to_string(residual) + ")",
                      residual);
}

Vector sigma_jump(const FpnniSystem& sys, std::size_t, std::span<const double> x_left) {
  const auto* s = std::get_if<SigmaForm>(&sys.impulse_form());
  if (!s) throw InvalidArgument("sigma_jump requires sigma-form impulses");
  if (!s->anchor) throw AnchorUnresolved("sigma-form anchor (equilibrium) has not been resolved");
  require_dim(sys, x_left);
  Vector u = s->sigma * linalg::sub(x_left, *s->anchor);
  for (double& v : u) v = -v;
  return u;
}

BoundParams sigma_bounds(const FpnniSystem& sys, double radius) {
  if (!(radius >= 0.0)) throw InvalidArgument("sigma_bounds: radius must be >= 0");
  const Vector origin(sys.dimension(), 0.0);
  BoundParams p;
  p.psi = sys.set().project(origin);
  if (sys.impulse_times().empty()) return p;
  const double sn = linalg::spectral_norm(sys.sigma());
  const auto anchor = sys.anchor();
  const double anchor_norm = anchor ? linalg::norm2(*anchor) : 0.0;
  p.l1 = sn * (radius + anchor_norm);
  p.l2 = sn;
  return p;
}

double boundedness_envelope(const FpnniSystem& sys, std::span<const double> x0,
                            const BoundParams& bounds, double t) {
  require_dim(sys, x0);
  if (!(t >= 0.0)) throw InvalidArgument("boundedness_envelope: t must be >= 0");
  if (!(bounds.l1 >= 0.0 && bounds.l2 >= 0.0)) throw InvalidArgument("l1 and l2 must be >= 0");
  require_dim(sys, bounds.psi);
  if (!sys.set().contains(bounds.psi, 1e-12)) throw InvalidArgument("psi must lie in K");

  const double alpha = sys.alpha();
  const double t_alpha = std::pow(t, alpha);
  const double m = static_cast<double>(sys.impulse_times().size());
  const double a_t = linalg::norm2(x0) + m * bounds.l1 +
                     (sys.rho() * linalg::norm2(sys.b()) + linalg::norm2(bounds.psi)) * t_alpha /
                         mlf::gamma_fn(alpha + 1.0);
  // b(t) Gamma(alpha) t^alpha with b(t) = (1 + ||I - rho A||) / Gamma(alpha)
  const double growth = (1.0 + linalg::spectral_norm(sys.iteration_matrix())) * t_alpha;
  return a_t * mlf::mittag_leffler(alpha, growth);
}

fode::Trajectory simulate(const FpnniSystem& sys, std::span<const double> x0, double horizon,
                          const fode::SolverConfig& cfg) {
  require_dim(sys, x0);
  return fode::integrate(rhs_function(sys), sys.alpha(), x0, horizon, sys.schedule(), cfg);
}

}  // namespace fpnni::model
