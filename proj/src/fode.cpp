#include "fpnni/fode.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "fpnni/error.hpp"
#include "fpnni/mlf.hpp"

namespace fpnni::fode {

ImpulseSchedule::ImpulseSchedule(std::vector<double> times, JumpRule jump)
    : times_(std::move(times)), jump_(std::move(jump)) {
  if (!times_.empty() && !jump_) throw InvalidArgument("impulse schedule needs a jump rule");
}

ImpulseSchedule ImpulseSchedule::uniform(std::size_t m, double horizon, JumpRule jump) {
  std::vector<double> t(m);
  for (std::size_t k = 0; k < m; ++k) {
    t[k] = static_cast<double>(k + 1) * horizon / static_cast<double>(m + 1);
  }
  return ImpulseSchedule(std::move(t), std::move(jump));
}

Vector ImpulseSchedule::jump(std::size_t k, std::span<const double> x_left) const {
  if (k >= times_.size()) throw OutOfRange("impulse index out of range");
  Vector u = jump_(k, x_left);
  if (u.size() != x_left.size()) throw DimensionMismatch("jump rule returned a vector of wrong length");
  return u;
}

void ImpulseSchedule::validate(double horizon) const {
  double prev = 0.0;
  for (std::size_t k = 0; k < times_.size(); ++k) {
    const double t = times_[k];
    if (!std::isfinite(t) || !(t > prev) || !(t < horizon)) {
      throw ScheduleError("impulse times must satisfy 0 < t_1 < ... < t_m < T (offending t_" +
                          std::to_string(k + 1) + " = " + std::to_string(t) + ")");
    }
    prev = t;
  }
}

void SolverConfig::validate() const {
  if (steps_per_unit_time < 10) throw InvalidArgument("steps_per_unit_time must be >= 10");
  if (corrector_iterations < 1) throw InvalidArgument("corrector_iterations must be >= 1");
}

std::span<const double> Trajectory::left(std::size_t node) const {
  return {left_.data() + node * dim_, dim_};
}

std::span<const double> Trajectory::right(std::size_t node) const {
  return {right_.data() + node * dim_, dim_};
}

std::span<const double> Trajectory::jump(std::size_t k) const {
  if (k >= impulse_nodes_.size()) throw OutOfRange("impulse index out of range");
  return {jumps_.data() + k * dim_, dim_};
}

std::span<const double> Trajectory::jump_log(std::size_t segment) const {
  if (segment > impulse_nodes_.size()) throw OutOfRange("segment index out of range");
  return {jump_log_.data() + segment * dim_, dim_};
}

Vector Trajectory::sample(double t, Side side) const {
  if (!(t >= 0.0 && t <= horizon())) {
    throw OutOfRange("sample time " + std::to_string(t) + " outside [0, " +
                     std::to_string(horizon()) + "]");
  }
  const auto it = std::lower_bound(times_.begin(), times_.end(), t);
  const auto i = static_cast<std::size_t>(it - times_.begin());
  if (times_[i] == t) {
    auto s = side == Side::Left ? left(i) : right(i);
    return Vector(s.begin(), s.end());
  }
  // times_[i-1] < t < times_[i]
  const double t0 = times_[i - 1];
  const double w = (t - t0) / (times_[i] - t0);
  const auto a = right(i - 1);
  const auto b = left(i);
  Vector out(dim_);
  for (std::size_t c = 0; c < dim_; ++c) out[c] = (1.0 - w) * a[c] + w * b[c];
  return out;
}

Grid build_grid(double horizon, const std::vector<double>& impulse_times, int steps_per_unit_time) {
  const double raw = horizon * steps_per_unit_time;
  const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(raw - 1e-9 * raw)));
  const double h = horizon / static_cast<double>(n);

  Grid g;
  g.times.resize(n + 1);
  g.impulse.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) g.times[i] = static_cast<double>(i) * h;
  g.times[n] = horizon;

  std::vector<double> inserted;
  for (double t : impulse_times) {
    const auto idx = static_cast<std::size_t>(std::llround(t / h));
    if (idx >= 1 && idx + 1 <= n && !g.impulse[idx]) {
      g.times[idx] = t;
      g.impulse[idx] = 1;
    } else {
      inserted.push_back(t);
    }
  }
  for (double t : inserted) {
    const auto pos = std::upper_bound(g.times.begin(), g.times.end(), t) - g.times.begin();
    g.times.insert(g.times.begin() + pos, t);
    g.impulse.insert(g.impulse.begin() + pos, 1);
  }

  g.uniform = inserted.empty();
  if (g.uniform) {
    for (std::size_t i = 0; i <= n; ++i) {
      if (std::abs(g.times[i] - static_cast<double>(i) * h) > 1e-12 * horizon) {
        g.uniform = false;
        break;
      }
    }
  }
  return g;
}

Trajectory integrate(const Rhs& rhs, double alpha, std::span<const double> x0, double horizon,
                     const ImpulseSchedule& impulses, const SolverConfig& cfg,
                     const simd::KernelTable* kernels) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw InvalidArgument("horizon T must be > 0");
  if (x0.empty() || !linalg::all_finite(x0)) throw InvalidArgument("x0 must be a finite, nonempty vector");
  if (!rhs) throw InvalidArgument("rhs is empty");
  impulses.validate(horizon);
  cfg.validate();

  const simd::KernelTable& kt = kernels ? *kernels : simd::kernels();
  const Grid grid = build_grid(horizon, impulses.times(), cfg.steps_per_unit_time);
  const std::size_t nodes = grid.times.size();
  const std::size_t dim = x0.size();

  Trajectory traj;
  traj.dim_ = dim;
  traj.times_ = grid.times;
  traj.impulse_ = grid.impulse;
  traj.left_.assign(nodes * dim, 0.0);
  traj.right_.assign(nodes * dim, 0.0);
  traj.segment_.assign(nodes, 0);
  traj.jump_log_.assign(dim, 0.0);

  // Right-hand side history, one contiguous array per component so the
  // memory sums are plain dot products.
  std::vector<std::vector<double>> f_left(dim, std::vector<double>(nodes, 0.0));
  std::vector<std::vector<double>> f_right(dim, std::vector<double>(nodes, 0.0));

  const double gamma_a1 = mlf::gamma_fn(alpha + 1.0);
  const double gamma_a = mlf::gamma_fn(alpha);
  const double rect_scale = 1.0 / gamma_a1;
  const double trap_scale = 1.0 / gamma_a;
  const double inv_alpha = 1.0 / alpha;
  const double inv_alpha1 = 1.0 / (alpha + 1.0);

  // Uniform grids reuse m^alpha; otherwise distances are raised per step.
  const double h = horizon / static_cast<double>(nodes - 1);
  std::vector<double> pow_table;
  if (grid.uniform) {
    pow_table.resize(nodes);
    const double h_alpha = std::pow(h, alpha);
    for (std::size_t m = 0; m < nodes; ++m) pow_table[m] = h_alpha * std::pow(static_cast<double>(m), alpha);
  }

  Vector jump_sum(dim, 0.0);
  Vector base(x0.begin(), x0.end());  // x0 + jump_sum
  Vector f(dim), x(dim), hist(dim), pred(dim);
  std::vector<double> d(nodes + 1), pa(nodes + 1), wr(nodes), wa(nodes), wb(nodes);

  auto eval = [&](double t, std::span<const double> state, std::span<double> out) {
    rhs(t, state, out);
    if (!linalg::all_finite(out)) throw NonFiniteState("right-hand side became non-finite", t);
  };

  std::copy(x0.begin(), x0.end(), traj.left_.begin());
  std::copy(x0.begin(), x0.end(), traj.right_.begin());
  eval(0.0, x0, f);
  for (std::size_t c = 0; c < dim; ++c) f_left[c][0] = f_right[c][0] = f[c];

  std::size_t segment = 0;
  for (std::size_t n = 0; n + 1 < nodes; ++n) {
    const std::size_t next = n + 1;
    const double t_next = grid.times[next];
    const std::size_t intervals = next;  // [t_j, t_{j+1}], j = 0..n

    for (std::size_t j = 0; j <= next; ++j) {
      if (grid.uniform) {
        d[j] = static_cast<double>(next - j) * h;
        pa[j] = pow_table[next - j];
      } else {
        d[j] = t_next - grid.times[j];
        pa[j] = std::pow(d[j], alpha);
      }
    }

    // Predictor: product rectangle with left-endpoint (right-limit) values.
    kt.rect_weights(pa.data(), rect_scale, wr.data(), intervals);
    for (std::size_t c = 0; c < dim; ++c) {
      pred[c] = base[c] + kt.dot(wr.data(), f_right[c].data(), intervals);
    }
    x = pred;

    if (cfg.quadrature == Quadrature::ProductTrapezoid) {
      kt.trap_weights(d.data(), pa.data(), inv_alpha, inv_alpha1, trap_scale, wa.data(), wb.data(),
                      intervals);
      for (std::size_t c = 0; c < dim; ++c) {
        hist[c] = base[c] + kt.dot(wa.data(), f_right[c].data(), intervals) +
                  kt.dot(wb.data(), f_left[c].data() + 1, intervals - 1);
      }
      const double w_last = wb[intervals - 1];
      for (int it = 0; it < cfg.corrector_iterations; ++it) {
        eval(t_next, x, f);
        for (std::size_t c = 0; c < dim; ++c) x[c] = hist[c] + w_last * f[c];
      }
    }

    if (!linalg::all_finite(x)) throw NonFiniteState("state became non-finite", t_next);

    std::copy(x.begin(), x.end(), traj.left_.begin() + static_cast<std::ptrdiff_t>(next * dim));
    eval(t_next, x, f);
    for (std::size_t c = 0; c < dim; ++c) f_left[c][next] = f[c];

    if (grid.impulse[next]) {
      const std::size_t k = traj.impulse_nodes_.size();
      const Vector u = impulses.jump(k, x);
      Vector xr(dim);
      for (std::size_t c = 0; c < dim; ++c) xr[c] = x[c] + u[c];
      if (!linalg::all_finite(xr)) throw NonFiniteState("impulse produced a non-finite state", t_next);
      for (std::size_t c = 0; c < dim; ++c) {
        const double recorded = xr[c] - x[c];
        traj.jumps_.push_back(recorded);
        jump_sum[c] += recorded;
        base[c] = x0[c] + jump_sum[c];
      }
      traj.jump_log_.insert(traj.jump_log_.end(), jump_sum.begin(), jump_sum.end());
      traj.impulse_nodes_.push_back(next);
      ++segment;

      std::copy(xr.begin(), xr.end(), traj.right_.begin() + static_cast<std::ptrdiff_t>(next * dim));
      eval(t_next, xr, f);
      for (std::size_t c = 0; c < dim; ++c) f_right[c][next] = f[c];
    } else {
      std::copy(x.begin(), x.end(), traj.right_.begin() + static_cast<std::ptrdiff_t>(next * dim));
      for (std::size_t c = 0; c < dim; ++c) f_right[c][next] = f_left[c][next];
    }
    traj.segment_[next] = segment;
  }
  return traj;
}

}  // namespace fpnni::fode
