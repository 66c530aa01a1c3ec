#pragma once

// Impulsive Caputo fractional ODE integrator.
//
// Solves  D^alpha x = f(t, x),  x(t_k+) = x(t_k-) + U_k(x(t_k-)),  x(0) = x0
// through its Volterra form
//
//   x(t) = x0 + sum_{t_j < t} U_j + 1/Gamma(alpha) int_0^t (t-s)^(alpha-1) f(s, x(s)) ds
//
// The memory integral always runs from 0 over the actual (jumping) solution;
// impulses enter only through the additive jump sum. Discretization is the
// fractional Adams-Bashforth-Moulton scheme on a possibly non-uniform grid:
// product-rectangle predictor, product-trapezoid corrector.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "fpnni/linalg.hpp"
#include "fpnni/simd/kernels.hpp"

namespace fpnni::fode {

using linalg::Vector;

/// Writes f(t, x) into `out` (same length as x).
using Rhs = std::function<void(double t, std::span<const double> x, std::span<double> out)>;

/// U_k(x(t_k-)) for impulse index k (0-based).
using JumpRule = std::function<Vector(std::size_t k, std::span<const double> x_left)>;

class ImpulseSchedule {
 public:
  /// No impulses.
  ImpulseSchedule() = default;
  ImpulseSchedule(std::vector<double> times, JumpRule jump);

  /// m impulses at t_k = k T / (m + 1), k = 1..m.
  static ImpulseSchedule uniform(std::size_t m, double horizon, JumpRule jump);

  const std::vector<double>& times() const noexcept { return times_; }
  std::size_t size() const noexcept { return times_.size(); }
  bool empty() const noexcept { return times_.empty(); }

  Vector jump(std::size_t k, std::span<const double> x_left) const;

  /// Throws ScheduleError unless 0 < t_1 < ... < t_m < horizon.
  void validate(double horizon) const;

 private:
  std::vector<double> times_;
  JumpRule jump_;
};

enum class Quadrature { ProductRectangle, ProductTrapezoid };

struct SolverConfig {
  int steps_per_unit_time = 100;
  int corrector_iterations = 2;
  Quadrature quadrature = Quadrature::ProductTrapezoid;

  /// Throws InvalidArgument unless steps_per_unit_time >= 10 and
  /// corrector_iterations >= 1.
  void validate() const;
};

enum class Side { Left, Right };

class Trajectory {
 public:
  std::size_t dimension() const noexcept { return dim_; }
  std::size_t node_count() const noexcept { return times_.size(); }
  double horizon() const noexcept { return times_.back(); }

  const std::vector<double>& times() const noexcept { return times_; }
  std::span<const double> left(std::size_t node) const;
  std::span<const double> right(std::size_t node) const;
  bool is_impulse(std::size_t node) const { return impulse_[node] != 0; }
  /// Segment of the right limit at `node`: the number of impulses at or
  /// before it. A left limit at an impulse node belongs to segment - 1.
  std::size_t segment(std::size_t node) const { return segment_[node]; }

  /// Node index of each impulse, in order.
  const std::vector<std::size_t>& impulse_nodes() const noexcept { return impulse_nodes_; }
  /// Recorded jump at impulse k; equals right - left at that node exactly.
  std::span<const double> jump(std::size_t k) const;
  /// Accumulated sum of jumps in effect on segment s (s = 0 is all zeros).
  std::span<const double> jump_log(std::size_t segment) const;

  /// State at time t. At grid nodes returns the requested one-sided limit,
  /// between nodes linear interpolation. Throws OutOfRange outside [0, T].
  Vector sample(double t, Side side = Side::Right) const;

 private:
  friend Trajectory integrate(const Rhs&, double, std::span<const double>, double,
                              const ImpulseSchedule&, const SolverConfig&,
                              const simd::KernelTable*);

  std::size_t dim_ = 0;
  std::vector<double> times_;
  std::vector<double> left_;   // node-major, dim_ per node
  std::vector<double> right_;
  std::vector<char> impulse_;
  std::vector<std::size_t> segment_;
  std::vector<std::size_t> impulse_nodes_;
  std::vector<double> jumps_;     // dim_ per impulse
  std::vector<double> jump_log_;  // dim_ per segment
};

/// Time grid used by integrate(): T/N spacing with N = ceil(T * steps), each
/// impulse time replacing its nearest interior node (or inserted when that
/// node is already taken or is an endpoint).
struct Grid {
  std::vector<double> times;
  std::vector<char> impulse;
  bool uniform;  // spacing T/N everywhere within 1e-12 T
};
Grid build_grid(double horizon, const std::vector<double>& impulse_times, int steps_per_unit_time);

/// Integrate on [0, T]. Throws NonFiniteState on blow-up, ScheduleError for a
/// bad schedule, InvalidArgument for alpha outside (0, 1) or bad inputs.
/// `kernels` overrides the process-wide SIMD selection (tests use this).
Trajectory integrate(const Rhs& rhs, double alpha, std::span<const double> x0, double horizon,
                     const ImpulseSchedule& impulses, const SolverConfig& cfg,
                     const simd::KernelTable* kernels = nullptr);

}  // namespace fpnni::fode
