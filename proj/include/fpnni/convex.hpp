#pragma once

// Closed convex sets K with their Euclidean projections P_K.

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "fpnni/linalg.hpp"

namespace fpnni::convex {

using linalg::Vector;

struct Box {
  Vector lower;
  Vector upper;
};

struct Ball {
  Vector center;
  double radius;
};

/// { x : normal^T x <= offset } with a unit normal.
struct Halfspace {
  Vector normal;
  double offset;
};

/// Intersection of halfspaces. `interior` strictly satisfies every
/// constraint, which certifies that the set is nonempty.
struct PolyIntersection {
  std::vector<Halfspace> halfspaces;
  Vector interior;
};

inline constexpr int kDykstraSweeps = 10'000;
inline constexpr double kDykstraStep = 1e-12;
inline constexpr double kDykstraResidual = 1e-10;

class ConvexSet {
 public:
  using Shape = std::variant<Box, Ball, Halfspace, PolyIntersection>;

  // Factories validate the invariants and throw InvalidArgument on failure.
  static ConvexSet box(Vector lower, Vector upper);
  /// [lo, hi]^n
  static ConvexSet cube(std::size_t n, double lo, double hi);
  static ConvexSet ball(Vector center, double radius);
  /// The normal is required to be unit length within 1e-12.
  static ConvexSet halfspace(Vector normal, double offset);
  /// Each normal is normalized here (offset scaled to match).
  static ConvexSet polyhedron(std::vector<Halfspace> halfspaces, Vector interior);

  std::size_t dimension() const noexcept { return dim_; }
  const Shape& shape() const noexcept { return shape_; }
  std::string kind() const;

  /// P_K(y) = argmin_{z in K} ||y - z||. Closed form except for
  /// PolyIntersection, which runs Dykstra's alternating projections and may
  /// throw NoConvergence.
  Vector project(std::span<const double> y) const;

  /// Largest constraint violation at x (<= 0 inside).
  double violation(std::span<const double> x) const;

  bool contains(std::span<const double> x, double tol) const;

 private:
  ConvexSet(Shape shape, std::size_t dim) : shape_(std::move(shape)), dim_(dim) {}
  void require_dim(std::span<const double> x) const;

  Shape shape_;
  std::size_t dim_;
};

}  // namespace fpnni::convex
