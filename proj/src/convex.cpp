#include "fpnni/convex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fpnni/error.hpp"

namespace fpnni::convex {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_finite(std::span<const double> v, const char* what) {
  if (!linalg::all_finite(v)) throw InvalidArgument(std::string(what) + ": entries must be finite");
}

double halfspace_violation(const Halfspace& h, std::span<const double> x) {
  return linalg::dot(h.normal, x) - h.offset;
}

void project_halfspace_inplace(const Halfspace& h, std::span<double> x) {
  const double excess = halfspace_violation(h, x);
  if (excess <= 0.0) return;
  for (std::size_t i = 0; i < x.size(); ++i) x[i] -= excess * h.normal[i];
}

Vector dykstra(const PolyIntersection& p, std::span<const double> y) {
  const std::size_t m = p.halfspaces.size();
  const std::size_t n = y.size();
  Vector x(y.begin(), y.end());
  std::vector<Vector> increments(m, Vector(n, 0.0));
  Vector previous(n);
  Vector shifted(n);

  double max_violation = 0.0;
  for (int sweep = 0; sweep < kDykstraSweeps; ++sweep) {
    previous = x;
    for (std::size_t k = 0; k < m; ++k) {
      for (std::size_t i = 0; i < n; ++i) shifted[i] = x[i] + increments[k][i];
      x = shifted;
      project_halfspace_inplace(p.halfspaces[k], x);
      for (std::size_t i = 0; i < n; ++i) increments[k][i] = shifted[i] - x[i];
    }
    max_violation = 0.0;
    for (const auto& h : p.halfspaces) {
      max_violation = std::max(max_violation, halfspace_violation(h, x));
    }
    const double step = linalg::norm2(linalg::sub(x, previous));
    if (step <= kDykstraStep && max_violation <= kDykstraResidual) return x;
  }
  throw NoConvergence("Dykstra projection did not converge within the sweep budget",
                      max_violation);
}

}  // namespace

ConvexSet ConvexSet::box(Vector lower, Vector upper) {
  if (lower.empty()) throw InvalidArgument("box: bounds must be nonempty");
  if (lower.size() != upper.size()) throw DimensionMismatch("box: bounds must have equal length");
  require_finite(lower, "box lower");
  require_finite(upper, "box upper");
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (lower[i] > upper[i]) throw InvalidArgument("box: lower > upper in component " + std::to_string(i));
  }
  const std::size_t n = lower.size();
  return ConvexSet(Box{std::move(lower), std::move(upper)}, n);
}

ConvexSet ConvexSet::cube(std::size_t n, double lo, double hi) {
  return box(Vector(n, lo), Vector(n, hi));
}

ConvexSet ConvexSet::ball(Vector center, double radius) {
  if (center.empty()) throw InvalidArgument("ball: empty center");
  require_finite(center, "ball center");
  if (!(radius > 0.0) || !std::isfinite(radius)) throw InvalidArgument("ball: radius must be > 0");
  const std::size_t n = center.size();
  return ConvexSet(Ball{std::move(center), radius}, n);
}

ConvexSet ConvexSet::halfspace(Vector normal, double offset) {
  if (normal.empty()) throw InvalidArgument("halfspace: empty normal");
  require_finite(normal, "halfspace normal");
  if (!std::isfinite(offset)) throw InvalidArgument("halfspace: offset must be finite");
  if (std::abs(linalg::norm2(normal) - 1.0) > 1e-12) {
    throw InvalidArgument("halfspace: normal must have unit length");
  }
  const std::size_t n = normal.size();
  return ConvexSet(Halfspace{std::move(normal), offset}, n);
}

ConvexSet ConvexSet::polyhedron(std::vector<Halfspace> halfspaces, Vector interior) {
  if (halfspaces.empty()) throw InvalidArgument("polyhedron: needs at least one halfspace");
  const std::size_t n = interior.size();
  if (n == 0) throw InvalidArgument("polyhedron: empty interior point");
  require_finite(interior, "polyhedron interior point");
  for (auto& h : halfspaces) {
    if (h.normal.size() != n) throw DimensionMismatch("polyhedron: halfspace dimension mismatch");
    require_finite(h.normal, "polyhedron normal");
    const double len = linalg::norm2(h.normal);
    if (!(len > 0.0) || !std::isfinite(h.offset)) {
      throw InvalidArgument("polyhedron: degenerate halfspace");
    }
    for (double& v : h.normal) v /= len;
    h.offset /= len;
    if (!(halfspace_violation(h, interior) < 0.0)) {
      throw InvalidArgument("polyhedron: interior point does not strictly satisfy every constraint");
    }
  }
  return ConvexSet(PolyIntersection{std::move(halfspaces), std::move(interior)}, n);
}

std::string ConvexSet::kind() const {
  return std::visit(Overloaded{[](const Box&) { return std::string("box"); },
                               [](const Ball&) { return std::string("ball"); },
                               [](const Halfspace&) { return std::string("halfspace"); },
                               [](const PolyIntersection&) { return std::string("polyhedron"); }},
                    shape_);
}

void ConvexSet::require_dim(std::span<const double> x) const {
  if (x.size() != dim_) {
    throw DimensionMismatch("convex set of dimension " + std::to_string(dim_) +
                            " given a vector of length " + std::to_string(x.size()));
  }
}

Vector ConvexSet::project(std::span<const double> y) const {
  require_dim(y);
  return std::visit(
      Overloaded{
          [&](const Box& b) {
            Vector out(y.begin(), y.end());
            for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::clamp(out[i], b.lower[i], b.upper[i]);
            return out;
          },
          [&](const Ball& b) {
            Vector d = linalg::sub(y, b.center);
            const double dist = linalg::norm2(d);
            if (dist <= b.radius) return Vector(y.begin(), y.end());
            const double s = b.radius / dist;
            for (std::size_t i = 0; i < d.size(); ++i) d[i] = b.center[i] + s * d[i];
            return d;
          },
          [&](const Halfspace& h) {
            Vector out(y.begin(), y.end());
            project_halfspace_inplace(h, out);
            return out;
          },
          [&](const PolyIntersection& p) {
            if (violation(y) <= 0.0) return Vector(y.begin(), y.end());
            return dykstra(p, y);
          }},
      shape_);
}

double ConvexSet::violation(std::span<const double> x) const {
  require_dim(x);
  return std::visit(
      Overloaded{
          [&](const Box& b) {
            double v = -std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < x.size(); ++i) {
              v = std::max({v, b.lower[i] - x[i], x[i] - b.upper[i]});
            }
            return v;
          },
          [&](const Ball& b) { return linalg::norm2(linalg::sub(x, b.center)) - b.radius; },
          [&](const Halfspace& h) { return halfspace_violation(h, x); },
          [&](const PolyIntersection& p) {
            double v = -std::numeric_limits<double>::infinity();
            for (const auto& h : p.halfspaces) v = std::max(v, halfspace_violation(h, x));
            return v;
          }},
      shape_);
}

bool ConvexSet::contains(std::span<const double> x, double tol) const {
  return violation(x) <= tol;
}

}  // namespace fpnni::convex
