#include <doctest.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "fpnni/convex.hpp"
#include "fpnni/error.hpp"
#include "oracles.hpp"

using namespace fpnni;
using namespace fpnni::convex;
using linalg::norm2;
using linalg::sub;

namespace {

std::vector<std::pair<std::string, ConvexSet>> variants() {
  const double s = 1.0 / std::sqrt(2.0);
  return {
      {"box", ConvexSet::box({-2, -1, 0}, {2, 1, 3})},
      {"ball", ConvexSet::ball({1, -1, 0.5}, 1.5)},
      {"halfspace", ConvexSet::halfspace({s, s, 0}, 0.3)},
      {"polyhedron", ConvexSet::polyhedron({{{1, 0, 0}, 1},
                                            {{0, 1, 0}, 1},
                                            {{-1, -1, 0}, 0.5},
                                            {{1, 1, 1}, 2},
                                            {{0, 0, -1}, 1}},
                                           {0, 0, 0})},
  };
}

}  // namespace

TEST_CASE("projection examples") {
  const auto box2 = ConvexSet::cube(2, -2, 2);
  const auto p = box2.project(std::vector<double>{0.5, 1.5});
  CHECK(p[0] == 0.5);
  CHECK(p[1] == 1.5);
  const auto q = ConvexSet::cube(2, -1, 1).project(std::vector<double>{3, -0.2});
  CHECK(q[0] == 1.0);
  CHECK(q[1] == -0.2);
  const auto r = ConvexSet::ball({0, 0}, 1).project(std::vector<double>{3, 4});
  CHECK(r[0] == doctest::Approx(0.6));
  CHECK(r[1] == doctest::Approx(0.8));
  const auto h = ConvexSet::halfspace({0, 1}, 1).project(std::vector<double>{5, 3});
  CHECK(h[0] == 5.0);
  CHECK(h[1] == doctest::Approx(1.0));
  // Dykstra on the unit square written as four halfspaces matches the clamp.
  const auto square = ConvexSet::polyhedron({{{1, 0}, 1}, {{-1, 0}, 1}, {{0, 1}, 1}, {{0, -1}, 1}}, {0, 0});
  const auto d = square.project(std::vector<double>{3, -0.2});
  CHECK(d[0] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(d[1] == doctest::Approx(-0.2).epsilon(1e-9));
}

TEST_CASE("contains") {
  CHECK(ConvexSet::cube(2, -2, 2).contains(std::vector<double>{0, 0}, 0.0));
  CHECK(ConvexSet::cube(2, -1, 1).contains(std::vector<double>{-0.3, -0.4}, 0.0));
  CHECK_FALSE(ConvexSet::ball({0, 0}, 1).contains(std::vector<double>{2, 0}, 1e-9));
  CHECK(ConvexSet::ball({0, 0}, 1).contains(std::vector<double>{1 + 1e-12, 0}, 1e-9));
  CHECK(ConvexSet::cube(2, -1, 1).violation(std::vector<double>{1.5, 0}) == doctest::Approx(0.5));
}

TEST_CASE("construction invariants") {
  CHECK_THROWS_AS(ConvexSet::box({0, 1}, {1, 0}), InvalidArgument);
  CHECK_THROWS_AS(ConvexSet::box({0}, {1, 2}), DimensionMismatch);
  CHECK_THROWS_AS(ConvexSet::ball({0, 0}, 0.0), InvalidArgument);
  CHECK_THROWS_AS(ConvexSet::halfspace({1, 1}, 0.0), InvalidArgument);
  CHECK_THROWS_AS(ConvexSet::polyhedron({{{1, 0}, 0}}, {0, 0}), InvalidArgument);  // interior on the boundary
  CHECK_THROWS_AS(ConvexSet::polyhedron({}, {0, 0}), InvalidArgument);
  CHECK_THROWS_AS(ConvexSet::cube(2, -1, 1).project(std::vector<double>{1, 2, 3}), DimensionMismatch);
  // Normals are normalized with the offset.
  const auto p = ConvexSet::polyhedron({{{3, 4}, 5}}, {0, 0});
  const auto& hs = std::get<PolyIntersection>(p.shape()).halfspaces[0];
  CHECK(hs.normal[0] == doctest::Approx(0.6));
  CHECK(hs.offset == doctest::Approx(1.0));
  CHECK(p.kind() == "polyhedron");
}

TEST_CASE("projection properties over 1000 random pairs per set") {
  std::mt19937_64 rng(2024);
  for (const auto& [name, k] : variants()) {
    CAPTURE(name);
    const std::size_t n = k.dimension();
    int failures = 0;
    for (int i = 0; i < 1000; ++i) {
      const auto u = oracle::random_vector(rng, n, -6, 6);
      const auto v = oracle::random_vector(rng, n, -6, 6);
      const auto pu = k.project(u);
      const auto pv = k.project(v);
      // non-expansive
      if (!(norm2(sub(pu, pv)) <= norm2(sub(u, v)) + 1e-12)) ++failures;
      // idempotent
      if (!(norm2(sub(k.project(pu), pu)) <= 1e-12 * std::max(1.0, norm2(pu)) + 1e-12)) ++failures;
      // lands in K
      if (!k.contains(pu, 1e-9)) ++failures;
    }
    CHECK(failures == 0);
  }
}

TEST_CASE("fixed points and the variational inequality") {
  std::mt19937_64 rng(99);
  for (const auto& [name, k] : variants()) {
    CAPTURE(name);
    const std::size_t n = k.dimension();
    std::vector<std::vector<double>> inside;
    for (int i = 0; i < 100; ++i) inside.push_back(k.project(oracle::random_vector(rng, n, -4, 4)));
    for (const auto& x : inside) CHECK(norm2(sub(k.project(x), x)) <= 1e-12 * std::max(1.0, norm2(x)) + 1e-12);
    double worst = -1.0;
    for (int i = 0; i < 50; ++i) {
      const auto y = oracle::random_vector(rng, n, -8, 8);
      const auto py = k.project(y);
      const auto r = sub(y, py);
      for (const auto& z : inside) worst = std::max(worst, linalg::dot(r, sub(z, py)));
    }
    CHECK(worst <= 1e-10);
  }
}
