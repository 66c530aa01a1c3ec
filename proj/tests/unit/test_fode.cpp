#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "fpnni/error.hpp"
#include "fpnni/fode.hpp"
#include "fpnni/mlf.hpp"
#include "oracles.hpp"

using namespace fpnni;
using namespace fpnni::fode;

namespace {

Rhs linear(double lambda) {
  return [lambda](double, std::span<const double> x, std::span<double> out) {
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = -lambda * x[i];
  };
}

double max_rel_error(const Trajectory& tr, double alpha, double lambda) {
  double worst = 0.0;
  for (std::size_t i = 1; i < tr.node_count(); ++i) {
    const double t = tr.times()[i];
    const double exact = mlf::mittag_leffler(alpha, -lambda * std::pow(t, alpha));
    worst = std::max(worst, std::abs(tr.left(i)[0] - exact) / std::abs(exact));
  }
  return worst;
}

JumpRule shrink(double s) {
  return [s](std::size_t, std::span<const double> x) {
    std::vector<double> u(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) u[i] = -s * x[i];
    return u;
  };
}

}  // namespace

TEST_CASE("linear relaxation matches x0 E_a(-lambda t^a)") {
  for (double alpha : {0.7, 0.9}) {
    CAPTURE(alpha);
    SolverConfig cfg;
    cfg.steps_per_unit_time = 400;  // 2000 steps on [0, 5]
    const auto coarse = integrate(linear(0.5), alpha, std::vector<double>{1.0}, 5.0, {}, cfg);
    CHECK(coarse.node_count() == 2001);
    const double e1 = max_rel_error(coarse, alpha, 0.5);
    CHECK(e1 <= 1e-3);
    cfg.steps_per_unit_time = 800;
    const double e2 = max_rel_error(integrate(linear(0.5), alpha, std::vector<double>{1.0}, 5.0, {}, cfg), alpha, 0.5);
    CHECK(e1 / e2 >= 1.5);
  }
}

TEST_CASE("rectangle-only quadrature still converges") {
  SolverConfig cfg;
  cfg.quadrature = Quadrature::ProductRectangle;
  cfg.steps_per_unit_time = 200;
  const double e1 = max_rel_error(integrate(linear(0.5), 0.8, std::vector<double>{1.0}, 2.0, {}, cfg), 0.8, 0.5);
  cfg.steps_per_unit_time = 400;
  const double e2 = max_rel_error(integrate(linear(0.5), 0.8, std::vector<double>{1.0}, 2.0, {}, cfg), 0.8, 0.5);
  CHECK(e1 < 0.05);
  CHECK(e1 / e2 >= 1.5);
}

TEST_CASE("alpha near one approaches the classical solution") {
  SolverConfig cfg;
  cfg.steps_per_unit_time = 200;
  const auto tr = integrate(linear(0.5), 0.999, std::vector<double>{1.0}, 5.0, {}, cfg);
  const double h = 5.0 / static_cast<double>(tr.node_count() - 1);
  const auto ref = oracle::rk4([](double x) { return -0.5 * x; }, 1.0, h, static_cast<int>(tr.node_count() - 1));
  double worst = 0.0;
  for (std::size_t i = 0; i < tr.node_count(); ++i) worst = std::max(worst, std::abs(tr.left(i)[0] - ref[i]));
  CHECK(worst <= 5e-3);
}

TEST_CASE("a state with zero right-hand side and zero jumps stays put") {
  const auto rhs = [](double, std::span<const double> x, std::span<double> out) {
    out[0] = -(x[0] - 0.5);
    out[1] = -(x[1] - 1.5);
  };
  const ImpulseSchedule imp = ImpulseSchedule::uniform(3, 4.0, [](std::size_t, std::span<const double> x) {
    return std::vector<double>{-0.5 * (x[0] - 0.5), -0.25 * (x[1] - 1.5)};
  });
  const auto tr = integrate(rhs, 0.9, std::vector<double>{0.5, 1.5}, 4.0, imp, {});
  for (std::size_t i = 0; i < tr.node_count(); ++i) {
    CHECK(tr.left(i)[0] == 0.5);
    CHECK(tr.right(i)[1] == 1.5);
  }
}

TEST_CASE("impulses: jump identity, segments, sampling") {
  const ImpulseSchedule imp({0.5, 1.234567, 2.0}, shrink(0.3));
  SolverConfig cfg;
  cfg.steps_per_unit_time = 100;
  const std::vector<double> x0{2.0, -1.0};
  const auto tr = integrate(linear(0.4), 0.8, x0, 3.0, imp, cfg);

  REQUIRE(tr.impulse_nodes().size() == 3);
  for (std::size_t k = 0; k < 3; ++k) {
    const std::size_t node = tr.impulse_nodes()[k];
    CHECK(tr.times()[node] == imp.times()[k]);
    CHECK(tr.is_impulse(node));
    CHECK(tr.segment(node) == k + 1);
    const auto left = tr.left(node);
    const auto right = tr.right(node);
    const auto rec = tr.jump(k);
    const auto u = imp.jump(k, left);
    for (std::size_t c = 0; c < 2; ++c) {
      CHECK(right[c] - left[c] == rec[c]);
      CHECK(std::abs(rec[c] - u[c]) <= 4 * std::numeric_limits<double>::epsilon() * std::abs(left[c]));
    }
    const auto l = tr.sample(imp.times()[k], Side::Left);
    const auto r = tr.sample(imp.times()[k], Side::Right);
    CHECK(l[0] == left[0]);
    CHECK(r[0] == right[0]);
  }
  // Cumulative jump log.
  for (std::size_t c = 0; c < 2; ++c) {
    CHECK(tr.jump_log(0)[c] == 0.0);
    CHECK(tr.jump_log(3)[c] == doctest::Approx(tr.jump(0)[c] + tr.jump(1)[c] + tr.jump(2)[c]));
  }

  CHECK(tr.sample(0.0)[0] == 2.0);
  const double tm = 0.5 * (tr.times()[10] + tr.times()[11]);
  const auto mid = tr.sample(tm);
  CHECK(mid[0] == doctest::Approx(0.5 * (tr.right(10)[0] + tr.left(11)[0])));
  CHECK_THROWS_AS(tr.sample(-0.1), OutOfRange);
  CHECK_THROWS_AS(tr.sample(3.1), OutOfRange);
  CHECK_THROWS_AS(tr.jump(3), OutOfRange);
  for (std::size_t i = 0; i < tr.node_count(); ++i) {
    CHECK(linalg::all_finite(tr.left(i)));
  }
}

TEST_CASE("grid construction") {
  SUBCASE("uniform without impulses") {
    const auto g = build_grid(2.0, {}, 50);
    CHECK(g.times.size() == 101);
    CHECK(g.uniform);
    CHECK(g.times.back() == 2.0);
  }
  SUBCASE("impulses on grid points keep the grid uniform") {
    const auto g = build_grid(2.0, {0.5, 1.0}, 50);
    CHECK(g.times.size() == 101);
    CHECK(g.uniform);
    CHECK(std::count(g.impulse.begin(), g.impulse.end(), 1) == 2);
  }
  SUBCASE("off-grid impulses replace the nearest node") {
    const std::vector<double> imp{0.513, 0.5271, 1.9999};
    const auto g = build_grid(2.0, imp, 50);
    CHECK_FALSE(g.uniform);
    for (double t : imp) CHECK(std::find(g.times.begin(), g.times.end(), t) != g.times.end());
    CHECK(std::is_sorted(g.times.begin(), g.times.end()));
    for (std::size_t i = 1; i < g.times.size(); ++i) CHECK(g.times[i] > g.times[i - 1]);
  }
}

TEST_CASE("schedule validation") {
  const auto x0 = std::vector<double>{1.0};
  CHECK_THROWS_AS(integrate(linear(1), 0.5, x0, 1.0, ImpulseSchedule({0.0}, shrink(0.1)), {}), ScheduleError);
  CHECK_THROWS_AS(integrate(linear(1), 0.5, x0, 1.0, ImpulseSchedule({1.0}, shrink(0.1)), {}), ScheduleError);
  CHECK_THROWS_AS(integrate(linear(1), 0.5, x0, 1.0, ImpulseSchedule({0.6, 0.3}, shrink(0.1)), {}), ScheduleError);
  CHECK_THROWS_AS(integrate(linear(1), 0.5, x0, 1.0, ImpulseSchedule({0.3, 0.3}, shrink(0.1)), {}), ScheduleError);
  CHECK_THROWS_AS(ImpulseSchedule({0.3}, nullptr), InvalidArgument);
  const auto u = ImpulseSchedule::uniform(3, 2.0, shrink(0.1));
  CHECK(u.times() == std::vector<double>{0.5, 1.0, 1.5});
}

TEST_CASE("argument validation") {
  const auto x0 = std::vector<double>{1.0};
  CHECK_THROWS_AS(integrate(linear(1), 1.0, x0, 1.0, {}, {}), InvalidArgument);
  CHECK_THROWS_AS(integrate(linear(1), 0.0, x0, 1.0, {}, {}), InvalidArgument);
  CHECK_THROWS_AS(integrate(linear(1), 0.5, x0, 0.0, {}, {}), InvalidArgument);
  CHECK_THROWS_AS(integrate(linear(1), 0.5, std::vector<double>{NAN}, 1.0, {}, {}), InvalidArgument);
  SolverConfig bad;
  bad.steps_per_unit_time = 5;
  CHECK_THROWS_AS(integrate(linear(1), 0.5, x0, 1.0, {}, bad), InvalidArgument);
  bad = {};
  bad.corrector_iterations = 0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}

TEST_CASE("blow-up is reported with its time") {
  const auto rhs = [](double, std::span<const double> x, std::span<double> out) { out[0] = x[0] * x[0] * x[0]; };
  try {
    integrate(rhs, 0.9, std::vector<double>{10.0}, 5.0, {}, {});
    FAIL("expected NonFiniteState");
  } catch (const NonFiniteState& e) {
    CHECK(e.time() > 0.0);
    CHECK(e.time() <= 5.0);
  }
}

TEST_CASE("determinism") {
  const ImpulseSchedule imp({0.77, 1.5}, shrink(0.2));
  const auto a = integrate(linear(0.3), 0.6, std::vector<double>{1.0, 2.0}, 2.5, imp, {});
  const auto b = integrate(linear(0.3), 0.6, std::vector<double>{1.0, 2.0}, 2.5, imp, {});
  REQUIRE(a.node_count() == b.node_count());
  for (std::size_t i = 0; i < a.node_count(); ++i) {
    for (std::size_t c = 0; c < 2; ++c) {
      CHECK(a.left(i)[c] == b.left(i)[c]);
      CHECK(a.right(i)[c] == b.right(i)[c]);
    }
  }
}
