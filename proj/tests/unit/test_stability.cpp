#include <doctest.h>

#include <cmath>
#include <random>

#include "fpnni/error.hpp"
#include "fpnni/mlf.hpp"
#include "fpnni/stability.hpp"
#include "oracles.hpp"

using namespace fpnni;
using namespace fpnni::stability;
using convex::ConvexSet;
using model::SigmaForm;

namespace {

FpnniSystem ex51(std::vector<double> times = {}) {
  return FpnniSystem(0.9, Matrix{{7, -3}, {-4, 2}}, {1, -1}, 0.1, ConvexSet::cube(2, -2, 2), std::move(times),
                     SigmaForm{Matrix{{0.5, 0}, {0, 0.25}}, Vector{0.5, 1.5}});
}

FpnniSystem ex52(std::vector<double> times = {0.5, 1.0}) {
  return FpnniSystem(0.7, Matrix{{6, -2}, {-4, 3}}, {1, 0}, 0.1, ConvexSet::cube(2, -1, 1), std::move(times),
                     SigmaForm{0.3 * Matrix::identity(2), Vector{-0.3, -0.4}});
}

FpnniSystem with_sigma(const FpnniSystem& s, Matrix sigma) {
  return FpnniSystem(s.alpha(), s.a(), s.b(), s.rho(), s.set(), s.impulse_times(), SigmaForm{std::move(sigma), s.anchor()});
}

const Matrix kFeasibleQ{{0.5911, 0.1035}, {0.1035, 0.6515}};

double spectral_norm_2x2(const Matrix& m) {
  const Matrix g = m.transpose() * m;
  return std::sqrt(oracle::eig2(g(0, 0), g(0, 1), g(1, 1)).second);
}

}  // namespace

TEST_CASE("margins") {
  CHECK(Margin{"a", 1.0 - 1e-15, Relation::Less, 1.0}.satisfied());
  CHECK_FALSE(Margin{"a", 1.0, Relation::Less, 1.0}.satisfied());
  CHECK(Margin{"a", 1e-12, Relation::LessEqual, 0.0, 1e-10}.satisfied());
  CHECK_FALSE(Margin{"a", 1e-9, Relation::LessEqual, 0.0, 1e-10}.satisfied());
  CHECK_FALSE(Margin{"a", 1e-12, Relation::Greater, 0.0, 1e-10}.satisfied());
  CHECK(Margin{"a", 0.5, Relation::Less, 1.0}.slack() == doctest::Approx(0.5));
  CHECK(Margin{"a", 2.0, Relation::Greater, 1.0}.slack() == doctest::Approx(1.0));
}

TEST_CASE("existence") {
  const auto s = ex51();
  const auto bounds = model::sigma_bounds(s, 10.0);
  const auto fail = check_existence(s, 2.5, bounds, 0);
  CHECK_FALSE(fail.pass);
  // (1 + ||I - 0.1 A||) 2.5^0.9 / Gamma(1.9)
  const double expect = (1.0 + spectral_norm_2x2(s.iteration_matrix())) * std::pow(2.5, 0.9) / std::tgamma(1.9);
  CHECK(fail.margin("contraction_lhs").value == doctest::Approx(expect).epsilon(1e-12));
  CHECK(fail.margin("contraction_lhs").value == doctest::Approx(4.70).epsilon(1e-3));
  CHECK(spectral_norm_2x2(s.iteration_matrix()) == doctest::Approx(0.98239).epsilon(1e-5));

  const auto pass = check_existence(s, 0.1, bounds, 0);
  CHECK(pass.pass);
  CHECK(pass.margin("contraction_lhs").value < 1.0);
  CHECK_THROWS_AS(check_existence(s, 0.0, bounds, 0), InvalidArgument);
}

TEST_CASE("uniqueness") {
  const auto s = ex52();
  const auto r = check_uniqueness(s, 1.5, 0.3, 2);
  const double expect = 2 * 0.3 + (1.0 + spectral_norm_2x2(s.iteration_matrix())) * std::pow(1.5, 0.7) / std::tgamma(1.7);
  CHECK(r.margin("kappa2").value == doctest::Approx(expect).epsilon(1e-12));
  CHECK(r.margin("kappa2").value == doctest::Approx(3.3692).epsilon(1e-4));
  CHECK_FALSE(r.pass);
  CHECK(check_uniqueness(s, 0.01, 0.0, 0).pass);
  CHECK_THROWS_AS(check_uniqueness(s, 1.0, -1.0, 0), InvalidArgument);
}

TEST_CASE("eigenvalue certificate, first example") {
  const auto r = check_thm41(ex51({5.0, 10.0, 15.0}), Matrix::identity(2), {});
  CHECK(r.pass);
  CHECK(r.margin("lambda_min_S1").value == doctest::Approx(0.0349).epsilon(5e-4 / 0.0349));
  const Matrix& s2 = r.matrix("S2");
  CHECK(std::abs(s2(0, 0) + 0.75) <= 1e-12);
  CHECK(std::abs(s2(1, 1) + 0.4375) <= 1e-12);
  CHECK(s2(0, 1) == 0.0);
  REQUIRE(r.decay_rate);
  CHECK(*r.decay_rate == r.margin("lambda_min_S1").value);

  // Closed form: with Q = I and rho1 = 1, S1 = I - M^T M.
  const Matrix m = ex51().iteration_matrix();
  const Matrix g = m.transpose() * m;
  const auto ev = oracle::eig2(1 - g(0, 0), -g(0, 1), 1 - g(1, 1));
  CHECK(r.margin("lambda_min_S1").value == doctest::Approx(ev.first).epsilon(1e-12));
}

TEST_CASE("eigenvalue certificate with Q = I, rho1 = 1 reduces to I - M^T M") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 50; ++i) {
    const Matrix a = oracle::random_matrix(rng, 3, 3, 2.0);
    const FpnniSystem s(0.5, a, {0, 0, 0}, 0.3, ConvexSet::ball({0, 0, 0}, 5), {},
                        SigmaForm{Matrix(3, 3), std::nullopt});
    const auto r = check_thm41(s, Matrix::identity(3), {});
    const Matrix m = s.iteration_matrix();
    const Matrix expect = Matrix::identity(3) - m.transpose() * m;
    const Matrix& s1 = r.matrix("S1");
    for (std::size_t p = 0; p < 3; ++p)
      for (std::size_t q = 0; q < 3; ++q) CHECK(s1(p, q) == doctest::Approx(expect(p, q)).epsilon(1e-12).scale(1));
    CHECK(r.pass == (r.margin("lambda_min_S1").value > 0.0));
    CHECK(r.decay_rate.has_value() == r.pass);
  }
}

TEST_CASE("eigenvalue certificate boundaries") {
  // sigma = 0 and eta1 = 1 put S2 exactly on the boundary.
  const auto r = check_thm41(with_sigma(ex51({1.0}), Matrix(2, 2)), Matrix::identity(2), {});
  CHECK(r.margin("lambda_max_S2").value == doctest::Approx(0.0).scale(1e-15));
  CHECK(r.pass);
  const auto f = check_thm41(with_sigma(ex51({1.0}), Matrix(2, 2)), Matrix::identity(2), {1.0, 0.5});
  CHECK_FALSE(f.pass);
  CHECK_FALSE(f.decay_rate);
  CHECK_THROWS_AS(check_thm41(ex51(), Matrix{{1, 2}, {2, 1}}, {}), NotPositiveDefinite);
  CHECK_THROWS_AS(check_thm41(ex51(), Matrix::identity(2), {1.0, 1.5}), InvalidArgument);
}

TEST_CASE("LMI certificate, second example") {
  const auto r = check_thm42(ex52(), kFeasibleQ, {});
  CHECK(r.pass);
  CHECK(r.margin("lambda_max_S45").value < 0.0);
  CHECK(r.margin("lambda_max_S46").value < 0.0);
  CHECK(r.margin("lambda_max_schur").value < 0.0);
  REQUIRE(r.decay_rate);
  CHECK(*r.decay_rate == 0.1);
  for (const char* name : {"S45", "S46"}) {
    const Matrix& s = r.matrix(name);
    CHECK(s(0, 0) + s(1, 1) < 0.0);
    CHECK(s(0, 0) * s(1, 1) - s(0, 1) * s(1, 0) > 0.0);
  }
  // S46 = ((1 - 0.3)^2 - 1) Q
  const Matrix& s46 = r.matrix("S46");
  CHECK(s46(0, 1) == doctest::Approx(-0.51 * 0.1035));
}

TEST_CASE("Schur-complement form agrees with the direct form") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    const Matrix b = oracle::random_matrix(rng, 2, 2, 1.0);
    const Matrix q = b.transpose() * b + 0.05 * Matrix::identity(2);
    const auto r = check_thm42(ex52(), q, {});
    CHECK(r.margin("lambda_max_S45").satisfied() == r.margin("lambda_max_schur").satisfied());
  }
}

TEST_CASE("LMI certificate scales with Q and rho2") {
  const auto base = check_thm42(ex52(), kFeasibleQ, {});
  for (double c : {0.1, 10.0}) {
    ScalarParams p;
    p.rho2 = c;
    const auto r = check_thm42(ex52(), c * kFeasibleQ, p);
    CHECK(r.pass == base.pass);
    CHECK(r.margin("lambda_max_S45").value == doctest::Approx(c * base.margin("lambda_max_S45").value));
    CHECK(r.margin("lambda_max_S46").value == doctest::Approx(c * base.margin("lambda_max_S46").value));
  }
}

TEST_CASE("LMI certificate boundary") {
  const auto r = check_thm42(with_sigma(ex52(), Matrix(2, 2)), kFeasibleQ, {});
  CHECK(r.margin("lambda_max_S46").value == 0.0);
  CHECK(r.margin("lambda_max_S46").satisfied());
}

TEST_CASE("Q search") {
  SUBCASE("second example") {
    const auto res = search_q(ex52(), {}, 2000);
    REQUIRE(res);
    CHECK(res->report.pass);
    CHECK(res->evaluations >= 1);
    CHECK(check_thm42(ex52(), res->q, {}).pass);
  }
  SUBCASE("rho A = I makes M vanish") {
    const FpnniSystem s(0.5, 10.0 * Matrix::identity(2), {0, 0}, 0.1, ConvexSet::cube(2, -1, 1), {0.5},
                        SigmaForm{0.5 * Matrix::identity(2), Vector{0, 0}});
    const auto res = search_q(s, {}, 100);
    REQUIRE(res);
    CHECK(res->report.pass);
  }
  SUBCASE("sigma = I") {
    const auto res = search_q(with_sigma(ex52(), Matrix::identity(2)), {}, 2000);
    REQUIRE(res);
    CHECK(res->report.pass);
  }
  SUBCASE("an infeasible system returns nothing and respects the budget") {
    // ||M|| > 1 so -2Q + Q^2 + M^T M <= 0 has no solution with rho2 = 1.
    const FpnniSystem s(0.5, -10.0 * Matrix::identity(2), {0, 0}, 0.1, ConvexSet::cube(2, -1, 1), {},
                        SigmaForm{Matrix(2, 2), std::nullopt});
    CHECK_FALSE(search_q(s, {}, 300, 1));
    CHECK_THROWS_AS(search_q(s, {}, 0), InvalidArgument);
  }
  SUBCASE("determinism by seed") {
    // Tight parameters push the search into the random phase.
    ScalarParams p;
    p.mu2 = 0.95;
    const auto a = search_q(ex52(), p, 3000, 42);
    const auto b = search_q(ex52(), p, 3000, 42);
    REQUIRE(a.has_value() == b.has_value());
    if (a) {
      CHECK(a->q == b->q);
      CHECK(a->evaluations == b->evaluations);
      CHECK(a->report.pass);
    }
  }
}

TEST_CASE("decay envelope") {
  SUBCASE("trajectory resting at the equilibrium") {
    const auto tr = model::simulate(ex51({5.0}), std::vector<double>{0.5, 1.5}, 10.0);
    const auto c = verify_decay_envelope(tr, Matrix::identity(2), std::vector<double>{0.5, 1.5}, 0.0349, 0.9, 0.05);
    CHECK(c.holds);
    CHECK(c.worst_ratio == 0.0);
  }
  SUBCASE("first example with three impulses") {
    const auto s = ex51({5.0, 10.0, 15.0});
    const double xi1 = *check_thm41(s, Matrix::identity(2), {}).decay_rate;
    for (const auto& x0 : {Vector{5, -3}, Vector{2.5, -1}, Vector{-2, 2}}) {
      const auto tr = model::simulate(s, x0, 20.0);
      const auto c = verify_decay_envelope(tr, Matrix::identity(2), std::vector<double>{0.5, 1.5}, xi1, 0.9, 0.05);
      CHECK(c.holds);
      CHECK(c.worst_impulse_ratio <= 1.0);
      CHECK(c.samples == 2 * tr.node_count());
      // Some faster rate must be violated, otherwise the check is vacuous.
      bool violated = false;
      for (double factor = 10.0; factor <= 1e4 && !violated; factor *= 10.0) {
        violated = !verify_decay_envelope(tr, Matrix::identity(2), std::vector<double>{0.5, 1.5}, factor * xi1, 0.9, 0.05).holds;
      }
      CHECK(violated);
    }
  }
  SUBCASE("random schedules") {
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> u(0.5, 9.5);
    for (int trial = 0; trial < 5; ++trial) {
      std::vector<double> times;
      for (int k = 0; k <= trial; ++k) times.push_back(u(rng));
      std::sort(times.begin(), times.end());
      const auto s = ex51(times);
      const auto x0 = oracle::random_vector(rng, 2, -4, 4);
      fode::SolverConfig cfg;
      cfg.steps_per_unit_time = 50;
      const auto tr = model::simulate(s, x0, 10.0, cfg);
      const double xi1 = *check_thm41(s, Matrix::identity(2), {}).decay_rate;
      CHECK(verify_decay_envelope(tr, Matrix::identity(2), std::vector<double>{0.5, 1.5}, xi1, 0.9, 0.05).holds);
    }
  }
  SUBCASE("argument validation") {
    const auto tr = model::simulate(ex51(), std::vector<double>{1, 1}, 1.0);
    CHECK_THROWS_AS(verify_decay_envelope(tr, Matrix::identity(2), std::vector<double>{0.5, 1.5}, -1.0, 0.9, 0.05), InvalidArgument);
    CHECK_THROWS_AS(verify_decay_envelope(tr, Matrix::identity(2), std::vector<double>{0.5}, 1.0, 0.9, 0.05), DimensionMismatch);
  }
}

TEST_CASE("boundedness certificate") {
  const auto s = ex52();
  const auto bounds = model::sigma_bounds(s, 10.0);
  std::vector<fode::Trajectory> trs;
  for (const auto& x0 : {Vector{2.9, -2.3}, Vector{1.5, -1.5}, Vector{0.5, -1.0}}) trs.push_back(model::simulate(s, x0, 1.5));
  const auto r = check_boundedness(s, trs, bounds, 10.0);
  CHECK(r.pass);
  CHECK(r.margin("max_norm_over_envelope").value < 1.0);
  CHECK(r.margin("max_prejump_norm").value < 10.0);
  // A radius the trajectories leave invalidates the jump bound.
  CHECK_FALSE(check_boundedness(s, trs, model::sigma_bounds(s, 0.5), 0.5).pass);
}

TEST_CASE("tags") {
  for (Theorem t : {Theorem::ExistenceSadovskii, Theorem::UniquenessBanach, Theorem::Boundedness, Theorem::MLStability41,
                    Theorem::MLStability42}) {
    CHECK(theorem_from_tag(tag(t)) == t);
  }
  CHECK_FALSE(theorem_from_tag("5.0"));
}
