#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <random>
#include <vector>

#include "fpnni/error.hpp"
#include "fpnni/fode.hpp"
#include "fpnni/simd/kernels.hpp"

using namespace fpnni;
using namespace fpnni::simd;

namespace {

std::vector<Backend> vector_backends() {
  std::vector<Backend> out;
  for (Backend b : {Backend::Avx2, Backend::Neon}) {
    if (available(b)) out.push_back(b);
  }
  return out;
}

// Decreasing distances with their alpha powers, as the integrator builds them.
void make_grid(std::mt19937_64& rng, std::size_t n, double alpha, std::vector<double>& d, std::vector<double>& pa) {
  std::uniform_real_distribution<double> step(0.001, 0.02);
  d.assign(n + 1, 0.0);
  for (std::size_t j = n; j-- > 0;) d[j] = d[j + 1] + step(rng);
  pa.resize(n + 1);
  for (std::size_t j = 0; j <= n; ++j) pa[j] = std::pow(d[j], alpha);
}

}  // namespace

TEST_CASE("scalar backend is always available") {
  CHECK(available(Backend::Scalar));
  CHECK(kernels_for(Backend::Scalar).backend == Backend::Scalar);
  CHECK(to_string(Backend::Scalar) == "scalar");
  if (!available(Backend::Neon)) CHECK_THROWS_AS(kernels_for(Backend::Neon), InvalidArgument);
}

TEST_CASE("vector kernels agree with the scalar reference") {
  const auto& ref = kernels_for(Backend::Scalar);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (Backend b : vector_backends()) {
    CAPTURE(to_string(b));
    const auto& k = kernels_for(b);
    for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 7u, 8u, 15u, 16u, 17u, 100u, 1001u}) {
      CAPTURE(n);
      std::vector<double> a(n), c(n);
      for (std::size_t i = 0; i < n; ++i) {
        a[i] = u(rng);
        c[i] = u(rng);
      }
      double mag = 0.0;
      for (std::size_t i = 0; i < n; ++i) mag += std::abs(a[i] * c[i]);
      CHECK(std::abs(k.dot(a.data(), c.data(), n) - ref.dot(a.data(), c.data(), n)) <= 1e-14 * std::max(1.0, mag));

      for (double alpha : {0.3, 0.7, 0.9}) {
        std::vector<double> d, pa;
        make_grid(rng, n, alpha, d, pa);
        std::vector<double> r1(n), r2(n), wa1(n), wb1(n), wa2(n), wb2(n);
        ref.rect_weights(pa.data(), 0.9, r1.data(), n);
        k.rect_weights(pa.data(), 0.9, r2.data(), n);
        ref.trap_weights(d.data(), pa.data(), 1 / alpha, 1 / (alpha + 1), 1.1, wa1.data(), wb1.data(), n);
        k.trap_weights(d.data(), pa.data(), 1 / alpha, 1 / (alpha + 1), 1.1, wa2.data(), wb2.data(), n);
        for (std::size_t j = 0; j < n; ++j) {
          CHECK(r2[j] == doctest::Approx(r1[j]).epsilon(1e-14));
          // Two nested moment differences, each losing about
          // log10(d_j / (d_j - d_{j+1})) digits.
          const double r = d[j] / (d[j] - d[j + 1]);
          const double cond = r * r;
          CHECK(std::abs(wa2[j] - wa1[j]) <= 1e-14 * cond * std::abs(wa1[j]));
          CHECK(std::abs(wb2[j] - wb1[j]) <= 1e-14 * cond * std::abs(wb1[j]));
        }
      }
    }
  }
}

TEST_CASE("trapezoid weights integrate polynomials of degree one exactly") {
  // sum_j wa_j f(s_j) + wb_j f(s_{j+1}) = 1/Gamma(a) int_0^t (t-s)^(a-1) f(s) ds for linear f.
  const auto& k = kernels();
  std::mt19937_64 rng(1);
  const double alpha = 0.6, t = 1.0;
  const std::size_t n = 37;
  std::vector<double> s(n + 1);
  std::uniform_real_distribution<double> u(0.5, 1.5);
  s[0] = 0.0;
  for (std::size_t j = 1; j <= n; ++j) s[j] = s[j - 1] + u(rng);
  for (auto& v : s) v *= t / s[n];
  s[n] = t;
  std::vector<double> d(n + 1), pa(n + 1), wa(n), wb(n);
  for (std::size_t j = 0; j <= n; ++j) {
    d[j] = t - s[j];
    pa[j] = std::pow(d[j], alpha);
  }
  const double g = std::tgamma(alpha);
  k.trap_weights(d.data(), pa.data(), 1 / alpha, 1 / (alpha + 1), 1 / g, wa.data(), wb.data(), n);
  double q0 = 0.0, q1 = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    q0 += wa[j] + wb[j];
    q1 += wa[j] * s[j] + wb[j] * s[j + 1];
  }
  CHECK(q0 == doctest::Approx(std::pow(t, alpha) / std::tgamma(alpha + 1)).epsilon(1e-12));
  CHECK(q1 == doctest::Approx(std::pow(t, alpha + 1) / std::tgamma(alpha + 2)).epsilon(1e-12));
}

TEST_CASE("integrator results agree across backends") {
  const auto rhs = [](double, std::span<const double> x, std::span<double> out) {
    out[0] = -0.5 * x[0] + 0.2 * x[1];
    out[1] = 0.1 * x[0] - 0.8 * x[1];
  };
  const std::vector<double> x0{1.0, -2.0};
  fode::ImpulseSchedule imp({0.7, 1.9}, [](std::size_t, std::span<const double> x) {
    return std::vector<double>{-0.3 * x[0], -0.3 * x[1]};
  });
  fode::SolverConfig cfg;
  cfg.steps_per_unit_time = 200;
  const auto ref = fode::integrate(rhs, 0.8, x0, 3.0, imp, cfg, &kernels_for(Backend::Scalar));
  for (Backend b : vector_backends()) {
    const auto tr = fode::integrate(rhs, 0.8, x0, 3.0, imp, cfg, &kernels_for(b));
    REQUIRE(tr.node_count() == ref.node_count());
    double worst = 0.0;
    for (std::size_t i = 0; i < tr.node_count(); ++i) {
      for (std::size_t c = 0; c < 2; ++c) {
        worst = std::max(worst, std::abs(tr.right(i)[c] - ref.right(i)[c]));
        worst = std::max(worst, std::abs(tr.left(i)[c] - ref.left(i)[c]));
      }
    }
    CHECK(worst <= 1e-12);
  }
}
