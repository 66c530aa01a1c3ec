#pragma once

// Independent reference computations used by the unit tests.

#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "fpnni/linalg.hpp"

namespace oracle {

using Big = boost::multiprecision::cpp_bin_float_50;
using Big100 = boost::multiprecision::cpp_bin_float_100;

/// E_{a,b}(z) by the power series in `Real` arithmetic with compensated
/// summation: at most `terms` terms, stopping early once the terms have
/// dropped below 1e-40 of the sum.
template <class Real = Big>
double mittag_leffler_series(double alpha, double beta, double z, int terms = 200) {
  Real sum = 0, comp = 0, zk = 1;
  const Real bz = z;
  for (int k = 0; k < terms; ++k) {
    const Real term = zk / boost::math::tgamma(Real(alpha) * k + Real(beta));
    const Real y = term - comp;
    const Real t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    zk *= bz;
    if (alpha * k + beta > 2 && abs(term) < Real(1e-40) * abs(sum)) break;
  }
  return static_cast<double>(sum);
}

/// Classical fixed-step RK4 for x' = f(x), returning x(t_i) at t_i = i h.
inline std::vector<double> rk4(const std::function<double(double)>& f, double x0, double h, int n) {
  std::vector<double> out{x0};
  double x = x0;
  for (int i = 0; i < n; ++i) {
    const double k1 = f(x);
    const double k2 = f(x + 0.5 * h * k1);
    const double k3 = f(x + 0.5 * h * k2);
    const double k4 = f(x + h * k3);
    x += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    out.push_back(x);
  }
  return out;
}

/// Eigenvalues of a symmetric 2x2 matrix, ascending.
inline std::pair<double, double> eig2(double a, double b, double d) {
  const double tr = a + d;
  const double det = a * d - b * b;
  const double disc = std::sqrt(tr * tr / 4 - det);
  return {tr / 2 - disc, tr / 2 + disc};
}

inline fpnni::linalg::Matrix random_symmetric(std::mt19937_64& rng, std::size_t n, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  fpnni::linalg::Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) m(i, j) = m(j, i) = u(rng);
  }
  return m;
}

inline fpnni::linalg::Matrix random_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  fpnni::linalg::Matrix m(r, c);
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < c; ++j) m(i, j) = u(rng);
  }
  return m;
}

inline std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

}  // namespace oracle
