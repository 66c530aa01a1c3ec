#include "fpnni/mlf.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>

#include "fpnni/error.hpp"

namespace fpnni::mlf {

namespace {

constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

constexpr long double kLongEps = std::numeric_limits<long double>::epsilon();
constexpr int kMinAsymptoticTerms = 10;
constexpr int kMaxAsymptoticTerms = 200;
// Routes whose error estimate exceeds this (relative to max(1, |E|)) are not
// trusted.
constexpr double kUsableAccuracy = 1e-8;

bool is_nonpositive_integer(double q) { return q <= 0.0 && q == std::floor(q); }

// sin(pi x) with argument reduction so that it is exact at integers.
double sin_pi(double x) {
  double r = std::fmod(x, 2.0);
  if (r > 1.0) r -= 2.0;
  if (r < -1.0) r += 2.0;
  if (r == 0.0 || r == 1.0 || r == -1.0) return 0.0;
  if (r > 0.5) r = 1.0 - r;
  if (r < -0.5) r = -1.0 - r;
  return std::sin(std::numbers::pi * r);
}

double lanczos_positive(double q) {
  // q >= 1/2
  const double z = q - 1.0;
  double a = kLanczos[0];
  for (std::size_t i = 1; i < kLanczos.size(); ++i) a += kLanczos[i] / (z + static_cast<double>(i));
  const double t = z + kLanczosG + 0.5;
  // t^(z+1/2) split in halves so that Gamma(171) does not overflow midway.
  const double half = std::pow(t, 0.5 * (z + 0.5));
  return std::sqrt(2.0 * std::numbers::pi) * half * (half * std::exp(-t)) * a;
}

struct Route {
  double value;
  double error;
  MlfMethod method;
  int terms;
};

std::optional<Route> power_series(MlfParams p, double z) {
  const long double zl = z;
  long double sum = 0.0L;
  long double comp = 0.0L;  // Kahan compensation
  long double abs_sum = 0.0L;
  long double power = 1.0L;
  long double prev_mag = std::numeric_limits<long double>::infinity();
  for (int k = 0; k < kMaxSeriesTerms; ++k) {
    const long double arg = static_cast<long double>(p.alpha) * k + p.beta;
    const long double term = power / std::tgamma(arg);
    const long double mag = std::fabs(term);
    if (!std::isfinite(mag)) return std::nullopt;

    const long double y = term - comp;
    const long double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    abs_sum += mag;

    // Terms are eventually decreasing once the Gamma argument is past its
    // minimum; stop only there so small leading terms do not end the sum.
    if (arg >= 2.0L && mag <= prev_mag &&
        mag < 1e-16L * (1.0L + std::fabs(sum))) {
      const double value = static_cast<double>(sum);
      if (!std::isfinite(value)) return std::nullopt;
      const double err = static_cast<double>(4.0L * kLongEps * abs_sum * std::sqrt(k + 1.0L)) +
                         std::numeric_limits<double>::epsilon() * std::abs(value);
      return Route{value, err, MlfMethod::Series, k + 1};
    }
    prev_mag = mag;
    power *= zl;
  }
  return std::nullopt;
}

// -sum_{k>=1} z^{-k} / Gamma(beta - alpha k), truncated where the term
// envelope stops shrinking (at least kMinAsymptoticTerms terms).
struct AlgebraicTail {
  double sum;
  double next_bound;
  int terms;
};

AlgebraicTail algebraic_tail(MlfParams p, double z) {
  const double inv = 1.0 / z;
  double power = 1.0;
  double sum = 0.0;
  double prev_env = std::numeric_limits<double>::infinity();
  int k = 1;
  for (; k <= kMaxAsymptoticTerms; ++k) {
    power *= inv;
    const double arg = p.beta - p.alpha * k;
    // |1/Gamma(x)| <= Gamma(1 - x)/pi for x < 1; 1/Gamma is below 1.13 otherwise.
    const double bound = arg < 1.0 ? std::exp(std::lgamma(1.0 - arg)) / std::numbers::pi : 1.13;
    const double env = std::abs(power) * bound;
    if (k > kMinAsymptoticTerms && (env > prev_env || env < 1e-17 * std::abs(sum))) {
      return {sum, env, k - 1};
    }
    sum -= power * rgamma(arg);
    prev_env = env;
  }
  return {sum, prev_env, k - 1};
}

std::optional<Route> asymptotic(MlfParams p, double z) {
  if (std::abs(z) < 1.0) return std::nullopt;
  const AlgebraicTail tail = algebraic_tail(p, z);
  double value = tail.sum;
  double err = tail.next_bound;
  MlfMethod method = MlfMethod::AsymptoticAlgebraic;

  if (z > 0.0) {
    const double root = std::pow(z, 1.0 / p.alpha);
    const double lead = std::pow(z, (1.0 - p.beta) / p.alpha) * std::exp(root) / p.alpha;
    value += lead;
    err += std::numeric_limits<double>::epsilon() * (1.0 + root) * std::abs(lead);
    method = MlfMethod::AsymptoticExponential;
  } else if (p.alpha >= 1.0) {
    // The conjugate pair zeta = |z|^{1/a} e^{+-i pi/a}; a single point at a = 1.
    const double r = std::pow(-z, 1.0 / p.alpha);
    const double phase = std::numbers::pi / p.alpha;
    const double weight = p.alpha == 1.0 ? 1.0 / p.alpha : 2.0 / p.alpha;
    const double mag = std::pow(r, 1.0 - p.beta) * std::exp(r * std::cos(phase));
    value += weight * mag * std::cos((1.0 - p.beta) * phase + r * std::sin(phase));
    // Near a = 1 the pair sits on a Stokes line and its weight is uncertain.
    if (p.alpha > 1.0 && p.alpha < 1.25) err += weight * mag;
    method = MlfMethod::AsymptoticExponential;
  }
  if (!std::isfinite(value)) return std::nullopt;
  return Route{value, err, method, tail.terms};
}

}  // namespace

namespace {

// (q - 1)! for integer q in [1, 171], exact through 23.
std::optional<double> integer_gamma(double q) {
  if (!(q >= 1.0 && q <= 171.0) || q != std::floor(q)) return std::nullopt;
  double f = 1.0;
  for (int k = 2; k < static_cast<int>(q); ++k) f *= k;
  return f;
}

}  // namespace

double rgamma(double q) {
  if (is_nonpositive_integer(q)) return 0.0;
  if (const auto g = integer_gamma(q)) return 1.0 / *g;
  if (q < 0.5) {
    // 1/Gamma(q) = sin(pi q) Gamma(1 - q) / pi
    return sin_pi(q) * lanczos_positive(1.0 - q) / std::numbers::pi;
  }
  return 1.0 / lanczos_positive(q);
}

double gamma_fn(double q) {
  if (std::isnan(q)) throw DomainError("gamma_fn: NaN argument");
  if (is_nonpositive_integer(q)) {
    throw PoleError("gamma_fn: pole at q = " + std::to_string(q));
  }
  if (const auto g = integer_gamma(q)) return *g;
  if (q < 0.5) {
    return std::numbers::pi / (sin_pi(q) * lanczos_positive(1.0 - q));
  }
  return lanczos_positive(q);
}

MlfResult evaluate(MlfParams p, double z) {
  if (!(p.alpha > 0.0 && p.alpha <= 2.0)) {
    throw DomainError("mittag_leffler: alpha must lie in (0, 2]");
  }
  if (!(p.beta > 0.0) || !std::isfinite(p.beta)) {
    throw DomainError("mittag_leffler: beta must be positive");
  }
  if (!std::isfinite(z) || std::abs(z) > kDomainBound) {
    throw DomainError("mittag_leffler: |z| exceeds the domain bound " +
                      std::to_string(kDomainBound));
  }
  if (z == 0.0) return {rgamma(p.beta), 0.0, MlfMethod::Closed, 1};

  std::optional<Route> series = power_series(p, z);
  std::optional<Route> asym = asymptotic(p, z);

  const Route* best = nullptr;
  if (series && asym) {
    // Default route by magnitude; the other wins only when clearly better.
    const bool prefer_series = std::abs(z) <= kSeriesSwitch;
    const Route& primary = prefer_series ? *series : *asym;
    const Route& other = prefer_series ? *asym : *series;
    best = other.error < 0.1 * primary.error ? &other : &primary;
  } else if (series) {
    best = &*series;
  } else if (asym) {
    best = &*asym;
  }

  if (best == nullptr) {
    throw DomainError("mittag_leffler: value not representable (overflow) at z = " +
                      std::to_string(z));
  }
  if (best->error > kUsableAccuracy * std::max(1.0, std::abs(best->value))) {
    throw DomainError("mittag_leffler: no evaluation route reaches usable accuracy at z = " +
                      std::to_string(z));
  }
  return {best->value, best->error, best->method, best->terms};
}

double mittag_leffler(MlfParams params, double z) { return evaluate(params, z).value; }

const char* to_string(MlfMethod m) {
  switch (m) {
    case MlfMethod::Series: return "series";
    case MlfMethod::AsymptoticAlgebraic: return "asymptotic-algebraic";
    case MlfMethod::AsymptoticExponential: return "asymptotic-exponential";
    case MlfMethod::Closed: return "closed";
  }
  return "unknown";
}

}  // namespace fpnni::mlf
