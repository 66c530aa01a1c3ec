#pragma once

// Gamma function and the two-parameter Mittag-Leffler function
// E_{a,b}(z) = sum_k z^k / Gamma(a k + b) on the real line.

namespace fpnni::mlf {

/// |z| beyond this is rejected with DomainError.
inline constexpr double kDomainBound = 1000.0;
/// Below this magnitude the power series is the default route.
inline constexpr double kSeriesSwitch = 10.0;
inline constexpr int kMaxSeriesTerms = 500;

struct MlfParams {
  double alpha = 1.0;
  double beta = 1.0;
};

/// Gamma(q) by the Lanczos approximation (g = 7, 9 terms); reflection for
/// q < 1/2. Throws PoleError at q = 0, -1, -2, ...
double gamma_fn(double q);

/// 1 / Gamma(q), zero at the poles of Gamma.
double rgamma(double q);

enum class MlfMethod { Series, AsymptoticAlgebraic, AsymptoticExponential, Closed };

struct MlfResult {
  double value;
  /// Absolute error estimate carried by the chosen route.
  double error_estimate;
  MlfMethod method;
  int terms;
};

/// Full evaluation with route and error estimate.
/// Requires alpha in (0, 2], beta > 0, |z| <= kDomainBound; otherwise, or when
/// the value overflows or no route reaches a usable accuracy, DomainError.
MlfResult evaluate(MlfParams params, double z);

double mittag_leffler(MlfParams params, double z);

/// One-parameter form E_a(z) = E_{a,1}(z).
inline double mittag_leffler(double alpha, double z) {
  return mittag_leffler(MlfParams{alpha, 1.0}, z);
}

const char* to_string(MlfMethod m);

}  // namespace fpnni::mlf
