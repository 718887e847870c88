#include "luba/special.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "luba/errors.hpp"

namespace luba {

/*
 * Exponential integral, x > 0.
 *
 *                x
 *                 -    t
 *                | |  e
 *     Ei(x) =   -|-  --- dt   (principal value across t = 0)
 *              | |    t
 *               -
 *              -inf
 *
 * 0 < x <= 40:   Ei(x) = gamma + ln x + sum_{n>=1} x^n / (n * n!)
 *                All terms positive; roundoff stays at a few ulp.
 * x > 40:        Ei(x) = e^x/x * (1 + 1!/x + 2!/x^2 + ...), truncated at
 *                the smallest term. At x = 40 the smallest term is below
 *                1e-16 relative, so the two branches agree at the switch.
 */
double exponential_integral_ei(double x) {
  if (!(x > 0.0)) throw DomainError("exponential_integral_ei: requires x > 0");

  if (x <= 40.0) {
    double sum = 0.0;
    double term = 1.0;
    for (int n = 1; n < 200; ++n) {
      term *= x / n;
      const double contrib = term / n;
      sum += contrib;
      if (contrib < sum * 1e-17) break;
    }
    return std::numbers::egamma + std::log(x) + sum;
  }

  double sum = 1.0;
  double term = 1.0;
  for (int n = 1; n < 400; ++n) {
    const double next = term * n / x;
    if (next >= term) break;  // asymptotic series started to diverge
    term = next;
    sum += term;
    if (term < sum * 1e-17) break;
  }
  if (x > 700.0) return std::numeric_limits<double>::infinity();
  return std::exp(x) / x * sum;
}

double log_integral(double z) {
  if (!(z > 1.0 + 1e-12))
    throw DomainError("log_integral: requires z > 1 (singular at z = 1)");
  return exponential_integral_ei(std::log(z));
}

/*
 * Regularized lower incomplete gamma P(a, x).
 * Series for x < a + 1, continued fraction for the complement otherwise.
 */
namespace {

double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int n = 0; n < 500; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_cont_fraction(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double gamma_p(double a, double x) {
  if (!(a > 0.0) || !(x >= 0.0)) throw DomainError("gamma_p: requires a > 0, x >= 0");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_cont_fraction(a, x);
}

double chi_square_cdf(double x, double dof) {
  if (!(dof > 0.0)) throw DomainError("chi_square_cdf: requires dof > 0");
  if (x <= 0.0) return 0.0;
  return gamma_p(0.5 * dof, 0.5 * x);
}

double chi_square_quantile(double p, double dof) {
  if (!(p > 0.0) || !(p < 1.0))
    throw DomainError("chi_square_quantile: requires p in (0, 1)");
  double lo = 0.0;
  double hi = dof + 20.0 * std::sqrt(2.0 * dof) + 50.0;
  while (chi_square_cdf(hi, dof) < p) hi *= 2.0;
  for (int i = 0; i < 200 && (hi - lo) > 1e-12 * (1.0 + hi); ++i) {
    const double mid = 0.5 * (lo + hi);
    (chi_square_cdf(mid, dof) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace luba
