#include <doctest.h>

#include <cmath>

#include "luba/errors.hpp"
#include "luba/special.hpp"
#include "oracles.hpp"

using namespace luba;

TEST_SUITE("special") {

TEST_CASE("log_integral matches principal-value quadrature") {
  // Frozen values computed by the quadrature oracle; re-derived here so a
  // regression in either route is caught.
  CHECK(log_integral(2.0) == doctest::Approx(1.04516378).epsilon(1e-7));
  CHECK(log_integral(10.0) == doctest::Approx(6.16560).epsilon(1e-5));
  for (double z : {1.1, 1.5, 2.0, 5.0, 10.0, 100.0, 1234.5, 1e5, 1e6}) {
    const double oracle = testing::li_quadrature(z);
    CHECK_MESSAGE(std::fabs(log_integral(z) - oracle) < 1e-8,
                  "z=", z, " got ", log_integral(z), " want ", oracle);
  }
}

TEST_CASE("log_integral rejects the singular region") {
  CHECK_THROWS_AS(log_integral(1.0), DomainError);
  CHECK_THROWS_AS(log_integral(0.5), DomainError);
  CHECK_THROWS_AS(log_integral(1.0 + 1e-13), DomainError);
  CHECK_NOTHROW(log_integral(1.0 + 1e-10));
  // Diverges to -inf as z -> 1+.
  CHECK(log_integral(1.0 + 1e-10) < -20.0);
}

TEST_CASE("exponential integral spans the series/asymptotic switch") {
  // Both branches against the quadrature oracle via li(e^x), bracketing the
  // switch at x = 40.
  for (double x : {39.5, 39.999999, 40.000001, 41.5}) {
    CHECK(exponential_integral_ei(x) ==
          doctest::Approx(testing::li_quadrature(std::exp(x))).epsilon(1e-10));
  }
  // Continuity at the switch, bounded by the local derivative e^x/x.
  const double below = exponential_integral_ei(39.999999);
  const double above = exponential_integral_ei(40.000001);
  CHECK(std::fabs(above - below) <= 3.0 * 2e-6 * above);
  CHECK_THROWS_AS(exponential_integral_ei(0.0), DomainError);
  CHECK_THROWS_AS(exponential_integral_ei(-1.0), DomainError);
}

TEST_CASE("gamma_p against closed forms") {
  // P(1, x) = 1 - e^-x.
  for (double x : {0.1, 1.0, 3.0, 10.0})
    CHECK(gamma_p(1.0, x) == doctest::Approx(1.0 - std::exp(-x)).epsilon(1e-13));
  // P(1/2, x) = erf(sqrt x).
  for (double x : {0.25, 1.0, 4.0})
    CHECK(gamma_p(0.5, x) == doctest::Approx(std::erf(std::sqrt(x))).epsilon(1e-12));
  CHECK(gamma_p(3.0, 0.0) == 0.0);
  CHECK_THROWS_AS(gamma_p(-1.0, 1.0), DomainError);
}

TEST_CASE("chi-square cdf and quantile are inverse") {
  // Standard table anchors.
  CHECK(chi_square_quantile(0.95, 1) == doctest::Approx(3.841458821).epsilon(1e-8));
  CHECK(chi_square_quantile(0.95, 10) == doctest::Approx(18.30703805).epsilon(1e-8));
  for (double dof : {1.0, 4.0, 30.0, 100.0})
    for (double p : {0.01, 0.5, 0.95, 0.999}) {
      const double x = chi_square_quantile(p, dof);
      CHECK(chi_square_cdf(x, dof) == doctest::Approx(p).epsilon(1e-9));
    }
}

}  // TEST_SUITE
