#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "luba/equilibrium.hpp"
#include "luba/errors.hpp"
#include "luba/special.hpp"
#include "oracles.hpp"

using namespace luba;

namespace {

// Test-side finite-V solver: long-double recurrence plus bisection on f_1 at
// 1e-14, independent of the library's search.
std::vector<double> finite_v_oracle(double lambda, double v) {
  const auto orbit_sum = [&](long double f1, std::vector<double>* out) {
    long double f = f1, sum = 0.0L;
    if (out) out->clear();
    for (std::size_t k = 1; f > 0.0L && std::isfinite(static_cast<double>(f)); ++k) {
      sum += f;
      if (out) out->push_back(static_cast<double>(f));
      if (static_cast<double>(k) + 1.0 >= v) break;
      f = std::log(std::exp(f) - f) + std::log(1.0L - 1.0L / (v - k));
    }
    return sum;
  };
  long double lo = 0.0L, hi = std::log1p(static_cast<long double>(lambda));
  while (orbit_sum(hi, nullptr) < lambda) hi *= 1.5L;
  for (int i = 0; i < 200; ++i) {
    const long double mid = 0.5L * (lo + hi);
    (orbit_sum(mid, nullptr) < lambda ? lo : hi) = mid;
    if (std::fabs(static_cast<double>(orbit_sum(0.5L * (lo + hi), nullptr)) - lambda) <
        1e-14)
      break;
  }
  std::vector<double> f;
  orbit_sum(0.5L * (lo + hi), &f);
  return f;
}

}  // namespace

TEST_SUITE("equilibrium") {

TEST_CASE("initial condition is ln(1 + lambda)") {
  for (double lambda : {0.1, 1.0, 10.0, 1e3, 1e5}) {
    const Strategy s = solve_infinite_v(lambda);
    REQUIRE(!s.freqs.empty());
    CHECK(s.freqs[0] == std::log1p(lambda));
  }
  // ln(e) = 1.
  CHECK(solve_infinite_v(std::exp(1.0) - 1.0).freqs[0] ==
        doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("lambda=1 frequencies match the extended-precision oracle") {
  const Strategy s = solve_infinite_v(1.0, 1e-9);
  const auto oracle = testing::recurrence_extended(1.0L, 16);
  REQUIRE(s.freqs.size() >= 5);
  for (std::size_t i = 0; i < s.freqs.size(); ++i) {
    REQUIRE(i < oracle.size());
    CHECK(s.freqs[i] ==
          doctest::Approx(static_cast<double>(oracle[i])).epsilon(1e-11));
  }
  // Leading digits, frozen from the oracle.
  CHECK(s.freqs[0] == doctest::Approx(0.6931471805599453).epsilon(1e-12));
  CHECK(s.freqs[1] == doctest::Approx(0.2676218188444346).epsilon(1e-12));
  CHECK(s.freqs[2] == doctest::Approx(0.0384810171414165).epsilon(1e-11));
  CHECK(s.freqs[3] == doctest::Approx(7.497023571494e-4).epsilon(1e-10));
  CHECK(s.freqs[4] == doctest::Approx(2.8109701464e-7).epsilon(1e-8));
  // Sum telescopes to lambda as the tail vanishes.
  CHECK(s.total() == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("telescoping identity holds pairwise and for the sum") {
  std::mt19937_64 gen(42);
  std::uniform_real_distribution<double> u(-2.0, 4.0);
  for (int trial = 0; trial < 100; ++trial) {
    const double lambda = std::pow(10.0, u(gen));
    const Strategy s = solve_infinite_v(lambda);
    for (std::size_t i = 0; i + 1 < s.freqs.size(); ++i) {
      // e^{f_k} - e^{f_{k+1}} = f_k, evaluated via expm1 so the check
      // measures the identity rather than rounding of e^f near 1.
      const double lhs = std::expm1(s.freqs[i]) - std::expm1(s.freqs[i + 1]);
      CHECK(std::fabs(lhs - s.freqs[i]) <= 1e-10 * s.freqs[i]);
    }
    const double f_next = next_frequency(s.freqs.back());
    const double rhs = lambda - std::expm1(f_next);  // (lambda+1) - e^{f_{K+1}}
    CHECK(std::fabs(s.total() - rhs) <= 1e-10 * lambda);
    // Mass deficit bounded by tail_eps per retained term (plus roundoff).
    CHECK(std::fabs(s.total() - lambda) <=
          1e-12 * static_cast<double>(s.freqs.size() + 2));
  }
}

TEST_CASE("frequencies decrease strictly and die super-exponentially") {
  for (double lambda : {0.5, 1.0, 10.0, 100.0, 1000.0}) {
    const Strategy s = solve_infinite_v(lambda);
    for (std::size_t i = 0; i + 1 < s.freqs.size(); ++i)
      CHECK(s.freqs[i + 1] < s.freqs[i]);
    // f_{k+1} ~ f_k^2 / 2 in the tail, checked one step past the support too.
    std::vector<double> extended = s.freqs;
    extended.push_back(next_frequency(extended.back()));
    for (std::size_t i = 0; i + 1 < extended.size(); ++i) {
      const double f = extended[i];
      if (f >= 0.1) continue;
      CHECK(std::fabs(extended[i + 1] - 0.5 * f * f) <= f * f * f);
    }
  }
}

TEST_CASE("support length obeys the logarithmic-integral scaling") {
  const auto k_star = [](double lambda) {
    return static_cast<double>(solve_infinite_v(lambda, 1e-9).support_end);
  };
  // Removing the bids on 1 shifts the cutoff by one.
  for (double lambda : {10.0, 20.0, 50.0, 100.0, 1e3, 1e4}) {
    const double diff = k_star(lambda) - k_star(lambda - std::log1p(lambda));
    CHECK(diff >= 0.0);
    CHECK(diff <= 2.0);
  }
  // Fitted additive constant tracks support_end within 2 across the grid.
  std::vector<double> grid;
  for (int i = 0; i < 12; ++i)
    grid.push_back(10.0 * std::pow(10.0, 3.0 * i / 11.0));
  const CutoffFit fit = fit_cutoff_constant(grid);
  CHECK(fit.points == grid.size());
  CHECK(fit.max_abs_residual <= 2.0);
  // The lambda=1000 support end sits near li(1001) + C.
  CHECK(std::fabs(k_star(1000.0) - cutoff_li(1000.0, fit.c)) <= 2.0);
}

TEST_CASE("solver edge cases") {
  // Tiny lambda: support collapses entirely below the tail threshold.
  const Strategy tiny = solve_infinite_v(1e-12, 1e-9);
  CHECK(tiny.support_end == 0);
  CHECK(tiny.freqs.empty());

  CHECK_THROWS_AS(solve_infinite_v(0.0), DomainError);
  CHECK_THROWS_AS(solve_infinite_v(-1.0), DomainError);
  CHECK_THROWS_AS(solve_infinite_v(1.0, 0.0), DomainError);

  try {
    solve_infinite_v(1000.0, 1e-12, 10);
    FAIL("expected TruncationError");
  } catch (const TruncationError& e) {
    CHECK(e.partial_freqs.size() == 10);
    CHECK(e.lambda == 1000.0);
    CHECK(e.partial_freqs[0] == std::log1p(1000.0));
  }
}

TEST_CASE("finite-V solution approaches the infinite-V one for large V") {
  // Element-wise gap scales like 1/V once the cutoff sits far below V.
  const auto max_gap = [](double v) {
    const Strategy finite = solve_finite_v(AuctionSpec{v, 0.0, 2.0}, 1e-9);
    const Strategy infinite = solve_infinite_v(2.0);
    const std::size_t k = std::max(finite.freqs.size(), infinite.freqs.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double a = i < finite.freqs.size() ? finite.freqs[i] : 0.0;
      const double b = i < infinite.freqs.size() ? infinite.freqs[i] : 0.0;
      worst = std::max(worst, std::fabs(a - b));
    }
    return worst;
  };
  const double at_1e3 = max_gap(1000.0);
  const double at_1e4 = max_gap(10000.0);
  CHECK(at_1e3 < 2e-3);
  CHECK(at_1e4 < 2e-4);
  CHECK(at_1e4 < at_1e3);
}

TEST_CASE("finite-V pins the support below the item value") {
  const Strategy s = solve_finite_v(AuctionSpec{2.0, 0.0, 1e-6}, 1e-15);
  REQUIRE(s.freqs.size() == 1);
  CHECK(s.freqs[0] == doctest::Approx(1e-6).epsilon(1e-12));

  FiniteSolveInfo info;
  const Strategy mid = solve_finite_v(AuctionSpec{100.0, 0.0, 10.0}, 1e-9, &info);
  CHECK(std::fabs(mid.total() - 10.0) <= 1e-9);
  CHECK(!info.multiple_sign_changes);
  for (std::size_t i = 0; i + 1 < mid.freqs.size(); ++i)
    CHECK(mid.freqs[i + 1] < mid.freqs[i]);
  CHECK(static_cast<double>(mid.support_end) < 100.0);

  const auto oracle = finite_v_oracle(10.0, 100.0);
  REQUIRE(oracle.size() == mid.freqs.size());
  for (std::size_t i = 0; i < oracle.size(); ++i)
    CHECK(mid.freqs[i] == doctest::Approx(oracle[i]).epsilon(1e-7));
}

TEST_CASE("finite-V error paths") {
  CHECK_THROWS_AS(solve_finite_v(AuctionSpec{1.0, 0.0, 1.0}), DomainError);
  CHECK_THROWS_AS(
      solve_finite_v(AuctionSpec{std::numeric_limits<double>::infinity(), 0.0, 1.0}),
      DomainError);
  CHECK_THROWS_AS(solve_finite_v(AuctionSpec{100.0, 0.0, -1.0}), DomainError);
  // Unreachable tolerance.
  CHECK_THROWS_AS(solve_finite_v(AuctionSpec{100.0, 0.0, 10.0}, 1e-30),
                  ConvergenceError);
}

TEST_CASE("win profile of the equilibrium spreads chances evenly") {
  const Strategy s = solve_infinite_v(1.0);
  const WinProfile wp = win_profile(s);
  CHECK(wp.win[0] ==
        doctest::Approx(std::log(2.0) * 0.5).epsilon(1e-12));  // f_1 e^{-f_1}
  for (std::size_t i = 0; i < s.freqs.size(); ++i)
    CHECK(wp.win[i] / s.freqs[i] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(wp.p_no_winner == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("win profile identities for arbitrary frequencies") {
  // Single atom.
  const WinProfile atom = win_profile(std::vector<double>{3.0});
  CHECK(atom.win[0] == doctest::Approx(3.0 * std::exp(-3.0)).epsilon(1e-14));
  CHECK(atom.p_no_winner ==
        doctest::Approx(1.0 - 3.0 * std::exp(-3.0)).epsilon(1e-14));

  // Empty strategy: nobody bids, nobody wins.
  const WinProfile empty = win_profile(std::vector<double>{});
  CHECK(empty.p_no_winner == 1.0);

  // Interior zero: no winner mass on the empty number, potentials pass through.
  const WinProfile holed = win_profile(std::vector<double>{0.5, 0.0, 0.3});
  CHECK(holed.win[1] == 0.0);
  CHECK(holed.potential[1] ==
        doctest::Approx(1.0 - 0.5 * std::exp(-0.5)).epsilon(1e-14));

  // w_k / f_k = c_k and sum(w) + p_no_winner = 1 for random strategies.
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> f(1 + trial % 40);
    for (double& x : f) x = u(gen);
    const WinProfile wp = win_profile(f);
    double sum = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      sum += wp.win[i];
      if (f[i] > 0.0)
        CHECK(wp.win[i] / f[i] == doctest::Approx(wp.potential[i]).epsilon(1e-12));
    }
    CHECK(sum + wp.p_no_winner == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("expected payoffs") {
  // Equal across the support at the finite-V equilibrium.
  const AuctionSpec spec{100.0, 0.0, 10.0};
  const Strategy s = solve_finite_v(spec, 1e-9);
  const auto payoffs = expected_payoffs(s, spec);
  double lo = payoffs[0], hi = payoffs[0];
  for (std::size_t i = 0; i < s.support_end; ++i) {
    lo = std::min(lo, payoffs[i]);
    hi = std::max(hi, payoffs[i]);
  }
  CHECK(hi - lo <= 1e-6);

  // Hand-evaluated single-atom case.
  Strategy atom;
  atom.lambda = 1.0;
  atom.freqs = {1.0, 0.0};
  atom.support_end = 1;
  const auto pay = expected_payoffs(atom, AuctionSpec{10.0, 0.0, 1.0});
  CHECK(pay[0] == doctest::Approx(9.0 * std::exp(-1.0)).epsilon(1e-12));
  CHECK(pay[1] ==
        doctest::Approx(8.0 * (1.0 - std::exp(-1.0))).epsilon(1e-12));

  // A fee shifts every payoff uniformly.
  const auto with_fee = expected_payoffs(s, AuctionSpec{100.0, 0.75, 10.0});
  for (std::size_t i = 0; i < payoffs.size(); ++i)
    CHECK(with_fee[i] == doctest::Approx(payoffs[i] - 0.75).epsilon(1e-12));

  CHECK_THROWS_AS(expected_payoffs(s, AuctionSpec{}), DomainError);
  CHECK_THROWS_AS(expected_payoffs(s, AuctionSpec{100.0, -0.5, 10.0}), DomainError);
  CHECK_THROWS_AS(expected_payoffs(solve_infinite_v(100.0),
                                   AuctionSpec{20.0, 0.0, 100.0}),
                  DomainError);
}

TEST_CASE("cutoff estimates") {
  CHECK(cutoff_li(9.0, 0.0) ==
        doctest::Approx(testing::li_quadrature(10.0)).epsilon(1e-10));
  CHECK(cutoff_li(9.0, 2.5) - cutoff_li(9.0, 0.0) ==
        doctest::Approx(2.5).epsilon(1e-12));
  CHECK_THROWS_AS(cutoff_li(0.5, 0.0), DomainError);
  CHECK_THROWS_AS(cutoff_li(0.4, 0.0), DomainError);

  CHECK(cutoff_asymptotic(1000.0) == doctest::Approx(165.72).epsilon(1e-3));
  const double e2 = std::exp(2.0);
  CHECK(cutoff_asymptotic(e2) == doctest::Approx(1.5 * e2 / 2.0).epsilon(1e-12));
  CHECK_THROWS_AS(cutoff_asymptotic(std::exp(1.0)), DomainError);
  CHECK_THROWS_AS(cutoff_asymptotic(1.0), DomainError);
  CHECK(std::fabs(cutoff_asymptotic(1e6) / log_integral(1.0 + 1e6) - 1.0) <= 0.05);
}

TEST_CASE("strategy text round trip") {
  const Strategy s = solve_infinite_v(3.5);
  std::stringstream buf;
  write_strategy(buf, s);
  const Strategy back = read_strategy(buf);
  CHECK(back.lambda == s.lambda);
  REQUIRE(back.freqs.size() == s.freqs.size());
  for (std::size_t i = 0; i < s.freqs.size(); ++i)
    CHECK(back.freqs[i] == s.freqs[i]);
  CHECK(back.support_end == s.support_end);

  std::stringstream bad("# lambda=1\n0 0.5\n");
  CHECK_THROWS_AS(read_strategy(bad), ParseError);

  // Missing header: lambda inferred from the mass.
  std::stringstream headless("1 0.6\n2 0.4\n");
  const Strategy inferred = read_strategy(headless);
  CHECK(inferred.lambda == doctest::Approx(1.0).epsilon(1e-15));
}

}  // TEST_SUITE
