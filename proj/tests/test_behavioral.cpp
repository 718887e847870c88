#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "luba/behavioral.hpp"
#include "luba/errors.hpp"
#include "luba/rng.hpp"

using namespace luba;

TEST_SUITE("behavioral") {

TEST_CASE("logit limits") {
  // beta = 0 erases the payoffs.
  const auto uniform = logit_strategy({0.0, {5.0, -3.0, 0.0, 2.0, 100.0}});
  for (double p : uniform) CHECK(p == doctest::Approx(0.2).epsilon(1e-15));

  // Large beta concentrates on the smallest payoff (sign as printed).
  const auto hard = logit_strategy({1e4, {1.0, 2.0, 3.0}});
  CHECK(hard[0] == 1.0);
  CHECK(hard[1] == 0.0);
  CHECK(hard[2] == 0.0);

  // Linear payoffs give a geometric strategy.
  std::vector<double> linear;
  for (int k = 1; k <= 8; ++k) linear.push_back(static_cast<double>(k));
  const auto geo = logit_strategy({1.0, linear});
  for (std::size_t i = 0; i + 1 < geo.size(); ++i)
    CHECK(geo[i + 1] / geo[i] == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("logit is a shifted-invariant distribution") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (int trial = 0; trial < 25; ++trial) {
    LogitModel model;
    model.beta = 0.3 * (trial + 1);
    for (int k = 0; k < 12; ++k) model.payoffs.push_back(u(gen));
    const auto p = logit_strategy(model);
    double sum = 0.0;
    for (double x : p) {
      CHECK(x >= 0.0);
      CHECK(x <= 1.0);
      sum += x;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));

    LogitModel shifted = model;
    for (double& x : shifted.payoffs) x += 123.5;
    const auto q = logit_strategy(shifted);
    for (std::size_t i = 0; i < p.size(); ++i)
      CHECK(q[i] == doctest::Approx(p[i]).epsilon(1e-12));
  }
}

TEST_CASE("logit error paths") {
  CHECK_THROWS_AS(logit_strategy({1.0, {}}), DomainError);
  CHECK_THROWS_AS(logit_strategy({-1.0, {1.0}}), DomainError);
  const double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(logit_strategy({1.0, {inf, inf}}), DomainError);
  CHECK_THROWS_AS(logit_strategy({1.0, {1.0, -inf}}), DomainError);
  CHECK_THROWS_AS(logit_strategy({1.0, {1.0, std::nan("")}}), DomainError);
  // A +inf payoff is simply never chosen under the printed sign.
  const auto p = logit_strategy({1.0, {1.0, inf, 2.0}});
  CHECK(p[1] == 0.0);
  CHECK(p[0] + p[2] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("uniform-prior payoffs are linear in the bid") {
  const auto e = uniform_prior_payoffs(100.0, 0.0, 0.01, 10);
  REQUIRE(e.size() == 10);
  for (int k = 1; k <= 10; ++k)
    CHECK(e[static_cast<std::size_t>(k - 1)] ==
          doctest::Approx((100.0 - k) * 0.01).epsilon(1e-15));
  CHECK(e.front() == doctest::Approx(0.99).epsilon(1e-15));
  CHECK(e.back() == doctest::Approx(0.90).epsilon(1e-15));

  // Preferring high payoffs (negate before the logit) gives constant ratio
  // exp(-beta * win_prior).
  const double beta = 2.0, prior = 0.01;
  std::vector<double> negated;
  for (double x : uniform_prior_payoffs(100.0, 0.5, prior, 20)) negated.push_back(-x);
  const auto p = logit_strategy({beta, negated});
  for (std::size_t i = 0; i + 1 < p.size(); ++i)
    CHECK(p[i + 1] / p[i] ==
          doctest::Approx(std::exp(-beta * prior)).epsilon(1e-12));

  // Zero prior makes every bid look alike.
  std::vector<double> flat_neg;
  for (double x : uniform_prior_payoffs(100.0, 0.5, 0.0, 5)) flat_neg.push_back(-x);
  for (double p_k : logit_strategy({7.0, flat_neg}))
    CHECK(p_k == doctest::Approx(0.2).epsilon(1e-14));

  CHECK_THROWS_AS(uniform_prior_payoffs(10.0, 0.0, 0.1, 10), DomainError);
  CHECK_THROWS_AS(uniform_prior_payoffs(10.0, 0.0, 0.1, 0), DomainError);
}

TEST_CASE("geometric rate recovery from sampled counts") {
  // 1e5 draws from p_k ~ exp(-k/5) over a wide window.
  const double rate = 0.2;
  std::vector<double> weights;
  for (int k = 1; k <= 80; ++k) weights.push_back(std::exp(-rate * k));
  DiscreteSampler sampler(weights);
  CounterRng rng(99, 0);
  std::vector<double> counts(80, 0.0);
  for (int i = 0; i < 100000; ++i) counts[sampler.draw(rng)] += 1.0;
  const ExponentialFit fit = fit_exponential_rate(counts);
  CHECK(!fit.capped);
  CHECK(fit.rate == doctest::Approx(rate).epsilon(0.05));
  CHECK(std::fabs(fit.rate - rate) < 0.01);
}

TEST_CASE("geometric fit boundaries") {
  // Flat histogram: rate 0.
  const ExponentialFit flat = fit_exponential_rate(std::vector<double>{100.0, 100.0});
  CHECK(!flat.capped);
  CHECK(std::fabs(flat.rate) < 1e-9);

  // Everything in the first bin: capped and flagged.
  const ExponentialFit spike =
      fit_exponential_rate(std::vector<double>{100.0, 0.0, 0.0, 0.0});
  CHECK(spike.capped);
  CHECK(spike.rate >= 699.0);

  // Increasing data gives a negative rate.
  const ExponentialFit rising =
      fit_exponential_rate(std::vector<double>{10.0, 20.0, 40.0});
  CHECK(rising.rate < 0.0);
  CHECK(rising.rate == doctest::Approx(-std::log(2.0)).epsilon(1e-6));

  CHECK_THROWS_AS(fit_exponential_rate(std::vector<double>{100.0}), FitError);
  CHECK_THROWS_AS(fit_exponential_rate(std::vector<double>{0.0, 0.0}), FitError);
}

TEST_CASE("fitted log-likelihood is a maximum") {
  const std::vector<double> counts{40.0, 25.0, 12.0, 9.0, 3.0, 1.0};
  const ExponentialFit fit = fit_exponential_rate(counts);
  const auto ll_at = [&](double rate) {
    double weighted = 0.0, total = 0.0, z = 0.0;
    for (std::size_t j = 0; j < counts.size(); ++j) {
      weighted += counts[j] * static_cast<double>(j);
      total += counts[j];
    }
    for (std::size_t j = 0; j < counts.size(); ++j)
      z += std::exp(-rate * static_cast<double>(j));
    return -rate * weighted - total * std::log(z);
  };
  CHECK(fit.log_likelihood == doctest::Approx(ll_at(fit.rate)).epsilon(1e-10));
  CHECK(fit.log_likelihood >= ll_at(fit.rate + 0.05));
  CHECK(fit.log_likelihood >= ll_at(fit.rate - 0.05));
}

}  // TEST_SUITE
