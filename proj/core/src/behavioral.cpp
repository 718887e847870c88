#include "luba/behavioral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "luba/errors.hpp"

namespace luba {

std::vector<double> logit_strategy(const LogitModel& model) {
  const auto& e = model.payoffs;
  if (e.empty()) throw DomainError("logit_strategy: needs at least one option");
  if (!(model.beta >= 0.0)) throw DomainError("logit_strategy: requires beta >= 0");
  for (double x : e) {
    if (std::isnan(x)) throw DomainError("logit_strategy: NaN payoff");
    if (x == -std::numeric_limits<double>::infinity())
      throw DomainError("logit_strategy: payoff of -inf gives unbounded weight");
  }
  std::vector<double> p(e.size());
  if (model.beta == 0.0) {
    std::fill(p.begin(), p.end(), 1.0 / static_cast<double>(e.size()));
    return p;
  }
  double lo = std::numeric_limits<double>::infinity();
  for (double x : e)
    if (std::isfinite(x)) lo = std::min(lo, model.beta * x);
  if (!std::isfinite(lo)) throw DomainError("logit_strategy: all payoffs infinite");

  double sum = 0.0;
  for (std::size_t k = 0; k < e.size(); ++k) {
    p[k] = std::isfinite(e[k]) ? std::exp(-(model.beta * e[k] - lo)) : 0.0;
    sum += p[k];
  }
  for (double& x : p) x /= sum;
  return p;
}

std::vector<double> uniform_prior_payoffs(double v, double fee, double win_prior,
                                          int k_range) {
  if (k_range < 1) throw DomainError("uniform_prior_payoffs: requires k_range >= 1");
  if (!(v > static_cast<double>(k_range)))
    throw DomainError("uniform_prior_payoffs: requires v > k_range");
  std::vector<double> e(static_cast<std::size_t>(k_range));
  for (int k = 1; k <= k_range; ++k)
    e[static_cast<std::size_t>(k - 1)] = (v - k) * win_prior - fee;
  return e;
}

namespace {

constexpr double kRateCap = 700.0;

// Mean of (k - 1) under p_k proportional to exp(-rate * (k - 1)) on 1..K.
// Decreasing in rate; evaluated with a max shift so any rate is safe.
double window_mean(double rate, std::size_t k_bins) {
  double shift = rate > 0.0 ? 0.0 : -rate * static_cast<double>(k_bins - 1);
  double z = 0.0, zk = 0.0;
  for (std::size_t j = 0; j < k_bins; ++j) {
    const double w = std::exp(-rate * static_cast<double>(j) - shift);
    z += w;
    zk += w * static_cast<double>(j);
  }
  return zk / z;
}

double window_log_norm(double rate, std::size_t k_bins) {
  double shift = rate > 0.0 ? 0.0 : -rate * static_cast<double>(k_bins - 1);
  double z = 0.0;
  for (std::size_t j = 0; j < k_bins; ++j)
    z += std::exp(-rate * static_cast<double>(j) - shift);
  return shift + std::log(z);
}

}  // namespace

ExponentialFit fit_exponential_rate(std::span<const double> counts) {
  if (counts.size() < 2)
    throw FitError("fit_exponential_rate: need a histogram over at least 2 bins");
  double total = 0.0, weighted = 0.0;
  for (std::size_t j = 0; j < counts.size(); ++j) {
    if (!(counts[j] >= 0.0)) throw FitError("fit_exponential_rate: negative count");
    total += counts[j];
    weighted += counts[j] * static_cast<double>(j);
  }
  if (!(total > 0.0)) throw FitError("fit_exponential_rate: empty histogram");
  const double mean = weighted / total;
  const std::size_t k_bins = counts.size();

  ExponentialFit fit;
  if (mean <= window_mean(kRateCap, k_bins)) {
    fit.rate = kRateCap;
    fit.capped = true;
  } else if (mean >= window_mean(-kRateCap, k_bins)) {
    fit.rate = -kRateCap;
    fit.capped = true;
  } else {
    double lo = -kRateCap, hi = kRateCap;  // window_mean decreasing in rate
    for (int i = 0; i < 200 && hi - lo > 1e-13 * (1.0 + std::fabs(hi)); ++i) {
      const double mid = 0.5 * (lo + hi);
      (window_mean(mid, k_bins) > mean ? lo : hi) = mid;
    }
    fit.rate = 0.5 * (lo + hi);
  }
  fit.log_likelihood = -fit.rate * weighted - total * window_log_norm(fit.rate, k_bins);
  return fit;
}

}  // namespace luba
