#pragma once

#include <span>
#include <vector>

namespace luba {

/// Logit (quantal response) choice model: option k gets weight
/// exp(-beta * payoffs[k]). As printed this favors LOW payoff values; pass
/// negated payoffs to prefer high ones. beta = 0 ignores payoffs entirely.
struct LogitModel {
  double beta = 0.0;
  std::vector<double> payoffs;
};

/// Normalized choice probabilities of the model, computed with a max-shift
/// so extreme beta * payoff products cannot overflow.
std::vector<double> logit_strategy(const LogitModel& model);

/// Payoffs under a uniform prior win chance: E_k = (v - k) * win_prior - fee
/// for k = 1..k_range, linear in k. Requires v > k_range.
std::vector<double> uniform_prior_payoffs(double v, double fee, double win_prior,
                                          int k_range);

struct ExponentialFit {
  double rate = 0.0;            // p_k proportional to exp(-rate * k)
  double log_likelihood = 0.0;  // at the fitted rate, truncated to the window
  bool capped = false;          // rate hit the +/- 700 cap (degenerate data)
};

/// Maximum-likelihood geometric rate for a histogram over bins 1..K,
/// truncated to the observed window. Flat counts give rate 0; all mass in
/// the first bin drives the rate to the cap.
ExponentialFit fit_exponential_rate(std::span<const double> counts);

}  // namespace luba
