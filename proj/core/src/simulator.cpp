#include "luba/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "luba/equilibrium.hpp"
#include "luba/errors.hpp"
#include "luba/parallel.hpp"
#include "luba/rng.hpp"
#include "luba/special.hpp"

namespace luba {

std::optional<int> lowest_unique(std::span<const int> counts) {
  for (std::size_t i = 0; i < counts.size(); ++i)
    if (counts[i] == 1) return static_cast<int>(i + 1);
  return std::nullopt;
}

namespace {

AuctionSample run_single_bid(std::span<const double> strategy, int n, CounterRng& rng,
                             bool keep_bids) {
  const DiscreteSampler sampler(strategy);
  AuctionSample sample;
  sample.outcome.counts.assign(strategy.size(), 0);
  sample.outcome.realized_n = n;
  if (keep_bids) sample.bids_by_player.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int number = static_cast<int>(sampler.draw(rng)) + 1;
    ++sample.outcome.counts[static_cast<std::size_t>(number - 1)];
    if (keep_bids) sample.bids_by_player[static_cast<std::size_t>(i)].push_back(number);
  }
  sample.outcome.winner = lowest_unique(sample.outcome.counts);
  return sample;
}

AuctionSample run_multibid(std::span<const double> strategy, int players, int m,
                           CounterRng& rng, bool keep_bids) {
  if (players < 1) throw DomainError("simulate_multibid: requires players >= 1");
  if (m < 1) throw DomainError("simulate_multibid: requires m >= 1");
  int support = 0;
  for (double p : strategy)
    if (p > 0.0) ++support;
  if (m > support)
    throw DomainError("simulate_multibid: m exceeds the strategy's support size");

  const DiscreteSampler sampler(strategy);
  AuctionSample sample;
  sample.outcome.counts.assign(strategy.size(), 0);
  sample.outcome.realized_n = players * m;
  if (keep_bids) sample.bids_by_player.resize(static_cast<std::size_t>(players));
  std::vector<char> taken(strategy.size(), 0);
  std::vector<int> mine;
  mine.reserve(static_cast<std::size_t>(m));
  for (int pl = 0; pl < players; ++pl) {
    std::fill(taken.begin(), taken.end(), 0);
    mine.clear();
    while (static_cast<int>(mine.size()) < m) {
      const std::size_t idx = sampler.draw(rng);
      if (taken[idx]) continue;  // own duplicate: redraw
      taken[idx] = 1;
      mine.push_back(static_cast<int>(idx) + 1);
      ++sample.outcome.counts[idx];
    }
    if (keep_bids) sample.bids_by_player[static_cast<std::size_t>(pl)] = mine;
  }
  sample.outcome.winner = lowest_unique(sample.outcome.counts);
  return sample;
}

int resolve_count(const PopulationModel& pop, CounterRng& rng) {
  if (!(pop.n_or_lambda > 0.0))
    throw DomainError("simulate_auction: requires a positive population size");
  if (pop.mode == PopulationMode::fixed_n) {
    const double n = pop.n_or_lambda;
    if (n != std::floor(n))
      throw DomainError("simulate_auction: fixed_n mode needs an integer count");
    return static_cast<int>(n);
  }
  return rng.poisson(pop.n_or_lambda);
}

}  // namespace

AuctionSample simulate_auction_sample(std::span<const double> strategy,
                                      const PopulationModel& pop, std::uint64_t seed,
                                      std::uint64_t stream) {
  CounterRng rng(seed, stream);
  const int n = resolve_count(pop, rng);
  return run_single_bid(strategy, n, rng, /*keep_bids=*/true);
}

AuctionOutcome simulate_auction(std::span<const double> strategy,
                                const PopulationModel& pop, std::uint64_t seed,
                                std::uint64_t stream) {
  CounterRng rng(seed, stream);
  const int n = resolve_count(pop, rng);
  return run_single_bid(strategy, n, rng, /*keep_bids=*/false).outcome;
}

AuctionSample simulate_multibid_sample(std::span<const double> strategy, int players,
                                       int m, std::uint64_t seed, std::uint64_t stream) {
  CounterRng rng(seed, stream);
  return run_multibid(strategy, players, m, rng, /*keep_bids=*/true);
}

AuctionOutcome simulate_multibid(std::span<const double> strategy, int players, int m,
                                 std::uint64_t seed, std::uint64_t stream) {
  CounterRng rng(seed, stream);
  return run_multibid(strategy, players, m, rng, /*keep_bids=*/false).outcome;
}

WinnerDistribution enumerate_fixed_n(std::span<const double> strategy, int n) {
  const std::size_t k = strategy.size();
  if (k < 1 || k > 8) throw DomainError("enumerate_fixed_n: requires 1 <= K <= 8");
  if (n < 1 || n > 8) throw DomainError("enumerate_fixed_n: requires 1 <= n <= 8");
  if (std::pow(static_cast<double>(k), n) > static_cast<double>(1 << 24))
    throw DomainError("enumerate_fixed_n: K^n exceeds the enumeration budget");

  double total = 0.0;
  for (double p : strategy) {
    if (!(p >= 0.0)) throw DomainError("enumerate_fixed_n: negative probability");
    total += p;
  }
  if (!(total > 0.0)) throw DomainError("enumerate_fixed_n: zero strategy");

  static constexpr double kFactorial[] = {1, 1, 2, 6, 24, 120, 720, 5040, 40320};
  WinnerDistribution dist;
  dist.win.assign(k, 0.0);
  dist.p_no_winner = 0.0;

  // Depth-first over compositions of n into k parts; the weight carried down
  // is n! * prod p_j^{c_j} / c_j!, the multinomial probability of the counts.
  std::vector<int> counts(k, 0);
  auto recurse = [&](auto&& self, std::size_t pos, int left, double weight) -> void {
    if (pos + 1 == k) {
      counts[pos] = left;
      double term = weight;
      if (left > 0) {
        if (strategy[pos] == 0.0) return;
        term *= std::pow(strategy[pos] / total, left) / kFactorial[left];
      }
      const auto winner = lowest_unique(counts);
      if (winner)
        dist.win[static_cast<std::size_t>(*winner - 1)] += term;
      else
        dist.p_no_winner += term;
      return;
    }
    for (int c = 0; c <= left; ++c) {
      counts[pos] = c;
      double term = weight;
      if (c > 0) {
        if (strategy[pos] == 0.0) break;
        term *= std::pow(strategy[pos] / total, c) / kFactorial[c];
      }
      self(self, pos + 1, left - c, term);
    }
    counts[pos] = 0;
  };
  recurse(recurse, 0, n, kFactorial[n]);
  return dist;
}

namespace {

struct Tally {
  std::vector<long long> bids;
  std::vector<long long> wins;
};

Tally run_batch(std::span<const double> strategy, int players, int m, int batch,
                std::uint64_t seed, std::uint64_t stream_base) {
  const std::size_t k = strategy.size();
  std::vector<Tally> partial(thread_count(), Tally{std::vector<long long>(k, 0),
                                                   std::vector<long long>(k, 0)});
  // One tally per worker block: parallel_for hands out contiguous blocks of
  // the same size computed here, so index / block identifies the worker.
  const std::size_t workers = std::max<std::size_t>(1, partial.size());
  const std::size_t block = (static_cast<std::size_t>(batch) + workers - 1) / workers;
  parallel_for(static_cast<std::size_t>(batch), [&](std::size_t i) {
    Tally& t = partial[i / block];
    const AuctionOutcome out =
        simulate_multibid(strategy, players, m, seed, stream_base + i);
    for (std::size_t j = 0; j < k; ++j) t.bids[j] += out.counts[j];
    if (out.winner) ++t.wins[static_cast<std::size_t>(*out.winner - 1)];
  });
  Tally total{std::vector<long long>(k, 0), std::vector<long long>(k, 0)};
  for (const Tally& t : partial)
    for (std::size_t j = 0; j < k; ++j) {
      total.bids[j] += t.bids[j];
      total.wins[j] += t.wins[j];
    }
  return total;
}

}  // namespace

AdaptiveResult adaptive_equilibrium(const AdaptiveParams& params) {
  if (params.players < 1 || params.m < 1)
    throw DomainError("adaptive_equilibrium: requires players >= 1 and m >= 1");
  if (params.rounds < 1 || params.batch < 1)
    throw DomainError("adaptive_equilibrium: requires rounds >= 1 and batch >= 1");
  if (!(params.learning_rate >= 0.0 && params.learning_rate <= 1.0))
    throw DomainError("adaptive_equilibrium: learning_rate must be in [0, 1]");
  if (params.k_override < 0)
    throw DomainError("adaptive_equilibrium: k_override must be non-negative");

  const double bid_volume = static_cast<double>(params.players) * params.m;
  std::size_t k = static_cast<std::size_t>(params.k_override);
  if (k == 0) k = solve_infinite_v(bid_volume, 1e-9).support_end + 15;
  if (static_cast<int>(k) < params.m)
    throw DomainError("adaptive_equilibrium: m exceeds the state dimension");

  std::vector<double> p(k, 1.0 / static_cast<double>(k));
  std::deque<Tally> window;
  std::deque<std::vector<double>> recent;
  std::vector<std::vector<double>> stationary;  // iterates after convergence
  AdaptiveResult result;
  result.batch_size_ok = true;

  for (int round = 0; round < params.rounds; ++round) {
    const std::uint64_t stream_base =
        (static_cast<std::uint64_t>(round) + 1) << 32;
    Tally tally = run_batch(p, params.players, params.m, params.batch, params.seed,
                            stream_base);
    window.push_back(tally);
    if (static_cast<int>(window.size()) > params.pool_rounds) window.pop_front();

    long long total_bids = 0, total_wins = 0;
    for (std::size_t j = 0; j < k; ++j) {
      total_bids += tally.bids[j];
      total_wins += tally.wins[j];
    }
    const double mean_rate =
        total_bids > 0 ? static_cast<double>(total_wins) / total_bids : 0.0;

    AdaptiveRound diag;
    diag.round = round + 1;

    // Expected bid volume per live number this round.
    diag.min_expected_bids = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < k; ++j)
      if (p[j] > 2.0 * params.p_min)
        diag.min_expected_bids = std::min(
            diag.min_expected_bids, p[j] * bid_volume * params.batch);
    diag.batch_ok = diag.min_expected_bids >= params.min_bids_per_number;
    if (!diag.batch_ok) result.batch_size_ok = false;

    // Multiplicative update on per-bid win rates, damped and floored.
    double step_l1 = 0.0;
    if (params.learning_rate > 0.0 && mean_rate > 0.0) {
      std::vector<double> updated(k);
      double norm = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        const double ratio = (static_cast<double>(tally.wins[j]) + 0.5) /
                             (mean_rate * static_cast<double>(tally.bids[j]) + 0.5);
        updated[j] = std::max(p[j] * std::pow(ratio, params.learning_rate),
                              params.p_min);
        norm += updated[j];
      }
      for (std::size_t j = 0; j < k; ++j) {
        updated[j] /= norm;
        step_l1 += std::fabs(updated[j] - p[j]);
      }
      p.swap(updated);
    }
    diag.step_l1 = step_l1;

    recent.push_back(p);
    if (static_cast<int>(recent.size()) > params.averaging_window) recent.pop_front();

    // Chi-square for equal per-bid win rates over the pooled window.
    Tally pooled{std::vector<long long>(k, 0), std::vector<long long>(k, 0)};
    long long pb = 0, pw = 0;
    for (const Tally& t : window)
      for (std::size_t j = 0; j < k; ++j) {
        pooled.bids[j] += t.bids[j];
        pooled.wins[j] += t.wins[j];
      }
    for (std::size_t j = 0; j < k; ++j) {
      pb += pooled.bids[j];
      pw += pooled.wins[j];
    }
    const double pooled_rate = pb > 0 ? static_cast<double>(pw) / pb : 0.0;
    double chi2 = 0.0;
    int cells = 0;
    if (pooled_rate > 0.0 && pooled_rate < 1.0) {
      for (std::size_t j = 0; j < k; ++j) {
        const double expected = pooled_rate * static_cast<double>(pooled.bids[j]);
        if (expected < 5.0) continue;
        const double var = expected * (1.0 - pooled_rate);
        const double dev = static_cast<double>(pooled.wins[j]) - expected;
        chi2 += dev * dev / var;
        ++cells;
      }
    }
    diag.chi2 = chi2;
    diag.dof = std::max(0, cells - 1);
    diag.p_value = diag.dof > 0 ? 1.0 - chi_square_cdf(chi2, diag.dof) : 0.0;
    result.trace.push_back(diag);
    result.rounds_used = round + 1;

    if (!result.converged && static_cast<int>(window.size()) == params.pool_rounds &&
        diag.dof > 0 && diag.p_value >= params.significance)
      result.converged = true;
    // Keep iterating for a measurement phase once the test passes, so the
    // returned average covers only stationary rounds.
    if (result.converged) {
      stationary.push_back(p);
      if (static_cast<int>(stationary.size()) >= params.averaging_window) break;
    }
  }

  // Average the stationary iterates; if the test never passed, fall back to
  // the trailing window and leave the result flagged.
  const auto average_of = [&](const auto& iterates) {
    result.strategy.assign(k, 0.0);
    for (const auto& q : iterates)
      for (std::size_t j = 0; j < k; ++j) result.strategy[j] += q[j];
    double norm = 0.0;
    for (double& x : result.strategy) norm += x;
    for (double& x : result.strategy) x /= norm;
  };
  if (!stationary.empty())
    average_of(stationary);
  else
    average_of(recent);
  return result;
}

}  // namespace luba
