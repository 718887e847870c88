#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace luba {

enum class PopulationMode { fixed_n, poisson };

/// How many bids enter one auction: a fixed count, a Poisson-distributed
/// count, or (for the multi-bid variants) players * bids_per_player.
struct PopulationModel {
  PopulationMode mode = PopulationMode::poisson;
  double n_or_lambda = 1.0;
  int players = 0;
  int bids_per_player = 1;
};

/// Realized bid counts per number plus the adjudicated winner, if any.
struct AuctionOutcome {
  std::vector<int> counts;
  std::optional<int> winner;  // 1-based winning number
  int realized_n = 0;
};

/// Outcome plus the per-player bid lists it was adjudicated from.
struct AuctionSample {
  AuctionOutcome outcome;
  std::vector<std::vector<int>> bids_by_player;
};

/// Lowest number held by exactly one bid, or nullopt.
std::optional<int> lowest_unique(std::span<const int> counts);

/// One auction with single-bid players drawn i.i.d. from the strategy.
/// fixed_n mode requires an integral count; poisson mode draws it first.
/// Identical (seed, stream) pairs give identical outcomes.
AuctionOutcome simulate_auction(std::span<const double> strategy,
                                const PopulationModel& pop, std::uint64_t seed,
                                std::uint64_t stream = 0);
AuctionSample simulate_auction_sample(std::span<const double> strategy,
                                      const PopulationModel& pop, std::uint64_t seed,
                                      std::uint64_t stream = 0);

/// One auction where each of `players` agents places m bids on distinct
/// numbers (redrawing own duplicates); different agents may still collide.
/// With m = 1 the draw sequence matches simulate_auction in fixed_n mode.
AuctionOutcome simulate_multibid(std::span<const double> strategy, int players, int m,
                                 std::uint64_t seed, std::uint64_t stream = 0);
AuctionSample simulate_multibid_sample(std::span<const double> strategy, int players,
                                       int m, std::uint64_t seed,
                                       std::uint64_t stream = 0);

/// Exact winner distribution for n i.i.d. bids from a strategy over K
/// numbers, by enumerating bid-count compositions with multinomial weights.
/// Enforces n <= 8, K <= 8 and the K^n <= 2^24 budget.
struct WinnerDistribution {
  std::vector<double> win;
  double p_no_winner = 1.0;
};
WinnerDistribution enumerate_fixed_n(std::span<const double> strategy, int n);

struct AdaptiveParams {
  int players = 100;
  int m = 1;
  int rounds = 300;
  int batch = 4000;
  double learning_rate = 0.2;
  std::uint64_t seed = 1;
  int k_override = 0;          // state dimension; 0 derives it from the bid volume
  double p_min = 1e-6;         // probability floor, keeps numbers revivable
  int pool_rounds = 5;         // rounds pooled for the convergence test
  int averaging_window = 25;   // trailing iterates averaged into the result
  double significance = 0.05;
  double min_bids_per_number = 50.0;
};

struct AdaptiveRound {
  int round = 0;
  double chi2 = 0.0;
  int dof = 0;
  double p_value = 0.0;
  double step_l1 = 0.0;            // l1 change of the strategy this round
  double min_expected_bids = 0.0;  // over numbers with non-floor probability
  bool batch_ok = true;
};

struct AdaptiveResult {
  std::vector<double> strategy;  // probability vector (trailing average)
  bool converged = false;
  int rounds_used = 0;
  bool batch_size_ok = true;
  std::vector<AdaptiveRound> trace;
};

/// Individual-based equilibrium search: play batches of multi-bid auctions,
/// then scale each number's probability by its per-bid win rate relative to
/// the mean, damped by learning_rate. Converged when a chi-square test over
/// the pooled recent rounds cannot reject equal per-bid win rates.
AdaptiveResult adaptive_equilibrium(const AdaptiveParams& params);

}  // namespace luba
