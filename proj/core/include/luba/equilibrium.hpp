#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

namespace luba {

/// A symmetric population strategy for the lowest-unique-bid game, stored as
/// mean bid counts: freqs[i] is the mean number of bids placed on number i+1.
/// lambda is the mean total number of bids, so the per-player probability of
/// bidding k is freqs[k-1] / lambda.
struct Strategy {
  double lambda = 0.0;
  std::vector<double> freqs;
  std::size_t support_end = 0;  // largest 1-based k with freqs[k-1] > 0

  double total() const;
  std::vector<double> probabilities() const;  // freqs / lambda
};

/// Per-number outcome probabilities under independent Poisson bid counts:
/// win[k-1]      probability that k is the realized winning number,
/// potential[k-1] probability that one extra bid on k would win,
/// p_no_winner   probability that no number holds a unique lowest bid.
struct WinProfile {
  std::vector<double> win;
  std::vector<double> potential;
  double p_no_winner = 1.0;
};

/// Auction parameters: item value V (may be infinite), per-bid fee, and the
/// mean number of bids.
struct AuctionSpec {
  double item_value = std::numeric_limits<double>::infinity();
  double fee = 0.0;
  double lambda = 1.0;

  bool finite() const;
};

/// One step of the equal-payoff recurrence with infinite item value:
/// f' = ln(e^f - f). Stable from denormals up to f far beyond overflow of
/// e^f; for small f it returns f^2/2 + f^3/6 - ... with full relative
/// precision, which the tail checks rely on.
double next_frequency(double f);

/// One step of the finite-V recurrence: ln(e^f - f) + ln(1 - 1/(v - k)).
/// May return a non-positive or non-finite value; callers truncate there.
double next_frequency(double f, double item_value, std::size_t k);

/// Equilibrium frequencies for infinite item value: f_1 = ln(1 + lambda),
/// then the recurrence, truncated once an iterate drops below tail_eps.
/// Throws DomainError for lambda <= 0 and TruncationError (carrying the
/// partial result) if k_max entries are produced first.
Strategy solve_infinite_v(double lambda, double tail_eps = 1e-12,
                          std::size_t k_max = 1'000'000);

struct FiniteSolveInfo {
  int bisection_iterations = 0;
  int bracket_expansions = 0;
  bool multiple_sign_changes = false;  // coarse scan saw more than one root
  double residual = 0.0;               // |sum f - lambda| at the solution
};

/// Equilibrium frequencies for finite item value >= 2. The first frequency
/// is found by bisection on the monotone map f_1 -> sum_k f_k, with the
/// recurrence truncated at the first non-positive iterate (which also keeps
/// the support below V). Stops when |sum - lambda| <= tol.
Strategy solve_finite_v(const AuctionSpec& spec, double tol = 1e-9,
                        FiniteSolveInfo* info = nullptr);

/// Winning and potential-winning probabilities for arbitrary non-negative
/// mean bid counts (not only equilibrium ones).
WinProfile win_profile(std::span<const double> freqs);
WinProfile win_profile(const Strategy& strategy);

/// Expected payoff (V - k) * w_k/f_k - fee for each number in 1..freqs.size().
/// Numbers with f_k = 0 use the potential-winning probability c_k, which is
/// the marginal entrant's chance of winning there. Requires finite V larger
/// than the support.
std::vector<double> expected_payoffs(const Strategy& strategy, const AuctionSpec& spec);

/// Support cutoff estimate li(1 + lambda) + c. Requires lambda > 0.5.
double cutoff_li(double lambda, double c);

/// Large-n cutoff estimate (1 + 1/ln n) * n / ln n. Requires n > e.
double cutoff_asymptotic(double n);

struct CutoffFit {
  double c = 0.0;                // fitted additive constant
  double max_abs_residual = 0.0; // worst |support_end - (li(1+lambda) + c)|
  std::size_t points = 0;
};

/// Least-squares fit of the constant in the cutoff law against the solver's
/// support length over a lambda grid. support_end is measured at tail_eps.
CutoffFit fit_cutoff_constant(std::span<const double> lambdas, double tail_eps = 1e-9);

/// Text form: `# lambda=<value>` header followed by "k f_k" rows.
void write_strategy(std::ostream& out, const Strategy& strategy);
Strategy read_strategy(std::istream& in);

}  // namespace luba
