#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "luba/equilibrium.hpp"
#include "luba/simulator.hpp"

namespace luba {

struct Bid {
  std::string player_id;
  int number = 0;
};

/// One auction as ingested from a dataset: who bid what, for an item of
/// which value, at which fee.
struct AuctionRecord {
  std::string auction_id;
  long item_value = 0;
  double fee = 0.0;
  std::string timestamp;  // ISO-8601 date or empty
  std::vector<Bid> bids;

  int n() const { return static_cast<int>(bids.size()); }
  std::vector<int> counts() const;
  /// Winner re-adjudicated from the bids, never trusted from the file.
  std::optional<int> winner() const;
};

/// CSV schema `luba-v1`: a `# schema=luba-v1` comment line, then the header
/// `auction_id,item_value,fee,timestamp,player_id,number`, one row per bid.
/// Malformed rows are rejected with their line number.
std::vector<AuctionRecord> read_dataset(std::istream& in);
std::vector<AuctionRecord> load_dataset(const std::filesystem::path& path);
void write_dataset(std::ostream& out, std::span<const AuctionRecord> records,
                   std::span<const std::string> extra_comments = {});

/// Builds an AuctionRecord from a simulated sample; players are named
/// p0, p1, ... in draw order.
AuctionRecord record_from_sample(const AuctionSample& sample, std::string auction_id,
                                 long item_value, double fee,
                                 std::string timestamp = {});

/// Element-wise average of the bid histograms of all auctions with
/// n_min <= N <= n_max (and matching item value, when given).
struct HistogramBundle {
  double n_label = 0.0;        // mean N of the averaged auctions
  std::size_t l_auctions = 0;  // how many were averaged
  std::vector<double> phi;     // averaged counts per number
  long v_label = 0;            // common item value, 0 if mixed
};
HistogramBundle bundle_histograms(std::span<const AuctionRecord> records, int n_min,
                                  int n_max, std::optional<long> v_filter = {},
                                  bool normalize = false);

/// d = N^-2 sum_k (f_k - phi_k)^2 over the union of supports. The theory
/// strategy should be solved at lambda = N.
double l2_distance(std::span<const double> observed_counts, double n,
                   const Strategy& theory);
double l2_distance(const AuctionRecord& record, const Strategy& theory);
double l2_distance(const HistogramBundle& bundle, const Strategy& theory);

struct WinningStatsRow {
  double n_center = 0.0;
  std::size_t auctions = 0;
  std::size_t winners = 0;
  std::size_t no_winner = 0;
  double mean_win = 0.0;
  double std_win = 0.0;
  double theory_mean = 0.0;
  double theory_std = 0.0;
  double cutoff = 0.0;  // large-N cutoff estimate at the bin center
  bool flagged = false; // no winners in the bin
};

/// Empirical winning-number moments per N-range, against the moments of the
/// equilibrium win distribution at the bin center. No-winner auctions are
/// excluded from the moments and counted separately.
std::vector<WinningStatsRow> winning_number_stats(
    std::span<const AuctionRecord> records,
    std::span<const std::pair<double, double>> bins);

struct WinChanceRow {
  int k = 0;
  double c_hat = 0.0;  // potential-winning chance under the observed bids
  double ratio = 0.0;  // c_hat * (N + 1)
};

struct WinChanceTable {
  std::vector<WinChanceRow> rows;  // k = 1..len(phi)+1; the last row is the tail
  double n = 0.0;
};

/// Winning chance of a marginal entrant bidding k, given that everyone else
/// follows the bundle's observed bid distribution, relative to the
/// equilibrium value 1/(N+1).
WinChanceTable empirical_win_chances(const HistogramBundle& bundle);

enum class RegimeClass { nash_like, exponential_like, indeterminate };

struct RegimeRow {
  std::string auction_id;
  int n = 0;
  double d = 0.0;          // l2 distance to the equilibrium at lambda = N
  double d_times_n = 0.0;
  double ll_nash = 0.0;    // log-likelihood of the bids under the equilibrium
  double ll_exp = 0.0;     // under the fitted geometric strategy
  RegimeClass cls = RegimeClass::indeterminate;
};

struct RegimeReport {
  std::vector<RegimeRow> rows;
  std::size_t nash_like = 0;
  std::size_t exponential_like = 0;
  std::size_t indeterminate = 0;
  double dn_threshold = 3.0;  // d*N at or below this is equilibrium noise
  double ll_margin = 2.0;     // decision threshold on the log-likelihood gap
  double prob_floor = 1e-12;  // floor for out-of-support equilibrium bids
};

/// Per-auction equilibrium-vs-exponential comparison over a whole dataset.
/// An auction whose d*N sits at the equilibrium sampling floor (expected
/// value 1) is Nash-like; away from the floor the log-likelihood gap between
/// the equilibrium and the fitted geometric strategy decides.
RegimeReport regime_report(std::span<const AuctionRecord> records,
                           double dn_threshold = 3.0, double ll_margin = 2.0);

}  // namespace luba
