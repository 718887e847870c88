#include "luba/analysis.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "luba/behavioral.hpp"
#include "luba/errors.hpp"

namespace luba {

std::vector<int> AuctionRecord::counts() const {
  int max_number = 0;
  for (const Bid& b : bids) max_number = std::max(max_number, b.number);
  std::vector<int> c(static_cast<std::size_t>(max_number), 0);
  for (const Bid& b : bids) ++c[static_cast<std::size_t>(b.number - 1)];
  return c;
}

std::optional<int> AuctionRecord::winner() const {
  const auto c = counts();
  return lowest_unique(c);
}

namespace {

constexpr const char* kSchemaMarker = "# schema=luba-v1";
constexpr const char* kHeader = "auction_id,item_value,fee,timestamp,player_id,number";

std::string format_double(double x) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

bool plausible_iso_date(const std::string& s) {
  // YYYY-MM-DD, optionally followed by a time suffix.
  if (s.size() < 10) return false;
  for (int i : {0, 1, 2, 3, 5, 6, 8, 9})
    if (!std::isdigit(static_cast<unsigned char>(s[static_cast<std::size_t>(i)])))
      return false;
  return s[4] == '-' && s[7] == '-';
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

}  // namespace

std::vector<AuctionRecord> read_dataset(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool saw_marker = false;
  bool saw_header = false;

  // Leading comment block; the schema marker must appear before the header.
  while (in.peek() == '#' && std::getline(in, line)) {
    ++line_no;
    if (line == kSchemaMarker) saw_marker = true;
  }
  if (!saw_marker) throw ParseError("dataset: missing '# schema=luba-v1' marker", 1);
  if (std::getline(in, line)) {
    ++line_no;
    if (line != kHeader)
      throw ParseError("dataset: header must be '" + std::string(kHeader) + "'",
                       line_no);
    saw_header = true;
  }
  if (!saw_header) throw ParseError("dataset: missing header row", line_no);

  std::vector<AuctionRecord> records;
  std::map<std::string, std::size_t> index;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 6)
      throw ParseError("dataset: expected 6 comma-separated fields", line_no);
    const std::string& id = fields[0];
    if (id.empty()) throw ParseError("dataset: empty auction_id", line_no);

    long item_value = 0;
    {
      auto [p, ec] = std::from_chars(fields[1].data(),
                                     fields[1].data() + fields[1].size(), item_value);
      if (ec != std::errc{} || p != fields[1].data() + fields[1].size() ||
          item_value < 1)
        throw ParseError("dataset: item_value must be a positive integer", line_no);
    }
    double fee = 0.0;
    {
      try {
        std::size_t used = 0;
        fee = std::stod(fields[2], &used);
        if (used != fields[2].size()) throw std::invalid_argument("trailing junk");
      } catch (const std::exception&) {
        throw ParseError("dataset: fee must be a decimal number", line_no);
      }
      if (fee < 0.0) throw ParseError("dataset: fee must be non-negative", line_no);
    }
    const std::string& timestamp = fields[3];
    if (!timestamp.empty() && !plausible_iso_date(timestamp))
      throw ParseError("dataset: timestamp must be ISO-8601 or empty", line_no);
    if (fields[4].empty()) throw ParseError("dataset: empty player_id", line_no);
    int number = 0;
    {
      auto [p, ec] = std::from_chars(fields[5].data(),
                                     fields[5].data() + fields[5].size(), number);
      if (ec != std::errc{} || p != fields[5].data() + fields[5].size() || number < 1)
        throw ParseError("dataset: numbers >= 1 required", line_no);
    }

    auto [it, inserted] = index.try_emplace(id, records.size());
    if (inserted) {
      AuctionRecord rec;
      rec.auction_id = id;
      rec.item_value = item_value;
      rec.fee = fee;
      rec.timestamp = timestamp;
      records.push_back(std::move(rec));
    } else {
      AuctionRecord& rec = records[it->second];
      if (rec.item_value != item_value)
        throw ParseError("dataset: item_value differs within auction '" + id + "'",
                         line_no);
      if (rec.fee != fee)
        throw ParseError("dataset: fee differs within auction '" + id + "'", line_no);
      if (rec.timestamp.empty()) rec.timestamp = timestamp;
    }
    records[index[id]].bids.push_back(Bid{fields[4], number});
  }
  if (records.empty()) throw ParseError("dataset: no bid rows", line_no);
  return records;
}

std::vector<AuctionRecord> load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset: " + path.string());
  return read_dataset(in);
}

void write_dataset(std::ostream& out, std::span<const AuctionRecord> records,
                   std::span<const std::string> extra_comments) {
  out << kSchemaMarker << '\n';
  for (const std::string& c : extra_comments) out << "# " << c << '\n';
  out << kHeader << '\n';
  for (const AuctionRecord& rec : records)
    for (const Bid& b : rec.bids)
      out << rec.auction_id << ',' << rec.item_value << ',' << format_double(rec.fee)
          << ',' << rec.timestamp << ',' << b.player_id << ',' << b.number << '\n';
}

AuctionRecord record_from_sample(const AuctionSample& sample, std::string auction_id,
                                 long item_value, double fee, std::string timestamp) {
  AuctionRecord rec;
  rec.auction_id = std::move(auction_id);
  rec.item_value = item_value;
  rec.fee = fee;
  rec.timestamp = std::move(timestamp);
  for (std::size_t pl = 0; pl < sample.bids_by_player.size(); ++pl)
    for (int number : sample.bids_by_player[pl])
      rec.bids.push_back(Bid{"p" + std::to_string(pl), number});
  return rec;
}

HistogramBundle bundle_histograms(std::span<const AuctionRecord> records, int n_min,
                                  int n_max, std::optional<long> v_filter,
                                  bool normalize) {
  HistogramBundle bundle;
  double n_sum = 0.0;
  long common_v = 0;
  bool v_mixed = false;
  for (const AuctionRecord& rec : records) {
    if (rec.n() < n_min || rec.n() > n_max) continue;
    if (v_filter && rec.item_value != *v_filter) continue;
    const auto counts = rec.counts();
    if (bundle.phi.size() < counts.size()) bundle.phi.resize(counts.size(), 0.0);
    const double scale = normalize ? 1.0 / std::max(1, rec.n()) : 1.0;
    for (std::size_t i = 0; i < counts.size(); ++i) bundle.phi[i] += scale * counts[i];
    ++bundle.l_auctions;
    n_sum += rec.n();
    if (bundle.l_auctions == 1)
      common_v = rec.item_value;
    else if (rec.item_value != common_v)
      v_mixed = true;
  }
  if (bundle.l_auctions == 0)
    throw SelectionError("bundle_histograms: no auctions matched the selection");
  for (double& x : bundle.phi) x /= static_cast<double>(bundle.l_auctions);
  bundle.n_label = n_sum / static_cast<double>(bundle.l_auctions);
  bundle.v_label = v_filter ? *v_filter : (v_mixed ? 0 : common_v);
  return bundle;
}

double l2_distance(std::span<const double> observed_counts, double n,
                   const Strategy& theory) {
  if (!(n > 0.0)) throw DomainError("l2_distance: requires n > 0");
  const std::size_t k = std::max(observed_counts.size(), theory.freqs.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double phi = i < observed_counts.size() ? observed_counts[i] : 0.0;
    const double f = i < theory.freqs.size() ? theory.freqs[i] : 0.0;
    acc += (f - phi) * (f - phi);
  }
  return acc / (n * n);
}

double l2_distance(const AuctionRecord& record, const Strategy& theory) {
  const auto counts = record.counts();
  std::vector<double> phi(counts.begin(), counts.end());
  return l2_distance(phi, static_cast<double>(record.n()), theory);
}

double l2_distance(const HistogramBundle& bundle, const Strategy& theory) {
  return l2_distance(bundle.phi, bundle.n_label, theory);
}

std::vector<WinningStatsRow> winning_number_stats(
    std::span<const AuctionRecord> records,
    std::span<const std::pair<double, double>> bins) {
  std::vector<WinningStatsRow> rows;
  rows.reserve(bins.size());
  for (const auto& [lo, hi] : bins) {
    WinningStatsRow row;
    row.n_center = 0.5 * (lo + hi);
    double sum = 0.0, sum_sq = 0.0;
    for (const AuctionRecord& rec : records) {
      const double n = rec.n();
      if (n < lo || n > hi) continue;
      ++row.auctions;
      const auto w = rec.winner();
      if (!w) {
        ++row.no_winner;
        continue;
      }
      ++row.winners;
      sum += *w;
      sum_sq += static_cast<double>(*w) * (*w);
    }
    if (row.winners > 0) {
      const double mean = sum / static_cast<double>(row.winners);
      row.mean_win = mean;
      row.std_win = std::sqrt(
          std::max(0.0, sum_sq / static_cast<double>(row.winners) - mean * mean));
    } else {
      row.flagged = true;
      row.mean_win = row.std_win = std::numeric_limits<double>::quiet_NaN();
    }
    // Theory moments of the win distribution w_k / sum(w) at the bin center.
    if (row.n_center > 0.0) {
      const Strategy nash = solve_infinite_v(row.n_center, 1e-12);
      const WinProfile wp = win_profile(nash);
      double wt = 0.0, m1 = 0.0, m2 = 0.0;
      for (std::size_t i = 0; i < wp.win.size(); ++i) {
        wt += wp.win[i];
        m1 += wp.win[i] * static_cast<double>(i + 1);
        m2 += wp.win[i] * static_cast<double>(i + 1) * static_cast<double>(i + 1);
      }
      row.theory_mean = m1 / wt;
      row.theory_std = std::sqrt(std::max(0.0, m2 / wt - row.theory_mean * row.theory_mean));
      row.cutoff = row.n_center > std::exp(1.0) + 1e-9
                       ? cutoff_asymptotic(row.n_center)
                       : std::numeric_limits<double>::quiet_NaN();
    } else {
      row.flagged = true;
    }
    rows.push_back(row);
  }
  return rows;
}

WinChanceTable empirical_win_chances(const HistogramBundle& bundle) {
  double total = 0.0;
  for (double x : bundle.phi) total += x;
  if (!(total > 0.0))
    throw DomainError("empirical_win_chances: bundle has no bids");
  const double n = bundle.n_label;
  // Scale the observed histogram to mean bid counts for an auction of size n.
  std::vector<double> f(bundle.phi.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = n * bundle.phi[i] / total;
  f.push_back(0.0);  // tail row: the chance just past the observed support
  const WinProfile wp = win_profile(f);

  WinChanceTable table;
  table.n = n;
  table.rows.reserve(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    WinChanceRow row;
    row.k = static_cast<int>(i + 1);
    row.c_hat = wp.potential[i];
    row.ratio = wp.potential[i] * (n + 1.0);
    table.rows.push_back(row);
  }
  return table;
}

RegimeReport regime_report(std::span<const AuctionRecord> records,
                           double dn_threshold, double ll_margin) {
  if (records.empty()) throw SelectionError("regime_report: empty dataset");
  RegimeReport report;
  report.dn_threshold = dn_threshold;
  report.ll_margin = ll_margin;
  std::map<int, Strategy> nash_cache;
  for (const AuctionRecord& rec : records) {
    RegimeRow row;
    row.auction_id = rec.auction_id;
    row.n = rec.n();
    auto it = nash_cache.find(row.n);
    if (it == nash_cache.end())
      it = nash_cache.emplace(row.n, solve_infinite_v(row.n, 1e-12)).first;
    const Strategy& nash = it->second;

    const auto counts = rec.counts();
    std::vector<double> phi(counts.begin(), counts.end());
    row.d = l2_distance(phi, row.n, nash);
    row.d_times_n = row.d * row.n;

    double ll_nash = 0.0;
    double support_overlap = 0.0;  // bids landing inside the equilibrium support
    for (std::size_t i = 0; i < phi.size(); ++i) {
      if (phi[i] == 0.0) continue;
      const double p =
          i < nash.freqs.size() ? nash.freqs[i] / nash.lambda : 0.0;
      if (p > 0.0) support_overlap += phi[i];
      ll_nash += phi[i] * std::log(std::max(p, report.prob_floor));
    }
    row.ll_nash = ll_nash;

    bool have_exp = false;
    try {
      const ExponentialFit fit = fit_exponential_rate(phi);
      row.ll_exp = fit.log_likelihood;
      have_exp = true;
    } catch (const FitError&) {
      row.ll_exp = std::numeric_limits<double>::quiet_NaN();
    }

    if (support_overlap == 0.0) {
      // No bid inside the equilibrium support: nothing to compare against.
      row.cls = RegimeClass::indeterminate;
    } else if (row.d_times_n <= dn_threshold) {
      // Within the sampling-noise floor of equilibrium play (<d> = 1/N).
      row.cls = RegimeClass::nash_like;
    } else if (!have_exp) {
      row.cls = RegimeClass::indeterminate;
    } else if (row.ll_exp - row.ll_nash > ll_margin) {
      row.cls = RegimeClass::exponential_like;
    } else if (row.ll_nash - row.ll_exp > ll_margin) {
      row.cls = RegimeClass::nash_like;
    } else {
      row.cls = RegimeClass::indeterminate;
    }
    switch (row.cls) {
      case RegimeClass::nash_like: ++report.nash_like; break;
      case RegimeClass::exponential_like: ++report.exponential_like; break;
      case RegimeClass::indeterminate: ++report.indeterminate; break;
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace luba
