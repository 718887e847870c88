#include "cli_app.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "luba/analysis.hpp"
#include "luba/behavioral.hpp"
#include "luba/dynamics.hpp"
#include "luba/equilibrium.hpp"
#include "luba/errors.hpp"
#include "luba/parallel.hpp"
#include "luba/simulator.hpp"
#include "luba/version.hpp"

namespace luba::cli {
namespace {

using nlohmann::json;

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

struct RunContext {
  std::string command_line;
  std::uint64_t seed = 0;
  std::string format = "csv";
  std::ostream* out = nullptr;
  std::ostream* err = nullptr;

  std::vector<std::string> comment_lines() const {
    return {std::string("luba ") + kVersion, "command: " + command_line,
            "seed: " + std::to_string(seed)};
  }
  json meta() const {
    return json{{"version", kVersion}, {"command", command_line}, {"seed", seed}};
  }
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::pair<std::string, std::string>> extra_meta;

  void add_row(std::vector<std::string> cells) { rows.push_back(std::move(cells)); }
};

void write_table(std::ostream& os, const Table& table, const RunContext& ctx) {
  if (ctx.format == "json") {
    json j;
    j["meta"] = ctx.meta();
    for (const auto& [key, value] : table.extra_meta) j["meta"][key] = value;
    j["columns"] = table.columns;
    j["rows"] = json::array();
    for (const auto& row : table.rows) j["rows"].push_back(row);
    os << j.dump(2) << '\n';
    return;
  }
  for (const auto& line : ctx.comment_lines()) os << "# " << line << '\n';
  for (const auto& [key, value] : table.extra_meta)
    os << "# " << key << ": " << value << '\n';
  for (std::size_t i = 0; i < table.columns.size(); ++i)
    os << (i ? "," : "") << table.columns[i];
  os << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << '\n';
  }
}

// Runs fn against the chosen sink; "-" means the primary output stream, in
// which case the human-readable summary is diverted to err.
void with_output(const std::string& path, RunContext& ctx,
                 const std::function<void(std::ostream&, std::ostream&)>& fn) {
  if (path == "-") {
    fn(*ctx.out, *ctx.err);
    return;
  }
  std::ofstream file(path);
  if (!file) throw IoError("cannot open output file: " + path);
  fn(file, *ctx.out);
}

std::vector<double> load_strategy_probabilities(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open strategy file: " + path);
  const Strategy s = read_strategy(in);
  double total = s.total();
  if (!(total > 0.0)) throw DomainError("strategy file has no positive frequencies");
  std::vector<double> p(s.freqs.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = s.freqs[i] / total;
  return p;
}

std::string quoted_command(const std::vector<std::string>& args) {
  std::string s = "luba";
  for (const auto& a : args) {
    s += ' ';
    s += a;
  }
  return s;
}

// ---------------------------------------------------------------- solve ----

int cmd_solve(double lambda, std::optional<double> v, double fee, double tol,
              double tail_eps, const std::string& output, RunContext& ctx) {
  Strategy strat;
  FiniteSolveInfo info;
  if (v) {
    strat = solve_finite_v(AuctionSpec{*v, fee, lambda}, tol, &info);
  } else {
    strat = solve_infinite_v(lambda, tail_eps);
  }
  const WinProfile wp = win_profile(strat);
  std::vector<double> payoffs;
  if (v) payoffs = expected_payoffs(strat, AuctionSpec{*v, fee, lambda});

  Table table;
  table.columns = {"k", "f_k", "p_k", "w_k", "c_k", "payoff_k"};
  for (std::size_t i = 0; i < strat.freqs.size(); ++i) {
    table.add_row({std::to_string(i + 1), fmt(strat.freqs[i]),
                   fmt(strat.freqs[i] / strat.lambda), fmt(wp.win[i]),
                   fmt(wp.potential[i]),
                   v ? fmt(payoffs[i]) : "nan"});
  }
  with_output(output, ctx, [&](std::ostream& os, std::ostream& summary) {
    write_table(os, table, ctx);
    summary << "lambda: " << fmt(strat.lambda) << '\n'
            << "support_end: " << strat.support_end << '\n'
            << "p_no_winner: " << fmt(wp.p_no_winner) << '\n';
    if (v && info.multiple_sign_changes)
      summary << "warning: multiple sign changes seen while bracketing f_1\n";
  });
  return 0;
}

// ------------------------------------------------------------- simulate ----

int cmd_simulate(std::optional<double> lambda, std::optional<int> fixed_n,
                 std::optional<int> players, int m, int auctions,
                 const std::string& strategy_file, long item_value, double fee,
                 const std::string& output, RunContext& ctx) {
  if (auctions < 1) throw DomainError("simulate: requires --auctions >= 1");
  const int modes = (lambda ? 1 : 0) + (fixed_n ? 1 : 0) + (players ? 1 : 0);
  if (modes != 1)
    throw DomainError("simulate: give exactly one of --lambda, --n, --players");

  double nash_lambda = 0.0;
  if (lambda) nash_lambda = *lambda;
  if (fixed_n) nash_lambda = *fixed_n;
  if (players) nash_lambda = static_cast<double>(*players) * m;
  std::vector<double> strategy;
  if (!strategy_file.empty()) {
    strategy = load_strategy_probabilities(strategy_file);
  } else {
    const Strategy nash = solve_infinite_v(nash_lambda);
    const double total = nash.total();
    strategy.resize(nash.freqs.size());
    for (std::size_t i = 0; i < strategy.size(); ++i)
      strategy[i] = nash.freqs[i] / total;
  }

  std::vector<AuctionSample> samples(static_cast<std::size_t>(auctions));
  parallel_for(samples.size(), [&](std::size_t i) {
    if (players) {
      samples[i] = simulate_multibid_sample(strategy, *players, m, ctx.seed, i);
    } else {
      PopulationModel pop;
      pop.mode = lambda ? PopulationMode::poisson : PopulationMode::fixed_n;
      pop.n_or_lambda = lambda ? *lambda : static_cast<double>(*fixed_n);
      samples[i] = simulate_auction_sample(strategy, pop, ctx.seed, i);
    }
  });

  const int id_width =
      std::max(4, static_cast<int>(std::to_string(auctions).size()) + 1);
  std::vector<AuctionRecord> records;
  records.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    std::string id = std::to_string(i + 1);
    id.insert(0, static_cast<std::size_t>(id_width) - id.size(), '0');
    records.push_back(record_from_sample(samples[i], "a" + id, item_value, fee));
  }

  std::size_t no_winner = 0;
  std::map<int, std::size_t> winner_hist;
  long long total_bids = 0;
  for (const auto& s : samples) {
    total_bids += s.outcome.realized_n;
    if (s.outcome.winner)
      ++winner_hist[*s.outcome.winner];
    else
      ++no_winner;
  }

  with_output(output, ctx, [&](std::ostream& os, std::ostream& summary) {
    std::vector<std::string> comments = ctx.comment_lines();
    write_dataset(os, records, comments);
    summary << "auctions: " << auctions << '\n'
            << "total_bids: " << total_bids << '\n'
            << "no_winner_rate: "
            << fmt(static_cast<double>(no_winner) / auctions) << '\n'
            << "winner_histogram:\n";
    for (const auto& [k, count] : winner_hist)
      summary << "  " << k << ' ' << count << '\n';
  });
  return 0;
}

// ---------------------------------------------------------------- adapt ----

int cmd_adapt(int players, int m, int rounds, int batch, double lr, int k_override,
              const std::string& output, const std::string& trace_path,
              RunContext& ctx) {
  AdaptiveParams params;
  params.players = players;
  params.m = m;
  params.rounds = rounds;
  params.batch = batch;
  params.learning_rate = lr;
  params.seed = ctx.seed;
  params.k_override = k_override;
  const AdaptiveResult result = adaptive_equilibrium(params);

  const double bid_volume = static_cast<double>(players) * m;
  const Strategy nash = solve_infinite_v(bid_volume);
  double l1 = 0.0;
  const std::size_t k_all = std::max(result.strategy.size(), nash.freqs.size());
  for (std::size_t i = 0; i < k_all; ++i) {
    const double a = i < result.strategy.size() ? result.strategy[i] : 0.0;
    const double b = i < nash.freqs.size() ? nash.freqs[i] / nash.lambda : 0.0;
    l1 += std::fabs(a - b);
  }

  if (!trace_path.empty()) {
    std::ofstream trace(trace_path);
    if (!trace) throw IoError("cannot open trace file: " + trace_path);
    Table t;
    t.columns = {"round", "chi2", "dof", "p_value", "step_l1", "min_expected_bids",
                 "batch_ok"};
    for (const auto& r : result.trace)
      t.add_row({std::to_string(r.round), fmt(r.chi2), std::to_string(r.dof),
                 fmt(r.p_value), fmt(r.step_l1), fmt(r.min_expected_bids),
                 r.batch_ok ? "1" : "0"});
    write_table(trace, t, ctx);
  }

  with_output(output, ctx, [&](std::ostream& os, std::ostream& summary) {
    for (const auto& line : ctx.comment_lines()) os << "# " << line << '\n';
    os << "# adapted strategy as mean bid counts; divide by lambda for shares\n";
    Strategy adapted;
    adapted.lambda = bid_volume;
    adapted.freqs.resize(result.strategy.size());
    for (std::size_t i = 0; i < result.strategy.size(); ++i)
      adapted.freqs[i] = bid_volume * result.strategy[i];
    adapted.support_end = adapted.freqs.size();
    write_strategy(os, adapted);
    summary << "converged: " << (result.converged ? "yes" : "no (flagged)") << '\n'
            << "rounds_used: " << result.rounds_used << '\n'
            << "l1_distance_to_analytic: " << fmt(l1) << '\n'
            << "batch_size_ok: " << (result.batch_size_ok ? "yes" : "no") << '\n';
    if (!result.trace.empty()) {
      const auto& last = result.trace.back();
      summary << "final_chi2: " << fmt(last.chi2) << " (dof " << last.dof
              << ", p " << fmt(last.p_value) << ")\n";
    }
  });
  return 0;  // non-convergence is a flagged report, not a failure
}

// ------------------------------------------------------------- dynamics ----

int cmd_dynamics(const std::string& lambdas_arg, double threshold, double dt,
                 double t_max, double p0_scale, int stride, bool full_state,
                 const std::string& traj_prefix, const std::string& output,
                 RunContext& ctx) {
  std::vector<double> lambdas;
  std::stringstream ss(lambdas_arg);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    try {
      lambdas.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw DomainError("dynamics: bad --lambdas entry '" + tok + "'");
    }
  }
  if (lambdas.empty()) throw DomainError("dynamics: --lambdas list is empty");

  IntegrateOptions options;
  options.dt = dt;
  options.t_max = t_max;
  options.stop_distance = threshold;
  options.sample_stride = stride;
  options.store_states = full_state && !traj_prefix.empty();

  std::vector<Trajectory> trajectories(lambdas.size());
  parallel_for(lambdas.size(), [&](std::size_t i) {
    const Strategy nash = solve_infinite_v(lambdas[i]);
    trajectories[i] = integrate(initial_exponential(nash.support_end + 25, p0_scale),
                                lambdas[i], nash, options);
  });

  if (!traj_prefix.empty()) {
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
      const std::string path = traj_prefix + "lambda_" + fmt(lambdas[i]) + ".csv";
      std::ofstream file(path);
      if (!file) throw IoError("cannot open trajectory file: " + path);
      Table t;
      t.columns = {"t", "distance"};
      if (options.store_states) {
        const std::size_t k = trajectories[i].final_p.size();
        for (std::size_t j = 1; j <= k; ++j)
          t.columns.push_back("p_" + std::to_string(j));
      }
      for (const auto& s : trajectories[i].samples) {
        std::vector<std::string> row{fmt(s.t), fmt(s.distance)};
        for (double x : s.p) row.push_back(fmt(x));
        t.add_row(std::move(row));
      }
      write_table(file, t, ctx);
    }
  }

  Table table;
  table.columns = {"lambda", "t_converge", "converged", "final_distance",
                   "terminal_reason"};
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    const Trajectory& tr = trajectories[i];
    const bool conv = tr.terminal_reason == TerminalReason::converged;
    const char* reason = conv               ? "converged"
                         : tr.terminal_reason == TerminalReason::max_time
                             ? "max_time"
                             : "step_failure";
    table.add_row({fmt(lambdas[i]), conv ? fmt(tr.converge_time) : "nan",
                   conv ? "1" : "0", fmt(tr.final_distance), reason});
  }
  with_output(output, ctx, [&](std::ostream& os, std::ostream& summary) {
    write_table(os, table, ctx);
    for (std::size_t i = 0; i < lambdas.size(); ++i)
      if (trajectories[i].terminal_reason == TerminalReason::step_failure)
        summary << "warning: step failure at lambda " << fmt(lambdas[i]) << '\n';
    summary << "rows: " << lambdas.size() << '\n';
  });
  return 0;
}

// -------------------------------------------------------------- analyze ----

std::vector<std::pair<double, double>> parse_bins(const std::string& arg) {
  std::vector<std::pair<double, double>> bins;
  std::stringstream ss(arg);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    const auto dash = tok.find('-');
    if (dash == std::string::npos || dash == 0 || dash + 1 == tok.size())
      throw DomainError("analyze: bins must look like 'lo-hi,lo-hi'");
    try {
      bins.emplace_back(std::stod(tok.substr(0, dash)),
                        std::stod(tok.substr(dash + 1)));
    } catch (const std::exception&) {
      throw DomainError("analyze: bad bin '" + tok + "'");
    }
  }
  return bins;
}

int cmd_analyze(const std::string& dataset, const std::string& bins_arg,
                std::optional<long> v_filter, const std::string& date_range,
                bool normalize, const std::string& prefix, RunContext& ctx) {
  std::vector<AuctionRecord> records = load_dataset(dataset);

  if (!date_range.empty()) {
    const auto colon = date_range.find(':');
    if (colon == std::string::npos)
      throw DomainError("analyze: --date-range must be 'from:to'");
    const std::string from = date_range.substr(0, colon);
    const std::string to = date_range.substr(colon + 1);
    std::erase_if(records, [&](const AuctionRecord& r) {
      if (r.timestamp.empty()) return true;
      const std::string day = r.timestamp.substr(0, 10);
      return day < from || day > to;
    });
    if (records.empty())
      throw SelectionError("analyze: no auctions inside the date range");
  }
  if (v_filter) {
    std::erase_if(records,
                  [&](const AuctionRecord& r) { return r.item_value != *v_filter; });
    if (records.empty())
      throw SelectionError("analyze: no auctions match the item-value filter");
  }

  int n_min = std::numeric_limits<int>::max(), n_max = 0;
  for (const auto& r : records) {
    n_min = std::min(n_min, r.n());
    n_max = std::max(n_max, r.n());
  }
  std::vector<std::pair<double, double>> bins =
      bins_arg.empty() ? std::vector<std::pair<double, double>>{
                             {static_cast<double>(n_min), static_cast<double>(n_max)}}
                       : parse_bins(bins_arg);

  const auto open_file = [&](const std::string& path) {
    auto file = std::make_unique<std::ofstream>(path);
    if (!*file) throw IoError("cannot open output file: " + path);
    return file;
  };

  // Per-bin averaged histograms with theory overlay, and win-chance ratios.
  std::size_t bundles_written = 0;
  for (std::size_t b = 0; b < bins.size(); ++b) {
    HistogramBundle bundle;
    try {
      bundle = bundle_histograms(records, static_cast<int>(bins[b].first),
                                 static_cast<int>(bins[b].second), v_filter,
                                 normalize);
    } catch (const SelectionError&) {
      continue;  // empty bin: skip its files, keep the others
    }
    const Strategy theory = solve_infinite_v(std::max(bundle.n_label, 1e-6));
    Table hist;
    hist.columns = {"k", "phi_k", "f_theory_k"};
    hist.extra_meta = {{"bin", fmt(bins[b].first) + "-" + fmt(bins[b].second)},
                       {"l_auctions", std::to_string(bundle.l_auctions)},
                       {"mean_n", fmt(bundle.n_label)},
                       {"item_value", std::to_string(bundle.v_label)}};
    const std::size_t k_rows = std::max(bundle.phi.size(), theory.freqs.size());
    for (std::size_t i = 0; i < k_rows; ++i)
      hist.add_row({std::to_string(i + 1),
                    fmt(i < bundle.phi.size() ? bundle.phi[i] : 0.0),
                    fmt(i < theory.freqs.size() ? theory.freqs[i] : 0.0)});
    auto hist_file = open_file(prefix + "_histogram_bin" + std::to_string(b) + ".csv");
    write_table(*hist_file, hist, ctx);

    const WinChanceTable chances = empirical_win_chances(bundle);
    Table wc;
    wc.columns = {"k", "c_hat", "ratio_to_nash"};
    for (const auto& row : chances.rows)
      wc.add_row({std::to_string(row.k), fmt(row.c_hat), fmt(row.ratio)});
    auto wc_file = open_file(prefix + "_winchance_bin" + std::to_string(b) + ".csv");
    write_table(*wc_file, wc, ctx);
    ++bundles_written;
  }
  if (bundles_written == 0)
    throw SelectionError("analyze: every bin was empty");

  // Per-auction distances against the equilibrium at lambda = N.
  const RegimeReport report = regime_report(records);
  Table dist;
  dist.columns = {"auction_id", "n", "d", "inv_n"};
  double mean_dn = 0.0;
  for (const auto& row : report.rows) {
    dist.add_row({row.auction_id, std::to_string(row.n), fmt(row.d),
                  fmt(1.0 / row.n)});
    mean_dn += row.d_times_n;
  }
  mean_dn /= static_cast<double>(report.rows.size());
  {
    auto file = open_file(prefix + "_distance.csv");
    write_table(*file, dist, ctx);
  }

  // Winning-number moments per bin.
  const auto stats = winning_number_stats(records, bins);
  Table wins;
  wins.columns = {"n_center", "auctions", "winners", "no_winner", "mean_win",
                  "std_win", "theory_mean", "theory_std", "cutoff", "flagged"};
  for (const auto& row : stats)
    wins.add_row({fmt(row.n_center), std::to_string(row.auctions),
                  std::to_string(row.winners), std::to_string(row.no_winner),
                  fmt(row.mean_win), fmt(row.std_win), fmt(row.theory_mean),
                  fmt(row.theory_std), fmt(row.cutoff), row.flagged ? "1" : "0"});
  {
    auto file = open_file(prefix + "_winning.csv");
    write_table(*file, wins, ctx);
  }

  // Regime classification.
  Table regime;
  regime.columns = {"auction_id", "n", "d", "d_times_n", "ll_nash", "ll_exp",
                    "class"};
  for (const auto& row : report.rows) {
    const char* cls = row.cls == RegimeClass::nash_like          ? "nash"
                      : row.cls == RegimeClass::exponential_like ? "exponential"
                                                                 : "indeterminate";
    regime.add_row({row.auction_id, std::to_string(row.n), fmt(row.d),
                    fmt(row.d_times_n), fmt(row.ll_nash), fmt(row.ll_exp), cls});
  }
  regime.extra_meta = {{"dn_threshold", fmt(report.dn_threshold)},
                       {"ll_margin", fmt(report.ll_margin)},
                       {"prob_floor", fmt(report.prob_floor)},
                       {"nash_like", std::to_string(report.nash_like)},
                       {"exponential_like", std::to_string(report.exponential_like)},
                       {"indeterminate", std::to_string(report.indeterminate)}};
  {
    auto file = open_file(prefix + "_regime.csv");
    write_table(*file, regime, ctx);
  }

  *ctx.out << "auctions: " << records.size() << '\n'
           << "bins: " << bins.size() << '\n'
           << "mean_d_times_n: " << fmt(mean_dn) << '\n'
           << "regime: " << report.nash_like << " nash, " << report.exponential_like
           << " exponential, " << report.indeterminate << " indeterminate\n"
           << "files_prefix: " << prefix << '\n';
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"lowest-unique-bid auction toolkit"};
  app.require_subcommand(1);

  RunContext ctx;
  ctx.command_line = quoted_command(args);
  ctx.out = &out;
  ctx.err = &err;
  {
    std::random_device rd;
    ctx.seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  }

  std::string output = "-";
  app.add_option("--seed", ctx.seed, "seed for all randomness (echoed to outputs)");
  app.add_option("--format", ctx.format, "output format for tables")
      ->check(CLI::IsMember({"csv", "json"}));

  // solve
  auto* solve = app.add_subcommand("solve", "equilibrium bid frequencies");
  double lambda = 1.0, fee = 0.0, tol = 1e-9, tail_eps = 1e-12;
  std::optional<double> item_v;
  solve->add_option("--lambda", lambda, "mean number of bids")->required();
  solve->add_option("--v", item_v, "item value (omit for the infinite-V solution)");
  solve->add_option("--fee", fee, "per-bid participation fee");
  solve->add_option("--tol", tol, "normalization tolerance (finite V)");
  solve->add_option("--tail-eps", tail_eps, "tail truncation threshold (infinite V)");
  solve->add_option("-o,--output", output, "output file, '-' for stdout");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Monte Carlo auctions");
  std::optional<double> sim_lambda;
  std::optional<int> sim_n, sim_players;
  int sim_m = 1, sim_auctions = 1000;
  long sim_item_value = 10000;
  double sim_fee = 0.0;
  std::string strategy_file;
  sim->add_option("--lambda", sim_lambda, "Poisson mean number of bids");
  sim->add_option("--n", sim_n, "fixed number of bids");
  sim->add_option("--players", sim_players, "multi-bid agents per auction");
  sim->add_option("--m", sim_m, "bids per agent (with --players)");
  sim->add_option("--auctions", sim_auctions, "number of auctions");
  sim->add_option("--strategy-file", strategy_file,
                  "bid distribution file (defaults to the equilibrium)");
  sim->add_option("--item-value", sim_item_value, "item value written to records");
  sim->add_option("--fee", sim_fee, "fee written to records");
  sim->add_option("-o,--output", output, "dataset file, '-' for stdout");

  // adapt
  auto* adapt = app.add_subcommand("adapt", "individual-based equilibrium search");
  int ad_players = 100, ad_m = 1, ad_rounds = 300, ad_batch = 4000, ad_k = 0;
  double ad_lr = 0.2;
  std::string trace_path;
  adapt->add_option("--players", ad_players, "agents per auction");
  adapt->add_option("--m", ad_m, "bids per agent");
  adapt->add_option("--rounds", ad_rounds, "maximum adaptation rounds");
  adapt->add_option("--batch", ad_batch, "auctions per round");
  adapt->add_option("--lr", ad_lr, "learning rate in [0, 1]");
  adapt->add_option("--k", ad_k, "state dimension override");
  adapt->add_option("--trace", trace_path, "per-round diagnostics file");
  adapt->add_option("-o,--output", output, "adapted strategy file, '-' for stdout");

  // dynamics
  auto* dyn = app.add_subcommand("dynamics", "replicator adaptation speed");
  std::string lambdas_arg = "100,1000";
  double dyn_threshold = 0.02, dyn_dt = 0.01, dyn_tmax = 1e5, dyn_scale = 30.0;
  int dyn_stride = 50;
  bool dyn_full_state = false;
  std::string traj_prefix;
  dyn->add_option("--lambdas", lambdas_arg, "comma-separated population sizes");
  dyn->add_option("--threshold", dyn_threshold, "convergence distance");
  dyn->add_option("--dt", dyn_dt, "integration step");
  dyn->add_option("--tmax", dyn_tmax, "time budget per lambda");
  dyn->add_option("--p0-scale", dyn_scale, "initial shares ~ exp(-k/scale)");
  dyn->add_option("--stride", dyn_stride, "record every this many steps");
  dyn->add_option("--traj-prefix", traj_prefix, "write per-lambda trajectory files");
  dyn->add_flag("--full-state", dyn_full_state,
                "include the share vector in trajectory files");
  dyn->add_option("-o,--output", output, "sweep table, '-' for stdout");

  // analyze
  auto* analyze = app.add_subcommand("analyze", "dataset statistics vs theory");
  std::string dataset, bins_arg, date_range, prefix = "analysis";
  std::optional<long> v_filter;
  bool normalize = false;
  analyze->add_option("--dataset", dataset, "luba-v1 CSV file")->required();
  analyze->add_option("--bins", bins_arg, "N ranges, e.g. '26-200,201-5000'");
  analyze->add_option("--v-filter", v_filter, "keep only this item value");
  analyze->add_option("--date-range", date_range, "keep 'YYYY-MM-DD:YYYY-MM-DD'");
  analyze->add_flag("--normalize", normalize, "normalize histograms per auction");
  analyze->add_option("--out-prefix", prefix, "prefix for the emitted files");

  try {
    // CLI11's vector overload consumes the arguments back to front.
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (solve->parsed())
      return cmd_solve(lambda, item_v, fee, tol, tail_eps, output, ctx);
    if (sim->parsed())
      return cmd_simulate(sim_lambda, sim_n, sim_players, sim_m, sim_auctions,
                          strategy_file, sim_item_value, sim_fee, output, ctx);
    if (adapt->parsed())
      return cmd_adapt(ad_players, ad_m, ad_rounds, ad_batch, ad_lr, ad_k, output,
                       trace_path, ctx);
    if (dyn->parsed())
      return cmd_dynamics(lambdas_arg, dyn_threshold, dyn_dt, dyn_tmax, dyn_scale,
                          dyn_stride, dyn_full_state, traj_prefix, output, ctx);
    if (analyze->parsed())
      return cmd_analyze(dataset, bins_arg, v_filter, date_range, normalize, prefix,
                         ctx);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const SelectionError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const InfeasibleError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const TruncationError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace luba::cli
