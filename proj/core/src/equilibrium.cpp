#include "luba/equilibrium.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include "luba/errors.hpp"
#include "luba/special.hpp"

namespace luba {

double Strategy::total() const {
  double sum = 0.0;
  for (double f : freqs) sum += f;
  return sum;
}

std::vector<double> Strategy::probabilities() const {
  std::vector<double> p(freqs.size());
  for (std::size_t i = 0; i < freqs.size(); ++i) p[i] = freqs[i] / lambda;
  return p;
}

bool AuctionSpec::finite() const { return std::isfinite(item_value); }

double next_frequency(double f) {
  if (!(f >= 0.0)) throw DomainError("next_frequency: requires f >= 0");
  if (f < 1e-3) {
    // ln(e^f - f) = f^2/2 + f^3/6 - f^4/12 - 3 f^5/40 + O(f^6). Factoring
    // out f^2 keeps the result within a few ulp of f^2/2 for tiny f, where
    // the log1p/expm1 route would lose ~1/f of its digits to cancellation.
    return f * f * (0.5 + f * (1.0 / 6.0 + f * (-1.0 / 12.0 + f * (-3.0 / 40.0))));
  }
  if (f > 700.0) {
    // e^f would overflow; ln(e^f - f) = f + ln(1 - f e^-f).
    return f + std::log1p(-f * std::exp(-f));
  }
  return std::log1p(std::expm1(f) - f);
}

double next_frequency(double f, double item_value, std::size_t k) {
  const double slack = item_value - static_cast<double>(k);
  if (slack <= 1.0) return -std::numeric_limits<double>::infinity();
  return next_frequency(f) + std::log1p(-1.0 / slack);
}

Strategy solve_infinite_v(double lambda, double tail_eps, std::size_t k_max) {
  if (!(lambda > 0.0)) throw DomainError("solve_infinite_v: requires lambda > 0");
  if (!(tail_eps > 0.0)) throw DomainError("solve_infinite_v: requires tail_eps > 0");
  if (k_max < 1) throw DomainError("solve_infinite_v: requires k_max >= 1");

  Strategy s;
  s.lambda = lambda;
  double f = std::log1p(lambda);
  while (f >= tail_eps) {
    if (s.freqs.size() >= k_max)
      throw TruncationError("solve_infinite_v: k_max reached before tail_eps", lambda,
                            std::move(s.freqs));
    s.freqs.push_back(f);
    f = next_frequency(f);
  }
  s.support_end = s.freqs.size();
  return s;
}

namespace {

// Sum of the finite-V orbit started at f1, truncated at the first
// non-positive iterate (also enforcing k < V). Optionally keeps the orbit.
double finite_orbit_sum(double f1, double item_value, std::vector<double>* out) {
  double sum = 0.0;
  double f = f1;
  if (out) out->clear();
  for (std::size_t k = 1; f > 0.0 && std::isfinite(f); ++k) {
    sum += f;
    if (out) out->push_back(f);
    if (static_cast<double>(k) + 1.0 >= item_value) break;
    f = next_frequency(f, item_value, k);
    if (k > (1u << 21))
      throw ConvergenceError("solve_finite_v: support grew past the iteration cap");
  }
  return sum;
}

}  // namespace

Strategy solve_finite_v(const AuctionSpec& spec, double tol, FiniteSolveInfo* info) {
  if (!(spec.lambda > 0.0)) throw DomainError("solve_finite_v: requires lambda > 0");
  if (!spec.finite() || !(spec.item_value >= 2.0))
    throw DomainError("solve_finite_v: requires finite item_value >= 2");
  if (!(spec.fee >= 0.0)) throw DomainError("solve_finite_v: requires fee >= 0");
  if (!(tol > 0.0)) throw DomainError("solve_finite_v: requires tol > 0");

  const double lambda = spec.lambda;
  const double v = spec.item_value;
  FiniteSolveInfo local;
  FiniteSolveInfo& rep = info ? *info : local;
  rep = FiniteSolveInfo{};

  double lo = 0.0;
  double hi = std::log1p(lambda);  // infinite-V initial condition; finite-V sum is smaller
  double hi_sum = finite_orbit_sum(hi, v, nullptr);
  while (hi_sum < lambda) {
    hi *= 1.5;
    hi_sum = finite_orbit_sum(hi, v, nullptr);
    if (++rep.bracket_expansions > 4000)
      throw InfeasibleError("solve_finite_v: could not bracket the target sum");
  }
  if (finite_orbit_sum(std::min(hi, 1e-12), v, nullptr) > lambda + tol)
    throw InfeasibleError("solve_finite_v: sum exceeds lambda at the lower bracket");

  // The bisection assumes f1 -> sum is monotone on [lo, hi]; scan a coarse
  // grid and report if the residual changes sign more than once.
  {
    int sign_changes = 0;
    double prev = -lambda;  // sum(0) - lambda
    for (int i = 1; i <= 16; ++i) {
      const double x = lo + (hi - lo) * i / 16.0;
      const double r = finite_orbit_sum(x, v, nullptr) - lambda;
      if ((r > 0.0) != (prev > 0.0) && r != 0.0) ++sign_changes;
      prev = r;
    }
    rep.multiple_sign_changes = sign_changes > 1;
  }

  double mid = hi, mid_sum = hi_sum;
  for (int it = 0; it < 400; ++it) {
    mid = 0.5 * (lo + hi);
    mid_sum = finite_orbit_sum(mid, v, nullptr);
    ++rep.bisection_iterations;
    if (std::fabs(mid_sum - lambda) <= tol) break;
    (mid_sum < lambda ? lo : hi) = mid;
    if (hi - lo <= std::numeric_limits<double>::epsilon() * hi) {
      mid = 0.5 * (lo + hi);
      mid_sum = finite_orbit_sum(mid, v, nullptr);
      break;
    }
  }
  rep.residual = std::fabs(mid_sum - lambda);
  if (rep.residual > tol)
    throw ConvergenceError("solve_finite_v: bisection stalled at residual " +
                           std::to_string(rep.residual));

  Strategy s;
  s.lambda = lambda;
  finite_orbit_sum(mid, v, &s.freqs);
  s.support_end = s.freqs.size();
  return s;
}

WinProfile win_profile(std::span<const double> freqs) {
  WinProfile wp;
  wp.win.resize(freqs.size());
  wp.potential.resize(freqs.size());
  long double running = 1.0L;  // prod_{j<k} (1 - f_j e^{-f_j})
  for (std::size_t i = 0; i < freqs.size(); ++i) {
    const double f = freqs[i];
    if (!(f >= 0.0)) throw DomainError("win_profile: negative frequency");
    const long double e = std::exp(-static_cast<long double>(f));
    wp.potential[i] = static_cast<double>(e * running);
    wp.win[i] = static_cast<double>(f * e * running);
    running *= 1.0L - f * e;
  }
  wp.p_no_winner = static_cast<double>(running);
  return wp;
}

WinProfile win_profile(const Strategy& strategy) { return win_profile(strategy.freqs); }

std::vector<double> expected_payoffs(const Strategy& strategy, const AuctionSpec& spec) {
  if (!spec.finite()) throw DomainError("expected_payoffs: requires finite item_value");
  if (!(spec.fee >= 0.0)) throw DomainError("expected_payoffs: requires fee >= 0");
  if (static_cast<double>(strategy.support_end) >= spec.item_value)
    throw DomainError("expected_payoffs: support reaches the item value");
  const WinProfile wp = win_profile(strategy);
  std::vector<double> payoff(strategy.freqs.size());
  for (std::size_t i = 0; i < payoff.size(); ++i) {
    const double chance = strategy.freqs[i] > 0.0 ? wp.win[i] / strategy.freqs[i]
                                                  : wp.potential[i];
    payoff[i] = (spec.item_value - static_cast<double>(i + 1)) * chance - spec.fee;
  }
  return payoff;
}

double cutoff_li(double lambda, double c) {
  if (!(lambda > 0.5)) throw DomainError("cutoff_li: requires lambda > 0.5");
  return log_integral(1.0 + lambda) + c;
}

double cutoff_asymptotic(double n) {
  const double ln = std::log(n);
  if (!(n > std::numbers::e_v<double>))
    throw DomainError("cutoff_asymptotic: requires n > e");
  return (1.0 + 1.0 / ln) * n / ln;
}

CutoffFit fit_cutoff_constant(std::span<const double> lambdas, double tail_eps) {
  if (lambdas.empty()) throw DomainError("fit_cutoff_constant: empty grid");
  std::vector<double> residuals;
  residuals.reserve(lambdas.size());
  for (double lambda : lambdas) {
    const Strategy s = solve_infinite_v(lambda, tail_eps);
    residuals.push_back(static_cast<double>(s.support_end) - log_integral(1.0 + lambda));
  }
  CutoffFit fit;
  fit.points = residuals.size();
  double sum = 0.0;
  for (double r : residuals) sum += r;
  fit.c = sum / static_cast<double>(residuals.size());
  for (double r : residuals)
    fit.max_abs_residual = std::max(fit.max_abs_residual, std::fabs(r - fit.c));
  return fit;
}

namespace {

std::string format_double(double x) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

}  // namespace

void write_strategy(std::ostream& out, const Strategy& strategy) {
  out << "# lambda=" << format_double(strategy.lambda) << '\n';
  for (std::size_t i = 0; i < strategy.freqs.size(); ++i)
    out << (i + 1) << ' ' << format_double(strategy.freqs[i]) << '\n';
}

Strategy read_strategy(std::istream& in) {
  Strategy s;
  std::string line;
  std::size_t line_no = 0;
  bool have_lambda = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto pos = line.find("lambda=");
      if (pos != std::string::npos) {
        try {
          s.lambda = std::stod(line.substr(pos + 7));
          have_lambda = true;
        } catch (const std::exception&) {
          throw ParseError("strategy: bad lambda header", line_no);
        }
      }
      continue;
    }
    std::istringstream row(line);
    std::size_t k = 0;
    double f = 0.0;
    if (!(row >> k >> f) || k == 0)
      throw ParseError("strategy: expected 'k f_k' with k >= 1", line_no);
    if (s.freqs.size() < k) s.freqs.resize(k, 0.0);
    s.freqs[k - 1] = f;
  }
  if (!have_lambda) {
    double sum = 0.0;
    for (double f : s.freqs) sum += f;
    s.lambda = sum;
  }
  s.support_end = s.freqs.size();
  while (s.support_end > 0 && s.freqs[s.support_end - 1] <= 0.0) --s.support_end;
  return s;
}

}  // namespace luba
