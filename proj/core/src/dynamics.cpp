#include "luba/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "luba/errors.hpp"
#include "luba/parallel.hpp"

namespace luba {

namespace {

// Writes the replicator right-hand side into rhs and returns the mean
// potential-winning payoff <c>. Allocation-free on reused buffers.
double rhs_into(std::span<const double> p, double lambda, std::span<double> rhs) {
  const std::size_t k = p.size();
  double running = 1.0;  // prod_{j<k} (1 - f_j e^{-f_j})
  double mean = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double f = lambda * p[i];
    const double e = std::exp(-f);
    const double c = e * running;
    rhs[i] = c;  // stash c_k, turned into the rhs below
    mean += p[i] * c;
    running *= 1.0 - f * e;
  }
  for (std::size_t i = 0; i < k; ++i) rhs[i] = p[i] * (rhs[i] - mean);
  return mean;
}

}  // namespace

std::vector<double> replicator_rhs(const ReplicatorState& state) {
  if (state.p.empty()) throw DomainError("replicator_rhs: empty state");
  if (!(state.lambda > 0.0)) throw DomainError("replicator_rhs: requires lambda > 0");
  for (double x : state.p)
    if (!(x >= 0.0)) throw DomainError("replicator_rhs: negative share");
  std::vector<double> rhs(state.p.size());
  rhs_into(state.p, state.lambda, rhs);
  return rhs;
}

double distance_to_nash(std::span<const double> p, const Strategy& nash, Norm norm) {
  const std::size_t k = std::max(p.size(), nash.freqs.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double a = i < p.size() ? p[i] : 0.0;
    const double b = i < nash.freqs.size() ? nash.freqs[i] / nash.lambda : 0.0;
    acc += norm == Norm::l2 ? (a - b) * (a - b) : std::fabs(a - b);
  }
  return norm == Norm::l2 ? std::sqrt(acc) : acc;
}

Trajectory integrate(std::vector<double> p0, double lambda, const Strategy& nash,
                     const IntegrateOptions& options) {
  if (p0.empty()) throw DomainError("integrate: empty initial condition");
  if (!(options.dt > 0.0) || !(options.t_max > 0.0))
    throw DomainError("integrate: requires dt > 0 and t_max > 0");
  if (!(lambda > 0.0)) throw DomainError("integrate: requires lambda > 0");

  const std::size_t k = p0.size();
  double norm0 = 0.0;
  for (double x : p0) {
    if (!(x >= 0.0)) throw DomainError("integrate: negative initial share");
    norm0 += x;
  }
  if (!(norm0 > 0.0)) throw DomainError("integrate: zero initial condition");
  for (double& x : p0) x /= norm0;

  Trajectory traj;
  std::vector<double> p = std::move(p0);
  std::vector<double> k1(k), k2(k), k3(k), k4(k), scratch(k);

  const auto record = [&](double t, double dist) {
    TrajectorySample s;
    s.t = t;
    s.distance = dist;
    if (options.store_states) s.p = p;
    traj.samples.push_back(std::move(s));
  };

  double t = 0.0;
  double dist = distance_to_nash(p, nash, options.norm);
  record(t, dist);
  if (dist < options.stop_distance) {
    traj.terminal_reason = TerminalReason::converged;
    traj.converge_time = 0.0;
    traj.final_time = 0.0;
    traj.final_distance = dist;
    traj.final_p = std::move(p);
    return traj;
  }

  long step = 0;
  double prev_mean = -1.0;
  traj.terminal_reason = TerminalReason::max_time;
  const double dt = options.dt;
  while (t < options.t_max) {
    const double mean = rhs_into(p, lambda, k1);
    if (step > 0 && mean < prev_mean - 1e-8) ++traj.mean_payoff_drops;
    prev_mean = mean;
    for (std::size_t i = 0; i < k; ++i) scratch[i] = p[i] + 0.5 * dt * k1[i];
    rhs_into(scratch, lambda, k2);
    for (std::size_t i = 0; i < k; ++i) scratch[i] = p[i] + 0.5 * dt * k2[i];
    rhs_into(scratch, lambda, k3);
    for (std::size_t i = 0; i < k; ++i) scratch[i] = p[i] + dt * k3[i];
    rhs_into(scratch, lambda, k4);

    bool bad = false;
    double norm = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      double next = p[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      if (next < 0.0) {
        if (next < -1e-9) {
          bad = true;
          break;
        }
        next = 0.0;
        ++traj.clamp_count;
      }
      scratch[i] = next;
      norm += next;
    }
    if (bad || !(norm > 0.0) || !std::isfinite(norm)) {
      traj.terminal_reason = TerminalReason::step_failure;
      break;
    }
    for (std::size_t i = 0; i < k; ++i) p[i] = scratch[i] / norm;
    t += dt;
    ++step;

    dist = distance_to_nash(p, nash, options.norm);
    if (step % std::max(1, options.sample_stride) == 0) record(t, dist);
    if (dist < options.stop_distance) {
      traj.terminal_reason = TerminalReason::converged;
      traj.converge_time = t;
      break;
    }
  }
  if (traj.samples.empty() || traj.samples.back().t != t) record(t, dist);
  traj.final_time = t;
  traj.final_distance = dist;
  traj.final_p = std::move(p);
  return traj;
}

std::vector<double> initial_exponential(std::size_t k_count, double scale) {
  if (k_count == 0) throw DomainError("initial_exponential: requires k_count >= 1");
  if (!(scale > 0.0)) throw DomainError("initial_exponential: requires scale > 0");
  std::vector<double> p(k_count);
  double norm = 0.0;
  for (std::size_t i = 0; i < k_count; ++i) {
    p[i] = std::exp(-static_cast<double>(i + 1) / scale);
    norm += p[i];
  }
  for (double& x : p) x /= norm;
  return p;
}

std::vector<SweepRow> convergence_time_sweep(std::span<const double> lambdas,
                                             double p0_scale, double threshold,
                                             const IntegrateOptions& base) {
  std::vector<SweepRow> rows(lambdas.size());
  parallel_for(lambdas.size(), [&](std::size_t i) {
    const double lambda = lambdas[i];
    const Strategy nash = solve_infinite_v(lambda);
    const std::size_t k = nash.support_end + 25;
    IntegrateOptions options = base;
    options.stop_distance = threshold;
    options.store_states = false;
    const Trajectory traj =
        integrate(initial_exponential(k, p0_scale), lambda, nash, options);
    rows[i].lambda = lambda;
    rows[i].converged = traj.terminal_reason == TerminalReason::converged;
    rows[i].t_converge = rows[i].converged ? traj.converge_time : -1.0;
  });
  return rows;
}

}  // namespace luba
