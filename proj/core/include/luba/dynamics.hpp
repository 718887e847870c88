#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "luba/equilibrium.hpp"

namespace luba {

/// A point of the adaptation dynamics: strategy shares p over numbers
/// 1..K, current time, and the population scale that turns shares into
/// mean bid counts f = lambda * p.
struct ReplicatorState {
  std::vector<double> p;
  double t = 0.0;
  double lambda = 1.0;
};

/// dp_k/dt = p_k * (c_k(p) - <c>), with c_k the potential-winning
/// probability of number k at frequencies lambda * p.
std::vector<double> replicator_rhs(const ReplicatorState& state);

enum class Norm { l2, l1 };

/// Distance between a share vector and the Nash share vector f/lambda,
/// the shorter one zero-padded.
double distance_to_nash(std::span<const double> p, const Strategy& nash,
                        Norm norm = Norm::l2);

enum class TerminalReason { converged, max_time, step_failure };

struct TrajectorySample {
  double t = 0.0;
  double distance = 0.0;
  std::vector<double> p;  // filled only when store_states is set
};

struct IntegrateOptions {
  double dt = 0.01;
  double t_max = 1000.0;
  double stop_distance = 1e-4;
  int sample_stride = 10;     // record every this many steps
  bool store_states = false;  // keep full p in each sample
  Norm norm = Norm::l2;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  TerminalReason terminal_reason = TerminalReason::max_time;
  double final_time = 0.0;
  double final_distance = 0.0;
  double converge_time = -1.0;          // first time below stop_distance, -1 if never
  std::size_t clamp_count = 0;          // negative components clamped to zero
  std::size_t mean_payoff_drops = 0;    // steps where <c> fell by more than 1e-8
  std::vector<double> final_p;
};

/// Fixed-step classic fourth-order integration of the replicator equation,
/// renormalizing p after every step. Stops at stop_distance from the Nash
/// shares, at t_max, or when a step goes bad.
Trajectory integrate(std::vector<double> p0, double lambda, const Strategy& nash,
                     const IntegrateOptions& options = {});

/// Share vector proportional to exp(-k / scale) over k = 1..k_count.
std::vector<double> initial_exponential(std::size_t k_count, double scale);

struct SweepRow {
  double lambda = 0.0;
  double t_converge = -1.0;
  bool converged = false;
};

/// Convergence time toward the Nash equilibrium for each lambda, starting
/// from shares proportional to exp(-k / p0_scale). The state dimension is the
/// Nash support plus a 25-number margin. Rows that never reach the threshold
/// are flagged, not invented.
std::vector<SweepRow> convergence_time_sweep(std::span<const double> lambdas,
                                             double p0_scale, double threshold,
                                             const IntegrateOptions& base = {});

}  // namespace luba
