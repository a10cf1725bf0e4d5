#pragma once

#include "rendezvous/control.hpp"
#include "rendezvous/digraph.hpp"
#include "rendezvous/kinematics.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rendezvous {

enum class ControllerKind { Ccp, SingleIntegrator };

const char* to_string(ControllerKind kind);
ControllerKind controller_from_string(const std::string& name);  // throws Error{Schema}

struct Scenario {
  DiGraph graph;
  SwarmState initial;
  ControllerParams params;
  double dt = 1e-3;
  double t_end = 10.0;
  double rendezvous_tol = 0.01;
  ControllerKind controller = ControllerKind::Ccp;
  std::uint64_t seed = 0;
  double record_interval = 0.0;  // 0 records every step

  void validate() const;  // throws Error{Schema}
};

/// Consecutive in-tolerance steps required before a run stops early.
inline constexpr int kSettleSteps = 100;

struct Trajectory {
  std::vector<double> times;
  std::vector<SwarmState> states;
  std::vector<std::vector<ControlInput>> inputs;  // applied at states[k]
  std::vector<double> diameters;

  bool converged = false;
  std::optional<double> settle_time;
  bool has_reverse_spanning_tree = false;
  std::size_t steps = 0;
  double max_diameter = 0.0;

  std::size_t size() const noexcept { return times.size(); }
};

/// Inputs every agent applies at state `s`. Each agent's input is computed
/// from its own body-frame measurements. For the single-integrator reference
/// model u holds |f_i| and omega is zero.
std::vector<ControlInput> closed_loop_inputs(const SwarmState& s, const DiGraph& g,
                                             const ControllerParams& p, ControllerKind kind);

/// Closed-loop rates (xdot_i, theta_dot_i) for every agent.
std::vector<UnicycleRate> closed_loop_rates(const SwarmState& s, const DiGraph& g,
                                            const ControllerParams& p, ControllerKind kind);

/// One RK4 step of size scenario.dt. Throws Error{NonFiniteState}.
SwarmState step(const SwarmState& s, const Scenario& scenario);
SwarmState step(const SwarmState& s, const DiGraph& g, const ControllerParams& p,
                ControllerKind kind, double dt);

using StepObserver = std::function<void(double t, const SwarmState& s)>;

/// Integrates to t_end, stopping early once the diameter stays below
/// rendezvous_tol for kSettleSteps consecutive steps. The observer, when set,
/// sees every integrator state including the initial one.
Trajectory run(const Scenario& scenario, const StepObserver& observer = {});

/// Largest pairwise distance, optionally over a subset of agents.
double diameter(const SwarmState& s);
double diameter(const SwarmState& s, std::span<const int> subset);

/// Positions uniform in [-half_width, half_width]^2, headings uniform in
/// [-pi, pi). Uses mt19937_64 seeded with `seed`.
SwarmState random_initial_state(int n, std::uint64_t seed, double half_width = 50.0);

/// Seed for trial `trial` of a sweep rooted at `seed` (splitmix64 mix).
std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial);

struct SweepRow {
  double k1 = 0.0;
  int trials = 0;
  int successes = 0;
  double success_rate = 0.0;
  std::optional<double> mean_settle_time;  // over successful trials
};

struct SweepTable {
  std::vector<SweepRow> rows;
  /// Smallest grid k1 such that it and every larger grid value reached 100%.
  std::optional<double> threshold;
};

/// Runs `trials` random initial conditions per k1 value; a trial that leaves
/// the finite range counts as a failure. Trial t uses the
/// same initial state for every k1. Results are independent of `threads`.
SweepTable k1_sweep(const Scenario& scenario_template, std::span<const double> k1_grid,
                    int trials, std::uint64_t seed, unsigned threads = 0);

}  // namespace rendezvous
