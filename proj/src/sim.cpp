#include "rendezvous/sim.hpp"

#include "rendezvous/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <thread>

namespace rendezvous {

const char* to_string(ControllerKind kind) {
  return kind == ControllerKind::Ccp ? "ccp" : "single_integrator";
}

ControllerKind controller_from_string(const std::string& name) {
  if (name == "ccp") return ControllerKind::Ccp;
  if (name == "single_integrator") return ControllerKind::SingleIntegrator;
  throw Error(ErrorCode::Schema,
              "control.controller: expected \"ccp\" or \"single_integrator\", got \"" + name +
                  "\"");
}

void Scenario::validate() const {
  if (initial.size() != graph.size())
    throw Error(ErrorCode::Schema, "agents: expected " + std::to_string(graph.size()) +
                                       " agents, got " + std::to_string(initial.size()));
  params.validate();
  if (!(dt > 0.0) || !std::isfinite(dt)) throw Error(ErrorCode::Schema, "sim.dt must be > 0");
  if (!(t_end >= dt) || !std::isfinite(t_end))
    throw Error(ErrorCode::Schema, "sim.t_end must be >= sim.dt");
  if (!(rendezvous_tol > 0.0)) throw Error(ErrorCode::Schema, "sim.tol must be > 0");
  if (!(record_interval >= 0.0))
    throw Error(ErrorCode::Schema, "sim.record_interval must be >= 0");
}

namespace {

void sense_into(int i, const SwarmState& s, const DiGraph& g, std::vector<BodyMeasurement>& y) {
  auto nb = g.neighbors(i);
  auto w = g.neighbor_weights(i);
  y.clear();
  const double theta = s.agents[i].theta;
  for (std::size_t k = 0; k < nb.size(); ++k)
    y.push_back({w[k], body_frame(s.agents[nb[k]].x - s.agents[i].x, theta)});
}

void check_finite(const SwarmState& s, double t) {
  for (int i = 0; i < s.size(); ++i) {
    const auto& a = s.agents[i];
    if (!std::isfinite(a.x.x()) || !std::isfinite(a.x.y()) || !std::isfinite(a.theta))
      throw Error(ErrorCode::NonFiniteState,
                  "non-finite state for agent " + std::to_string(i + 1) + " at t=" +
                      std::to_string(t));
  }
}

}  // namespace

std::vector<ControlInput> closed_loop_inputs(const SwarmState& s, const DiGraph& g,
                                             const ControllerParams& p, ControllerKind kind) {
  std::vector<ControlInput> out(s.agents.size());
  std::vector<BodyMeasurement> y;
  for (int i = 0; i < s.size(); ++i) {
    sense_into(i, s, g, y);
    if (kind == ControllerKind::Ccp) {
      out[i] = ccp_feedback(y, p.k1);
    } else {
      Vec2 f = Vec2::Zero();
      for (const auto& m : y) f += m.weight * m.displacement;
      out[i] = {f.norm(), 0.0};
    }
  }
  return out;
}

std::vector<UnicycleRate> closed_loop_rates(const SwarmState& s, const DiGraph& g,
                                            const ControllerParams& p, ControllerKind kind) {
  std::vector<UnicycleRate> rates(s.agents.size());
  if (kind == ControllerKind::SingleIntegrator) {
    const auto pos = s.positions();
    const auto v = single_integrator_velocities(pos, g);
    for (int i = 0; i < s.size(); ++i) rates[i] = {v[i], 0.0};
    return rates;
  }
  std::vector<BodyMeasurement> y;
  for (int i = 0; i < s.size(); ++i) {
    sense_into(i, s, g, y);
    rates[i] = unicycle_derivative(s.agents[i], ccp_feedback(y, p.k1));
  }
  return rates;
}

SwarmState step(const SwarmState& s, const DiGraph& g, const ControllerParams& p,
                ControllerKind kind, double dt) {
  const std::size_t n = s.agents.size();
  auto advance = [&](const SwarmState& base, const std::vector<UnicycleRate>& k, double h) {
    SwarmState out = base;
    for (std::size_t i = 0; i < n; ++i) {
      out.agents[i].x += h * k[i].xdot;
      out.agents[i].theta += h * k[i].theta_dot;
    }
    return out;
  };

  const auto k1 = closed_loop_rates(s, g, p, kind);
  const auto k2 = closed_loop_rates(advance(s, k1, 0.5 * dt), g, p, kind);
  const auto k3 = closed_loop_rates(advance(s, k2, 0.5 * dt), g, p, kind);
  const auto k4 = closed_loop_rates(advance(s, k3, dt), g, p, kind);

  SwarmState next = s;
  const double w = dt / 6.0;
  for (std::size_t i = 0; i < n; ++i) {
    next.agents[i].x += w * (k1[i].xdot + 2.0 * k2[i].xdot + 2.0 * k3[i].xdot + k4[i].xdot);
    next.agents[i].theta +=
        w * (k1[i].theta_dot + 2.0 * k2[i].theta_dot + 2.0 * k3[i].theta_dot + k4[i].theta_dot);
  }
  return next;
}

SwarmState step(const SwarmState& s, const Scenario& scenario) {
  auto next = step(s, scenario.graph, scenario.params, scenario.controller, scenario.dt);
  check_finite(next, 0.0);
  return next;
}

double diameter(const SwarmState& s) {
  double best = 0.0;
  for (int i = 0; i < s.size(); ++i)
    for (int j = i + 1; j < s.size(); ++j)
      best = std::max(best, (s.agents[j].x - s.agents[i].x).norm());
  return best;
}

double diameter(const SwarmState& s, std::span<const int> subset) {
  double best = 0.0;
  for (std::size_t a = 0; a < subset.size(); ++a)
    for (std::size_t b = a + 1; b < subset.size(); ++b)
      best = std::max(best, (s.agents.at(subset[b]).x - s.agents.at(subset[a]).x).norm());
  return best;
}

Trajectory run(const Scenario& scenario, const StepObserver& observer) {
  scenario.validate();
  const auto& g = scenario.graph;
  const double dt = scenario.dt;
  const auto total_steps = static_cast<std::size_t>(std::llround(scenario.t_end / dt));
  const std::size_t stride =
      scenario.record_interval > 0.0
          ? std::max<std::size_t>(1, static_cast<std::size_t>(
                                         std::llround(scenario.record_interval / dt)))
          : 1;

  Trajectory traj;
  traj.has_reverse_spanning_tree = has_reverse_spanning_tree(g).exists;

  auto record = [&](double t, const SwarmState& s, double d) {
    traj.times.push_back(t);
    traj.states.push_back(s);
    traj.inputs.push_back(closed_loop_inputs(s, g, scenario.params, scenario.controller));
    traj.diameters.push_back(d);
  };

  SwarmState s = scenario.initial;
  check_finite(s, 0.0);
  double d = diameter(s);
  traj.max_diameter = d;
  record(0.0, s, d);
  if (observer) observer(0.0, s);

  int streak = d < scenario.rendezvous_tol ? 1 : 0;
  double streak_start = 0.0;
  std::size_t k = 0;
  bool last_recorded = true;
  while (k < total_steps) {
    s = step(s, g, scenario.params, scenario.controller, dt);
    ++k;
    const double t = static_cast<double>(k) * dt;
    check_finite(s, t);
    d = diameter(s);
    traj.max_diameter = std::max(traj.max_diameter, d);
    if (observer) observer(t, s);

    if (d < scenario.rendezvous_tol) {
      if (streak == 0) streak_start = t;
      ++streak;
    } else {
      streak = 0;
    }

    last_recorded = (k % stride == 0);
    if (last_recorded) record(t, s, d);
    if (streak >= kSettleSteps) {
      traj.converged = true;
      traj.settle_time = streak_start;
      break;
    }
  }
  if (!last_recorded) record(static_cast<double>(k) * dt, s, d);
  traj.steps = k;
  return traj;
}

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (trial + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

SwarmState random_initial_state(int n, std::uint64_t seed, double half_width) {
  std::mt19937_64 rng(seed);
  // Explicit 53-bit conversion keeps draws identical across standard libraries.
  auto unit = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  SwarmState s;
  s.agents.resize(n);
  for (auto& a : s.agents) {
    const double x = -half_width + 2.0 * half_width * unit();
    const double y = -half_width + 2.0 * half_width * unit();
    a.x = Vec2(x, y);
    a.theta = -std::numbers::pi + 2.0 * std::numbers::pi * unit();
  }
  return s;
}

SweepTable k1_sweep(const Scenario& scenario_template, std::span<const double> k1_grid,
                    int trials, std::uint64_t seed, unsigned threads) {
  scenario_template.validate();
  const int n = scenario_template.graph.size();
  const std::size_t cells = k1_grid.size() * static_cast<std::size_t>(trials);
  std::vector<char> success(cells, 0);
  std::vector<double> settle(cells, 0.0);

  std::vector<SwarmState> starts;
  for (int t = 0; t < trials; ++t)
    starts.push_back(random_initial_state(n, trial_seed(seed, static_cast<std::uint64_t>(t))));

  auto work = [&](std::size_t cell) {
    const std::size_t kidx = cell / static_cast<std::size_t>(trials);
    const std::size_t t = cell % static_cast<std::size_t>(trials);
    Scenario sc = scenario_template;
    sc.params.k1 = k1_grid[kidx];
    sc.initial = starts[t];
    sc.record_interval = sc.t_end;  // only endpoints are needed
    try {
      const auto traj = run(sc);
      success[cell] = traj.converged ? 1 : 0;
      settle[cell] = traj.settle_time.value_or(0.0);
    } catch (const Error& e) {
      // A trial that leaves the finite range is a failed trial, not a failed sweep.
      if (e.code() != ErrorCode::NonFiniteState) throw;
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, cells)));
  if (threads <= 1) {
    for (std::size_t c = 0; c < cells; ++c) work(c);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t c = w; c < cells; c += threads) work(c);
      });
  }

  SweepTable table;
  for (std::size_t kidx = 0; kidx < k1_grid.size(); ++kidx) {
    SweepRow row;
    row.k1 = k1_grid[kidx];
    row.trials = trials;
    double total = 0.0;
    for (int t = 0; t < trials; ++t) {
      const std::size_t cell = kidx * static_cast<std::size_t>(trials) + t;
      if (success[cell]) {
        ++row.successes;
        total += settle[cell];
      }
    }
    row.success_rate = trials > 0 ? static_cast<double>(row.successes) / trials : 0.0;
    if (row.successes > 0) row.mean_settle_time = total / row.successes;
    table.rows.push_back(row);
  }

  std::vector<std::size_t> order(k1_grid.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return k1_grid[a] < k1_grid[b]; });
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (table.rows[*it].successes != trials || trials == 0) break;
    table.threshold = k1_grid[*it];
  }
  return table;
}

}  // namespace rendezvous
