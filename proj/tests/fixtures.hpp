#pragma once

#include "rendezvous/digraph.hpp"
#include "rendezvous/kinematics.hpp"
#include "rendezvous/sim.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <tuple>
#include <vector>

namespace rendezvous::testing {

struct LabeledEdge {
  int from;
  int to;
  double weight;
};

/// Builds a graph from display labels; node k carries labels[k].
inline DiGraph graph_from_labels(const std::vector<int>& labels,
                                 const std::vector<LabeledEdge>& edges) {
  std::map<int, int> idx;
  for (std::size_t k = 0; k < labels.size(); ++k) idx[labels[k]] = static_cast<int>(k);
  std::vector<WeightedEdge> out;
  for (const auto& e : edges) out.push_back({idx.at(e.from), idx.at(e.to), e.weight});
  return build_digraph(static_cast<int>(labels.size()), out, labels);
}

inline NodeSet indices_of(const DiGraph& g, const std::vector<int>& labels) {
  NodeSet out;
  for (int l : labels)
    for (int v = 0; v < g.size(); ++v)
      if (g.label(v) == l) out.push_back(v);
  return out;
}

inline std::vector<int> labels_of(const DiGraph& g, const NodeSet& nodes) {
  std::vector<int> out;
  for (int v : nodes) out.push_back(g.label(v));
  return out;
}

/// Five-robot simulation graph: 1->2, 1->3, 2->4, 3->2, 4->3, 5->2.
inline DiGraph five_robot_graph(double w = 0.05) {
  return graph_from_labels({1, 2, 3, 4, 5}, {{1, 2, w}, {1, 3, w}, {2, 4, w}, {3, 2, w},
                                             {4, 3, w}, {5, 2, w}});
}

/// Initial positions and headings of the five-robot scenario.
inline SwarmState five_robot_start() {
  const double pi = std::numbers::pi;
  SwarmState s;
  s.agents = {{Vec2(0, 10), 0.0},
              {Vec2(-10, -10), 2 * pi / 5},
              {Vec2(-50, 10), 4 * pi / 5},
              {Vec2(-10, 0), 6 * pi / 5},
              {Vec2(10, 0), 8 * pi / 5}};
  return s;
}

/// The eleven-node layered example (labels skip 6).
inline DiGraph layered_graph(double w = 1.0) {
  return graph_from_labels(
      {1, 2, 3, 4, 5, 7, 8, 9, 10, 11, 12},
      {{1, 2, w}, {2, 1, w}, {1, 4, w}, {4, 3, w}, {3, 1, w}, {4, 5, w}, {5, 2, w},
       {7, 1, w}, {8, 1, w}, {8, 7, w}, {7, 9, w}, {9, 7, w}, {9, 8, w}, {7, 10, w},
       {9, 10, w}, {10, 2, w}, {11, 12, w}, {12, 11, w}, {11, 5, w}});
}

/// Random digraph on n nodes with edge probability p and weights in [lo, hi].
inline DiGraph random_digraph(int n, double p, std::mt19937_64& rng, double lo = 0.1,
                              double hi = 2.0) {
  std::bernoulli_distribution coin(p);
  std::uniform_real_distribution<double> wdist(lo, hi);
  std::vector<WeightedEdge> edges;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && coin(rng)) edges.push_back({i, j, wdist(rng)});
  return build_digraph(n, edges);
}

/// Transitive closure by repeated relaxation; reach[i][j] iff a path i ~> j.
inline std::vector<std::vector<bool>> brute_force_reachability(const DiGraph& g) {
  const int n = g.size();
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (int i = 0; i < n; ++i) reach[i][i] = true;
  for (const auto& e : g.edges()) reach[e.from][e.to] = true;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (reach[i][k] && reach[k][j]) reach[i][j] = true;
  return reach;
}

inline bool brute_force_has_root(const DiGraph& g) {
  const auto reach = brute_force_reachability(g);
  for (int r = 0; r < g.size(); ++r) {
    bool all = true;
    for (int i = 0; i < g.size(); ++i) all = all && reach[i][r];
    if (all) return true;
  }
  return false;
}

inline SwarmState random_state(int n, std::mt19937_64& rng, double half_width = 50.0) {
  std::uniform_real_distribution<double> pos(-half_width, half_width);
  std::uniform_real_distribution<double> ang(-std::numbers::pi, std::numbers::pi);
  SwarmState s;
  s.agents.resize(n);
  for (auto& a : s.agents) {
    a.x = Vec2(pos(rng), pos(rng));
    a.theta = ang(rng);
  }
  return s;
}

inline double rel_err(double got, double want) {
  const double scale = std::max(std::abs(want), 1e-300);
  return std::abs(got - want) / scale;
}

inline double rel_err(const Vec2& got, const Vec2& want) {
  const double scale = std::max(want.norm(), 1e-300);
  return (got - want).norm() / scale;
}

}  // namespace rendezvous::testing
