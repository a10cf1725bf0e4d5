#include "rendezvous/digraph.hpp"

#include "rendezvous/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>

namespace rendezvous {

bool DiGraph::has_edge(int i, int j) const {
  const auto& nb = out_.at(i);
  return std::find(nb.begin(), nb.end(), j) != nb.end();
}

double DiGraph::weight(int i, int j) const {
  const auto& nb = out_.at(i);
  auto it = std::find(nb.begin(), nb.end(), j);
  if (it == nb.end()) return 0.0;
  return out_weights_[i][static_cast<std::size_t>(it - nb.begin())];
}

int DiGraph::label(int i) const {
  if (labels_.empty()) return i + 1;
  return labels_.at(i);
}

DiGraph build_digraph(int n, std::span<const WeightedEdge> edges, std::vector<int> labels) {
  if (n < 1) throw Error(ErrorCode::IndexOutOfRange, "graph needs at least one node");
  if (!labels.empty()) {
    if (static_cast<int>(labels.size()) != n)
      throw Error(ErrorCode::IndexOutOfRange, "label count does not match node count");
    std::set<int> uniq(labels.begin(), labels.end());
    if (static_cast<int>(uniq.size()) != n)
      throw Error(ErrorCode::DuplicateEdge, "duplicate node label");
  }

  DiGraph g;
  g.labels_ = std::move(labels);
  g.out_.assign(n, {});
  g.out_weights_.assign(n, {});
  g.out_sum_.assign(n, 0.0);

  auto lab = [&](int i) { return g.labels_.empty() ? i + 1 : g.labels_[i]; };
  for (const auto& e : edges) {
    if (e.from < 0 || e.from >= n || e.to < 0 || e.to >= n) {
      std::ostringstream msg;
      msg << "edge index out of range (" << e.from << ", " << e.to << ") for n=" << n;
      throw Error(ErrorCode::IndexOutOfRange, msg.str());
    }
    if (e.from == e.to) {
      std::ostringstream msg;
      msg << "self-loop " << lab(e.from) << "→" << lab(e.to);
      throw Error(ErrorCode::SelfLoop, msg.str());
    }
    if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
      std::ostringstream msg;
      msg << "non-positive weight " << e.weight << " on edge " << lab(e.from) << "→"
          << lab(e.to);
      throw Error(ErrorCode::NonPositiveWeight, msg.str());
    }
    if (g.has_edge(e.from, e.to)) {
      std::ostringstream msg;
      msg << "duplicate edge " << lab(e.from) << "→" << lab(e.to);
      throw Error(ErrorCode::DuplicateEdge, msg.str());
    }
    g.out_[e.from].push_back(e.to);
    g.out_weights_[e.from].push_back(e.weight);
    g.out_sum_[e.from] += e.weight;
    g.edges_.push_back(e);
  }
  return g;
}

Eigen::MatrixXd weighted_laplacian(const DiGraph& g) {
  const int n = g.size();
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    auto nb = g.neighbors(i);
    auto w = g.neighbor_weights(i);
    for (std::size_t k = 0; k < nb.size(); ++k) {
      L(i, nb[k]) -= w[k];
      L(i, i) += w[k];
    }
  }
  return L;
}

int numeric_rank(const Eigen::MatrixXd& m, double rel_tol) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  const double smax = s.size() > 0 ? s(0) : 0.0;
  if (smax == 0.0) return 0;
  int rank = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k)
    if (s(k) > rel_tol * smax) ++rank;
  return rank;
}

Eigen::MatrixXd numeric_kernel(const Eigen::MatrixXd& m, double rel_tol) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
  const int rank = numeric_rank(m, rel_tol);
  const auto cols = m.cols();
  return svd.matrixV().rightCols(cols - rank);
}

namespace {

// Iterative Tarjan. Returns component id per node, ids in reverse
// topological order of discovery.
std::vector<int> tarjan(const DiGraph& g, int& count) {
  const int n = g.size();
  std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
  std::vector<char> on_stack(n, 0);
  std::vector<int> stack;
  std::vector<std::pair<int, std::size_t>> call;
  int next = 0;
  count = 0;

  for (int s = 0; s < n; ++s) {
    if (index[s] != -1) continue;
    call.emplace_back(s, 0);
    while (!call.empty()) {
      auto& [v, pos] = call.back();
      if (pos == 0) {
        index[v] = low[v] = next++;
        stack.push_back(v);
        on_stack[v] = 1;
      }
      auto nb = g.neighbors(v);
      bool descended = false;
      while (pos < nb.size()) {
        const int w = nb[pos++];
        if (index[w] == -1) {
          call.emplace_back(w, 0);
          descended = true;
          break;
        }
        if (on_stack[w]) low[v] = std::min(low[v], index[w]);
      }
      if (descended) continue;

      const int done = v;
      if (low[done] == index[done]) {
        int w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          comp[w] = count;
        } while (w != done);
        ++count;
      }
      call.pop_back();
      if (!call.empty()) {
        const int parent = call.back().first;
        low[parent] = std::min(low[parent], low[done]);
      }
    }
  }
  return comp;
}

}  // namespace

std::vector<int> Condensation::successors(int c) const {
  std::vector<int> out;
  for (const auto& [a, b] : dag_edges)
    if (a == c) out.push_back(b);
  return out;
}

Condensation strongly_connected_components(const DiGraph& g) {
  int count = 0;
  const auto raw = tarjan(g, count);

  // Renumber components by their minimum member for determinism.
  std::vector<int> min_member(count, g.size());
  for (int v = 0; v < g.size(); ++v) min_member[raw[v]] = std::min(min_member[raw[v]], v);
  std::vector<int> order(count);
  for (int c = 0; c < count; ++c) order[c] = c;
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return min_member[a] < min_member[b]; });
  std::vector<int> renum(count);
  for (int k = 0; k < count; ++k) renum[order[k]] = k;

  Condensation c;
  c.components.assign(count, {});
  c.component_of.resize(g.size());
  for (int v = 0; v < g.size(); ++v) {
    c.component_of[v] = renum[raw[v]];
    c.components[c.component_of[v]].push_back(v);
  }

  std::set<std::pair<int, int>> dag;
  for (const auto& e : g.edges()) {
    const int a = c.component_of[e.from];
    const int b = c.component_of[e.to];
    if (a != b) dag.emplace(a, b);
  }
  c.dag_edges.assign(dag.begin(), dag.end());

  std::vector<char> has_out(count, 0);
  for (const auto& [a, b] : c.dag_edges) has_out[a] = 1;
  int sinks = 0, sink = -1;
  for (int k = 0; k < count; ++k) {
    if (!has_out[k]) {
      ++sinks;
      sink = k;
    }
  }
  if (sinks == 1) c.root = sink;
  return c;
}

bool is_acyclic(const Condensation& c) {
  const int m = c.size();
  std::vector<int> indeg(m, 0);
  for (const auto& [a, b] : c.dag_edges) ++indeg[b];
  std::vector<int> ready;
  for (int k = 0; k < m; ++k)
    if (indeg[k] == 0) ready.push_back(k);
  int seen = 0;
  while (!ready.empty()) {
    const int k = ready.back();
    ready.pop_back();
    ++seen;
    for (const auto& [a, b] : c.dag_edges)
      if (a == k && --indeg[b] == 0) ready.push_back(b);
  }
  return seen == m;
}

SpanningTreeResult has_reverse_spanning_tree(const DiGraph& g) {
  // In a finite DAG every vertex reaches some sink, so a unique sink
  // component is reachable from everywhere.
  const auto c = strongly_connected_components(g);
  SpanningTreeResult r;
  if (c.root) {
    r.exists = true;
    r.root = c.components[*c.root].front();
  }
  return r;
}

LayerDecomposition layer_sets(const Condensation& c) {
  if (!c.root) throw Error(ErrorCode::NoRoot, "graph has no reverse directed spanning tree");
  const int m = c.size();
  std::vector<int> depth(m, -1);
  std::function<int(int)> longest = [&](int k) -> int {
    if (depth[k] >= 0) return depth[k];
    int best = 0;
    for (const auto& [a, b] : c.dag_edges)
      if (a == k) best = std::max(best, 1 + longest(b));
    depth[k] = best;
    return best;
  };
  int max_depth = 0;
  for (int k = 0; k < m; ++k) max_depth = std::max(max_depth, longest(k));

  LayerDecomposition out;
  out.layers.assign(max_depth + 1, {});
  for (int k = 0; k < m; ++k)
    for (int v : c.components[k]) out.layers[depth[k]].push_back(v);
  NodeSet acc;
  for (auto& layer : out.layers) {
    std::sort(layer.begin(), layer.end());
    acc.insert(acc.end(), layer.begin(), layer.end());
    std::sort(acc.begin(), acc.end());
    out.cumulative.push_back(acc);
  }
  return out;
}

bool is_isolated(std::span<const int> s, const DiGraph& g) {
  std::vector<char> in(g.size(), 0);
  for (int v : s) in.at(v) = 1;
  for (const auto& e : g.edges())
    if (in[e.from] && !in[e.to]) return false;
  return true;
}

DiGraph induced_subgraph(const DiGraph& g, std::span<const int> nodes) {
  std::vector<int> local(g.size(), -1);
  std::vector<int> labels;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    local.at(nodes[k]) = static_cast<int>(k);
    labels.push_back(g.label(nodes[k]));
  }
  std::vector<WeightedEdge> edges;
  for (const auto& e : g.edges())
    if (local[e.from] >= 0 && local[e.to] >= 0)
      edges.push_back({local[e.from], local[e.to], e.weight});
  return build_digraph(static_cast<int>(nodes.size()), edges, std::move(labels));
}

}  // namespace rendezvous
