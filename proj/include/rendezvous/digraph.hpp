#pragma once

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rendezvous {

// Nodes are 0-based indices internally. Display labels (1..n by default)
// appear only in messages and I/O.
using NodeSet = std::vector<int>;

struct WeightedEdge {
  int from = 0;
  int to = 0;
  double weight = 0.0;
};

/// Sensor digraph. An edge (i, j) means robot i senses robot j, so the
/// neighbor set N_i is the out-neighborhood of i. Immutable once built.
class DiGraph {
 public:
  DiGraph() = default;

  int size() const noexcept { return static_cast<int>(out_.size()); }
  std::span<const int> neighbors(int i) const { return out_.at(i); }
  std::span<const double> neighbor_weights(int i) const { return out_weights_.at(i); }
  const std::vector<WeightedEdge>& edges() const noexcept { return edges_; }

  bool has_edge(int i, int j) const;
  double weight(int i, int j) const;  // 0 when (i, j) is not an edge
  double out_weight(int i) const { return out_sum_.at(i); }  // A_i

  int label(int i) const;
  const std::vector<int>& labels() const noexcept { return labels_; }

  friend DiGraph build_digraph(int n, std::span<const WeightedEdge> edges,
                               std::vector<int> labels);

 private:
  std::vector<std::vector<int>> out_;
  std::vector<std::vector<double>> out_weights_;
  std::vector<double> out_sum_;
  std::vector<WeightedEdge> edges_;
  std::vector<int> labels_;
};

/// Validates and builds a digraph over nodes 0..n-1. `labels`, when given,
/// must hold n distinct display labels used in error messages and reports.
/// Throws Error{SelfLoop, NonPositiveWeight, DuplicateEdge, IndexOutOfRange}.
DiGraph build_digraph(int n, std::span<const WeightedEdge> edges,
                      std::vector<int> labels = {});

/// L = D - A with D_ii = sum_j a_ij and A_ij = a_ij for j in N_i.
Eigen::MatrixXd weighted_laplacian(const DiGraph& g);

/// Numeric rank with singular-value cutoff rel_tol * sigma_max.
int numeric_rank(const Eigen::MatrixXd& m, double rel_tol = 1e-9);

/// Orthonormal basis (columns) of the numeric right kernel.
Eigen::MatrixXd numeric_kernel(const Eigen::MatrixXd& m, double rel_tol = 1e-9);

struct SpanningTreeResult {
  bool exists = false;
  std::optional<int> root;  // minimum-index node of the root component
};

/// Reachability test: true iff some node is reachable from every node.
SpanningTreeResult has_reverse_spanning_tree(const DiGraph& g);

struct Condensation {
  std::vector<NodeSet> components;  // sorted by minimum member
  std::vector<int> component_of;    // node -> component index
  std::vector<std::pair<int, int>> dag_edges;
  std::optional<int> root;  // the unique sink component, when unique

  int size() const noexcept { return static_cast<int>(components.size()); }
  std::vector<int> successors(int c) const;
};

Condensation strongly_connected_components(const DiGraph& g);

/// True iff the contracted graph has no directed cycle.
bool is_acyclic(const Condensation& c);

struct LayerDecomposition {
  std::vector<NodeSet> layers;      // L_0 .. L_k*
  std::vector<NodeSet> cumulative;  // Lbar_k = L_0 u ... u L_k

  int depth() const noexcept { return static_cast<int>(layers.size()) - 1; }
};

/// Layers by longest path to the root component. Throws Error{NoRoot}.
LayerDecomposition layer_sets(const Condensation& c);

/// True iff no edge leaves `s`.
bool is_isolated(std::span<const int> s, const DiGraph& g);

/// Induced subgraph on `nodes` (re-indexed in the given order).
DiGraph induced_subgraph(const DiGraph& g, std::span<const int> nodes);

}  // namespace rendezvous
