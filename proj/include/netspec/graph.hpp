#ifndef NETSPEC_GRAPH_HPP
#define NETSPEC_GRAPH_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "netspec/errors.hpp"
#include "netspec/matrix.hpp"

namespace netspec::graph {

/// Undirected simple graph over nodes 0..n-1. Instances are immutable
/// snapshots: edits return a new graph with a bumped generation counter, so
/// concurrent readers never observe a half-applied edit.
class Graph {
 public:
  Graph() = default;
  Graph(int n, std::vector<std::pair<int, int>> edges, int generation = 0);

  int node_count() const { return n_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  int generation() const { return generation_; }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  const std::vector<int>& neighbors(int i) const { return adj_[i]; }
  int degree(int i) const { return static_cast<int>(adj_[i].size()); }
  int max_degree() const;
  bool has_edge(int a, int b) const;
  bool is_connected() const;

  Graph with_edge(int a, int b) const;
  Graph without_edge(int a, int b) const;
  Graph with_node() const;  // append an isolated node

 private:
  int n_ = 0;
  int generation_ = 0;
  std::vector<std::pair<int, int>> edges_;  // canonical: first < second, sorted
  std::vector<std::vector<int>> adj_;       // sorted neighbor lists
};

Matrix<double> adjacency_matrix(const Graph& g);
Matrix<double> laplacian_matrix(const Graph& g);
/// N x E oriented incidence; column for edge (a, b) has +1 at a, -1 at b.
Matrix<double> incidence_matrix(const Graph& g);
/// D^{-1/2} A D^{-1/2}; throws IsolatedNode on a degree-zero node.
Matrix<double> normalized_adjacency(const Graph& g);
/// I - D^{-1/2} A D^{-1/2}.
Matrix<double> normalized_laplacian(const Graph& g);

/// A single topology change, with the rank-one data the tracker consumes.
struct EdgeEvent {
  enum class Kind { Add, Remove };
  Kind kind = Kind::Add;
  int a = 0, b = 0;

  double rho() const { return kind == Kind::Add ? 1.0 : -1.0; }
  /// +1 at a, -1 at b, zero elsewhere.
  std::vector<double> incidence_vector(int n) const;
};

struct EdgeVisit {
  int head = 0, tail = 0;
};

/// Distributed edge-enumeration order: the active head pairs with each of
/// its not-yet-covered edges (lowest-index tail first), hands the role to
/// its lowest-index neighbor that still has uncovered edges, and backtracks
/// through previous heads when stuck. Covers every edge exactly once on a
/// connected graph; throws Disconnected otherwise.
std::vector<EdgeVisit> node_sequence_protocol(const Graph& g, int start);

Graph gen_path(int n);
Graph gen_cycle(int n);
Graph gen_complete(int n);
/// Cycle of length c with one pendant node attached to each cycle node.
Graph gen_pendant_cycle(int cycle_len);
/// Two triangles {0,1,2} and {3,4,5} joined by the edge (2,3).
Graph gen_triangle_bridge();
/// Random d-regular simple connected graph (configuration model with
/// retries). Throws InfeasibleParameters if n*d is odd or d >= n, and
/// ConnectivityRetryExhausted when the retry budget runs out.
Graph gen_d_regular(int n, int d, std::uint64_t seed);
/// Watts-Strogatz ring: k nearest neighbors (k even), each edge rewired
/// with probability p; resampled until connected.
Graph gen_small_world(int n, int k, double rewire_p, std::uint64_t seed);

/// The pair of vectors whose rank-two difference contribution
/// x+ x+^T - x- x-^T reproduces the border of the Laplacian at index t
/// (0-based) while cancelling everything outside it. Requires
/// lap(t, t) > 0; throws IsolatedNode otherwise.
struct RankTwoVectors {
  std::vector<double> plus, minus;
};
RankTwoVectors rank_two_laplacian_vectors(const Matrix<double>& lap, int t);

/// Ordered edge schedules for controlled membership changes.
std::vector<EdgeEvent> node_join_events(int new_node_id,
                                        const std::vector<int>& neighbors);
std::vector<EdgeEvent> node_leave_events(const Graph& g, int node);

/// Per-node copy of each neighbor's neighbor list. After an uncontrolled
/// failure the survivors reconstruct the lost node's edges from this.
struct OneHopTable {
  std::vector<std::vector<int>> lists;
};
OneHopTable build_one_hop_table(const Graph& g);
std::vector<EdgeEvent> node_failure_events(const OneHopTable& table, int node);

/// Random add/remove schedule that keeps the graph simple and connected.
std::vector<EdgeEvent> random_connected_edge_events(const Graph& g, int count,
                                                    std::uint64_t seed);

/// Text form: header "nodes N", then one "a b" line per edge (0-based).
std::string serialize_graph(const Graph& g);
Graph parse_graph(const std::string& text);

}  // namespace netspec::graph

#endif
