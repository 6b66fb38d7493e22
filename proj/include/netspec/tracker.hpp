#ifndef NETSPEC_TRACKER_HPP
#define NETSPEC_TRACKER_HPP

#include <utility>
#include <vector>

#include "netspec/consensus.hpp"
#include "netspec/graph.hpp"
#include "netspec/linalg.hpp"
#include "netspec/matrix.hpp"
#include "netspec/netsim.hpp"

namespace netspec::tracker {

/// Per-node tracker memory. A node never materializes the basis or the
/// update matrix: it holds its own rows of U (double buffered), two private
/// copies of the spectrum, the agreed inner products, and one scratch
/// vector that eigenvectors pass through one at a time.
template <class S>
struct NodeState {
  std::vector<int> entries;                // global row indices owned here
  std::vector<std::vector<S>> u_row_prev;  // per owned entry, length dim
  std::vector<std::vector<S>> u_row_curr;
  std::vector<double> lambda_prev;
  std::vector<double> lambda_curr;
  std::vector<S> z_local;
  std::vector<S> v_scratch;
};

template <class S>
struct TrackerNetwork {
  sim::Network<NodeState<S>> net;
  consensus::ConsensusConfig consensus_cfg;
  consensus::ConsensusRuntime consensus;
  std::vector<int> owner;          // entry -> owning node
  std::vector<int> primary_entry;  // node -> its first entry, -1 if none
  int dim = 0;
  double xi = 1e-12;
  long t = 0;

  explicit TrackerNetwork(graph::Graph g) : net(std::move(g)) {}
};

/// Start a tracker at Lambda = 0, U = I. owner[j] names the node holding
/// row j; empty means the identity map (one row per node, dim = node
/// count). Multi-row owners model nodes with several sensors.
template <class S>
TrackerNetwork<S> make_tracker(graph::Graph g,
                               const consensus::ConsensusConfig& cfg,
                               std::vector<int> owner = {}, double xi = 1e-12);

/// One rank-one tracking step for R <- lambda_scale * R + rho * x x^H:
/// the nodes agree on each component of z = U^H x through one scalar
/// consensus, then every node independently deflates, solves the secular
/// roots, and updates its spectrum copy and its own rows. Nodes only read
/// the sample entries they own.
template <class S>
void tracker_step(TrackerNetwork<S>& tr, const std::vector<S>& x, double rho,
                  double lambda_scale = 1.0);

/// Sliding-window pair: add x_new, retire x_old. Window scaling is the
/// caller's (pass x / sqrt(window) for an averaged window).
template <class S>
void tracker_rank_two_step(TrackerNetwork<S>& tr, const std::vector<S>& x_new,
                           const std::vector<S>& x_old);

/// EWMA covariance step R <- alpha R + (1 - alpha) x x^H.
template <class S>
void tracker_ewma_step(TrackerNetwork<S>& tr, const std::vector<S>& x,
                       double alpha);

/// Laplacian edge event as a rank-one step on the tracked spectrum. Adds
/// swap the edge in before the update runs; removals run the update while
/// the link still exists, so the information can still travel over it.
void tracker_apply_edge_event(TrackerNetwork<double>& tr,
                              const graph::EdgeEvent& ev);

/// Grow the eigenproblem by one structurally-zero slot owned by a fresh
/// node, which bootstraps its spectrum copy from copy_lambda_from. The
/// caller wires the node up through edge-add events next; consensus
/// re-resolves at the first step on the reconnected topology.
template <class S>
int tracker_join_node(TrackerNetwork<S>& tr, int copy_lambda_from);

/// Drop a fully isolated node from the communication graph without
/// shrinking the eigenproblem. The custodian adopts the departed rows and
/// keeps evolving them (their sample entries stay zero, so they cost no
/// communication); the departed slot keeps reporting its structural zero.
template <class S>
TrackerNetwork<S> tracker_remove_node(const TrackerNetwork<S>& tr, int node,
                                      int custodian);

template <class S>
struct GlobalView {
  std::vector<double> eigenvalues;  // report node's copy, descending
  Matrix<S> basis;                  // rows gathered from their owners
  double disagreement = 0.0;        // max over slots of the spread of the
                                    // per-node spectrum copies
};

/// Simulator-side gather for measurement; no protocol cost is booked.
template <class S>
GlobalView<S> gather_global(const TrackerNetwork<S>& tr, int report_node = 0);

}  // namespace netspec::tracker

#endif
