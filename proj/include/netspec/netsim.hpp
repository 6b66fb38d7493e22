#ifndef NETSPEC_NETSIM_HPP
#define NETSPEC_NETSIM_HPP

#include <cstdint>
#include <ostream>
#include <string_view>
#include <utility>
#include <vector>

#include "netspec/graph.hpp"
#include "netspec/matrix.hpp"

namespace netspec::sim {

/// Deterministic random stream keyed by (seed, purpose, node, time). Any
/// consumer that derives its stream from the same key gets the same draws
/// regardless of scheduling, which keeps parallel trials reproducible.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::string_view purpose, long node = -1,
            long time = -1);

  double uniform();  // [0, 1)
  double gaussian();
  cplx gaussian_complex();  // unit-variance circular complex
  std::uint64_t integer(std::uint64_t bound);  // [0, bound)

 private:
  std::uint64_t state_;
  std::uint64_t next_raw();
};

/// Communication cost ledger.
///
/// consensus_rounds uses the convention of the cost tables this simulator
/// reports against: one completed scalar agreement costs one round, and a
/// push-sum agreement costs two because it carries a value and a weight.
/// scalar_consensus_runs counts completed scalar agreements without the
/// push-sum doubling; per-window cost figures quote that convention.
struct RoundMetrics {
  long long consensus_rounds = 0;
  long long scalar_messages = 0;  // scalars pushed over directed edges
  long long wall_rounds = 0;      // synchronized communication slots
  long long scalar_consensus_runs = 0;

  RoundMetrics& operator+=(const RoundMetrics& o) {
    consensus_rounds += o.consensus_rounds;
    scalar_messages += o.scalar_messages;
    wall_rounds += o.wall_rounds;
    scalar_consensus_runs += o.scalar_consensus_runs;
    return *this;
  }
};

void write_metrics_csv_header(std::ostream& out);
void append_metrics_csv(std::ostream& out, long t, const RoundMetrics& m);

/// Graph plus per-node state plus the cost ledger. The topology member is
/// a value; swapping it in place models a topology event between rounds.
template <class State>
struct Network {
  graph::Graph topology;
  std::vector<State> nodes;
  RoundMetrics metrics;

  explicit Network(graph::Graph g)
      : topology(std::move(g)), nodes(topology.node_count()) {}
  Network(graph::Graph g, std::vector<State> init)
      : topology(std::move(g)), nodes(std::move(init)) {}
};

/// Read-only view of the payloads a node received in the current slot.
/// Handing the closure only this view is what enforces locality: there is
/// no path from here to a non-neighbor's state.
class Inbox {
 public:
  Inbox(const std::vector<int>& neighbors, const double* bus, int width)
      : neighbors_(neighbors), bus_(bus), width_(width) {}

  int count() const { return static_cast<int>(neighbors_.size()); }
  int neighbor(int idx) const { return neighbors_[idx]; }
  const double* payload(int idx) const {
    return bus_ + static_cast<std::size_t>(neighbors_[idx]) * width_;
  }
  int width() const { return width_; }

 private:
  const std::vector<int>& neighbors_;
  const double* bus_;
  int width_;
};

/// One synchronized communication slot: every node fills a width-scalar
/// outbox from its own state, payloads travel one hop, then every node
/// folds its inbox back into its state. Costs are booked on the metrics
/// ledger. bus_scratch, when given, is reused instead of allocating the
/// payload bus; iterative protocols pass the same vector every slot.
template <class State, class PubFn, class RecvFn>
void run_round(const graph::Graph& g, std::vector<State>& nodes,
               RoundMetrics& metrics, int width, PubFn&& publish,
               RecvFn&& receive, std::vector<double>* bus_scratch = nullptr) {
  const int n = g.node_count();
  std::vector<double> local_bus;
  std::vector<double>& bus = bus_scratch ? *bus_scratch : local_bus;
  bus.assign(static_cast<std::size_t>(n) * width, 0.0);
  for (int i = 0; i < n; ++i)
    publish(i, nodes[i], bus.data() + static_cast<std::size_t>(i) * width);
  for (int i = 0; i < n; ++i) {
    Inbox inbox(g.neighbors(i), bus.data(), width);
    receive(i, nodes[i], inbox);
  }
  metrics.wall_rounds += 1;
  metrics.scalar_messages +=
      static_cast<long long>(width) * 2 * g.edge_count();
}

template <class State, class PubFn, class RecvFn>
void run_round(Network<State>& net, int width, PubFn&& publish,
               RecvFn&& receive) {
  run_round(net.topology, net.nodes, net.metrics, width,
            std::forward<PubFn>(publish), std::forward<RecvFn>(receive));
}

}  // namespace netspec::sim

#endif
