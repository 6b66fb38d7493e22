#include "netspec/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "netspec/errors.hpp"

namespace netspec::tracker {

template <class S>
TrackerNetwork<S> make_tracker(graph::Graph g,
                               const consensus::ConsensusConfig& cfg,
                               std::vector<int> owner, double xi) {
  const int n = g.node_count();
  if (n <= 0) throw ValidationError("make_tracker: empty graph");
  if (owner.empty()) {
    owner.resize(n);
    std::iota(owner.begin(), owner.end(), 0);
  }
  const int m = static_cast<int>(owner.size());
  for (int o : owner)
    if (o < 0 || o >= n) throw ValidationError("make_tracker: bad owner id");

  TrackerNetwork<S> tr(std::move(g));
  tr.consensus_cfg = cfg;
  tr.owner = std::move(owner);
  tr.dim = m;
  tr.xi = xi;
  tr.consensus = consensus::prepare_consensus(cfg, tr.net.topology);
  tr.primary_entry.assign(n, -1);

  for (auto& st : tr.net.nodes) {
    st.lambda_prev.assign(m, 0.0);
    st.lambda_curr.assign(m, 0.0);
    st.z_local.assign(m, S{});
    st.v_scratch.assign(m, S{});
  }
  for (int j = 0; j < m; ++j) {
    NodeState<S>& st = tr.net.nodes[tr.owner[j]];
    if (tr.primary_entry[tr.owner[j]] < 0) tr.primary_entry[tr.owner[j]] = j;
    st.entries.push_back(j);
    std::vector<S> row(m, S{});
    row[j] = S{1};
    st.u_row_curr.push_back(std::move(row));
    st.u_row_prev.emplace_back(m, S{});
  }
  return tr;
}

namespace {

/// Column index of the k-th secular root in the merged descending order:
/// roots keep their mutual order and win ties against passthrough values,
/// matching the stable merge of the dense one-shot update.
int root_column(int k, double root, const std::vector<double>& pt_vals) {
  int col = k;
  for (double v : pt_vals)
    if (v > root) ++col;
  return col;
}

int passthrough_column(int j, double val, const std::vector<double>& roots) {
  int col = j;
  for (double r : roots)
    if (r >= val) ++col;
  return col;
}

template <class S>
void node_update(NodeState<S>& st, int node, long long t, int m, double rho,
                 double lambda_scale, double xi) {
  for (double& v : st.lambda_prev) v *= lambda_scale;

  linalg::DiagonalSpectrum spec(st.lambda_prev);
  const linalg::RankOneUpdate<S> upd{rho, st.z_local};
  const linalg::DeflationRecord<S> rec = linalg::deflate(spec, upd);

  std::vector<double> pt_vals(rec.passthrough.size());
  for (std::size_t j = 0; j < rec.passthrough.size(); ++j)
    pt_vals[j] = spec.values[rec.perm[rec.passthrough[j]]];

  const auto apply_column = [&](int col, double value) {
    st.lambda_curr[col] = value;
    for (std::size_t e = 0; e < st.entries.size(); ++e) {
      S acc{};
      const std::vector<S>& row = st.u_row_prev[e];
      for (int q = 0; q < m; ++q) acc += row[q] * st.v_scratch[q];
      st.u_row_curr[e][col] = acc;
    }
  };

  const int nred = static_cast<int>(rec.reduced_lambda.size());
  std::vector<double> roots(nred);
  const linalg::RankOneUpdate<S> red{rec.rho, rec.reduced_z};
  for (int k = 0; k < nred; ++k) {
    linalg::SecularSolveResult<S> sol;
    try {
      sol = linalg::secular_root(rec.reduced_lambda, red, k, xi);
    } catch (const NonConvergence& e) {
      throw NonConvergence(std::string(e.what()) + " (node " +
                           std::to_string(node) + ", k " + std::to_string(k) +
                           ", t " + std::to_string(t) + ")");
    }
    roots[k] = sol.root;
    st.v_scratch = rec.lift_reduced(sol.eigenvector);
    apply_column(root_column(k, sol.root, pt_vals), sol.root);
  }
  for (std::size_t j = 0; j < rec.passthrough.size(); ++j) {
    st.v_scratch = rec.lift_passthrough(rec.passthrough[j]);
    apply_column(passthrough_column(static_cast<int>(j), pt_vals[j], roots),
                 pt_vals[j]);
  }
}

}  // namespace

template <class S>
void tracker_step(TrackerNetwork<S>& tr, const std::vector<S>& x, double rho,
                  double lambda_scale) {
  const int n = tr.net.topology.node_count();
  const int m = tr.dim;
  if (static_cast<int>(x.size()) != m)
    throw ValidationError("tracker_step: sample length mismatch");
  if (rho == 0.0) throw ValidationError("tracker_step: rho must be nonzero");
  if (lambda_scale < 0.0)
    throw ValidationError("tracker_step: negative lambda_scale");

  if (tr.net.topology.generation() != tr.consensus.graph_generation)
    tr.consensus =
        consensus::prepare_consensus(tr.consensus_cfg, tr.net.topology);

  for (auto& st : tr.net.nodes) {
    st.u_row_prev.swap(st.u_row_curr);
    st.lambda_prev.swap(st.lambda_curr);
  }

  // One scalar agreement per slot; the summand is the locally owned part
  // of U^H x, so a node only ever touches its own sample entries.
  std::vector<S> summands(n);
  for (int k = 0; k < m; ++k) {
    for (int i = 0; i < n; ++i) {
      S acc{};
      const NodeState<S>& st = tr.net.nodes[i];
      for (std::size_t e = 0; e < st.entries.size(); ++e)
        acc += conj_of(st.u_row_prev[e][k]) * x[st.entries[e]];
      summands[i] = acc;
    }
    const std::vector<S> est = consensus::nc_weighted_sum(
        tr.net.topology, tr.consensus, summands, tr.net.metrics);
    for (int i = 0; i < n; ++i) tr.net.nodes[i].z_local[k] = est[i];
  }

  for (int i = 0; i < n; ++i)
    node_update(tr.net.nodes[i], i, tr.t + 1, m, rho, lambda_scale, tr.xi);
  tr.t += 1;
}

template <class S>
void tracker_rank_two_step(TrackerNetwork<S>& tr, const std::vector<S>& x_new,
                           const std::vector<S>& x_old) {
  tracker_step(tr, x_new, 1.0, 1.0);
  tracker_step(tr, x_old, -1.0, 1.0);
}

template <class S>
void tracker_ewma_step(TrackerNetwork<S>& tr, const std::vector<S>& x,
                       double alpha) {
  if (alpha < 0.0 || alpha > 1.0)
    throw ValidationError("tracker_ewma_step: alpha outside [0, 1]");
  std::vector<S> xe(x);
  const double s = std::sqrt(1.0 - alpha);
  for (S& v : xe) v = v * S(s);
  tracker_step(tr, xe, 1.0, alpha);
}

void tracker_apply_edge_event(TrackerNetwork<double>& tr,
                              const graph::EdgeEvent& ev) {
  std::vector<double> x(tr.dim, 0.0);
  const int ea = tr.primary_entry[ev.a];
  const int eb = tr.primary_entry[ev.b];
  if (ea < 0 || eb < 0)
    throw ValidationError("tracker_apply_edge_event: node owns no entry");
  x[ea] = 1.0;
  x[eb] = -1.0;
  if (ev.kind == graph::EdgeEvent::Kind::Add) {
    tr.net.topology = tr.net.topology.with_edge(ev.a, ev.b);
    tracker_step(tr, x, 1.0, 1.0);
  } else {
    tracker_step(tr, x, -1.0, 1.0);
    tr.net.topology = tr.net.topology.without_edge(ev.a, ev.b);
  }
}

template <class S>
int tracker_join_node(TrackerNetwork<S>& tr, int copy_lambda_from) {
  const int n = tr.net.topology.node_count();
  if (copy_lambda_from < 0 || copy_lambda_from >= n)
    throw ValidationError("tracker_join_node: bad source node");
  const int new_node = n;
  const int new_entry = tr.dim;

  tr.net.topology = tr.net.topology.with_node();
  tr.net.nodes.emplace_back();
  tr.dim += 1;
  for (auto& st : tr.net.nodes) {
    st.lambda_prev.push_back(0.0);
    st.lambda_curr.push_back(0.0);
    st.z_local.push_back(S{});
    st.v_scratch.push_back(S{});
    for (auto& row : st.u_row_prev) row.push_back(S{});
    for (auto& row : st.u_row_curr) row.push_back(S{});
  }

  NodeState<S>& nu = tr.net.nodes[new_node];
  nu.lambda_curr = tr.net.nodes[copy_lambda_from].lambda_curr;
  nu.lambda_prev.assign(tr.dim, 0.0);
  nu.z_local.assign(tr.dim, S{});
  nu.v_scratch.assign(tr.dim, S{});
  nu.entries.push_back(new_entry);
  std::vector<S> row(tr.dim, S{});
  row[new_entry] = S{1};
  nu.u_row_curr.push_back(std::move(row));
  nu.u_row_prev.emplace_back(tr.dim, S{});

  tr.owner.push_back(new_node);
  tr.primary_entry.push_back(new_entry);
  return new_node;
}

template <class S>
TrackerNetwork<S> tracker_remove_node(const TrackerNetwork<S>& tr, int node,
                                      int custodian) {
  const int n = tr.net.topology.node_count();
  if (node < 0 || node >= n || custodian < 0 || custodian >= n ||
      node == custodian)
    throw ValidationError("tracker_remove_node: bad node ids");
  if (tr.net.topology.degree(node) != 0)
    throw ValidationError("tracker_remove_node: node still has live links");

  std::vector<int> remap(n);
  int next = 0;
  for (int i = 0; i < n; ++i) remap[i] = i == node ? -1 : next++;
  std::vector<std::pair<int, int>> edges;
  edges.reserve(tr.net.topology.edges().size());
  for (const auto& e : tr.net.topology.edges())
    edges.emplace_back(remap[e.first], remap[e.second]);
  graph::Graph g2(n - 1, std::move(edges), tr.net.topology.generation() + 1);

  TrackerNetwork<S> out(std::move(g2));
  out.consensus_cfg = tr.consensus_cfg;
  out.dim = tr.dim;
  out.xi = tr.xi;
  out.t = tr.t;
  out.net.metrics = tr.net.metrics;
  for (int i = 0; i < n; ++i)
    if (i != node) out.net.nodes[remap[i]] = tr.net.nodes[i];

  NodeState<S>& cust = out.net.nodes[remap[custodian]];
  const NodeState<S>& dead = tr.net.nodes[node];
  for (std::size_t e = 0; e < dead.entries.size(); ++e) {
    cust.entries.push_back(dead.entries[e]);
    cust.u_row_prev.push_back(dead.u_row_prev[e]);
    cust.u_row_curr.push_back(dead.u_row_curr[e]);
  }

  out.owner = tr.owner;
  for (int& o : out.owner) o = o == node ? remap[custodian] : remap[o];
  out.primary_entry.assign(n - 1, -1);
  for (int i = 0; i < n; ++i)
    if (i != node) out.primary_entry[remap[i]] = tr.primary_entry[i];
  out.consensus =
      consensus::prepare_consensus(out.consensus_cfg, out.net.topology);
  return out;
}

template <class S>
GlobalView<S> gather_global(const TrackerNetwork<S>& tr, int report_node) {
  const int n = tr.net.topology.node_count();
  if (report_node < 0 || report_node >= n)
    throw ValidationError("gather_global: bad report node");
  GlobalView<S> g;
  g.eigenvalues = tr.net.nodes[report_node].lambda_curr;
  g.basis = Matrix<S>(tr.dim, tr.dim);
  for (int i = 0; i < n; ++i) {
    const NodeState<S>& st = tr.net.nodes[i];
    for (std::size_t e = 0; e < st.entries.size(); ++e)
      for (int k = 0; k < tr.dim; ++k)
        g.basis(st.entries[e], k) = st.u_row_curr[e][k];
  }
  for (int k = 0; k < tr.dim; ++k) {
    double mx = tr.net.nodes[0].lambda_curr[k];
    double mn = mx;
    for (int i = 1; i < n; ++i) {
      mx = std::max(mx, tr.net.nodes[i].lambda_curr[k]);
      mn = std::min(mn, tr.net.nodes[i].lambda_curr[k]);
    }
    g.disagreement = std::max(g.disagreement, mx - mn);
  }
  return g;
}

template TrackerNetwork<double> make_tracker<double>(
    graph::Graph, const consensus::ConsensusConfig&, std::vector<int>, double);
template TrackerNetwork<cplx> make_tracker<cplx>(
    graph::Graph, const consensus::ConsensusConfig&, std::vector<int>, double);
template void tracker_step<double>(TrackerNetwork<double>&,
                                   const std::vector<double>&, double, double);
template void tracker_step<cplx>(TrackerNetwork<cplx>&,
                                 const std::vector<cplx>&, double, double);
template void tracker_rank_two_step<double>(TrackerNetwork<double>&,
                                            const std::vector<double>&,
                                            const std::vector<double>&);
template void tracker_rank_two_step<cplx>(TrackerNetwork<cplx>&,
                                          const std::vector<cplx>&,
                                          const std::vector<cplx>&);
template void tracker_ewma_step<double>(TrackerNetwork<double>&,
                                        const std::vector<double>&, double);
template void tracker_ewma_step<cplx>(TrackerNetwork<cplx>&,
                                      const std::vector<cplx>&, double);
template int tracker_join_node<double>(TrackerNetwork<double>&, int);
template int tracker_join_node<cplx>(TrackerNetwork<cplx>&, int);
template TrackerNetwork<double> tracker_remove_node<double>(
    const TrackerNetwork<double>&, int, int);
template TrackerNetwork<cplx> tracker_remove_node<cplx>(
    const TrackerNetwork<cplx>&, int, int);
template GlobalView<double> gather_global<double>(const TrackerNetwork<double>&,
                                                  int);
template GlobalView<cplx> gather_global<cplx>(const TrackerNetwork<cplx>&, int);

}  // namespace netspec::tracker
