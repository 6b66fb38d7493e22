#include <cmath>
#include <utility>

#include "netspec/apps.hpp"
#include "netspec/errors.hpp"
#include "netspec/linalg.hpp"

namespace netspec::apps {

namespace {

void add_outer(Matrix<double>& m, const std::vector<double>& x, double w) {
  const int n = static_cast<int>(m.rows());
  for (int i = 0; i < n; ++i) {
    if (x[i] == 0.0) continue;
    for (int j = 0; j < n; ++j) m(i, j) += w * x[i] * x[j];
  }
}

// One trajectory row: tracked spectrum at the report node against the
// oracle of the exactly assembled partial matrix.
void record_step(SpectrumResult& res, const tracker::TrackerNetwork<double>& tr,
                 const Matrix<double>& accum) {
  const tracker::GlobalView<double> view = tracker::gather_global(tr, 0);
  const linalg::EigResult<double> ref = linalg::dense_eig_oracle(accum);
  const double top = std::abs(ref.values.front());
  const double denom = top > 0.0 ? top : 1.0;
  res.lambda1_rel_err.push_back(
      std::abs(view.eigenvalues.front() - ref.values.front()) / denom);
  res.lambda_est.push_back(view.eigenvalues);
  res.lambda_true.push_back(ref.values);
}

}  // namespace

SpectrumResult run_spectrum(const SpectrumScenario& sc, const graph::Graph& g,
                            const consensus::ConsensusConfig& cfg) {
  const int n = g.node_count();
  if (n < 2) throw ValidationError("run_spectrum: need at least two nodes");
  if (sc.start_node < 0 || sc.start_node >= n)
    throw ValidationError("run_spectrum: bad start node");

  tracker::TrackerNetwork<double> tr = tracker::make_tracker<double>(g, cfg);
  Matrix<double> accum(n, n);
  const Matrix<double> lap = graph::laplacian_matrix(g);

  SpectrumResult res;
  if (sc.learning == SpectrumScenario::Learning::IncidenceEdges) {
    const std::vector<graph::EdgeVisit> visits =
        graph::node_sequence_protocol(g, sc.start_node);
    for (const graph::EdgeVisit& v : visits) {
      std::vector<double> x(n, 0.0);
      x[v.head] = 1.0;
      x[v.tail] = -1.0;
      tracker::tracker_step(tr, x, 1.0, 1.0);
      add_outer(accum, x, 1.0);
      record_step(res, tr, accum);
    }
  } else {
    for (int t = 0; t < n; ++t) {
      const graph::RankTwoVectors rt = graph::rank_two_laplacian_vectors(lap, t);
      tracker::tracker_rank_two_step(tr, rt.plus, rt.minus);
      add_outer(accum, rt.plus, 1.0);
      add_outer(accum, rt.minus, -1.0);
      record_step(res, tr, accum);
    }
  }
  res.learning_steps = static_cast<int>(res.lambda_est.size());

  if (sc.events > 0) {
    const std::vector<graph::EdgeEvent> events =
        graph::random_connected_edge_events(tr.net.topology, sc.events,
                                            sc.seed);
    for (const graph::EdgeEvent& ev : events) {
      tracker::tracker_apply_edge_event(tr, ev);
      add_outer(accum, ev.incidence_vector(n), ev.rho());
      record_step(res, tr, accum);
      res.event_step.push_back(static_cast<int>(res.lambda_est.size()) - 1);
      if (!tr.net.topology.is_connected())
        throw Disconnected("run_spectrum: event left the graph disconnected");
    }
  }
  res.metrics = tr.net.metrics;
  return res;
}

}  // namespace netspec::apps
