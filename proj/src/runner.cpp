#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "netspec/apps.hpp"
#include "netspec/config.hpp"
#include "netspec/errors.hpp"
#include "netspec/linalg.hpp"

namespace netspec::cli {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt(long long v) { return std::to_string(v); }

class CsvFile {
 public:
  CsvFile(const std::string& out_dir, const std::string& name,
          const std::string& header) {
    if (out_dir.empty()) return;
    std::filesystem::create_directories(out_dir);
    path_ = out_dir + "/" + name;
    file_.open(path_, std::ios::binary | std::ios::trunc);
    if (!file_) throw ValidationError("cannot open output file " + path_);
    file_ << header << "\n";
  }
  void row(const std::vector<std::string>& cells) {
    if (!file_.is_open()) return;
    for (std::size_t i = 0; i < cells.size(); ++i)
      file_ << (i ? "," : "") << cells[i];
    file_ << "\n";
  }

 private:
  std::string path_;
  std::ofstream file_;
};

graph::Graph build_topology(const ScenarioConfig& c) {
  std::string topo = c.topology;
  int nodes = c.nodes;
  if (topo.empty()) {
    if (c.suite == "covariance") {
      topo = "pendant-cycle";
      if (nodes == 0) nodes = 10;
    } else if (c.suite == "doa" || c.suite == "doa-track") {
      topo = "triangle-bridge";
    } else if (c.suite == "spectrum" || c.suite == "spectrum-track") {
      topo = "d-regular";
      if (nodes == 0) nodes = 50;
    } else if (c.suite == "filter-design") {
      topo = "small-world";
      if (nodes == 0) nodes = 80;
    }
  }
  if (topo == "triangle-bridge") {
    if (nodes != 0 && nodes != 6)
      throw ValidationError("nodes: triangle-bridge is a 6-node graph");
    return graph::gen_triangle_bridge();
  }
  if (nodes == 0) throw ValidationError("nodes: required for " + topo);
  if (topo == "path") return graph::gen_path(nodes);
  if (topo == "cycle") return graph::gen_cycle(nodes);
  if (topo == "complete") return graph::gen_complete(nodes);
  if (topo == "pendant-cycle") {
    if (nodes % 2 != 0 || nodes < 6)
      throw ValidationError("nodes: pendant-cycle needs an even count >= 6");
    return graph::gen_pendant_cycle(nodes / 2);
  }
  if (topo == "d-regular")
    return graph::gen_d_regular(nodes, c.degree, c.graph_seed);
  if (topo == "small-world")
    return graph::gen_small_world(nodes, c.neighbors, c.rewire_p,
                                  c.graph_seed);
  throw ValidationError("topology: unknown value `" + topo + "`");
}

consensus::ConsensusConfig consensus_of(const ScenarioConfig& c) {
  consensus::ConsensusConfig k;
  if (c.protocol == "ps") k.protocol = consensus::Protocol::PushSum;
  else if (c.protocol == "ac") k.protocol = consensus::Protocol::Average;
  else if (c.protocol == "ftac") k.protocol = consensus::Protocol::FiniteTime;
  else if (c.protocol == "filter") k.protocol = consensus::Protocol::Filter;
  else if (c.protocol == "exact") k.protocol = consensus::Protocol::Exact;
  else throw ValidationError("protocol: unknown value `" + c.protocol + "`");
  k.gamma = c.gamma;
  k.epsilon = c.epsilon;
  return k;
}

void push_cost(SuiteResult& res, const sim::RoundMetrics& m) {
  res.summary.emplace_back("consensus_rounds", fmt(m.consensus_rounds));
  res.summary.emplace_back("scalar_consensus_runs",
                           fmt(m.scalar_consensus_runs));
  res.summary.emplace_back("scalar_messages", fmt(m.scalar_messages));
  res.summary.emplace_back("wall_rounds", fmt(m.wall_rounds));
}

SuiteResult run_covariance_suite(const ScenarioConfig& c,
                                 const std::string& out_dir) {
  apps::CovarianceScenario sc;
  if (c.mode == "ewma") sc.mode = apps::CovarianceScenario::Mode::Ewma;
  else if (c.mode == "sliding")
    sc.mode = apps::CovarianceScenario::Mode::SlidingWindow;
  else sc.mode = apps::CovarianceScenario::Mode::FiniteSample;
  sc.alpha = c.alpha > 0.0 ? c.alpha : 0.9;
  sc.window = c.window;
  sc.T = c.T > 0 ? c.T : 100;
  sc.true_spectrum = c.true_spectrum;
  sc.complex_samples = c.complex_samples;
  sc.seed = c.seed;

  const graph::Graph g = build_topology(c);
  const apps::RelativeErrorReport rep =
      apps::run_covariance(sc, g, consensus_of(c));

  CsvFile traj(out_dir, "covariance.csv",
               "t,k,lambda_k,node_disagreement,consensus_rounds");
  CsvFile met(out_dir, "metrics.csv",
              "t,consensus_rounds,scalar_messages,wall_rounds");
  const int m = static_cast<int>(rep.lambda_hat.empty()
                                     ? 0
                                     : rep.lambda_hat.front().size());
  for (std::size_t t = 0; t < rep.lambda_hat.size(); ++t) {
    for (int k = 0; k < m; ++k)
      traj.row({fmt(static_cast<long long>(t + 1)), fmt(static_cast<long long>(k)),
                fmt(rep.lambda_hat[t][k]), fmt(rep.disagreement[t]),
                fmt(rep.step_metrics[t].consensus_rounds)});
    met.row({fmt(static_cast<long long>(t + 1)),
             fmt(rep.step_metrics[t].consensus_rounds),
             fmt(rep.step_metrics[t].scalar_messages),
             fmt(rep.step_metrics[t].wall_rounds)});
  }

  SuiteResult res;
  const std::size_t last = rep.eta.size() - 1;
  res.summary.emplace_back("final_eta_1", fmt(rep.eta[last][0]));
  res.summary.emplace_back("final_eta_tilde_1", fmt(rep.eta_tilde[last][0]));
  res.summary.emplace_back("final_disagreement", fmt(rep.disagreement[last]));
  push_cost(res, rep.metrics);
  return res;
}

SuiteResult run_doa_suite(const ScenarioConfig& c, const std::string& out_dir,
                          int threads) {
  apps::DoaScenario sc;
  sc.sources_deg = c.sources_deg.empty()
                       ? std::vector<double>{-7.0, 19.0, 23.0}
                       : c.sources_deg;
  sc.snr_db = c.snr_db;
  sc.T = c.T > 0 ? c.T : 200;
  sc.trials = c.trials;
  sc.seed = c.seed;

  apps::SubarrayGeometry geom;
  geom.delta = c.delta;
  geom.disc_radius = c.disc_radius;
  geom.placement_seed = c.placement_seed;

  const graph::Graph g = build_topology(c);
  geom.n_subarrays = g.node_count();
  const apps::DoaEstimateResult r =
      apps::run_doa_estimate(sc, geom, g, consensus_of(c), threads);

  std::vector<double> truth = sc.sources_deg;
  std::sort(truth.begin(), truth.end());
  CsvFile csv(out_dir, "doa.csv",
              "trial,t,source,theta_true,theta_est,node_id");
  for (int i = 0; i < sc.trials; ++i) {
    if (r.flagged[i]) continue;
    for (int node = 0; node < g.node_count(); ++node)
      for (std::size_t s = 0; s < truth.size(); ++s)
        csv.row({fmt(static_cast<long long>(i)),
                 fmt(static_cast<long long>(sc.T)),
                 fmt(static_cast<long long>(s)), fmt(truth[s]),
                 fmt(r.node_estimates[i][node][s]),
                 fmt(static_cast<long long>(node))});
  }

  SuiteResult res;
  res.summary.emplace_back("rmse_deg", fmt(r.rmse));
  res.summary.emplace_back("centralized_rmse_deg", fmt(r.centralized_rmse));
  long long flagged = 0;
  for (char f : r.flagged) flagged += f;
  res.summary.emplace_back("flagged_trials", fmt(flagged));
  push_cost(res, r.metrics);
  return res;
}

SuiteResult run_doa_track_suite(const ScenarioConfig& c,
                                const std::string& out_dir) {
  apps::DoaScenario sc;
  sc.tracks_deg = c.tracks_deg.empty()
                      ? std::vector<std::pair<double, double>>{{20.0, -20.0},
                                                               {-20.0, 20.0}}
                      : c.tracks_deg;
  sc.snr_db = c.snr_db;
  sc.T = c.T > 0 ? c.T : 200;
  sc.alpha = c.alpha > 0.0 ? c.alpha : 0.88;
  sc.seed = c.seed;

  apps::SubarrayGeometry geom;
  geom.delta = c.delta;
  geom.disc_radius = c.disc_radius;
  geom.placement_seed = c.placement_seed;

  const graph::Graph g = build_topology(c);
  geom.n_subarrays = g.node_count();
  const apps::DoaTrackResult r =
      apps::run_doa_track(sc, geom, g, consensus_of(c));

  CsvFile csv(out_dir, "doa_track.csv",
              "trial,t,source,theta_true,theta_est,node_id");
  for (std::size_t t = 0; t < r.truth.size(); ++t)
    for (std::size_t s = 0; s < r.truth[t].size(); ++s)
      csv.row({"0", fmt(static_cast<long long>(t + 1)),
               fmt(static_cast<long long>(s)), fmt(r.truth[t][s]),
               fmt(r.estimates[t][s]), "0"});

  SuiteResult res;
  res.summary.emplace_back("rmse_deg", fmt(r.rmse));
  long long flagged = 0;
  for (char f : r.flagged) flagged += f;
  res.summary.emplace_back("flagged_steps", fmt(flagged));
  push_cost(res, r.metrics);
  return res;
}

SuiteResult run_spectrum_suite(const ScenarioConfig& c,
                               const std::string& out_dir) {
  apps::SpectrumScenario sc;
  sc.learning = c.mode == "rank-two"
                    ? apps::SpectrumScenario::Learning::RankTwoColumns
                    : apps::SpectrumScenario::Learning::IncidenceEdges;
  sc.events = c.suite == "spectrum-track" ? c.events : 0;
  sc.start_node = c.start_node;
  sc.seed = c.seed;

  const graph::Graph g = build_topology(c);
  const apps::SpectrumResult r = apps::run_spectrum(sc, g, consensus_of(c));

  CsvFile csv(out_dir, "spectrum.csv", "t,k,lambda_est,lambda_true,eta");
  for (std::size_t t = 0; t < r.lambda_est.size(); ++t)
    for (std::size_t k = 0; k < r.lambda_est[t].size(); ++k) {
      const double truev = r.lambda_true[t][k];
      const double denom = std::abs(truev) > 0.0 ? std::abs(truev) : 1.0;
      csv.row({fmt(static_cast<long long>(t + 1)),
               fmt(static_cast<long long>(k)), fmt(r.lambda_est[t][k]),
               fmt(truev), fmt(std::abs(r.lambda_est[t][k] - truev) / denom)});
    }

  SuiteResult res;
  res.summary.emplace_back("lambda1_learned",
                           fmt(r.lambda_est.back().front()));
  res.summary.emplace_back("lambda1_true", fmt(r.lambda_true.back().front()));
  res.summary.emplace_back("final_lambda1_rel_err",
                           fmt(r.lambda1_rel_err.back()));
  res.summary.emplace_back("learning_steps",
                           fmt(static_cast<long long>(r.learning_steps)));
  res.summary.emplace_back("events",
                           fmt(static_cast<long long>(r.event_step.size())));
  push_cost(res, r.metrics);
  return res;
}

SuiteResult run_filter_suite(const ScenarioConfig& c,
                             const std::string& out_dir) {
  const graph::Graph g = build_topology(c);
  const apps::FilterRunResult r =
      apps::run_filter_design(g, {}, {}, c.K, c.seed);

  CsvFile csv(out_dir, "filter.csv", "design,m,eta,peak");
  SuiteResult res;
  for (const apps::FilterTrace& tr : r.traces) {
    for (std::size_t m = 0; m < tr.eta.size(); ++m)
      csv.row({tr.name, fmt(static_cast<long long>(m)), fmt(tr.eta[m]),
               fmt(tr.peak[m])});
    res.summary.emplace_back("final_eta_" + tr.name, fmt(tr.eta.back()));
    double peak = 0.0;
    for (double p : tr.peak) peak = std::max(peak, p);
    res.summary.emplace_back("peak_" + tr.name, fmt(peak));
  }
  push_cost(res, r.metrics);
  return res;
}

SuiteResult run_eig_bench(const ScenarioConfig& c) {
  const int n = 16;
  const int steps = c.T > 0 ? c.T : 32;
  std::vector<double> lambda(n, 0.0);
  Matrix<cplx> u = Matrix<cplx>::identity(n);
  Matrix<cplx> r_exact(n, n);
  double max_err = 0.0;
  for (int t = 1; t <= steps; ++t) {
    sim::RngStream rng(c.seed, "eig-bench", -1, t);
    std::vector<cplx> x(n);
    for (int i = 0; i < n; ++i) x[i] = rng.gaussian_complex();
    const double rho = rng.uniform() < 0.25 ? -1.0 : 1.0;

    std::vector<cplx> z(n, cplx{});
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i) z[k] += conj_of(u(i, k)) * x[i];
    const linalg::EigenUpdateResult<cplx> upd = linalg::rank_one_eigenupdate(
        linalg::DiagonalSpectrum(lambda), linalg::RankOneUpdate<cplx>{rho, z},
        c.xi);
    u = u * upd.basis;
    lambda = upd.spectrum.values;

    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) r_exact(i, j) += rho * x[i] * conj_of(x[j]);
    const linalg::EigResult<cplx> oracle = linalg::dense_eig_oracle(r_exact);
    for (int k = 0; k < n; ++k)
      max_err = std::max(max_err, std::abs(lambda[k] - oracle.values[k]));
  }
  SuiteResult res;
  res.summary.emplace_back("max_eig_error", fmt(max_err));
  res.summary.emplace_back("steps", fmt(static_cast<long long>(steps)));
  return res;
}

}  // namespace

SuiteResult run_suite(const ScenarioConfig& cfg, const std::string& out_dir,
                      int threads) {
  if (cfg.suite == "covariance") return run_covariance_suite(cfg, out_dir);
  if (cfg.suite == "doa") return run_doa_suite(cfg, out_dir, threads);
  if (cfg.suite == "doa-track") return run_doa_track_suite(cfg, out_dir);
  if (cfg.suite == "spectrum" || cfg.suite == "spectrum-track")
    return run_spectrum_suite(cfg, out_dir);
  if (cfg.suite == "filter-design") return run_filter_suite(cfg, out_dir);
  if (cfg.suite == "eig-bench") return run_eig_bench(cfg);
  throw ValidationError("suite: unknown value `" + cfg.suite + "`");
}

}  // namespace netspec::cli
