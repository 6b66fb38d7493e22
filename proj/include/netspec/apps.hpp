#ifndef NETSPEC_APPS_HPP
#define NETSPEC_APPS_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "netspec/consensus.hpp"
#include "netspec/graph.hpp"
#include "netspec/matrix.hpp"
#include "netspec/netsim.hpp"
#include "netspec/tracker.hpp"

namespace netspec::apps {

// ---------------------------------------------------------------------------
// Covariance spectrum estimation.

struct CovarianceScenario {
  enum class Mode { FiniteSample, Ewma, SlidingWindow };
  Mode mode = Mode::FiniteSample;
  double alpha = 0.9;  // Ewma forgetting factor
  int window = 8;      // SlidingWindow length
  int T = 100;
  /// Eigenvalues of the true covariance, descending. Empty resolves to the
  /// harmonic profile 1, 1/2, ..., 1/M on the graph dimension.
  std::vector<double> true_spectrum;
  bool complex_samples = true;
  std::uint64_t seed = 1;
};

/// Trajectory of the tracked spectrum with both error conventions: eta
/// compares against the true-distribution eigenvalues, eta_tilde against a
/// centralized replay of the exact same sample stream.
struct RelativeErrorReport {
  std::vector<std::vector<double>> lambda_hat;  // [t][k], report node 0
  std::vector<std::vector<double>> lambda_ref;  // [t][k], centralized replay
  std::vector<std::vector<double>> eta;         // [t][k]
  std::vector<std::vector<double>> eta_tilde;   // [t][k]
  std::vector<double> disagreement;             // [t], max cross-node spread
  std::vector<sim::RoundMetrics> step_metrics;  // [t], cumulative snapshots
  sim::RoundMetrics metrics;
};

RelativeErrorReport run_covariance(const CovarianceScenario& sc,
                                   const graph::Graph& g,
                                   const consensus::ConsensusConfig& cfg);

// ---------------------------------------------------------------------------
// Distributed ESPRIT direction finding.

/// Shift-invariant array: subarray k contributes sample entries 2k (upper
/// antenna) and 2k+1 (lower antenna, displaced by delta along x). Reference
/// positions are drawn uniformly from a disc; the estimator never sees
/// them.
struct SubarrayGeometry {
  int n_subarrays = 6;
  double delta = 0.5;        // upper/lower displacement in wavelengths
  double disc_radius = 2.0;  // placement disc radius in wavelengths
  std::uint64_t placement_seed = 7;
};

struct DoaScenario {
  std::vector<double> sources_deg;  // static source angles (estimation)
  /// Linear angle tracks start -> end over T steps (tracking mode).
  std::vector<std::pair<double, double>> tracks_deg;
  double snr_db = 10.0;
  int T = 200;
  int trials = 100;
  double alpha = 0.88;  // tracking forgetting factor
  std::uint64_t seed = 1;
};

struct DoaEstimateResult {
  /// Final angle estimates per trial and node, sorted ascending; empty for
  /// flagged trials.
  std::vector<std::vector<std::vector<double>>> node_estimates;
  std::vector<std::vector<double>> centralized_estimates;  // [trial][source]
  std::vector<char> flagged;              // [trial], singular C at any node
  std::vector<char> centralized_flagged;  // [trial]
  double rmse = 0.0;              // pooled over unflagged trials, node 0
  double centralized_rmse = 0.0;  // same pooling on the replay
  sim::RoundMetrics metrics;
};

DoaEstimateResult run_doa_estimate(const DoaScenario& sc,
                                   const SubarrayGeometry& geom,
                                   const graph::Graph& g,
                                   const consensus::ConsensusConfig& cfg,
                                   int threads = 1);

struct DoaTrackResult {
  std::vector<std::vector<double>> truth;      // [t][source] degrees
  std::vector<std::vector<double>> estimates;  // [t][source]; NaN if flagged
  std::vector<char> flagged;                   // [t]
  double rmse = 0.0;  // pooled over unflagged steps and sources
  sim::RoundMetrics metrics;
};

DoaTrackResult run_doa_track(const DoaScenario& sc,
                             const SubarrayGeometry& geom,
                             const graph::Graph& g,
                             const consensus::ConsensusConfig& cfg);

// ---------------------------------------------------------------------------
// Graph spectrum learning and tracking.

struct SpectrumScenario {
  enum class Learning { IncidenceEdges, RankTwoColumns };
  Learning learning = Learning::IncidenceEdges;
  int events = 0;  // random connected edge events after the learning phase
  int start_node = 0;
  std::uint64_t seed = 1;
};

struct SpectrumResult {
  /// One row per learning step (edge visit or rank-two column) and one per
  /// event, in order.
  std::vector<std::vector<double>> lambda_est;   // [step][k], report node 0
  std::vector<std::vector<double>> lambda_true;  // [step][k], partial oracle
  std::vector<double> lambda1_rel_err;           // [step]
  int learning_steps = 0;
  std::vector<int> event_step;  // trajectory index of each applied event
  sim::RoundMetrics metrics;
};

SpectrumResult run_spectrum(const SpectrumScenario& sc, const graph::Graph& g,
                            const consensus::ConsensusConfig& cfg);

// ---------------------------------------------------------------------------
// Averaging filter design comparison.

struct FilterTrace {
  std::string name;
  consensus::FilterDesign design;
  std::vector<double> eta;   // relative averaging error per exchange count
  std::vector<double> peak;  // max intermediate |y| per exchange count
};

struct FilterRunResult {
  std::vector<FilterTrace> traces;
  sim::RoundMetrics metrics;
};

/// Runs the four fixed-order designs at order K plus the two factored
/// interpolating designs on a shared random input signal. Frequency lists
/// may come from a spectrum-learning run; empty lists resolve to the exact
/// spectrum of the matching shift operator.
FilterRunResult run_filter_design(const graph::Graph& g,
                                  std::vector<double> laplacian_freqs,
                                  std::vector<double> norm_adj_freqs, int K,
                                  std::uint64_t seed);

}  // namespace netspec::apps

#endif
