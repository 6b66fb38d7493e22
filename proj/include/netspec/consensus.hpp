#ifndef NETSPEC_CONSENSUS_HPP
#define NETSPEC_CONSENSUS_HPP

#include <vector>

#include "netspec/graph.hpp"
#include "netspec/matrix.hpp"
#include "netspec/netsim.hpp"

namespace netspec::consensus {

enum class Protocol { PushSum, Average, FiniteTime, Filter, Exact };

/// FIR graph filter y = sum_m h_m S^m x. With the normalized-adjacency
/// shift the signal is pre-scaled by the degree transform and the output
/// unscaled again, which turns the unit-eigenvalue component into the exact
/// arithmetic mean.
///
/// A design is stored either as monomial coefficients h_0..h_K or in
/// factored form prod_r (S - r I) / (target - r). The factored form is the
/// same polynomial an interpolating design would fit, but each factor is
/// applied as its own exchange, so it stays numerically meaningful at
/// orders where monomial coefficients overflow all precision.
struct FilterDesign {
  enum class Shift { Laplacian, NormalizedAdjacency };
  Shift shift = Shift::Laplacian;
  std::vector<double> coeffs;        // h_0 .. h_K (monomial form)
  std::vector<double> factor_roots;  // factored form, applied in order
  double factor_target = 0.0;

  bool factored() const { return !factor_roots.empty(); }
  int exchanges() const {
    return factored() ? static_cast<int>(factor_roots.size())
                      : static_cast<int>(coeffs.size()) - 1;
  }
};

enum class FilterKind { GDnA, GDL, GIDN, GIDM };

struct ConsensusConfig {
  Protocol protocol = Protocol::PushSum;
  int gamma = 100;     // iterations for PushSum / Average
  double epsilon = 0;  // Average step size; 0 resolves to 1 / max degree
  /// Distinct nonzero Laplacian eigenvalues for FiniteTime; empty resolves
  /// to the exact spectrum of the current topology.
  std::vector<double> finite_time_eigenvalues;
  /// Design for Protocol::Filter; empty coeffs resolve to an interpolating
  /// normalized-adjacency design on the current topology.
  FilterDesign filter;
};

/// Config resolved against one topology generation: validated step size,
/// eigenvalue list, and filter design are fixed here so the per-step hot
/// path never recomputes them.
struct ConsensusRuntime {
  ConsensusConfig cfg;
  int graph_generation = -1;
  double epsilon = 0.0;
  std::vector<double> finite_time_eigenvalues;
  FilterDesign filter;
};

/// Validates the config against the graph (connectivity, step-size bound,
/// eigenvalue list) and freezes derived quantities.
ConsensusRuntime prepare_consensus(const ConsensusConfig& cfg,
                                   const graph::Graph& g);

/// The backends run ncomp independent scalar protocols in one payload so a
/// complex value travels as its two real components in a single execution.
/// values are node-major: values[i * ncomp + c]. The gossip backends return
/// weighted-sum estimates (the average rescaled by the node count); the
/// filter backend returns the plain filter output, whose interpolating
/// designs reproduce the average.

/// Ratio gossip: per slot every node pushes value and weight shares of
/// 1/degree to each neighbor; the estimate is N * s / w.
std::vector<double> push_sum(const graph::Graph& g,
                             const std::vector<double>& values, int ncomp,
                             int gamma, sim::RoundMetrics& m);

/// Diffusion with W = I - epsilon L, estimate N * s. Throws
/// StepSizeTooLarge outside (0, 2 / lambda_max(L)).
std::vector<double> average_consensus(const graph::Graph& g,
                                      const std::vector<double>& values,
                                      int ncomp, int gamma, double epsilon,
                                      sim::RoundMetrics& m);

/// Finite-time variant: applies W_r = I - L / lambda_r once per distinct
/// nonzero eigenvalue (descending), exact on the last round.
std::vector<double> ft_average_consensus(
    const graph::Graph& g, const std::vector<double>& values, int ncomp,
    const std::vector<double>& distinct_nonzero_eigs, sim::RoundMetrics& m);

/// Per-iteration diagnostics of a filter run: one entry per exchange count
/// m = 0..K, where the m-th entry is the partial sum (monomial form) or
/// partial product (factored form) the nodes would output after m
/// exchanges, post-transformed.
struct FilterDiagnostics {
  std::vector<double> peak_magnitude;            // max_i |y_i^(m)|
  std::vector<std::vector<double>> partial_out;  // y^(m)
};

/// Graph filter applied through one neighbor exchange per shift
/// application. Returns the raw filter output y = sum_m h_m S^m x (or the
/// factored product); an interpolating averaging design makes y the exact
/// average of the input.
std::vector<double> filter_consensus(const graph::Graph& g,
                                     const std::vector<double>& values,
                                     int ncomp, const FilterDesign& design,
                                     sim::RoundMetrics& m,
                                     FilterDiagnostics* diag = nullptr);

/// Weighted-sum primitive used by the tracker: every node holds one local
/// summand, every node ends with an estimate of the total. Books one
/// completed agreement (two for push-sum, which carries value and weight).
std::vector<double> nc_weighted_sum(const graph::Graph& g,
                                    const ConsensusRuntime& rt,
                                    const std::vector<double>& summands,
                                    sim::RoundMetrics& m);

/// Complex twin of nc_weighted_sum: the two real components share one
/// protocol execution and are booked as a single agreement.
std::vector<cplx> nc_weighted_sum(const graph::Graph& g,
                                  const ConsensusRuntime& rt,
                                  const std::vector<cplx>& summands,
                                  sim::RoundMetrics& m);

/// Cluster a value list by relative gap and return one representative per
/// cluster (descending). Used to build finite-time eigenvalue lists from
/// tracked spectra.
std::vector<double> distinct_values(const std::vector<double>& values,
                                    double rel_gap = 1e-6);

/// Fit h_0..h_K so the filter response matches `desired` at `frequencies`.
/// Interpolates when K + 1 >= |frequencies| (minimum-norm if strictly
/// underdetermined); otherwise solves the least-squares fit with every
/// nonzero-desired equation enforced exactly, so a passband pin survives an
/// overdetermined fit. Throws IllConditionedFit when the equilibrated
/// Vandermonde is numerically singular.
std::vector<double> fit_filter_coefficients(
    const std::vector<double>& frequencies, const std::vector<double>& desired,
    int K);

/// Standard averaging designs. `frequencies` carries the (tracked or exact)
/// graph frequencies of the matching shift operator for the two
/// graph-dependent kinds, and is ignored by GIDN; GIDM reads only the
/// largest value. Empty frequencies resolve to the exact spectrum.
FilterDesign design_averaging_filter(FilterKind kind, const graph::Graph& g,
                                     std::vector<double> frequencies, int K);

/// Exact averaging design in factored form: one factor (S - r I)/(t - r)
/// per distinct non-target frequency, applied as its own exchange. Same
/// polynomial as the square interpolating fit, but stable at any graph
/// size. Only the graph-dependent kinds (GDnA, GDL) interpolate; the
/// others throw ValidationError.
FilterDesign design_interpolating_filter(FilterKind kind,
                                         const graph::Graph& g,
                                         std::vector<double> frequencies);

}  // namespace netspec::consensus

#endif
