#include <cmath>
#include <utility>

#include "netspec/apps.hpp"
#include "netspec/errors.hpp"
#include "netspec/linalg.hpp"

namespace netspec::apps {

namespace {

// Relative averaging error per exchange count from the recorded partial
// outputs against the exact mean of the input.
FilterTrace trace_design(const graph::Graph& g, std::string name,
                         consensus::FilterDesign design,
                         const std::vector<double>& signal, double mean,
                         sim::RoundMetrics& metrics) {
  consensus::FilterDiagnostics diag;
  consensus::filter_consensus(g, signal, 1, design, metrics, &diag);
  FilterTrace tr;
  tr.name = std::move(name);
  tr.design = std::move(design);
  tr.peak = diag.peak_magnitude;
  const int n = g.node_count();
  double ref = std::abs(mean) * std::sqrt(static_cast<double>(n));
  if (ref == 0.0) ref = 1.0;
  for (const std::vector<double>& y : diag.partial_out) {
    double sq = 0.0;
    for (int i = 0; i < n; ++i) {
      const double d = y[i] - mean;
      sq += d * d;
    }
    tr.eta.push_back(std::sqrt(sq) / ref);
  }
  return tr;
}

}  // namespace

FilterRunResult run_filter_design(const graph::Graph& g,
                                  std::vector<double> laplacian_freqs,
                                  std::vector<double> norm_adj_freqs, int K,
                                  std::uint64_t seed) {
  if (g.node_count() < 2)
    throw ValidationError("run_filter_design: need at least two nodes");
  if (K < 1) throw ValidationError("run_filter_design: K must be >= 1");

  const int n = g.node_count();
  sim::RngStream rng(seed, "filter-signal");
  std::vector<double> signal(n);
  double mean = 0.0;
  for (int i = 0; i < n; ++i) {
    signal[i] = 2.0 * rng.uniform();
    mean += signal[i];
  }
  mean /= n;

  using consensus::FilterKind;
  FilterRunResult res;
  res.traces.push_back(trace_design(
      g, "gdna",
      consensus::design_averaging_filter(FilterKind::GDnA, g, norm_adj_freqs,
                                         K),
      signal, mean, res.metrics));
  res.traces.push_back(trace_design(
      g, "gdl",
      consensus::design_averaging_filter(FilterKind::GDL, g, laplacian_freqs,
                                         K),
      signal, mean, res.metrics));
  res.traces.push_back(trace_design(
      g, "gidn",
      consensus::design_averaging_filter(FilterKind::GIDN, g, {}, K), signal,
      mean, res.metrics));
  res.traces.push_back(trace_design(
      g, "gidm",
      consensus::design_averaging_filter(FilterKind::GIDM, g, laplacian_freqs,
                                         K),
      signal, mean, res.metrics));
  res.traces.push_back(trace_design(
      g, "gdna-interp",
      consensus::design_interpolating_filter(FilterKind::GDnA, g,
                                             norm_adj_freqs),
      signal, mean, res.metrics));
  res.traces.push_back(trace_design(
      g, "gdl-interp",
      consensus::design_interpolating_filter(FilterKind::GDL, g,
                                             laplacian_freqs),
      signal, mean, res.metrics));
  return res;
}

}  // namespace netspec::apps
