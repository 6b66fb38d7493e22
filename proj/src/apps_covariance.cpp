#include <cmath>
#include <cstdint>
#include <type_traits>
#include <utility>

#include "netspec/apps.hpp"
#include "netspec/errors.hpp"
#include "netspec/linalg.hpp"

namespace netspec::apps {

namespace {

// Two passes of modified Gram-Schmidt on a seeded Gaussian matrix; the
// true covariance is Q diag(spectrum) Q^H.
template <class S>
Matrix<S> mixing_basis(int m, std::uint64_t seed) {
  sim::RngStream rng(seed, "cov-mixing");
  Matrix<S> q(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      if constexpr (std::is_same_v<S, cplx>)
        q(i, j) = rng.gaussian_complex();
      else
        q(i, j) = rng.gaussian();
    }
  for (int pass = 0; pass < 2; ++pass)
    for (int j = 0; j < m; ++j) {
      for (int k = 0; k < j; ++k) {
        S dot{};
        for (int i = 0; i < m; ++i) dot += conj_of(q(i, k)) * q(i, j);
        for (int i = 0; i < m; ++i) q(i, j) -= dot * q(i, k);
      }
      double nrm = 0.0;
      for (int i = 0; i < m; ++i) nrm += abs_sq(q(i, j));
      nrm = std::sqrt(nrm);
      if (nrm == 0.0) throw ValidationError("run_covariance: degenerate mixing");
      for (int i = 0; i < m; ++i) q(i, j) /= nrm;
    }
  return q;
}

template <class S>
std::vector<S> draw_sample(const Matrix<S>& q, const std::vector<double>& spec,
                           std::uint64_t seed, int t) {
  const int m = static_cast<int>(q.rows());
  sim::RngStream rng(seed, "cov-sample", -1, t);
  std::vector<S> w(m);
  for (int i = 0; i < m; ++i) {
    if constexpr (std::is_same_v<S, cplx>)
      w[i] = rng.gaussian_complex();
    else
      w[i] = rng.gaussian();
    w[i] *= std::sqrt(spec[i]);
  }
  std::vector<S> x(m, S{});
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) x[i] += q(i, j) * w[j];
  return x;
}

template <class S>
void accumulate_outer(Matrix<S>& r, const std::vector<S>& x, double weight) {
  const int m = static_cast<int>(r.rows());
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) r(i, j) += weight * x[i] * conj_of(x[j]);
}

template <class S>
void scale_matrix(Matrix<S>& r, double s) {
  const int m = static_cast<int>(r.rows());
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) r(i, j) *= s;
}

template <class S>
RelativeErrorReport run_covariance_impl(const CovarianceScenario& sc,
                                        const graph::Graph& g,
                                        const consensus::ConsensusConfig& cfg) {
  const int m = g.node_count();
  if (sc.T < 1) throw ValidationError("run_covariance: T must be >= 1");
  std::vector<double> spec = sc.true_spectrum;
  if (spec.empty()) {
    spec.resize(m);
    for (int k = 0; k < m; ++k) spec[k] = 1.0 / (k + 1);
  }
  if (static_cast<int>(spec.size()) != m)
    throw ValidationError("run_covariance: spectrum length != node count");
  for (std::size_t k = 1; k < spec.size(); ++k)
    if (spec[k] > spec[k - 1])
      throw ValidationError("run_covariance: spectrum must be descending");
  if (sc.mode == CovarianceScenario::Mode::Ewma &&
      !(sc.alpha > 0.0 && sc.alpha < 1.0))
    throw ValidationError("run_covariance: alpha must be in (0, 1)");
  if (sc.mode == CovarianceScenario::Mode::SlidingWindow && sc.window < 1)
    throw ValidationError("run_covariance: window must be >= 1");

  const Matrix<S> q = mixing_basis<S>(m, sc.seed);

  tracker::TrackerNetwork<S> tr = tracker::make_tracker<S>(g, cfg);
  Matrix<S> r_ref(m, m);
  std::vector<std::vector<S>> window_buf;

  RelativeErrorReport rep;
  rep.lambda_hat.reserve(sc.T);
  rep.lambda_ref.reserve(sc.T);
  rep.eta.reserve(sc.T);
  rep.eta_tilde.reserve(sc.T);
  rep.disagreement.reserve(sc.T);

  for (int t = 1; t <= sc.T; ++t) {
    const std::vector<S> x = draw_sample(q, spec, sc.seed, t);
    switch (sc.mode) {
      case CovarianceScenario::Mode::FiniteSample: {
        const double alpha_t = (t - 1.0) / t;
        tracker::tracker_ewma_step(tr, x, alpha_t);
        scale_matrix(r_ref, alpha_t);
        accumulate_outer(r_ref, x, 1.0 - alpha_t);
        break;
      }
      case CovarianceScenario::Mode::Ewma: {
        tracker::tracker_ewma_step(tr, x, sc.alpha);
        scale_matrix(r_ref, sc.alpha);
        accumulate_outer(r_ref, x, 1.0 - sc.alpha);
        break;
      }
      case CovarianceScenario::Mode::SlidingWindow: {
        const double w = 1.0 / sc.window;
        const double sw = std::sqrt(w);
        std::vector<S> x_in = x;
        for (S& v : x_in) v *= sw;
        if (static_cast<int>(window_buf.size()) == sc.window) {
          std::vector<S> x_out = window_buf.front();
          window_buf.erase(window_buf.begin());
          accumulate_outer(r_ref, x_out, -w);
          for (S& v : x_out) v *= sw;
          tracker::tracker_rank_two_step(tr, x_in, x_out);
        } else {
          tracker::tracker_step(tr, x_in, 1.0, 1.0);
        }
        window_buf.push_back(x);
        accumulate_outer(r_ref, x, w);
        break;
      }
    }

    const tracker::GlobalView<S> view = tracker::gather_global(tr, 0);
    const linalg::EigResult<S> ref = linalg::dense_eig_oracle(r_ref);

    // Reference eigenvalues at numerical zero (rank-deficient warm-up
    // steps) would turn roundoff into a relative error of order one, so
    // anything below the oracle's resolution falls back to absolute error.
    const double ref_floor =
        1e-12 * std::max(1.0, std::abs(ref.values.empty() ? 0.0 : ref.values[0]));
    std::vector<double> eta(m), eta_tilde(m);
    for (int k = 0; k < m; ++k) {
      const double denom_true = spec[k] > 0.0 ? spec[k] : 1.0;
      eta[k] = std::abs(view.eigenvalues[k] - spec[k]) / denom_true;
      const double denom_ref =
          std::abs(ref.values[k]) > ref_floor ? std::abs(ref.values[k]) : 1.0;
      eta_tilde[k] = std::abs(view.eigenvalues[k] - ref.values[k]) / denom_ref;
    }
    rep.lambda_hat.push_back(view.eigenvalues);
    rep.lambda_ref.push_back(ref.values);
    rep.eta.push_back(std::move(eta));
    rep.eta_tilde.push_back(std::move(eta_tilde));
    rep.disagreement.push_back(view.disagreement);
    rep.step_metrics.push_back(tr.net.metrics);
  }
  rep.metrics = tr.net.metrics;
  return rep;
}

}  // namespace

RelativeErrorReport run_covariance(const CovarianceScenario& sc,
                                   const graph::Graph& g,
                                   const consensus::ConsensusConfig& cfg) {
  return sc.complex_samples ? run_covariance_impl<cplx>(sc, g, cfg)
                            : run_covariance_impl<double>(sc, g, cfg);
}

}  // namespace netspec::apps
