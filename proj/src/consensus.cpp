#include "netspec/consensus.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <utility>

#include "netspec/errors.hpp"
#include "netspec/linalg.hpp"

namespace netspec::consensus {

using linalg::dense_eig_oracle;

namespace {

constexpr double kFitConditionLimit = 1e14;

void check_shape(const graph::Graph& g, const std::vector<double>& values,
                 int ncomp, const char* who) {
  if (ncomp < 1 ||
      values.size() != static_cast<std::size_t>(g.node_count()) *
                           static_cast<std::size_t>(ncomp))
    throw ValidationError(std::string(who) + ": value shape mismatch");
}

double laplacian_lambda_max(const graph::Graph& g) {
  if (g.edge_count() == 0) return 0.0;
  return dense_eig_oracle(graph::laplacian_matrix(g)).values.front();
}

struct PushSumState {
  std::vector<double> s;
  double w = 1.0;
};

}  // namespace

std::vector<double> push_sum(const graph::Graph& g,
                             const std::vector<double>& values, int ncomp,
                             int gamma, sim::RoundMetrics& m) {
  check_shape(g, values, ncomp, "push_sum");
  if (gamma < 1) throw ValidationError("push_sum: gamma must be >= 1");
  const int n = g.node_count();
  if (n == 1) return values;
  for (int i = 0; i < n; ++i)
    if (g.degree(i) == 0) throw IsolatedNode("push_sum: isolated node");

  std::vector<PushSumState> nodes(n);
  for (int i = 0; i < n; ++i) {
    nodes[i].s.assign(values.begin() + static_cast<std::size_t>(i) * ncomp,
                      values.begin() + static_cast<std::size_t>(i + 1) * ncomp);
    nodes[i].w = 1.0;
  }
  // Payload carries the per-component value shares plus one weight share;
  // the split weight p_ji = 1/d_i leaves nothing behind, so each node's
  // next state is exactly the sum of what its neighbors pushed.
  const int width = ncomp + 1;
  std::vector<double> bus;
  for (int round = 0; round < gamma; ++round) {
    sim::run_round(
        g, nodes, m, width,
        [&](int i, const PushSumState& st, double* out) {
          const double inv_d = 1.0 / g.degree(i);
          for (int c = 0; c < ncomp; ++c) out[c] = st.s[c] * inv_d;
          out[ncomp] = st.w * inv_d;
        },
        [&](int, PushSumState& st, const sim::Inbox& in) {
          std::fill(st.s.begin(), st.s.end(), 0.0);
          st.w = 0.0;
          for (int k = 0; k < in.count(); ++k) {
            const double* p = in.payload(k);
            for (int c = 0; c < ncomp; ++c) st.s[c] += p[c];
            st.w += p[ncomp];
          }
        },
        &bus);
  }
  std::vector<double> out(values.size());
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < ncomp; ++c)
      out[static_cast<std::size_t>(i) * ncomp + c] =
          n * nodes[i].s[c] / nodes[i].w;
  return out;
}

std::vector<double> average_consensus(const graph::Graph& g,
                                      const std::vector<double>& values,
                                      int ncomp, int gamma, double epsilon,
                                      sim::RoundMetrics& m) {
  check_shape(g, values, ncomp, "average_consensus");
  if (gamma < 1) throw ValidationError("average_consensus: gamma must be >= 1");
  const int n = g.node_count();
  if (n == 1) return values;
  if (epsilon <= 0.0)
    throw StepSizeTooLarge("average_consensus: step size must be positive");
  // lambda_max(L) >= max_degree + 1 on any graph with an edge, so this
  // cheap rejection never fires on a valid step size. The exact
  // 2 / lambda_max bound is enforced once in prepare_consensus.
  if (epsilon * (g.max_degree() + 1) >= 2.0)
    throw StepSizeTooLarge("average_consensus: step size >= 2 / lambda_max");

  std::vector<double> x(values);
  std::vector<double*> nodes(n);
  for (int i = 0; i < n; ++i)
    nodes[i] = x.data() + static_cast<std::size_t>(i) * ncomp;
  std::vector<double> bus;
  for (int round = 0; round < gamma; ++round) {
    sim::run_round(
        g, nodes, m, ncomp,
        [&](int, double* const& st, double* out) {
          std::copy(st, st + ncomp, out);
        },
        [&](int i, double*& st, const sim::Inbox& in) {
          const double d = g.degree(i);
          for (int c = 0; c < ncomp; ++c) {
            double acc = 0.0;
            for (int k = 0; k < in.count(); ++k) acc += in.payload(k)[c];
            st[c] -= epsilon * (d * st[c] - acc);
          }
        },
        &bus);
  }
  for (double& v : x) v *= n;
  return x;
}

std::vector<double> ft_average_consensus(
    const graph::Graph& g, const std::vector<double>& values, int ncomp,
    const std::vector<double>& distinct_nonzero_eigs, sim::RoundMetrics& m) {
  check_shape(g, values, ncomp, "ft_average_consensus");
  if (distinct_nonzero_eigs.empty())
    throw ValidationError("ft_average_consensus: empty eigenvalue list");
  for (double v : distinct_nonzero_eigs)
    if (!(v > 0.0))
      throw ValidationError(
          "ft_average_consensus: eigenvalues must be positive");
  const int n = g.node_count();
  if (n == 1) return values;

  std::vector<double> lams(distinct_nonzero_eigs);
  std::sort(lams.rbegin(), lams.rend());

  std::vector<double> x(values);
  std::vector<double*> nodes(n);
  for (int i = 0; i < n; ++i)
    nodes[i] = x.data() + static_cast<std::size_t>(i) * ncomp;
  std::vector<double> bus;
  // One round per distinct nonzero eigenvalue: W_r = I - L / lambda_r
  // annihilates the lambda_r component, so after the last round only the
  // constant component survives.
  for (double lam : lams) {
    const double eps_r = 1.0 / lam;
    sim::run_round(
        g, nodes, m, ncomp,
        [&](int, double* const& st, double* out) {
          std::copy(st, st + ncomp, out);
        },
        [&](int i, double*& st, const sim::Inbox& in) {
          const double d = g.degree(i);
          for (int c = 0; c < ncomp; ++c) {
            double acc = 0.0;
            for (int k = 0; k < in.count(); ++k) acc += in.payload(k)[c];
            st[c] -= eps_r * (d * st[c] - acc);
          }
        },
        &bus);
  }
  for (double& v : x) v *= n;
  return x;
}

std::vector<double> filter_consensus(const graph::Graph& g,
                                     const std::vector<double>& values,
                                     int ncomp, const FilterDesign& design,
                                     sim::RoundMetrics& m,
                                     FilterDiagnostics* diag) {
  check_shape(g, values, ncomp, "filter_consensus");
  const bool factored = design.factored();
  if (!factored && design.coeffs.empty())
    throw ValidationError("filter_consensus: empty design");
  const int n = g.node_count();
  const int rounds = design.exchanges();
  const bool norm_adj = design.shift == FilterDesign::Shift::NormalizedAdjacency;

  std::vector<double> scale(n, 1.0);
  if (norm_adj) {
    const double sum_deg = 2.0 * g.edge_count();
    for (int i = 0; i < n; ++i) {
      if (g.degree(i) == 0)
        throw IsolatedNode("filter_consensus: isolated node");
      // Degree transform of the averaging filter: V = (||D^{1/2} 1|| /
      // sqrt(N)) D^{-1/2}. Nodes know sum_deg through their own entry of
      // the unit-frequency eigenvector.
      scale[i] = std::sqrt(sum_deg / (n * g.degree(i)));
    }
  }

  struct FilterState {
    std::vector<double> t, acc;
  };
  std::vector<FilterState> nodes(n);
  for (int i = 0; i < n; ++i) {
    nodes[i].t.resize(ncomp);
    if (!factored) nodes[i].acc.resize(ncomp);
    for (int c = 0; c < ncomp; ++c) {
      const double v = scale[i] * values[static_cast<std::size_t>(i) * ncomp + c];
      nodes[i].t[c] = v;
      if (!factored) nodes[i].acc[c] = design.coeffs[0] * v;
    }
  }

  const auto record = [&]() {
    if (!diag) return;
    std::vector<double> y(values.size());
    double peak = 0.0;
    for (int i = 0; i < n; ++i)
      for (int c = 0; c < ncomp; ++c) {
        const double raw = factored ? nodes[i].t[c] : nodes[i].acc[c];
        const double v = scale[i] * raw;
        y[static_cast<std::size_t>(i) * ncomp + c] = v;
        peak = std::max(peak, std::abs(v));
      }
    diag->peak_magnitude.push_back(peak);
    diag->partial_out.push_back(std::move(y));
  };
  if (diag) {
    diag->peak_magnitude.clear();
    diag->partial_out.clear();
  }
  record();

  std::vector<double> bus;
  std::vector<double> tmp(ncomp);
  for (int step = 1; step <= rounds; ++step) {
    const double h = factored ? 0.0 : design.coeffs[step];
    const double root = factored ? design.factor_roots[step - 1] : 0.0;
    const double denom = design.factor_target - root;
    if (factored && denom == 0.0)
      throw ValidationError("filter_consensus: factor root equals target");
    sim::run_round(
        g, nodes, m, ncomp,
        [&](int i, const FilterState& st, double* out) {
          // The normalized-adjacency shift sends t_j / sqrt(d_j) so the
          // receiver only needs its own degree.
          const double pre = norm_adj ? 1.0 / std::sqrt((double)g.degree(i)) : 1.0;
          for (int c = 0; c < ncomp; ++c) out[c] = pre * st.t[c];
        },
        [&](int i, FilterState& st, const sim::Inbox& in) {
          const double d = g.degree(i);
          for (int c = 0; c < ncomp; ++c) {
            double acc = 0.0;
            for (int k = 0; k < in.count(); ++k) acc += in.payload(k)[c];
            tmp[c] = norm_adj ? acc / std::sqrt(d) : d * st.t[c] - acc;
          }
          if (factored) {
            // One interpolation factor per exchange: t <- (S - r I) t / (target - r).
            for (int c = 0; c < ncomp; ++c)
              st.t[c] = (tmp[c] - root * st.t[c]) / denom;
          } else {
            for (int c = 0; c < ncomp; ++c) {
              st.t[c] = tmp[c];
              st.acc[c] += h * tmp[c];
            }
          }
        },
        &bus);
    record();
  }

  std::vector<double> out(values.size());
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < ncomp; ++c) {
      const double raw = factored ? nodes[i].t[c] : nodes[i].acc[c];
      out[static_cast<std::size_t>(i) * ncomp + c] = scale[i] * raw;
    }
  return out;
}

namespace {

std::vector<double> dispatch_weighted_sum(const graph::Graph& g,
                                          const ConsensusRuntime& rt,
                                          const std::vector<double>& flat,
                                          int ncomp, sim::RoundMetrics& m) {
  switch (rt.cfg.protocol) {
    case Protocol::PushSum:
      return push_sum(g, flat, ncomp, rt.cfg.gamma, m);
    case Protocol::Average:
      return average_consensus(g, flat, ncomp, rt.cfg.gamma, rt.epsilon, m);
    case Protocol::FiniteTime:
      return ft_average_consensus(g, flat, ncomp, rt.finite_time_eigenvalues,
                                  m);
    case Protocol::Filter: {
      // The filter emits the average; the tracker wants the weighted sum.
      std::vector<double> out = filter_consensus(g, flat, ncomp, rt.filter, m);
      const double n = g.node_count();
      for (double& v : out) v *= n;
      return out;
    }
    case Protocol::Exact: {
      const int n = g.node_count();
      std::vector<double> out(flat.size());
      for (int c = 0; c < ncomp; ++c) {
        double total = 0.0;
        for (int i = 0; i < n; ++i)
          total += flat[static_cast<std::size_t>(i) * ncomp + c];
        for (int i = 0; i < n; ++i)
          out[static_cast<std::size_t>(i) * ncomp + c] = total;
      }
      return out;
    }
  }
  throw ValidationError("nc_weighted_sum: unknown protocol");
}

void book_agreement(const ConsensusRuntime& rt, sim::RoundMetrics& m) {
  // The exact backend is a measurement instrument, not a protocol; it
  // leaves the cost ledger untouched.
  if (rt.cfg.protocol == Protocol::Exact) return;
  m.consensus_rounds += rt.cfg.protocol == Protocol::PushSum ? 2 : 1;
  m.scalar_consensus_runs += 1;
}

}  // namespace

std::vector<double> nc_weighted_sum(const graph::Graph& g,
                                    const ConsensusRuntime& rt,
                                    const std::vector<double>& summands,
                                    sim::RoundMetrics& m) {
  check_shape(g, summands, 1, "nc_weighted_sum");
  std::vector<double> est = dispatch_weighted_sum(g, rt, summands, 1, m);
  book_agreement(rt, m);
  return est;
}

std::vector<cplx> nc_weighted_sum(const graph::Graph& g,
                                  const ConsensusRuntime& rt,
                                  const std::vector<cplx>& summands,
                                  sim::RoundMetrics& m) {
  const int n = g.node_count();
  if (summands.size() != static_cast<std::size_t>(n))
    throw ValidationError("nc_weighted_sum: value shape mismatch");
  std::vector<double> flat(2 * summands.size());
  for (int i = 0; i < n; ++i) {
    flat[2 * static_cast<std::size_t>(i)] = summands[i].real();
    flat[2 * static_cast<std::size_t>(i) + 1] = summands[i].imag();
  }
  // Real and imaginary parts ride in one payload, so the pair costs one
  // agreement like a real summand (push-sum still pays its weight double).
  std::vector<double> est = dispatch_weighted_sum(g, rt, flat, 2, m);
  book_agreement(rt, m);
  std::vector<cplx> out(summands.size());
  for (int i = 0; i < n; ++i)
    out[i] = cplx(est[2 * static_cast<std::size_t>(i)],
                  est[2 * static_cast<std::size_t>(i) + 1]);
  return out;
}

std::vector<double> distinct_values(const std::vector<double>& values,
                                    double rel_gap) {
  if (values.empty()) return {};
  std::vector<double> v(values);
  std::sort(v.rbegin(), v.rend());
  std::vector<double> out;
  double cluster_sum = v[0];
  int cluster_count = 1;
  double prev = v[0];
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (prev - v[i] <= rel_gap * std::max(1.0, std::abs(prev))) {
      cluster_sum += v[i];
      ++cluster_count;
    } else {
      out.push_back(cluster_sum / cluster_count);
      cluster_sum = v[i];
      cluster_count = 1;
    }
    prev = v[i];
  }
  out.push_back(cluster_sum / cluster_count);
  return out;
}

namespace {

// Householder QR with explicit reflector storage; everything here runs on
// filter-length matrices, so clarity beats blocking.
struct QRFactors {
  Matrix<double> r;
  std::vector<std::vector<double>> v;
  std::vector<double> tau;
};

QRFactors householder_qr(Matrix<double> a) {
  const std::size_t mr = a.rows(), nc = a.cols();
  const std::size_t steps = std::min(mr, nc);
  QRFactors f;
  f.v.resize(steps);
  f.tau.assign(steps, 0.0);
  for (std::size_t k = 0; k < steps; ++k) {
    double xnorm_sq = 0.0;
    for (std::size_t i = k; i < mr; ++i) xnorm_sq += a(i, k) * a(i, k);
    const double xnorm = std::sqrt(xnorm_sq);
    if (xnorm == 0.0) continue;
    const double x0 = a(k, k);
    const double alpha = x0 >= 0.0 ? -xnorm : xnorm;
    std::vector<double>& v = f.v[k];
    v.resize(mr - k);
    for (std::size_t i = k; i < mr; ++i) v[i - k] = a(i, k);
    v[0] -= alpha;
    f.tau[k] = 1.0 / (xnorm_sq - alpha * x0);  // 2 / ||v||^2
    for (std::size_t j = k; j < nc; ++j) {
      double w = 0.0;
      for (std::size_t i = k; i < mr; ++i) w += v[i - k] * a(i, j);
      w *= f.tau[k];
      for (std::size_t i = k; i < mr; ++i) a(i, j) -= w * v[i - k];
    }
    a(k, k) = alpha;
    for (std::size_t i = k + 1; i < mr; ++i) a(i, k) = 0.0;
  }
  f.r = std::move(a);
  return f;
}

void apply_qt(const QRFactors& f, std::vector<double>& b) {
  for (std::size_t k = 0; k < f.v.size(); ++k) {
    if (f.tau[k] == 0.0) continue;
    const std::vector<double>& v = f.v[k];
    double w = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) w += v[i] * b[k + i];
    w *= f.tau[k];
    for (std::size_t i = 0; i < v.size(); ++i) b[k + i] -= w * v[i];
  }
}

void apply_q(const QRFactors& f, std::vector<double>& b) {
  for (std::size_t k = f.v.size(); k-- > 0;) {
    if (f.tau[k] == 0.0) continue;
    const std::vector<double>& v = f.v[k];
    double w = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) w += v[i] * b[k + i];
    w *= f.tau[k];
    for (std::size_t i = 0; i < v.size(); ++i) b[k + i] -= w * v[i];
  }
}

void check_r_condition(const QRFactors& f, std::size_t n, const char* who) {
  double dmax = 0.0, dmin = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double d = std::abs(f.r(k, k));
    dmax = std::max(dmax, d);
    dmin = k == 0 ? d : std::min(dmin, d);
  }
  if (dmin == 0.0 || dmax / dmin > kFitConditionLimit)
    throw IllConditionedFit(std::string(who) +
                            ": fit matrix is numerically singular");
}

// Least squares for m >= n via QR.
std::vector<double> qr_least_squares(const Matrix<double>& a,
                                     std::vector<double> b, const char* who) {
  const std::size_t n = a.cols();
  QRFactors f = householder_qr(a);
  check_r_condition(f, n, who);
  apply_qt(f, b);
  std::vector<double> x(n, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= f.r(i, j) * x[j];
    x[i] = s / f.r(i, i);
  }
  return x;
}

// Minimum-norm solution for m < n (full row rank) via QR of A^T.
std::vector<double> qr_min_norm(const Matrix<double>& a, std::vector<double> b,
                                const char* who) {
  const std::size_t mr = a.rows(), nc = a.cols();
  QRFactors f = householder_qr(adjoint(a));
  check_r_condition(f, mr, who);
  std::vector<double> y(nc, 0.0);
  for (std::size_t i = 0; i < mr; ++i) {
    double s = b[i];
    for (std::size_t j = 0; j < i; ++j) s -= f.r(j, i) * y[j];
    y[i] = s / f.r(i, i);
  }
  apply_q(f, y);
  return y;
}

}  // namespace

std::vector<double> fit_filter_coefficients(
    const std::vector<double>& frequencies, const std::vector<double>& desired,
    int K) {
  const int F = static_cast<int>(frequencies.size());
  if (F == 0 || desired.size() != frequencies.size() || K < 0)
    throw ValidationError("fit_filter_coefficients: bad shapes");
  const int nc = K + 1;

  // Column-equilibrated Vandermonde: the conditioning test then reflects
  // the fit itself rather than raw monomial scaling.
  Matrix<double> a(F, nc);
  for (int i = 0; i < F; ++i) {
    double pw = 1.0;
    for (int m = 0; m < nc; ++m) {
      a(i, m) = pw;
      pw *= frequencies[i];
    }
  }
  std::vector<double> colscale(nc, 0.0);
  for (int m = 0; m < nc; ++m) {
    for (int i = 0; i < F; ++i)
      colscale[m] = std::max(colscale[m], std::abs(a(i, m)));
    if (colscale[m] == 0.0) colscale[m] = 1.0;
    for (int i = 0; i < F; ++i) a(i, m) /= colscale[m];
  }

  std::vector<double> h;
  if (nc == F) {
    h = qr_least_squares(a, desired, "fit_filter_coefficients");
  } else if (nc > F) {
    h = qr_min_norm(a, desired, "fit_filter_coefficients");
  } else {
    // Overdetermined: enforce every nonzero-desired equation exactly and
    // minimize the residual of the zero-response equations, so the
    // passband pin is never traded against stopband error.
    std::vector<int> pinned, rest;
    for (int i = 0; i < F; ++i)
      (desired[i] != 0.0 ? pinned : rest).push_back(i);
    if (static_cast<int>(pinned.size()) > nc)
      throw ValidationError(
          "fit_filter_coefficients: more pinned responses than coefficients");

    Matrix<double> w(F, nc);
    std::vector<double> rhs(desired);
    for (int i = 0; i < F; ++i)
      for (int m = 0; m < nc; ++m) w(i, m) = a(i, m);

    // Sequential elimination of one variable per pinned equation.
    std::vector<char> var_free(nc, 1);
    struct Pin {
      int row, var;
    };
    std::vector<Pin> pins;
    for (int r : pinned) {
      int p = -1;
      double best = 0.0;
      for (int m = 0; m < nc; ++m)
        if (var_free[m] && std::abs(w(r, m)) > best) {
          best = std::abs(w(r, m));
          p = m;
        }
      if (p < 0)
        throw IllConditionedFit(
            "fit_filter_coefficients: dependent pinned responses");
      for (int q = 0; q < F; ++q) {
        if (q == r || w(q, p) == 0.0) continue;
        const double factor = w(q, p) / w(r, p);
        for (int m = 0; m < nc; ++m)
          if (m != p) w(q, m) -= factor * w(r, m);
        rhs[q] -= factor * rhs[r];
        w(q, p) = 0.0;
      }
      var_free[p] = 0;
      pins.push_back({r, p});
    }

    std::vector<int> free_vars;
    for (int m = 0; m < nc; ++m)
      if (var_free[m]) free_vars.push_back(m);

    h.assign(nc, 0.0);
    if (!free_vars.empty()) {
      Matrix<double> a0(rest.size(), free_vars.size());
      std::vector<double> b0(rest.size());
      for (std::size_t i = 0; i < rest.size(); ++i) {
        for (std::size_t j = 0; j < free_vars.size(); ++j)
          a0(i, j) = w(rest[i], free_vars[j]);
        b0[i] = rhs[rest[i]];
      }
      std::vector<double> hf =
          a0.rows() >= a0.cols()
              ? qr_least_squares(a0, b0, "fit_filter_coefficients")
              : qr_min_norm(a0, b0, "fit_filter_coefficients");
      for (std::size_t j = 0; j < free_vars.size(); ++j) h[free_vars[j]] = hf[j];
    }
    for (std::size_t k = pins.size(); k-- > 0;) {
      const Pin& pin = pins[k];
      double s = rhs[pin.row];
      for (int m = 0; m < nc; ++m)
        if (m != pin.var) s -= w(pin.row, m) * h[m];
      h[pin.var] = s / w(pin.row, pin.var);
    }
  }

  for (int m = 0; m < nc; ++m) h[m] /= colscale[m];
  return h;
}

FilterDesign design_averaging_filter(FilterKind kind, const graph::Graph& g,
                                     std::vector<double> frequencies, int K) {
  if (K < 1) throw ValidationError("design_averaging_filter: K must be >= 1");
  FilterDesign d;
  std::vector<double> freqs;
  double target = 0.0;

  switch (kind) {
    case FilterKind::GDnA: {
      d.shift = FilterDesign::Shift::NormalizedAdjacency;
      if (frequencies.empty())
        frequencies = dense_eig_oracle(graph::normalized_adjacency(g)).values;
      freqs = distinct_values(frequencies);
      target = 1.0;  // top normalized-adjacency frequency on a connected graph
      break;
    }
    case FilterKind::GDL: {
      d.shift = FilterDesign::Shift::Laplacian;
      if (frequencies.empty())
        frequencies = dense_eig_oracle(graph::laplacian_matrix(g)).values;
      freqs = distinct_values(frequencies);
      target = 0.0;  // constant component lives at Laplacian frequency zero
      break;
    }
    case FilterKind::GIDN: {
      d.shift = FilterDesign::Shift::Laplacian;
      const double top = g.node_count();
      for (int j = 0; j <= K; ++j) freqs.push_back(top * j / K);
      target = 0.0;
      break;
    }
    case FilterKind::GIDM: {
      d.shift = FilterDesign::Shift::Laplacian;
      const double top = frequencies.empty()
                             ? laplacian_lambda_max(g)
                             : *std::max_element(frequencies.begin(),
                                                 frequencies.end());
      if (!(top > 0.0))
        throw ValidationError("design_averaging_filter: empty spectrum");
      for (int j = 0; j <= K; ++j) freqs.push_back(top * j / K);
      target = 0.0;
      break;
    }
  }

  // Snap the averaging frequency, which is known analytically, onto its
  // exact value so the unit response is pinned where it belongs.
  std::size_t best = 0;
  for (std::size_t i = 1; i < freqs.size(); ++i)
    if (std::abs(freqs[i] - target) < std::abs(freqs[best] - target)) best = i;
  freqs[best] = target;

  std::vector<double> desired(freqs.size(), 0.0);
  desired[best] = 1.0;
  d.coeffs = fit_filter_coefficients(freqs, desired, K);
  return d;
}

FilterDesign design_interpolating_filter(FilterKind kind,
                                         const graph::Graph& g,
                                         std::vector<double> frequencies) {
  if (kind != FilterKind::GDnA && kind != FilterKind::GDL)
    throw ValidationError(
        "design_interpolating_filter: kind has no interpolating form");
  FilterDesign d;
  if (kind == FilterKind::GDnA) {
    d.shift = FilterDesign::Shift::NormalizedAdjacency;
    d.factor_target = 1.0;
    if (frequencies.empty())
      frequencies = dense_eig_oracle(graph::normalized_adjacency(g)).values;
  } else {
    d.shift = FilterDesign::Shift::Laplacian;
    d.factor_target = 0.0;
    if (frequencies.empty())
      frequencies = dense_eig_oracle(graph::laplacian_matrix(g)).values;
  }
  std::vector<double> freqs = distinct_values(frequencies);
  if (freqs.size() < 2)
    throw ValidationError("design_interpolating_filter: degenerate spectrum");

  std::size_t best = 0;
  for (std::size_t i = 1; i < freqs.size(); ++i)
    if (std::abs(freqs[i] - d.factor_target) <
        std::abs(freqs[best] - d.factor_target))
      best = i;
  std::vector<double> rem;
  rem.reserve(freqs.size() - 1);
  for (std::size_t i = 0; i < freqs.size(); ++i)
    if (i != best) rem.push_back(freqs[i]);

  // Leja ordering of the factor roots. A monotone sweep lets rounding noise
  // at the already-annihilated frequencies be re-amplified by the factors
  // still to come, which on an 80-node graph costs ten digits; interleaving
  // the roots so each new one maximizes its distance product to those already
  // applied keeps every intermediate gain within a few orders of one.
  d.factor_roots.reserve(rem.size());
  std::size_t pick = 0;
  for (std::size_t i = 1; i < rem.size(); ++i)
    if (std::abs(rem[i] - d.factor_target) >
        std::abs(rem[pick] - d.factor_target))
      pick = i;
  std::vector<double> logdist(rem.size(), 0.0);
  while (!rem.empty()) {
    const double root = rem[pick];
    d.factor_roots.push_back(root);
    rem.erase(rem.begin() + pick);
    logdist.erase(logdist.begin() + pick);
    pick = 0;
    for (std::size_t i = 0; i < rem.size(); ++i) {
      logdist[i] += std::log(std::abs(rem[i] - root));
      if (logdist[i] > logdist[pick]) pick = i;
    }
  }
  return d;
}

ConsensusRuntime prepare_consensus(const ConsensusConfig& cfg,
                                   const graph::Graph& g) {
  if (g.node_count() <= 0)
    throw ValidationError("prepare_consensus: empty graph");
  if (!g.is_connected())
    throw Disconnected("prepare_consensus: topology must be connected");

  ConsensusRuntime rt;
  rt.cfg = cfg;
  rt.graph_generation = g.generation();

  switch (cfg.protocol) {
    case Protocol::PushSum:
      if (cfg.gamma < 1)
        throw ValidationError("prepare_consensus: gamma must be >= 1");
      break;
    case Protocol::Average: {
      if (cfg.gamma < 1)
        throw ValidationError("prepare_consensus: gamma must be >= 1");
      rt.epsilon = cfg.epsilon > 0.0
                       ? cfg.epsilon
                       : (g.max_degree() > 0 ? 1.0 / g.max_degree() : 1.0);
      const double lmax = laplacian_lambda_max(g);
      if (lmax > 0.0 && rt.epsilon >= 2.0 / lmax)
        throw StepSizeTooLarge(
            "prepare_consensus: step size >= 2 / lambda_max");
      break;
    }
    case Protocol::FiniteTime: {
      std::vector<double> eigs = cfg.finite_time_eigenvalues;
      if (eigs.empty() && g.edge_count() > 0) {
        const std::vector<double> all =
            dense_eig_oracle(graph::laplacian_matrix(g)).values;
        const double floor = 1e-8 * std::max(1.0, all.front());
        for (double v : all)
          if (v > floor) eigs.push_back(v);
      }
      eigs = distinct_values(eigs);
      if (eigs.empty())
        throw ValidationError("prepare_consensus: finite-time list is empty");
      for (double v : eigs)
        if (!(v > 0.0))
          throw ValidationError(
              "prepare_consensus: finite-time eigenvalues must be positive");
      rt.finite_time_eigenvalues = eigs;
      break;
    }
    case Protocol::Filter: {
      rt.filter = cfg.filter;
      if (rt.filter.coeffs.empty() && !rt.filter.factored()) {
        // Interpolating normalized-adjacency design: exact averaging in
        // R - 1 exchanges for R distinct graph frequencies.
        rt.filter = design_interpolating_filter(FilterKind::GDnA, g, {});
      }
      break;
    }
    case Protocol::Exact:
      break;
  }
  return rt;
}

}  // namespace netspec::consensus
