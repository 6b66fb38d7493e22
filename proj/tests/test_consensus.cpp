#include <cmath>
#include <vector>

#include "doctest.h"
#include "netspec/consensus.hpp"
#include "netspec/graph.hpp"
#include "netspec/linalg.hpp"
#include "netspec/netsim.hpp"

using namespace netspec;
using namespace netspec::consensus;
using graph::Graph;

namespace {

std::vector<Graph> small_corpus() {
  return {graph::gen_path(7),           graph::gen_cycle(9),
          graph::gen_complete(5),       graph::gen_pendant_cycle(4),
          graph::gen_triangle_bridge(), graph::gen_d_regular(10, 3, 3),
          graph::gen_small_world(12, 4, 0.2, 7)};
}

std::vector<double> random_values(const Graph& g, std::uint64_t seed) {
  sim::RngStream rng(seed, "consensus-values");
  std::vector<double> v(g.node_count());
  for (double& x : v) x = 4.0 * rng.uniform() - 1.0;
  return v;
}

double sum_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

std::vector<double> distinct_nonzero_eigs(const Graph& g) {
  const auto all =
      linalg::dense_eig_oracle(graph::laplacian_matrix(g)).values;
  std::vector<double> nz;
  for (double v : all)
    if (v > 1e-8) nz.push_back(v);
  return distinct_values(nz);
}

}  // namespace

TEST_SUITE("consensus") {

TEST_CASE("push-sum is exact on equal inputs at any round count") {
  const Graph g = graph::gen_pendant_cycle(3);
  const int n = g.node_count();
  for (int gamma : {1, 3, 40}) {
    sim::RoundMetrics m;
    const auto est = push_sum(g, std::vector<double>(n, 2.5), 1, gamma, m);
    for (double e : est) CHECK(e == doctest::Approx(n * 2.5).epsilon(1e-14));
  }
}

TEST_CASE("push-sum converges to the sum on the three-path") {
  const Graph g = graph::gen_path(3);
  sim::RoundMetrics m;
  const auto est = push_sum(g, {0.0, 3.0, 6.0}, 1, 100, m);
  for (double e : est) CHECK(e == doctest::Approx(9.0).epsilon(1e-8));
  CHECK(m.wall_rounds == 100);
}

TEST_CASE("agreement booking accumulates and skips the exact backend") {
  const Graph g = graph::gen_path(3);
  ConsensusConfig ps;
  ps.protocol = Protocol::PushSum;
  ps.gamma = 10;
  const auto ps_rt = prepare_consensus(ps, g);

  sim::RoundMetrics m;
  nc_weighted_sum(g, ps_rt, std::vector<double>{1.0, 2.0, 3.0}, m);
  CHECK(m.consensus_rounds == 2);
  CHECK(m.scalar_consensus_runs == 1);
  nc_weighted_sum(g, ps_rt, std::vector<double>{0.5, 0.0, 1.5}, m);
  CHECK(m.consensus_rounds == 4);
  CHECK(m.scalar_consensus_runs == 2);

  ConsensusConfig ex;
  ex.protocol = Protocol::Exact;
  const auto ex_rt = prepare_consensus(ex, g);
  sim::RoundMetrics me;
  const auto est =
      nc_weighted_sum(g, ex_rt, std::vector<double>{1.0, 2.0, 3.0}, me);
  for (double e : est) CHECK(e == 6.0);
  CHECK(me.consensus_rounds == 0);
  CHECK(me.scalar_consensus_runs == 0);
}

TEST_CASE("average consensus is exact on the complete graph in one round") {
  const Graph g = graph::gen_complete(3);
  sim::RoundMetrics m;
  const auto est = average_consensus(g, {0.0, 3.0, 6.0}, 1, 1, 1.0 / 3.0, m);
  for (double e : est) CHECK(e == doctest::Approx(9.0).epsilon(1e-14));
}

TEST_CASE("average consensus converges with the maximum-degree step size") {
  const Graph g = graph::gen_path(3);
  sim::RoundMetrics m;
  const auto est = average_consensus(g, {0.0, 3.0, 6.0}, 1, 200, 0.5, m);
  for (double e : est) CHECK(e == doctest::Approx(9.0).epsilon(1e-6));
}

TEST_CASE("average consensus conserves the total at every horizon") {
  // W is doubly stochastic, so the rescaled estimates always sum to N * sum.
  const Graph g = graph::gen_small_world(12, 4, 0.2, 4);
  const auto vals = random_values(g, 2);
  for (int gamma : {1, 7, 60}) {
    sim::RoundMetrics m;
    const auto est = average_consensus(g, vals, 1, gamma, 0.2, m);
    CHECK(sum_of(est) ==
          doctest::Approx(12.0 * sum_of(vals)).epsilon(1e-12));
  }
}

TEST_CASE("average consensus rejects unstable step sizes") {
  const Graph g = graph::gen_path(3);
  sim::RoundMetrics m;
  CHECK_THROWS_AS(average_consensus(g, {1.0, 2.0, 3.0}, 1, 5, 0.7, m),
                  StepSizeTooLarge);
}

TEST_CASE("prepare enforces the exact spectral step-size bound") {
  // On C4 lambda_max(L) = 4: the max-degree heuristic bound (2 / (d+1) = 2/3)
  // would let 0.6 through, the exact bound 0.5 must not.
  ConsensusConfig cfg;
  cfg.protocol = Protocol::Average;
  cfg.epsilon = 0.6;
  CHECK_THROWS_AS(prepare_consensus(cfg, graph::gen_cycle(4)),
                  StepSizeTooLarge);
  cfg.epsilon = 0.45;
  CHECK_NOTHROW(prepare_consensus(cfg, graph::gen_cycle(4)));
}

TEST_CASE("prepare validates connectivity and gamma") {
  ConsensusConfig cfg;
  cfg.protocol = Protocol::PushSum;
  Graph split(6, {{0, 1}, {1, 2}, {3, 4}, {4, 5}});
  CHECK_THROWS_AS(prepare_consensus(cfg, split), Disconnected);
  cfg.gamma = 0;
  CHECK_THROWS_AS(prepare_consensus(cfg, graph::gen_path(3)),
                  ValidationError);
}

TEST_CASE("finite-time consensus is exact after one round on K_N") {
  const Graph g = graph::gen_complete(4);
  sim::RoundMetrics m;
  const auto est = ft_average_consensus(g, {1.0, 2.0, 3.0, 6.0}, 1, {4.0}, m);
  for (double e : est) CHECK(e == doctest::Approx(12.0).epsilon(1e-12));
  CHECK(m.wall_rounds == 1);
}

TEST_CASE("finite-time consensus is exact after two rounds on the three-path") {
  const Graph g = graph::gen_path(3);
  sim::RoundMetrics m;
  const auto est =
      ft_average_consensus(g, {0.0, 3.0, 6.0}, 1, {3.0, 1.0}, m);
  for (double e : est) CHECK(e == doctest::Approx(9.0).epsilon(1e-12));
  CHECK(m.wall_rounds == 2);
}

TEST_CASE("finite-time consensus is exact across the small corpus") {
  for (const Graph& g : small_corpus()) {
    const auto vals = random_values(g, 5);
    sim::RoundMetrics m;
    const auto est =
        ft_average_consensus(g, vals, 1, distinct_nonzero_eigs(g), m);
    const double want = g.node_count() * (sum_of(vals) / g.node_count());
    for (double e : est)
      CHECK(e == doctest::Approx(want).epsilon(1e-9));
  }
}

TEST_CASE("the ten-node demo graph finishes finite-time in five rounds") {
  const Graph g = graph::gen_pendant_cycle(5);
  const auto eigs = distinct_nonzero_eigs(g);
  REQUIRE(eigs.size() == 5);
  const auto vals = random_values(g, 6);
  sim::RoundMetrics m;
  const auto est = ft_average_consensus(g, vals, 1, eigs, m);
  CHECK(m.wall_rounds == 5);
  for (double e : est)
    CHECK(e == doctest::Approx(sum_of(vals)).epsilon(1e-9));
}

TEST_CASE("a hand-built Laplacian filter averages K3 exactly") {
  // h = (1, -1/3) on shift L of K3: I - L/3 = (1/3) ones.
  const Graph g = graph::gen_complete(3);
  FilterDesign d;
  d.shift = FilterDesign::Shift::Laplacian;
  d.coeffs = {1.0, -1.0 / 3.0};
  sim::RoundMetrics m;
  const auto out = filter_consensus(g, {0.0, 3.0, 6.0}, 1, d, m);
  for (double y : out) CHECK(y == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("an all-zero filter yields zero output") {
  const Graph g = graph::gen_path(4);
  FilterDesign d;
  d.coeffs = {0.0, 0.0, 0.0};
  sim::RoundMetrics m;
  const auto out = filter_consensus(g, random_values(g, 7), 1, d, m);
  for (double y : out) CHECK(y == 0.0);
}

TEST_CASE("filter diagnostics trace one entry per exchange count") {
  const Graph g = graph::gen_cycle(6);
  const auto d = design_interpolating_filter(FilterKind::GDL, g, {});
  sim::RoundMetrics m;
  FilterDiagnostics diag;
  filter_consensus(g, random_values(g, 8), 1, d, m, &diag);
  CHECK(diag.peak_magnitude.size() ==
        static_cast<std::size_t>(d.exchanges()) + 1);
  CHECK(diag.partial_out.size() == diag.peak_magnitude.size());
}

TEST_CASE("interpolating designs reproduce the average across the corpus") {
  for (const Graph& g : small_corpus()) {
    const auto vals = random_values(g, 9);
    const double avg = sum_of(vals) / g.node_count();
    for (FilterKind kind : {FilterKind::GDnA, FilterKind::GDL}) {
      const auto d = design_interpolating_filter(kind, g, {});
      sim::RoundMetrics m;
      const auto out = filter_consensus(g, vals, 1, d, m);
      for (double y : out) CHECK(y == doctest::Approx(avg).epsilon(1e-8));
    }
  }
}

TEST_CASE("only graph-dependent kinds can interpolate") {
  const Graph g = graph::gen_path(4);
  CHECK_THROWS_AS(design_interpolating_filter(FilterKind::GIDN, g, {}),
                  ValidationError);
  CHECK_THROWS_AS(design_interpolating_filter(FilterKind::GIDM, g, {}),
                  ValidationError);
}

TEST_CASE("coefficient fitting solves the tiny closed forms") {
  const auto h = fit_filter_coefficients({0.0, 3.0}, {1.0, 0.0}, 1);
  REQUIRE(h.size() == 2);
  CHECK(h[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(h[1] == doctest::Approx(-1.0 / 3.0).epsilon(1e-12));

  const auto h0 = fit_filter_coefficients({1.0}, {1.0}, 0);
  REQUIRE(h0.size() == 1);
  CHECK(h0[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("overdetermined fits keep the pinned frequency exact") {
  const std::vector<double> freqs = {0.0, 1.0, 2.0, 3.0, 4.0};
  const std::vector<double> want = {1.0, 0.0, 0.0, 0.0, 0.0};
  const auto h = fit_filter_coefficients(freqs, want, 2);
  REQUIRE(h.size() == 3);
  // response at the pinned frequency is exact, the rest least-squares
  double at0 = h[0];
  CHECK(at0 == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("degenerate frequency grids are rejected") {
  CHECK_THROWS_AS(
      fit_filter_coefficients({1.0, 1.0 + 1e-15, 2.0}, {1.0, 0.0, 0.0}, 2),
      IllConditionedFit);
}

TEST_CASE("gidn designs fit the documented uniform grid") {
  const Graph g = graph::gen_pendant_cycle(4);
  const auto d = design_averaging_filter(FilterKind::GIDN, g, {}, 12);
  CHECK(d.coeffs.size() == 13);
  for (double c : d.coeffs) CHECK(std::isfinite(c));
}

TEST_CASE("a K=1 GDL design on K3 recovers the closed-form coefficients") {
  const Graph g = graph::gen_complete(3);
  const auto d = design_averaging_filter(FilterKind::GDL, g, {}, 1);
  REQUIRE(d.coeffs.size() == 2);
  CHECK(d.coeffs[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(d.coeffs[1] == doctest::Approx(-1.0 / 3.0).epsilon(1e-10));
}

TEST_CASE("weighted-sum dispatch recovers a one-hot summand everywhere") {
  const Graph g = graph::gen_triangle_bridge();
  ConsensusConfig cfg;
  cfg.protocol = Protocol::Exact;
  const auto rt = prepare_consensus(cfg, g);
  std::vector<double> summands(6, 0.0);
  summands[2] = 1.0;
  sim::RoundMetrics m;
  const auto est = nc_weighted_sum(g, rt, summands, m);
  for (double e : est) CHECK(e == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("complex weighted sums ride one booked agreement") {
  const Graph g = graph::gen_pendant_cycle(3);
  ConsensusConfig cfg;
  cfg.protocol = Protocol::FiniteTime;
  const auto rt = prepare_consensus(cfg, g);
  std::vector<cplx> summands(g.node_count());
  sim::RngStream rng(4, "complex-summands");
  cplx want{};
  for (cplx& s : summands) {
    s = rng.gaussian_complex();
    want += s;
  }
  sim::RoundMetrics m;
  const auto est = nc_weighted_sum(g, rt, summands, m);
  CHECK(m.scalar_consensus_runs == 1);
  CHECK(m.consensus_rounds == 1);
  for (const cplx& e : est) CHECK(std::abs(e - want) < 1e-9);
}

TEST_CASE("round booking distinguishes push-sum from the one-round backends") {
  const Graph g = graph::gen_triangle_bridge();
  const auto vals = random_values(g, 11);
  for (Protocol p : {Protocol::PushSum, Protocol::Average,
                     Protocol::FiniteTime, Protocol::Filter}) {
    ConsensusConfig cfg;
    cfg.protocol = p;
    cfg.gamma = 30;
    const auto rt = prepare_consensus(cfg, g);
    sim::RoundMetrics m;
    nc_weighted_sum(g, rt, vals, m);
    CHECK(m.scalar_consensus_runs == 1);
    CHECK(m.consensus_rounds == (p == Protocol::PushSum ? 2 : 1));
  }
}

TEST_CASE("gossip backends agree with the true sum at long horizons") {
  const Graph g = graph::gen_triangle_bridge();
  const auto vals = random_values(g, 12);
  const double want = sum_of(vals);
  for (Protocol p : {Protocol::PushSum, Protocol::Average}) {
    ConsensusConfig cfg;
    cfg.protocol = p;
    cfg.gamma = 500;
    const auto rt = prepare_consensus(cfg, g);
    sim::RoundMetrics m;
    const auto est = nc_weighted_sum(g, rt, vals, m);
    for (double e : est)
      CHECK(e == doctest::Approx(want).epsilon(1e-6));
  }
}

TEST_CASE("distinct-value clustering collapses relative ties") {
  const auto d = distinct_values({4.0, 4.0 + 1e-9, 2.0, 2.0, 1.0, 0.0});
  REQUIRE(d.size() == 4);
  CHECK(d[0] == doctest::Approx(4.0).epsilon(1e-8));
  CHECK(d[1] == 2.0);
  CHECK(d[2] == 1.0);
  CHECK(d[3] == 0.0);
}

TEST_CASE("factored interpolating designs stay stable on a large graph") {
  // The Leja factor ordering keeps intermediate amplification bounded, so
  // the 80-node design loses no precision even through 50+ factors.
  const Graph g = graph::gen_small_world(80, 6, 0.1, 42);
  const auto vals = random_values(g, 13);
  const double avg = sum_of(vals) / g.node_count();
  for (FilterKind kind : {FilterKind::GDnA, FilterKind::GDL}) {
    const auto d = design_interpolating_filter(kind, g, {});
    sim::RoundMetrics m;
    FilterDiagnostics diag;
    const auto out = filter_consensus(g, vals, 1, d, m, &diag);
    double err = 0.0;
    for (double y : out) err = std::max(err, std::abs(y - avg));
    CHECK(err / std::abs(avg) < 1e-6);
    double peak = 0.0;
    for (double p : diag.peak_magnitude) peak = std::max(peak, p);
    CHECK(peak < 1e3);
  }
}

}  // TEST_SUITE
