#include <algorithm>
#include <set>
#include <utility>
#include <vector>

#include "doctest.h"
#include "netspec/graph.hpp"
#include "netspec/linalg.hpp"

using namespace netspec;
using graph::Graph;

namespace {

// L rebuilt column-by-column from the incidence matrix.
Matrix<double> incidence_laplacian(const Graph& g) {
  const auto b = graph::incidence_matrix(g);
  Matrix<double> l(g.node_count(), g.node_count());
  for (int e = 0; e < g.edge_count(); ++e)
    for (int i = 0; i < g.node_count(); ++i)
      for (int j = 0; j < g.node_count(); ++j)
        l(i, j) += b(i, e) * b(j, e);
  return l;
}

double max_diff(const Matrix<double>& a, const Matrix<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      m = std::max(m, std::abs(a(i, j) - b(i, j)));
  return m;
}

}  // namespace

TEST_SUITE("graph") {

TEST_CASE("two-node path has the textbook Laplacian") {
  const Graph g = graph::gen_path(2);
  const auto l = graph::laplacian_matrix(g);
  CHECK(l(0, 0) == 1.0);
  CHECK(l(0, 1) == -1.0);
  CHECK(l(1, 0) == -1.0);
  CHECK(l(1, 1) == 1.0);
}

TEST_CASE("complete graph K3 has Laplacian spectrum 3,3,0") {
  const auto e =
      linalg::dense_eig_oracle(graph::laplacian_matrix(graph::gen_complete(3)));
  CHECK(e.values[0] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(e.values[1] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(e.values[2] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("L equals B B^T on assorted graphs") {
  for (const Graph& g :
       {graph::gen_pendant_cycle(4), graph::gen_triangle_bridge(),
        graph::gen_small_world(20, 4, 0.2, 5)}) {
    CHECK(max_diff(graph::laplacian_matrix(g), incidence_laplacian(g)) == 0.0);
  }
}

TEST_CASE("Laplacian row sums vanish and the spectrum is nonnegative") {
  const Graph g = graph::gen_d_regular(12, 3, 4);
  const auto l = graph::laplacian_matrix(g);
  for (int i = 0; i < 12; ++i) {
    double s = 0.0;
    for (int j = 0; j < 12; ++j) s += l(i, j);
    CHECK(std::abs(s) < 1e-14);
  }
  const auto e = linalg::dense_eig_oracle(l);
  CHECK(e.values.back() > -1e-9);
}

TEST_CASE("normalized views require positive degrees") {
  Graph lonely(3, {{0, 1}});  // node 2 isolated
  CHECK_THROWS_AS(graph::normalized_adjacency(lonely), IsolatedNode);
  const Graph ring = graph::gen_cycle(6);
  const auto na = graph::normalized_adjacency(ring);
  const auto nl = graph::normalized_laplacian(ring);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      CHECK(nl(i, j) ==
            doctest::Approx((i == j ? 1.0 : 0.0) - na(i, j)).epsilon(1e-14));
}

TEST_CASE("triangle bridge matches its published adjacency") {
  const Graph g = graph::gen_triangle_bridge();
  REQUIRE(g.node_count() == 6);
  const std::vector<std::vector<int>> want = {{1, 2}, {0, 2},    {0, 1, 3},
                                              {2, 4, 5}, {3, 5}, {3, 4}};
  for (int i = 0; i < 6; ++i) CHECK(g.neighbors(i) == want[i]);
}

TEST_CASE("pendant cycle hangs one leaf off every cycle node") {
  const Graph g = graph::gen_pendant_cycle(5);
  REQUIRE(g.node_count() == 10);
  CHECK(g.edge_count() == 10);
  int leaves = 0, inner = 0;
  for (int i = 0; i < 10; ++i) {
    if (g.degree(i) == 1) ++leaves;
    if (g.degree(i) == 3) ++inner;
  }
  CHECK(leaves == 5);
  CHECK(inner == 5);
  CHECK(g.is_connected());
}

TEST_CASE("edge edits are immutable snapshots that round-trip") {
  const Graph g = graph::gen_cycle(5);
  const Graph g2 = g.with_edge(0, 2);
  CHECK(!g.has_edge(0, 2));
  CHECK(g2.has_edge(0, 2));
  CHECK(g2.generation() == g.generation() + 1);
  const Graph g3 = g2.without_edge(0, 2);
  CHECK(max_diff(graph::laplacian_matrix(g3), graph::laplacian_matrix(g)) ==
        0.0);
}

TEST_CASE("edge events carry the signed incidence column") {
  graph::EdgeEvent ev;
  ev.kind = graph::EdgeEvent::Kind::Remove;
  ev.a = 1;
  ev.b = 3;
  CHECK(ev.rho() == -1.0);
  const auto v = ev.incidence_vector(5);
  CHECK(v[1] == 1.0);
  CHECK(v[3] == -1.0);
  CHECK(v[0] == 0.0);
  CHECK(v[2] == 0.0);
  CHECK(v[4] == 0.0);
}

TEST_CASE("node sequence protocol visits every edge exactly once") {
  auto check_cover = [](const Graph& g, int start) {
    const auto visits = graph::node_sequence_protocol(g, start);
    REQUIRE(static_cast<int>(visits.size()) == g.edge_count());
    std::set<std::pair<int, int>> seen;
    for (const auto& v : visits) {
      const std::pair<int, int> e{std::min(v.head, v.tail),
                                  std::max(v.head, v.tail)};
      CHECK(g.has_edge(v.head, v.tail));
      CHECK(!seen.count(e));
      seen.insert(e);
    }
  };
  check_cover(graph::gen_path(2), 0);
  check_cover(graph::gen_complete(3), 1);
  check_cover(graph::gen_d_regular(50, 4, 2), 0);

  Graph split(4, {{0, 1}, {2, 3}});
  CHECK_THROWS_AS(graph::node_sequence_protocol(split, 0), Disconnected);
}

TEST_CASE("d-regular generator enforces feasibility and determinism") {
  CHECK_THROWS_AS(graph::gen_d_regular(5, 3, 1), InfeasibleParameters);
  CHECK_THROWS_AS(graph::gen_d_regular(4, 5, 1), InfeasibleParameters);
  const Graph a = graph::gen_d_regular(6, 2, 9);
  for (int i = 0; i < 6; ++i) CHECK(a.degree(i) == 2);
  CHECK(a.is_connected());
  const Graph b = graph::gen_d_regular(6, 2, 9);
  CHECK(a.edges() == b.edges());
}

TEST_CASE("small-world generator keeps size, edge count and connectivity") {
  const Graph g = graph::gen_small_world(80, 6, 0.1, 3);
  CHECK(g.node_count() == 80);
  CHECK(g.edge_count() == 240);
  CHECK(g.is_connected());
  const Graph h = graph::gen_small_world(80, 6, 0.1, 3);
  CHECK(g.edges() == h.edges());
}

TEST_CASE("rank-two vectors reproduce the two-node path by hand") {
  const auto l = graph::laplacian_matrix(graph::gen_path(2));
  const auto v0 = graph::rank_two_laplacian_vectors(l, 0);
  CHECK(v0.plus == std::vector<double>{1.0, -1.0});
  CHECK(v0.minus == std::vector<double>{0.0, -1.0});
  const auto v1 = graph::rank_two_laplacian_vectors(l, 1);
  CHECK(v1.plus == std::vector<double>{0.0, 1.0});
  CHECK(v1.minus == std::vector<double>{0.0, 0.0});
}

TEST_CASE("rank-two contributions telescope to the full Laplacian") {
  for (const Graph& g : {graph::gen_small_world(12, 4, 0.2, 8),
                         graph::gen_triangle_bridge()}) {
    const int n = g.node_count();
    const auto l = graph::laplacian_matrix(g);
    Matrix<double> acc(n, n);
    for (int t = 0; t < n; ++t) {
      const auto v = graph::rank_two_laplacian_vectors(l, t);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          acc(i, j) += v.plus[i] * v.plus[j] - v.minus[i] * v.minus[j];
      // Off-border cancellation: entries beyond index t untouched so far.
      for (int i = t + 1; i < n; ++i)
        for (int j = t + 1; j < n; ++j)
          CHECK(std::abs(acc(i, j)) < 1e-12);
    }
    CHECK(max_diff(acc, l) < 1e-12);
  }
}

TEST_CASE("join and leave schedules mirror the incident edges") {
  const Graph g = graph::gen_path(4);
  const auto joins = graph::node_join_events(4, {3, 1});
  REQUIRE(joins.size() == 2);
  for (const auto& ev : joins) CHECK(ev.kind == graph::EdgeEvent::Kind::Add);
  CHECK(std::pair<int, int>(std::min(joins[0].a, joins[0].b),
                            std::max(joins[0].a, joins[0].b)) ==
        std::pair<int, int>(1, 4));
  CHECK(std::pair<int, int>(std::min(joins[1].a, joins[1].b),
                            std::max(joins[1].a, joins[1].b)) ==
        std::pair<int, int>(3, 4));

  const auto leaves = graph::node_leave_events(g, 1);
  REQUIRE(leaves.size() == 2);  // edges (0,1) and (1,2)
  for (const auto& ev : leaves)
    CHECK(ev.kind == graph::EdgeEvent::Kind::Remove);
}

TEST_CASE("one-hop tables reconstruct a failed node's edges") {
  const Graph g = graph::gen_triangle_bridge();
  const auto table = graph::build_one_hop_table(g);
  const auto evs = graph::node_failure_events(table, 2);
  std::set<std::pair<int, int>> got;
  for (const auto& ev : evs) {
    CHECK(ev.kind == graph::EdgeEvent::Kind::Remove);
    got.insert({std::min(ev.a, ev.b), std::max(ev.a, ev.b)});
  }
  CHECK(got == std::set<std::pair<int, int>>{{0, 2}, {1, 2}, {2, 3}});
}

TEST_CASE("random edge events stay simple and connected") {
  Graph g = graph::gen_d_regular(20, 4, 6);
  const auto evs = graph::random_connected_edge_events(g, 25, 17);
  CHECK(evs.size() == 25);
  for (const auto& ev : evs) {
    if (ev.kind == graph::EdgeEvent::Kind::Add) {
      CHECK(!g.has_edge(ev.a, ev.b));
      g = g.with_edge(ev.a, ev.b);
    } else {
      CHECK(g.has_edge(ev.a, ev.b));
      g = g.without_edge(ev.a, ev.b);
    }
    CHECK(g.is_connected());
  }
}

TEST_CASE("serialization round-trips the edge set") {
  const Graph g = graph::gen_small_world(15, 4, 0.3, 2);
  const Graph back = graph::parse_graph(graph::serialize_graph(g));
  CHECK(back.node_count() == g.node_count());
  CHECK(back.edges() == g.edges());
}

}  // TEST_SUITE
