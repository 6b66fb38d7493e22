#include <algorithm>
#include <cmath>
#include <queue>
#include <random>
#include <set>
#include <sstream>

#include "netspec/graph.hpp"

namespace netspec::graph {

Graph::Graph(int n, std::vector<std::pair<int, int>> edges, int generation)
    : n_(n), generation_(generation), edges_(std::move(edges)) {
  if (n < 0) throw InfeasibleParameters("graph: negative node count");
  for (auto& e : edges_) {
    if (e.first > e.second) std::swap(e.first, e.second);
    if (e.first == e.second || e.first < 0 || e.second >= n_)
      throw InfeasibleParameters("graph: bad edge endpoints");
  }
  std::sort(edges_.begin(), edges_.end());
  if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end())
    throw InfeasibleParameters("graph: duplicate edge");
  adj_.assign(n_, {});
  for (const auto& e : edges_) {
    adj_[e.first].push_back(e.second);
    adj_[e.second].push_back(e.first);
  }
  for (auto& l : adj_) std::sort(l.begin(), l.end());
}

int Graph::max_degree() const {
  int d = 0;
  for (const auto& l : adj_) d = std::max(d, static_cast<int>(l.size()));
  return d;
}

bool Graph::has_edge(int a, int b) const {
  if (a > b) std::swap(a, b);
  return std::binary_search(edges_.begin(), edges_.end(), std::make_pair(a, b));
}

bool Graph::is_connected() const {
  if (n_ <= 1) return true;
  std::vector<bool> seen(n_, false);
  std::queue<int> q;
  q.push(0);
  seen[0] = true;
  int count = 1;
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    for (int v : adj_[u])
      if (!seen[v]) {
        seen[v] = true;
        ++count;
        q.push(v);
      }
  }
  return count == n_;
}

Graph Graph::with_edge(int a, int b) const {
  if (has_edge(a, b)) throw InfeasibleParameters("with_edge: edge exists");
  auto e = edges_;
  e.emplace_back(std::min(a, b), std::max(a, b));
  return Graph(n_, std::move(e), generation_ + 1);
}

Graph Graph::without_edge(int a, int b) const {
  if (a > b) std::swap(a, b);
  auto e = edges_;
  auto it = std::find(e.begin(), e.end(), std::make_pair(a, b));
  if (it == e.end()) throw InfeasibleParameters("without_edge: no such edge");
  e.erase(it);
  return Graph(n_, std::move(e), generation_ + 1);
}

Graph Graph::with_node() const {
  return Graph(n_ + 1, edges_, generation_ + 1);
}

Matrix<double> adjacency_matrix(const Graph& g) {
  const int n = g.node_count();
  Matrix<double> a(n, n);
  for (const auto& e : g.edges()) {
    a(e.first, e.second) = 1.0;
    a(e.second, e.first) = 1.0;
  }
  return a;
}

Matrix<double> laplacian_matrix(const Graph& g) {
  const int n = g.node_count();
  Matrix<double> l(n, n);
  for (int i = 0; i < n; ++i) l(i, i) = g.degree(i);
  for (const auto& e : g.edges()) {
    l(e.first, e.second) = -1.0;
    l(e.second, e.first) = -1.0;
  }
  return l;
}

Matrix<double> incidence_matrix(const Graph& g) {
  const int n = g.node_count();
  const auto& edges = g.edges();
  Matrix<double> b(n, edges.size());
  for (std::size_t c = 0; c < edges.size(); ++c) {
    b(edges[c].first, c) = 1.0;
    b(edges[c].second, c) = -1.0;
  }
  return b;
}

Matrix<double> normalized_adjacency(const Graph& g) {
  const int n = g.node_count();
  for (int i = 0; i < n; ++i)
    if (g.degree(i) == 0)
      throw IsolatedNode("normalized_adjacency: degree-zero node " +
                         std::to_string(i));
  Matrix<double> a(n, n);
  for (const auto& e : g.edges()) {
    const double w =
        1.0 / std::sqrt(static_cast<double>(g.degree(e.first)) *
                        static_cast<double>(g.degree(e.second)));
    a(e.first, e.second) = w;
    a(e.second, e.first) = w;
  }
  return a;
}

Matrix<double> normalized_laplacian(const Graph& g) {
  Matrix<double> l = normalized_adjacency(g);
  const int n = g.node_count();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) l(i, j) = (i == j ? 1.0 : 0.0) - l(i, j);
  return l;
}

std::vector<double> EdgeEvent::incidence_vector(int n) const {
  std::vector<double> v(n, 0.0);
  v[a] = 1.0;
  v[b] = -1.0;
  return v;
}

std::vector<EdgeVisit> node_sequence_protocol(const Graph& g, int start) {
  const int n = g.node_count();
  if (start < 0 || start >= n)
    throw InfeasibleParameters("node_sequence_protocol: bad start node");
  if (!g.is_connected())
    throw Disconnected("node_sequence_protocol: graph not connected");

  std::set<std::pair<int, int>> visited;
  auto edge_key = [](int a, int b) {
    return std::make_pair(std::min(a, b), std::max(a, b));
  };
  auto uncovered_degree = [&](int u) {
    int c = 0;
    for (int v : g.neighbors(u))
      if (!visited.count(edge_key(u, v))) ++c;
    return c;
  };

  std::vector<EdgeVisit> order;
  std::vector<bool> been_head(n, false);
  std::vector<int> stack{start};
  been_head[start] = true;
  while (!stack.empty()) {
    const int h = stack.back();
    for (int u : g.neighbors(h)) {
      const auto key = edge_key(h, u);
      if (!visited.count(key)) {
        visited.insert(key);
        order.push_back({h, u});
      }
    }
    int next = -1;
    for (int u : g.neighbors(h)) {
      if (!been_head[u] && uncovered_degree(u) > 0) {
        next = u;
        break;
      }
    }
    if (next >= 0) {
      been_head[next] = true;
      stack.push_back(next);
    } else {
      stack.pop_back();
    }
  }
  return order;
}

Graph gen_path(int n) {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return Graph(n, std::move(e));
}

Graph gen_cycle(int n) {
  if (n < 3) throw InfeasibleParameters("gen_cycle: need n >= 3");
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  e.emplace_back(0, n - 1);
  return Graph(n, std::move(e));
}

Graph gen_complete(int n) {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) e.emplace_back(i, j);
  return Graph(n, std::move(e));
}

Graph gen_pendant_cycle(int cycle_len) {
  if (cycle_len < 3) throw InfeasibleParameters("gen_pendant_cycle: need >= 3");
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < cycle_len; ++i) {
    e.emplace_back(i, (i + 1) % cycle_len);
    e.emplace_back(i, cycle_len + i);
  }
  return Graph(2 * cycle_len, std::move(e));
}

Graph gen_triangle_bridge() {
  return Graph(6, {{0, 1}, {0, 2}, {1, 2}, {2, 3}, {3, 4}, {3, 5}, {4, 5}});
}

Graph gen_d_regular(int n, int d, std::uint64_t seed) {
  if (d < 1 || d >= n || (n * d) % 2 != 0)
    throw InfeasibleParameters("gen_d_regular: infeasible n, d");
  for (int attempt = 0; attempt < 400; ++attempt) {
    std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ULL + attempt);
    std::vector<int> stubs;
    stubs.reserve(n * d);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < d; ++j) stubs.push_back(i);
    std::shuffle(stubs.begin(), stubs.end(), rng);
    std::set<std::pair<int, int>> edges;
    bool ok = true;
    for (std::size_t i = 0; i < stubs.size(); i += 2) {
      const int a = std::min(stubs[i], stubs[i + 1]);
      const int b = std::max(stubs[i], stubs[i + 1]);
      if (a == b || !edges.emplace(a, b).second) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    Graph g(n, {edges.begin(), edges.end()});
    if (g.is_connected()) return g;
  }
  throw ConnectivityRetryExhausted("gen_d_regular: retry budget exhausted");
}

Graph gen_small_world(int n, int k, double rewire_p, std::uint64_t seed) {
  if (k < 2 || k % 2 != 0 || k >= n)
    throw InfeasibleParameters("gen_small_world: need even k in [2, n)");
  if (rewire_p < 0.0 || rewire_p > 1.0)
    throw InfeasibleParameters("gen_small_world: p outside [0, 1]");
  for (int attempt = 0; attempt < 400; ++attempt) {
    std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ULL + attempt);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::uniform_int_distribution<int> pick(0, n - 1);
    std::set<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i)
      for (int j = 1; j <= k / 2; ++j) {
        const int v = (i + j) % n;
        edges.emplace(std::min(i, v), std::max(i, v));
      }
    std::vector<std::pair<int, int>> lattice(edges.begin(), edges.end());
    for (const auto& e : lattice) {
      if (coin(rng) >= rewire_p) continue;
      // Detach the far endpoint and reconnect it uniformly.
      for (int tries = 0; tries < 64; ++tries) {
        const int v = pick(rng);
        const auto cand = std::make_pair(std::min(e.first, v),
                                         std::max(e.first, v));
        if (v == e.first || edges.count(cand)) continue;
        edges.erase(e);
        edges.insert(cand);
        break;
      }
    }
    Graph g(n, {edges.begin(), edges.end()});
    if (g.is_connected()) return g;
  }
  throw ConnectivityRetryExhausted("gen_small_world: retry budget exhausted");
}

RankTwoVectors rank_two_laplacian_vectors(const Matrix<double>& lap, int t) {
  const int n = static_cast<int>(lap.rows());
  if (t < 0 || t >= n)
    throw InfeasibleParameters("rank_two_laplacian_vectors: bad index");
  const double ltt = lap(t, t);
  if (!(ltt > 0.0))
    throw IsolatedNode("rank_two_laplacian_vectors: zero diagonal entry");
  const double root = std::sqrt(ltt);
  RankTwoVectors out;
  out.plus.assign(n, 0.0);
  out.minus.assign(n, 0.0);
  out.plus[t] = root;
  for (int j = t + 1; j < n; ++j) {
    const double w = lap(j, t) / root;
    out.plus[j] = w;
    out.minus[j] = w;
  }
  return out;
}

std::vector<EdgeEvent> node_join_events(int new_node_id,
                                        const std::vector<int>& neighbors) {
  std::vector<int> targets = neighbors;
  std::sort(targets.begin(), targets.end());
  std::vector<EdgeEvent> events;
  for (int u : targets)
    events.push_back({EdgeEvent::Kind::Add, std::min(u, new_node_id),
                      std::max(u, new_node_id)});
  return events;
}

std::vector<EdgeEvent> node_leave_events(const Graph& g, int node) {
  std::vector<EdgeEvent> events;
  for (int u : g.neighbors(node))
    events.push_back(
        {EdgeEvent::Kind::Remove, std::min(u, node), std::max(u, node)});
  return events;
}

OneHopTable build_one_hop_table(const Graph& g) {
  OneHopTable t;
  t.lists.resize(g.node_count());
  for (int i = 0; i < g.node_count(); ++i) t.lists[i] = g.neighbors(i);
  return t;
}

std::vector<EdgeEvent> node_failure_events(const OneHopTable& table,
                                           int node) {
  if (node < 0 || node >= static_cast<int>(table.lists.size()))
    throw InfeasibleParameters("node_failure_events: bad node");
  std::vector<EdgeEvent> events;
  for (int u : table.lists[node])
    events.push_back(
        {EdgeEvent::Kind::Remove, std::min(u, node), std::max(u, node)});
  return events;
}

std::vector<EdgeEvent> random_connected_edge_events(const Graph& start,
                                                    int count,
                                                    std::uint64_t seed) {
  std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ULL + 17);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  Graph g = start;
  std::vector<EdgeEvent> events;
  const int n = g.node_count();
  auto pick = [&](int m) {
    return static_cast<int>(rng() % static_cast<std::uint64_t>(m));
  };
  for (int i = 0; i < count; ++i) {
    const int max_edges = n * (n - 1) / 2;
    bool want_add = coin(rng) < 0.5;
    if (g.edge_count() == max_edges) want_add = false;

    EdgeEvent ev;
    bool placed = false;
    if (want_add) {
      for (int tries = 0; tries < 1000 && !placed; ++tries) {
        const int a = pick(n), b = pick(n);
        if (a == b || g.has_edge(a, b)) continue;
        ev = {EdgeEvent::Kind::Add, std::min(a, b), std::max(a, b)};
        placed = true;
      }
    }
    if (!placed) {
      for (int tries = 0; tries < 1000 && !placed; ++tries) {
        const auto& e = g.edges()[pick(g.edge_count())];
        if (!g.without_edge(e.first, e.second).is_connected()) continue;
        ev = {EdgeEvent::Kind::Remove, e.first, e.second};
        placed = true;
      }
    }
    if (!placed)
      throw ConnectivityRetryExhausted(
          "random_connected_edge_events: no feasible event");
    g = (ev.kind == EdgeEvent::Kind::Add) ? g.with_edge(ev.a, ev.b)
                                          : g.without_edge(ev.a, ev.b);
    events.push_back(ev);
  }
  return events;
}

std::string serialize_graph(const Graph& g) {
  std::ostringstream out;
  out << "nodes " << g.node_count() << "\n";
  for (const auto& e : g.edges()) out << e.first << " " << e.second << "\n";
  return out.str();
}

Graph parse_graph(const std::string& text) {
  std::istringstream in(text);
  std::string tag;
  int n = 0;
  if (!(in >> tag >> n) || tag != "nodes")
    throw ParseError("parse_graph: missing 'nodes N' header");
  std::vector<std::pair<int, int>> edges;
  int a, b;
  while (in >> a >> b) edges.emplace_back(a, b);
  if (!in.eof() && in.fail()) {
    in.clear();
    std::string rest;
    in >> rest;
    if (!rest.empty()) throw ParseError("parse_graph: trailing junk: " + rest);
  }
  try {
    return Graph(n, std::move(edges));
  } catch (const InfeasibleParameters& e) {
    throw ParseError(std::string("parse_graph: ") + e.what());
  }
}

}  // namespace netspec::graph
