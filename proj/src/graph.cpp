#include "blockmix/graph.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <queue>
#include <string>

#include "blockmix/rng.hpp"

namespace blockmix {

Graph Graph::from_edges(std::size_t n, std::span<const Edge> edges) {
  if (n > std::numeric_limits<Vertex>::max()) throw Error("graph too large");
  std::vector<std::size_t> deg(n, 0);
  for (auto [u, v] : edges) {
    if (u >= n || v >= n) throw Error("edge endpoint out of range");
    if (u == v) throw Error("self-loop at vertex " + std::to_string(u));
    ++deg[u];
    ++deg[v];
  }
  Graph g;
  g.offsets_.assign(n + 1, 0);
  for (std::size_t v = 0; v < n; ++v) g.offsets_[v + 1] = g.offsets_[v] + deg[v];
  g.targets_.resize(g.offsets_[n]);
  std::vector<std::size_t> fill(g.offsets_.begin(), g.offsets_.end() - 1);
  for (auto [u, v] : edges) {
    g.targets_[fill[u]++] = v;
    g.targets_[fill[v]++] = u;
  }
  for (std::size_t v = 0; v < n; ++v) {
    auto first = g.targets_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[v]);
    auto last = g.targets_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[v + 1]);
    std::sort(first, last);
    if (std::adjacent_find(first, last) != last)
      throw Error("duplicate edge at vertex " + std::to_string(v));
  }
  return g;
}

bool Graph::has_edge(Vertex u, Vertex v) const {
  auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(num_edges());
  for (Vertex u = 0; u < num_vertices(); ++u)
    for (Vertex v : neighbors(u))
      if (u < v) out.emplace_back(u, v);
  return out;
}

Graph gen_gnp(std::size_t n, double d, std::uint64_t seed) {
  if (n == 0) throw Error("gen_gnp: n must be positive");
  if (!(d >= 0.0) || d > static_cast<double>(n))
    throw Error("gen_gnp: need 0 <= d <= n");
  const double p = d / static_cast<double>(n);
  std::vector<Edge> edges;
  if (p >= 1.0) {
    for (Vertex v = 1; v < n; ++v)
      for (Vertex w = 0; w < v; ++w) edges.emplace_back(w, v);
    return Graph::from_edges(n, edges);
  }
  if (p <= 0.0) return Graph::from_edges(n, edges);
  edges.reserve(static_cast<std::size_t>(d * static_cast<double>(n) / 2 * 1.1) + 16);
  Rng rng = derive_rng(seed, 0);
  const double log_q = std::log1p(-p);
  // Batagelj-Brandes skipping over the lower-triangular pair sequence.
  std::int64_t v = 1, w = -1;
  const auto nn = static_cast<std::int64_t>(n);
  while (v < nn) {
    const double r = uniform01(rng);
    w += 1 + static_cast<std::int64_t>(std::floor(std::log1p(-r) / log_q));
    while (w >= v && v < nn) {
      w -= v;
      ++v;
    }
    if (v < nn) edges.emplace_back(static_cast<Vertex>(w), static_cast<Vertex>(v));
  }
  return Graph::from_edges(n, edges);
}

std::size_t max_degree(const Graph& g) {
  std::size_t best = 0;
  for (Vertex v = 0; v < g.num_vertices(); ++v) best = std::max(best, g.degree(v));
  return best;
}

std::vector<int> bfs_distances(const Graph& g, std::span<const Vertex> sources,
                               int max_radius) {
  std::vector<int> dist(g.num_vertices(), -1);
  std::queue<Vertex> q;
  for (Vertex s : sources) {
    if (dist[s] != 0) {
      dist[s] = 0;
      q.push(s);
    }
  }
  while (!q.empty()) {
    Vertex u = q.front();
    q.pop();
    if (max_radius >= 0 && dist[u] >= max_radius) continue;
    for (Vertex w : g.neighbors(u)) {
      if (dist[w] < 0) {
        dist[w] = dist[u] + 1;
        q.push(w);
      }
    }
  }
  return dist;
}

std::vector<Vertex> ball(const Graph& g, Vertex w, std::size_t radius) {
  if (w >= g.num_vertices()) throw Error("ball: vertex out of range");
  std::vector<Vertex> out{w};
  std::vector<Vertex> frontier{w};
  std::vector<char> seen(g.num_vertices(), 0);
  seen[w] = 1;
  for (std::size_t r = 0; r < radius && !frontier.empty(); ++r) {
    std::vector<Vertex> next;
    for (Vertex u : frontier)
      for (Vertex x : g.neighbors(u))
        if (!seen[x]) {
          seen[x] = 1;
          next.push_back(x);
          out.push_back(x);
        }
    frontier.swap(next);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t girth(const Graph& g) {
  const std::size_t n = g.num_vertices();
  std::size_t best = 0;
  std::vector<int> dist(n, -1), parent(n, -1);
  for (Vertex s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), -1);
    std::queue<Vertex> q;
    dist[s] = 0;
    parent[s] = -1;
    q.push(s);
    while (!q.empty()) {
      Vertex u = q.front();
      q.pop();
      if (best && static_cast<std::size_t>(2 * dist[u] + 1) >= best) break;
      for (Vertex w : g.neighbors(u)) {
        if (dist[w] < 0) {
          dist[w] = dist[u] + 1;
          parent[w] = static_cast<int>(u);
          q.push(w);
        } else if (parent[u] != static_cast<int>(w) && parent[w] != static_cast<int>(u)) {
          const auto len = static_cast<std::size_t>(dist[u] + dist[w] + 1);
          if (best == 0 || len < best) best = len;
        }
      }
    }
  }
  return best;
}

CycleList short_cycles(const Graph& g, std::size_t max_len, std::size_t cycle_cap) {
  if (max_len < 3) throw Error("short_cycles: max_len must be >= 3");
  CycleList out;
  out.max_len = max_len;
  const std::size_t n = g.num_vertices();
  const int half = static_cast<int>(max_len / 2);
  std::vector<int> dist(n, -1);
  std::vector<Vertex> touched;
  std::vector<char> on_path(n, 0);
  std::vector<Vertex> path;

  // The cycle's smallest vertex s roots the search. Every vertex of such a cycle
  // lies within max_len/2 of s inside the subgraph of vertices >= s, which bounds
  // how far the DFS may wander before it must turn back.
  for (Vertex s = 0; s < n; ++s) {
    for (Vertex v : touched) dist[v] = -1;
    touched.clear();
    std::queue<Vertex> q;
    dist[s] = 0;
    touched.push_back(s);
    q.push(s);
    while (!q.empty()) {
      Vertex u = q.front();
      q.pop();
      if (dist[u] >= half) continue;
      for (Vertex w : g.neighbors(u)) {
        if (w > s && dist[w] < 0) {
          dist[w] = dist[u] + 1;
          touched.push_back(w);
          q.push(w);
        }
      }
    }

    path.assign(1, s);
    on_path[s] = 1;
    // Iterative DFS: stack of (vertex, next neighbor index).
    std::vector<std::pair<Vertex, std::size_t>> stack{{s, 0}};
    while (!stack.empty()) {
      auto& [u, idx] = stack.back();
      auto nb = g.neighbors(u);
      if (idx >= nb.size()) {
        on_path[u] = 0;
        path.pop_back();
        stack.pop_back();
        continue;
      }
      Vertex w = nb[idx++];
      const std::size_t depth = path.size();  // edges used so far + 1
      if (w == s) {
        if (depth >= 3 && path[1] < path.back()) {
          out.cycles.push_back(path);
          if (out.cycles.size() > cycle_cap)
            throw Error("short_cycles: more than " + std::to_string(cycle_cap) + " cycles");
        }
        continue;
      }
      if (w < s || on_path[w] || dist[w] < 0) continue;
      // After stepping to w we have used `depth` edges; returning needs dist[w] more.
      if (depth + static_cast<std::size_t>(dist[w]) > max_len) continue;
      if (depth + 1 > max_len) continue;
      on_path[w] = 1;
      path.push_back(w);
      stack.emplace_back(w, 0);
    }
  }
  return out;
}

Graph read_graph(std::istream& in) {
  std::size_t n = 0, m = 0;
  if (!(in >> n >> m)) throw Error("graph file: missing header");
  std::vector<Edge> edges;
  edges.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    long long u = 0, v = 0;
    if (!(in >> u >> v)) throw Error("graph file: truncated edge list");
    if (u < 0 || v < 0) throw Error("graph file: negative vertex id");
    if (u >= v) throw Error("graph file: edges must satisfy u < v");
    edges.emplace_back(static_cast<Vertex>(u), static_cast<Vertex>(v));
  }
  return Graph::from_edges(n, edges);
}

void write_graph(std::ostream& out, const Graph& g) {
  out << g.num_vertices() << ' ' << g.num_edges() << '\n';
  for (auto [u, v] : g.edges()) out << u << ' ' << v << '\n';
}

namespace families {

Graph path(std::size_t n) {
  std::vector<Edge> e;
  for (Vertex v = 1; v < n; ++v) e.emplace_back(v - 1, v);
  return Graph::from_edges(n, e);
}

Graph cycle(std::size_t n) {
  if (n < 3) throw Error("cycle needs n >= 3");
  std::vector<Edge> e;
  for (Vertex v = 1; v < n; ++v) e.emplace_back(v - 1, v);
  e.emplace_back(0, static_cast<Vertex>(n - 1));
  return Graph::from_edges(n, e);
}

Graph complete(std::size_t n) {
  std::vector<Edge> e;
  for (Vertex v = 1; v < n; ++v)
    for (Vertex u = 0; u < v; ++u) e.emplace_back(u, v);
  return Graph::from_edges(n, e);
}

Graph star(std::size_t leaves) {
  std::vector<Edge> e;
  for (Vertex v = 1; v <= leaves; ++v) e.emplace_back(0, v);
  return Graph::from_edges(leaves + 1, e);
}

Graph empty(std::size_t n) { return Graph::from_edges(n, {}); }

Graph petersen() {
  std::vector<Edge> e;
  for (Vertex i = 0; i < 5; ++i) {
    e.emplace_back(i, (i + 1) % 5);          // outer 5-cycle
    e.emplace_back(i, i + 5);                // spokes
    e.emplace_back(i + 5, (i + 2) % 5 + 5);  // inner pentagram
  }
  for (auto& [u, v] : e)
    if (u > v) std::swap(u, v);
  return Graph::from_edges(10, e);
}

Graph heawood() {
  // LCF notation [5,-5]^7.
  std::vector<Edge> e;
  for (Vertex i = 0; i < 14; ++i) e.emplace_back(i, (i + 1) % 14);
  for (Vertex i = 0; i < 14; i += 2) e.emplace_back(i, (i + 5) % 14);
  for (auto& [u, v] : e)
    if (u > v) std::swap(u, v);
  return Graph::from_edges(14, e);
}

}  // namespace families

}  // namespace blockmix
