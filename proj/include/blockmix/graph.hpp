#ifndef BLOCKMIX_GRAPH_HPP
#define BLOCKMIX_GRAPH_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

namespace blockmix {

using Vertex = std::uint32_t;
using Edge = std::pair<Vertex, Vertex>;

// Immutable simple undirected graph in compressed adjacency form.
// Neighbor lists are sorted ascending.
class Graph {
 public:
  Graph() = default;

  // Throws on self-loops, duplicate edges or out-of-range endpoints.
  static Graph from_edges(std::size_t n, std::span<const Edge> edges);

  std::size_t num_vertices() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t num_edges() const { return targets_.size() / 2; }

  std::span<const Vertex> neighbors(Vertex v) const {
    return {targets_.data() + offsets_[v], targets_.data() + offsets_[v + 1]};
  }
  std::size_t degree(Vertex v) const { return offsets_[v + 1] - offsets_[v]; }
  bool has_edge(Vertex u, Vertex v) const;

  // Edges (u, v) with u < v, in lexicographic order.
  std::vector<Edge> edges() const;

 private:
  std::vector<std::size_t> offsets_;
  std::vector<Vertex> targets_;
};

// Erdos-Renyi G(n, d/n) by geometric skipping; deterministic per seed.
Graph gen_gnp(std::size_t n, double d, std::uint64_t seed);

std::size_t max_degree(const Graph& g);

// B(w, R): vertices within distance R of w, sorted ascending.
std::vector<Vertex> ball(const Graph& g, Vertex w, std::size_t radius);

// Multi-source BFS distances; unreachable (or beyond max_radius) vertices get -1.
std::vector<int> bfs_distances(const Graph& g, std::span<const Vertex> sources,
                               int max_radius = -1);

// Length of the shortest cycle, or 0 for forests.
std::size_t girth(const Graph& g);

struct CycleList {
  std::vector<std::vector<Vertex>> cycles;  // each starts at its smallest vertex
  std::size_t max_len = 0;
};

// Every simple cycle of length <= max_len, once up to rotation and reflection.
// Throws if more than cycle_cap cycles exist.
CycleList short_cycles(const Graph& g, std::size_t max_len,
                       std::size_t cycle_cap = 1'000'000);

// Text format: "n m" then m lines "u v" with u < v ascending.
Graph read_graph(std::istream& in);
void write_graph(std::ostream& out, const Graph& g);

namespace families {
Graph path(std::size_t n);
Graph cycle(std::size_t n);
Graph complete(std::size_t n);
Graph star(std::size_t leaves);
Graph empty(std::size_t n);
Graph petersen();
Graph heawood();
}  // namespace families

}  // namespace blockmix

#endif  // BLOCKMIX_GRAPH_HPP
