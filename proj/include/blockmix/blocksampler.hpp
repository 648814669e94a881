#ifndef BLOCKMIX_BLOCKSAMPLER_HPP
#define BLOCKMIX_BLOCKSAMPLER_HPP

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "blockmix/graph.hpp"
#include "blockmix/partition.hpp"
#include "blockmix/rng.hpp"

namespace blockmix {

using BigCount = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Per-vertex allowed colors over [k], indexed by position in the block.
struct ColorLists {
  int k = 0;
  std::vector<char> allowed;  // size() * k, row-major

  static ColorLists full(std::size_t size, int k);
  std::size_t size() const { return k > 0 ? allowed.size() / static_cast<std::size_t>(k) : 0; }
  bool allows(std::size_t i, int c) const { return allowed[i * static_cast<std::size_t>(k) + static_cast<std::size_t>(c)] != 0; }
  void set(std::size_t i, int c, bool on) { allowed[i * static_cast<std::size_t>(k) + static_cast<std::size_t>(c)] = on ? 1 : 0; }
  void pin(std::size_t i, int c);  // restrict vertex i to {c}
  std::size_t list_size(std::size_t i) const;
};

// L(u) = [k] minus the colors of u's neighbors outside the block. `colors` is a
// full-graph coloring; only entries of outside neighbors are read.
ColorLists boundary_lists(const Graph& g, const Block& b, const std::vector<int>& colors, int k);

// Spanning structure of a block: local adjacency over positions in b.vertices,
// minus the lexicographically smallest cycle edge for unicyclic blocks.
struct BlockTree {
  std::vector<std::vector<std::uint32_t>> adj;
  std::optional<std::pair<std::uint32_t, std::uint32_t>> cut;  // local (a, b), a < b

  static BlockTree of(const Graph& g, const Block& b);
  std::size_t size() const { return adj.size(); }
};

BigCount count_list_colorings(const Graph& g, const Block& b, const ColorLists& lists);
BigCount count_unicyclic(const Graph& g, const Block& b, const ColorLists& lists);
// Dispatch on kind.
BigCount count_block_colorings(const Graph& g, const Block& b, const ColorLists& lists);

// Counts against a prebuilt structure; handles the cut edge when present.
BigCount count_colorings(const BlockTree& t, const ColorLists& lists);

enum class SampleMode {
  automatic,  // exact for small blocks, fast otherwise
  exact,      // big-integer tables, exact uniform draws
  fast        // normalized double tables
};

// Blocks up to this size sample exactly under SampleMode::automatic.
inline constexpr std::size_t kExactSampleLimit = 128;

// Uniform proper list coloring; returns colors by block position. Throws if none exists.
std::vector<int> sample_list_coloring(const BlockTree& t, const ColorLists& lists, Rng& rng,
                                      SampleMode mode = SampleMode::automatic);

// Resamples the block inside `colors` given the colors of its outer boundary.
void sample_block_coloring(const Graph& g, const Block& b, std::vector<int>& colors, int k,
                           Rng& rng, SampleMode mode = SampleMode::automatic);

// Exact Pr[Z(v) = c | boundary] for every c, v given as a block position.
std::vector<Rational> marginal_exact(const BlockTree& t, const ColorLists& lists, std::size_t v);
double marginal(const Graph& g, const Block& b, const std::vector<int>& colors, int k, Vertex v,
                int c);

// Same in double precision through normalized tables; used by the coupling.
std::vector<double> marginal_fast(const BlockTree& t, const ColorLists& lists, std::size_t v);

// Normalized subtree tables for a tree rooted at `root` (cut edge ignored):
// q[i*k + c] = Pr[X(i) = c] for the subtree below i, with i's parent removed.
struct SubtreeTables {
  std::vector<std::uint32_t> order;   // BFS order from root
  std::vector<std::int64_t> parent;   // -1 at the root
  std::vector<double> q;
  double log_count = 0.0;             // ln of the total count, -inf if infeasible
};
SubtreeTables subtree_tables(const BlockTree& t, const ColorLists& lists, std::uint32_t root);

// Draws from weights w (nonnegative, positive sum).
int sample_weighted(const std::vector<double>& w, Rng& rng);
// Exact draw proportional to big-integer weights.
int sample_weighted(const std::vector<BigCount>& w, Rng& rng);
// Uniform big integer in [0, n).
BigCount uniform_big_below(Rng& rng, const BigCount& n);

// --- hard-core -------------------------------------------------------------------

// blocked[i]: block position i has an occupied neighbor outside the block.
std::vector<char> hardcore_blocked(const Graph& g, const Block& b,
                                   const std::vector<char>& occupied);

// ln Z of the block given the blocked flags.
double hardcore_log_partition(const BlockTree& t, const std::vector<char>& blocked, double lambda);

// Exact sample proportional to lambda^{|I|}; returns occupancy by block position.
std::vector<char> sample_hardcore(const BlockTree& t, const std::vector<char>& blocked,
                                  double lambda, Rng& rng);

void sample_block_hardcore(const Graph& g, const Block& b, std::vector<char>& occupied,
                           double lambda, Rng& rng);

}  // namespace blockmix

#endif  // BLOCKMIX_BLOCKSAMPLER_HPP
