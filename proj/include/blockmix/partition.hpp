#ifndef BLOCKMIX_PARTITION_HPP
#define BLOCKMIX_PARTITION_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "blockmix/graph.hpp"
#include "blockmix/params.hpp"

namespace blockmix {

// `irregular` only arises from hand-built groups that are disconnected or carry
// two or more extra edges; build_partition never emits it and samplers reject it.
enum class BlockKind { singleton, tree, unicyclic, irregular };

std::string to_string(BlockKind kind);
BlockKind block_kind_from_string(const std::string& s);

struct Block {
  std::vector<Vertex> vertices;  // sorted ascending
  BlockKind kind = BlockKind::singleton;
  Vertex root = 0;                     // smallest vertex
  std::vector<Vertex> cycle;           // unicyclic only, in cyclic order from its smallest vertex
  std::vector<Vertex> inner_boundary;  // block vertices with a neighbor outside
  std::vector<Vertex> outer_boundary;  // outside vertices with a neighbor inside
  std::vector<std::uint32_t> deg_in;   // aligned with `vertices`
  std::vector<std::uint32_t> deg_out;
  // Neighbors of vertices[0], vertices[1], ... in graph order: the neighbor's
  // position in the block, or kOutside. Empty if not derived.
  std::vector<std::uint32_t> nbr_pos;
  static constexpr std::uint32_t kOutside = 0xffffffffu;

  std::size_t size() const { return vertices.size(); }
  bool contains(Vertex v) const;
  // Position of v in `vertices`; v must belong to the block.
  std::size_t index_of(Vertex v) const;
};

struct PartitionBuildInfo {
  int horizon = 0;                 // breakpoint horizon used
  std::size_t cycle_len_cap = 0;   // short-cycle search limit
  std::size_t breakpoints = 0;
  std::size_t short_cycles = 0;
  std::size_t cycle_blocks_kept = 0;
  std::size_t cycle_blocks_overlapping = 0;
  std::size_t dissolved_cond1 = 0;  // recipe blocks that were not tree/unicyclic
  std::size_t dissolved_cond2b = 0;
  std::size_t dissolved_cond3 = 0;
  std::size_t dissolved_vertices = 0;
};

struct BlockPartition {
  std::vector<Block> blocks;
  std::vector<std::uint32_t> owner;     // vertex -> block index
  std::vector<Vertex> boundary;         // union of inner boundaries, sorted
  std::vector<std::uint32_t> deg_in;    // per vertex, inside its own block
  std::vector<std::uint32_t> deg_out;   // per vertex, outside its own block
  std::vector<char> on_block_cycle;     // per vertex
  PartitionBuildInfo info;

  std::size_t num_blocks() const { return blocks.size(); }
  const Block& block_of(Vertex v) const { return blocks[owner[v]]; }
  bool is_boundary(Vertex v) const { return deg_out[v] > 0; }
};

// Derives every structural field from vertex groups. Throws if the groups do not
// partition V, or if a group is irregular and allow_irregular is false.
BlockPartition make_partition(const Graph& g, std::vector<std::vector<Vertex>> groups,
                              bool allow_irregular = false);
BlockPartition singleton_partition(const Graph& g);
BlockPartition whole_partition(const Graph& g);

// --- weights and breakpoints -------------------------------------------------

// ln W(u): W = 1/(1+eps/10) for deg <= dhat, d^15 deg otherwise.
double log_vertex_weight(std::size_t deg, const Params& p);
double vertex_weight(Vertex v, const Graph& g, const Params& p);

// ln of the product of vertex weights along a simple path. Throws on non-paths.
double path_log_weight(std::span<const Vertex> path, const Graph& g, const Params& p);

// True iff every walk of length <= r from v has all prefix weights <= 1.
// Walks dominate simple paths, so a true answer certifies the path condition.
bool is_breakpoint(Vertex v, const Graph& g, const Params& p, int r);

// Breakpoint flag for every vertex.
std::vector<char> breakpoints(const Graph& g, const Params& p, int r);

// --- construction -------------------------------------------------------------

struct PartitionOptions {
  int horizon = -1;         // < 0: use Params::r
  bool strict = false;      // throw on overlapping cycle blocks or non-tree blocks
  std::size_t cycle_cap = 0;  // 0: ceil(4 ln n / (ln d)^5) clamped to [3, 12]
};

// ceil(4 ln n / (ln d)^5), at least 3.
inline constexpr std::size_t kMaxDefaultCycleCap = 12;
std::size_t default_cycle_cap(std::size_t n, double d);

// Distance a cycle must keep from the outer boundary:
// ceil(max{2 ln(|C| Delta), (ln ln d / ln d)(|C| + ln Delta)}), at least 1.
int cycle_radius(std::size_t cycle_len, std::size_t max_deg, double d);

// Cycle-seeded blocks, influence-path closures of non-breakpoints, breakpoint
// singletons. Without `strict`, recipe blocks that break Definition-style
// conditions 1, 2b or 3 are dissolved into singletons and counted in `info`.
BlockPartition build_partition(const Graph& g, const Params& p,
                               const PartitionOptions& opts = {});

// --- validation -----------------------------------------------------------------

struct ConditionTally {
  std::size_t checked = 0;
  std::size_t violations = 0;
  std::vector<std::pair<std::uint32_t, Vertex>> witnesses;  // (block, vertex), capped

  void record(bool ok, std::uint32_t block, Vertex v);
  double rate() const {
    return checked == 0 ? 0.0 : static_cast<double>(violations) / static_cast<double>(checked);
  }
};

struct ValidationReport {
  ConditionTally cond1;   // tree with at most one extra edge
  ConditionTally cond2a;  // outer boundary vertex is an r-breakpoint, r > max{diam, lnln n}
  ConditionTally cond2b;  // exactly one neighbor inside
  ConditionTally cond2c;  // far from the block cycle
  ConditionTally cond3;   // outer boundary vertex on no short cycle
  ConditionTally growth;  // sphere sizes around breakpoints
  std::size_t max_block_size = 0;
  std::size_t multi_vertex_blocks = 0;
  std::size_t boundary_incidences = 0;  // (block, outer-boundary vertex) pairs checked
  std::size_t cond3_cycle_cap = 0;
  bool cond3_unchecked = false;  // d^2 exceeds the cycle search limit
  bool boundary_sets_agree = true;
  int loglog_horizon = 0;

  bool structural_ok() const {
    return cond1.violations == 0 && cond2b.violations == 0 && cond3.violations == 0;
  }
};

ValidationReport validate_partition(const Graph& g, const BlockPartition& part, const Params& p,
                                    std::size_t witness_cap = 100);

// Diameter of the subgraph induced by a block.
std::size_t block_diameter(const Graph& g, const Block& b);

// --- path density -----------------------------------------------------------------

// 450 * sum over the path of (ln deg(u) + deg(u)/k).
double path_density_term(double deg, int k);
double path_density(std::span<const Vertex> path, const Graph& g, int k);

struct PathDensityReport {
  std::vector<double> values;  // J(P) for every examined path
  double max = 0.0;
  std::vector<std::size_t> histogram;  // counts per bin of width `bin_width`
  double bin_width = 100.0;
};

// J(P) over paths inside each block from a high-degree vertex, or from the block
// cycle, to each inner-boundary vertex (shortest paths within the block).
PathDensityReport path_density(const Graph& g, const BlockPartition& part, const Params& p,
                               double bin_width = 100.0);

}  // namespace blockmix

#endif  // BLOCKMIX_PARTITION_HPP
