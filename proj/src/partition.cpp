#include "blockmix/partition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <unordered_map>

#include "blockmix/rng.hpp"

namespace blockmix {

std::string to_string(BlockKind kind) {
  switch (kind) {
    case BlockKind::singleton: return "singleton";
    case BlockKind::tree: return "tree";
    case BlockKind::unicyclic: return "unicyclic";
    case BlockKind::irregular: return "irregular";
  }
  return "?";
}

BlockKind block_kind_from_string(const std::string& s) {
  if (s == "singleton") return BlockKind::singleton;
  if (s == "tree") return BlockKind::tree;
  if (s == "unicyclic") return BlockKind::unicyclic;
  if (s == "irregular") return BlockKind::irregular;
  throw Error("unknown block kind '" + s + "'");
}

bool Block::contains(Vertex v) const {
  return std::binary_search(vertices.begin(), vertices.end(), v);
}

std::size_t Block::index_of(Vertex v) const {
  auto it = std::lower_bound(vertices.begin(), vertices.end(), v);
  if (it == vertices.end() || *it != v) throw Error("vertex " + std::to_string(v) + " not in block");
  return static_cast<std::size_t>(it - vertices.begin());
}

namespace {

// Fills kind, cycle, boundaries and degree counts for b.vertices (already sorted),
// given the global owner array and b's own index.
void derive_block(const Graph& g, Block& b, const std::vector<std::uint32_t>& owner,
                  std::uint32_t id) {
  const std::size_t s = b.vertices.size();
  b.root = b.vertices.front();
  b.deg_in.assign(s, 0);
  b.deg_out.assign(s, 0);
  b.inner_boundary.clear();
  b.outer_boundary.clear();
  b.cycle.clear();
  b.nbr_pos.clear();
  std::size_t edges2 = 0;
  for (std::size_t i = 0; i < s; ++i) {
    const Vertex v = b.vertices[i];
    for (Vertex w : g.neighbors(v)) {
      if (owner[w] == id) {
        ++b.deg_in[i];
        b.nbr_pos.push_back(static_cast<std::uint32_t>(b.index_of(w)));
      } else {
        b.nbr_pos.push_back(Block::kOutside);
        ++b.deg_out[i];
        b.outer_boundary.push_back(w);
      }
    }
    edges2 += b.deg_in[i];
    if (b.deg_out[i] > 0) b.inner_boundary.push_back(v);
  }
  std::sort(b.outer_boundary.begin(), b.outer_boundary.end());
  b.outer_boundary.erase(std::unique(b.outer_boundary.begin(), b.outer_boundary.end()),
                         b.outer_boundary.end());
  const std::size_t edges = edges2 / 2;

  if (s == 1) {
    b.kind = BlockKind::singleton;
    return;
  }
  // Connectivity inside the block.
  std::vector<char> seen(s, 0);
  std::vector<std::size_t> stack{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const Vertex v = b.vertices[stack.back()];
    stack.pop_back();
    for (Vertex w : g.neighbors(v)) {
      if (owner[w] != id) continue;
      const std::size_t j = b.index_of(w);
      if (!seen[j]) {
        seen[j] = 1;
        ++reached;
        stack.push_back(j);
      }
    }
  }
  if (reached != s || edges > s) {
    b.kind = BlockKind::irregular;
    return;
  }
  if (edges == s - 1) {
    b.kind = BlockKind::tree;
    return;
  }
  b.kind = BlockKind::unicyclic;
  // Peel leaves; the survivors form the cycle.
  std::vector<std::uint32_t> deg(b.deg_in);
  std::vector<char> removed(s, 0);
  std::vector<std::size_t> leaves;
  for (std::size_t i = 0; i < s; ++i)
    if (deg[i] <= 1) leaves.push_back(i);
  while (!leaves.empty()) {
    const std::size_t i = leaves.back();
    leaves.pop_back();
    if (removed[i]) continue;
    removed[i] = 1;
    for (Vertex w : g.neighbors(b.vertices[i])) {
      if (owner[w] != id) continue;
      const std::size_t j = b.index_of(w);
      if (!removed[j] && --deg[j] == 1) leaves.push_back(j);
    }
  }
  std::size_t start = s;
  for (std::size_t i = 0; i < s; ++i)
    if (!removed[i]) {
      start = i;
      break;
    }
  // Walk the cycle from its smallest vertex towards the smaller of its two cycle neighbors.
  std::size_t prev = s, cur = start;
  do {
    b.cycle.push_back(b.vertices[cur]);
    std::size_t next = s;
    for (Vertex w : g.neighbors(b.vertices[cur])) {
      if (owner[w] != id) continue;
      const std::size_t j = b.index_of(w);
      if (!removed[j] && j != prev) {
        next = j;
        break;
      }
    }
    prev = cur;
    cur = next;
  } while (cur != start && cur != s);
}

}  // namespace

BlockPartition make_partition(const Graph& g, std::vector<std::vector<Vertex>> groups,
                              bool allow_irregular) {
  const std::size_t n = g.num_vertices();
  BlockPartition part;
  constexpr auto none = std::numeric_limits<std::uint32_t>::max();
  part.owner.assign(n, none);
  for (std::size_t b = 0; b < groups.size(); ++b) {
    auto& grp = groups[b];
    if (grp.empty()) throw Error("partition: empty block " + std::to_string(b));
    std::sort(grp.begin(), grp.end());
    for (Vertex v : grp) {
      if (v >= n) throw Error("partition: vertex " + std::to_string(v) + " out of range");
      if (part.owner[v] != none)
        throw Error("partition: vertex " + std::to_string(v) + " in two blocks");
      part.owner[v] = static_cast<std::uint32_t>(b);
    }
  }
  for (std::size_t v = 0; v < n; ++v)
    if (part.owner[v] == none)
      throw Error("partition: vertex " + std::to_string(v) + " not covered");

  part.blocks.resize(groups.size());
  part.deg_in.assign(n, 0);
  part.deg_out.assign(n, 0);
  part.on_block_cycle.assign(n, 0);
  for (std::size_t b = 0; b < groups.size(); ++b) {
    Block& blk = part.blocks[b];
    blk.vertices = std::move(groups[b]);
    derive_block(g, blk, part.owner, static_cast<std::uint32_t>(b));
    if (blk.kind == BlockKind::irregular && !allow_irregular)
      throw Error("partition: block " + std::to_string(b) +
                  " is neither a tree nor unicyclic");
    for (std::size_t i = 0; i < blk.size(); ++i) {
      part.deg_in[blk.vertices[i]] = blk.deg_in[i];
      part.deg_out[blk.vertices[i]] = blk.deg_out[i];
    }
    for (Vertex c : blk.cycle) part.on_block_cycle[c] = 1;
    part.boundary.insert(part.boundary.end(), blk.inner_boundary.begin(),
                         blk.inner_boundary.end());
  }
  std::sort(part.boundary.begin(), part.boundary.end());
  return part;
}

BlockPartition singleton_partition(const Graph& g) {
  std::vector<std::vector<Vertex>> groups(g.num_vertices());
  for (Vertex v = 0; v < g.num_vertices(); ++v) groups[v] = {v};
  return make_partition(g, std::move(groups));
}

BlockPartition whole_partition(const Graph& g) {
  std::vector<Vertex> all(g.num_vertices());
  std::iota(all.begin(), all.end(), Vertex{0});
  return make_partition(g, {all});
}

// ---------------------------------------------------------------------------

double log_vertex_weight(std::size_t deg, const Params& p) {
  if (p.low_degree(deg)) return -std::log1p(p.epsilon / 10.0);
  return 15.0 * std::log(p.d) + std::log(static_cast<double>(deg));
}

double vertex_weight(Vertex v, const Graph& g, const Params& p) {
  return std::exp(log_vertex_weight(g.degree(v), p));
}

double path_log_weight(std::span<const Vertex> path, const Graph& g, const Params& p) {
  if (path.empty()) throw Error("path_weight: empty path");
  std::vector<Vertex> seen(path.begin(), path.end());
  std::sort(seen.begin(), seen.end());
  if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
    throw Error("path_weight: repeated vertex");
  double total = 0.0;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (path[i] >= g.num_vertices()) throw Error("path_weight: vertex out of range");
    if (i > 0 && !g.has_edge(path[i - 1], path[i]))
      throw Error("path_weight: consecutive vertices not adjacent");
    total += log_vertex_weight(g.degree(path[i]), p);
  }
  return total;
}

namespace {

// Walk relaxation shared by is_breakpoint and breakpoints(). `lw` gives ln W per vertex.
class WalkScanner {
 public:
  explicit WalkScanner(std::size_t n)
      : best_(n, -std::numeric_limits<double>::infinity()) {}

  template <class LogWeight>
  bool breakpoint(const Graph& g, Vertex v, int r, LogWeight&& lw) {
    const double w0 = lw(v);
    if (w0 > 0.0) return false;
    cur_.assign(1, {v, w0});
    for (int t = 1; t <= r && !cur_.empty(); ++t) {
      next_.clear();
      for (auto [u, val] : cur_) {
        for (Vertex x : g.neighbors(u)) {
          const double cand = val + lw(x);
          if (cand > 0.0) {
            reset();
            return false;
          }
          if (best_[x] == -std::numeric_limits<double>::infinity()) {
            touched_.push_back(x);
            best_[x] = cand;
          } else if (cand > best_[x]) {
            best_[x] = cand;
          }
        }
      }
      for (Vertex x : touched_) next_.emplace_back(x, best_[x]);
      reset();
      cur_.swap(next_);
    }
    return true;
  }

 private:
  void reset() {
    for (Vertex x : touched_) best_[x] = -std::numeric_limits<double>::infinity();
    touched_.clear();
  }

  std::vector<double> best_;
  std::vector<Vertex> touched_;
  std::vector<std::pair<Vertex, double>> cur_, next_;
};

}  // namespace

bool is_breakpoint(Vertex v, const Graph& g, const Params& p, int r) {
  if (r < 0) throw Error("is_breakpoint: r must be >= 0");
  if (v >= g.num_vertices()) throw Error("is_breakpoint: vertex out of range");
  WalkScanner scan(g.num_vertices());
  return scan.breakpoint(g, v, r, [&](Vertex x) { return log_vertex_weight(g.degree(x), p); });
}

std::vector<char> breakpoints(const Graph& g, const Params& p, int r) {
  if (r < 0) throw Error("breakpoints: r must be >= 0");
  const std::size_t n = g.num_vertices();
  std::vector<double> lw(n);
  for (Vertex v = 0; v < n; ++v) lw[v] = log_vertex_weight(g.degree(v), p);
  WalkScanner scan(n);
  std::vector<char> out(n, 0);
  for (Vertex v = 0; v < n; ++v)
    out[v] = scan.breakpoint(g, v, r, [&](Vertex x) { return lw[x]; }) ? 1 : 0;
  return out;
}

// ---------------------------------------------------------------------------

std::size_t default_cycle_cap(std::size_t n, double d) {
  if (n < 2 || d <= 1.0) return 3;
  const double ld = std::log(d);
  const double raw = 4.0 * std::log(static_cast<double>(n)) / std::pow(ld, 5.0);
  // The formula grows without bound as d -> e; past ~12 the cycle count explodes.
  return std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(raw)), 3, kMaxDefaultCycleCap);
}

int cycle_radius(std::size_t cycle_len, std::size_t max_deg, double d) {
  const double len = static_cast<double>(cycle_len);
  const double delta = static_cast<double>(std::max<std::size_t>(max_deg, 1));
  double a = 2.0 * std::log(len * delta);
  double b = 0.0;
  if (d > std::exp(1.0)) {
    const double ld = std::log(d);
    b = std::log(ld) / ld * (len + std::log(delta));
  }
  const double raw = std::max(a, b);
  return std::max(1, static_cast<int>(std::ceil(raw)));
}

namespace {

// Induced-subgraph checks used while building: edge count and connectivity.
struct GroupShape {
  std::size_t edges = 0;
  bool connected = true;
};

GroupShape group_shape(const Graph& g, const std::vector<Vertex>& grp,
                       std::vector<std::int32_t>& mark, std::int32_t tag) {
  GroupShape sh;
  for (Vertex v : grp) mark[v] = tag;
  std::size_t e2 = 0;
  for (Vertex v : grp)
    for (Vertex w : g.neighbors(v))
      if (mark[w] == tag) ++e2;
  sh.edges = e2 / 2;
  // Connectivity: retag reached vertices with -tag - 2.
  const std::int32_t done = -tag - 2;
  std::vector<Vertex> stack{grp.front()};
  mark[grp.front()] = done;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const Vertex v = stack.back();
    stack.pop_back();
    for (Vertex w : g.neighbors(v))
      if (mark[w] == tag) {
        mark[w] = done;
        ++reached;
        stack.push_back(w);
      }
  }
  sh.connected = reached == grp.size();
  return sh;
}

}  // namespace

BlockPartition build_partition(const Graph& g, const Params& p, const PartitionOptions& opts) {
  p.validate();
  const std::size_t n = g.num_vertices();
  const int r = opts.horizon >= 0 ? opts.horizon : p.r;
  const std::vector<char> bp = breakpoints(g, p, r);
  const std::size_t cap = opts.cycle_cap ? opts.cycle_cap : default_cycle_cap(n, p.d);
  const CycleList cycles = short_cycles(g, cap);
  const std::size_t delta = max_degree(g);

  PartitionBuildInfo info;
  info.horizon = r;
  info.cycle_len_cap = cap;
  info.breakpoints = static_cast<std::size_t>(std::count(bp.begin(), bp.end(), 1));
  info.short_cycles = cycles.cycles.size();

  // Step (i): cycle-seeded blocks. claim[v] = index of the cycle block holding v.
  std::vector<std::int32_t> claim(n, -1);
  std::vector<std::vector<Vertex>> cblocks(cycles.cycles.size());
  std::vector<char> overlapping(cycles.cycles.size(), 0);
  std::vector<int> dist(n, -1);
  std::vector<Vertex> touched;
  for (std::size_t i = 0; i < cycles.cycles.size(); ++i) {
    const auto& cyc = cycles.cycles[i];
    const int rc = cycle_radius(cyc.size(), delta, p.d);
    auto& members = cblocks[i];
    const auto me = static_cast<std::int32_t>(i);
    bool clash = false;
    auto take = [&](Vertex x) {
      if (claim[x] == me) return true;
      if (claim[x] >= 0) {
        if (opts.strict)
          throw Error("build_partition: blocks seeded by cycles " + std::to_string(claim[x]) +
                      " and " + std::to_string(i) + " overlap at vertex " + std::to_string(x));
        overlapping[static_cast<std::size_t>(claim[x])] = 1;
        overlapping[i] = 1;
        clash = true;
        return false;
      }
      claim[x] = me;
      members.push_back(x);
      return true;
    };
    // Ball of radius rc around the cycle.
    std::queue<Vertex> q;
    for (Vertex c : cyc) {
      if (!take(c)) break;
      dist[c] = 0;
      touched.push_back(c);
      q.push(c);
    }
    while (!clash && !q.empty()) {
      const Vertex u = q.front();
      q.pop();
      if (dist[u] >= rc) continue;
      for (Vertex w : g.neighbors(u)) {
        if (dist[w] >= 0) continue;
        if (!take(w)) break;
        dist[w] = dist[u] + 1;
        touched.push_back(w);
        q.push(w);
      }
    }
    for (Vertex x : touched) dist[x] = -1;
    touched.clear();
    // Influence-path closure from the non-breakpoints gathered so far.
    std::vector<Vertex> stack;
    for (Vertex x : members)
      if (!bp[x]) stack.push_back(x);
    while (!clash && !stack.empty()) {
      const Vertex u = stack.back();
      stack.pop_back();
      for (Vertex w : g.neighbors(u)) {
        if (bp[w] || claim[w] == me) continue;
        if (!take(w)) break;
        stack.push_back(w);
      }
    }
  }

  std::vector<std::vector<Vertex>> groups;
  std::vector<char> assigned(n, 0);
  for (std::size_t i = 0; i < cblocks.size(); ++i) {
    if (overlapping[i]) {
      ++info.cycle_blocks_overlapping;
      continue;
    }
    ++info.cycle_blocks_kept;
    for (Vertex x : cblocks[i]) assigned[x] = 1;
    groups.push_back(std::move(cblocks[i]));
  }

  // Step (ii): influence-path components of the remaining non-breakpoints.
  for (Vertex w = 0; w < n; ++w) {
    if (assigned[w] || bp[w]) continue;
    std::vector<Vertex> grp{w};
    assigned[w] = 1;
    for (std::size_t head = 0; head < grp.size(); ++head)
      for (Vertex x : g.neighbors(grp[head]))
        if (!assigned[x] && !bp[x]) {
          assigned[x] = 1;
          grp.push_back(x);
        }
    groups.push_back(std::move(grp));
  }

  // Structural screening of multi-vertex recipe blocks.
  std::vector<std::size_t> min_cycle(n, 0);
  for (const auto& c : cycles.cycles)
    for (Vertex v : c)
      if (min_cycle[v] == 0 || c.size() < min_cycle[v]) min_cycle[v] = c.size();
  const double d2 = p.d * p.d;

  std::vector<std::int32_t> mark(n, -1);
  std::vector<std::vector<Vertex>> final_groups;
  std::int32_t tag = 0;
  for (auto& grp : groups) {
    if (grp.size() == 1) {
      final_groups.push_back(std::move(grp));
      continue;
    }
    const GroupShape sh = group_shape(g, grp, mark, tag);
    // group_shape leaves vertices tagged `done`; retag for membership checks.
    for (Vertex v : grp) mark[v] = tag;
    bool dissolve = false;
    if (!sh.connected || sh.edges > grp.size()) {
      if (opts.strict)
        throw Error("build_partition: recipe block at vertex " + std::to_string(grp.front()) +
                    " has " + std::to_string(sh.edges) + " edges on " +
                    std::to_string(grp.size()) + " vertices");
      ++info.dissolved_cond1;
      dissolve = true;
    }
    if (!dissolve && !opts.strict) {
      for (Vertex v : grp) {
        for (Vertex x : g.neighbors(v)) {
          if (mark[x] == tag) continue;
          std::size_t inside = 0;
          for (Vertex y : g.neighbors(x))
            if (mark[y] == tag) ++inside;
          if (inside != 1) {
            ++info.dissolved_cond2b;
            dissolve = true;
          } else if (min_cycle[x] != 0 && static_cast<double>(min_cycle[x]) < d2) {
            ++info.dissolved_cond3;
            dissolve = true;
          }
          if (dissolve) break;
        }
        if (dissolve) break;
      }
    }
    for (Vertex v : grp) mark[v] = -1;
    ++tag;
    if (dissolve) {
      info.dissolved_vertices += grp.size();
      for (Vertex v : grp) final_groups.push_back({v});
    } else {
      final_groups.push_back(std::move(grp));
    }
  }

  // Step (iii): breakpoints left over become singletons.
  for (Vertex v = 0; v < n; ++v)
    if (!assigned[v]) final_groups.push_back({v});

  std::sort(final_groups.begin(), final_groups.end(),
            [](const auto& a, const auto& b) {
              return *std::min_element(a.begin(), a.end()) <
                     *std::min_element(b.begin(), b.end());
            });
  BlockPartition part = make_partition(g, std::move(final_groups));
  part.info = info;
  return part;
}

// ---------------------------------------------------------------------------

void ConditionTally::record(bool ok, std::uint32_t block, Vertex v) {
  ++checked;
  if (ok) return;
  ++violations;
  if (witnesses.size() < 100) witnesses.emplace_back(block, v);
}

std::size_t block_diameter(const Graph& g, const Block& b) {
  const std::size_t s = b.size();
  if (s <= 1) return 0;
  // BFS inside the block from local index `src`; returns (farthest index, eccentricity).
  std::vector<int> dist(s);
  auto bfs = [&](std::size_t src) {
    std::fill(dist.begin(), dist.end(), -1);
    std::queue<std::size_t> q;
    dist[src] = 0;
    q.push(src);
    std::size_t far = src;
    std::size_t reached = 1;
    while (!q.empty()) {
      const std::size_t i = q.front();
      q.pop();
      if (dist[i] > dist[far]) far = i;
      for (Vertex w : g.neighbors(b.vertices[i])) {
        if (!b.contains(w)) continue;
        const std::size_t j = b.index_of(w);
        if (dist[j] < 0) {
          dist[j] = dist[i] + 1;
          ++reached;
          q.push(j);
        }
      }
    }
    if (reached != s) return std::pair<std::size_t, std::size_t>{far, std::numeric_limits<std::size_t>::max()};
    return std::pair<std::size_t, std::size_t>{far, static_cast<std::size_t>(dist[far])};
  };
  if (b.kind == BlockKind::tree) {
    // Double sweep is exact on trees.
    const auto a = bfs(0);
    return bfs(a.first).second;
  }
  std::size_t best = 0;
  for (std::size_t i = 0; i < s; ++i) {
    const auto e = bfs(i).second;
    if (e == std::numeric_limits<std::size_t>::max()) return e;
    best = std::max(best, e);
  }
  return best;
}

ValidationReport validate_partition(const Graph& g, const BlockPartition& part, const Params& p,
                                    std::size_t witness_cap) {
  const std::size_t n = g.num_vertices();
  if (part.owner.size() != n) throw Error("validate: owner map does not cover the graph");
  ValidationReport rep;
  auto rec = [&](ConditionTally& t, bool ok, std::uint32_t b, Vertex v) {
    ++t.checked;
    if (ok) return;
    ++t.violations;
    if (t.witnesses.size() < witness_cap) t.witnesses.emplace_back(b, v);
  };

  const double lnn = n > 1 ? std::log(static_cast<double>(n)) : 0.0;
  rep.loglog_horizon = lnn > 1.0 ? static_cast<int>(std::ceil(std::log(lnn))) : 0;
  const std::size_t cap = part.info.cycle_len_cap ? part.info.cycle_len_cap
                                                  : default_cycle_cap(n, p.d);
  const double d2 = p.d * p.d;
  const auto d2_cap = static_cast<std::size_t>(std::max(0.0, std::ceil(d2) - 1.0));
  rep.cond3_cycle_cap = std::min(cap, d2_cap);
  rep.cond3_unchecked = d2_cap > cap;
  std::vector<std::size_t> min_cycle(n, 0);
  if (rep.cond3_cycle_cap >= 3) {
    const CycleList cl = short_cycles(g, rep.cond3_cycle_cap);
    for (const auto& c : cl.cycles)
      for (Vertex v : c)
        if (min_cycle[v] == 0 || c.size() < min_cycle[v]) min_cycle[v] = c.size();
  }
  const std::size_t delta = max_degree(g);

  // ∂𝒷 both ways.
  std::vector<Vertex> from_outer;
  for (const Block& b : part.blocks)
    from_outer.insert(from_outer.end(), b.outer_boundary.begin(), b.outer_boundary.end());
  std::sort(from_outer.begin(), from_outer.end());
  from_outer.erase(std::unique(from_outer.begin(), from_outer.end()), from_outer.end());
  rep.boundary_sets_agree = from_outer == part.boundary;

  std::unordered_map<std::uint64_t, bool> bp_cache;
  auto breakpoint_at = [&](Vertex v, int r) {
    const std::uint64_t key = (static_cast<std::uint64_t>(v) << 20) ^ static_cast<std::uint64_t>(r);
    auto it = bp_cache.find(key);
    if (it != bp_cache.end()) return it->second;
    const bool res = is_breakpoint(v, g, p, r);
    bp_cache.emplace(key, res);
    return res;
  };

  for (std::uint32_t bi = 0; bi < part.blocks.size(); ++bi) {
    const Block& b = part.blocks[bi];
    for (Vertex v : b.vertices)
      if (part.owner[v] != bi) rec(rep.cond1, false, bi, v);
    rep.max_block_size = std::max(rep.max_block_size, b.size());
    if (b.size() <= 1) continue;
    ++rep.multi_vertex_blocks;

    // Condition 1, re-derived from the graph rather than trusting `kind`.
    std::size_t e2 = 0;
    for (Vertex v : b.vertices)
      for (Vertex w : g.neighbors(v))
        if (b.contains(w)) ++e2;
    const std::size_t edges = e2 / 2;
    const std::size_t diam = block_diameter(g, b);
    const bool connected = diam != std::numeric_limits<std::size_t>::max();
    bool shape_ok = connected && (edges == b.size() - 1 || edges == b.size());
    if (shape_ok) {
      const BlockKind want = edges == b.size() ? BlockKind::unicyclic : BlockKind::tree;
      shape_ok = b.kind == want && (want == BlockKind::tree || b.cycle.size() >= 3);
    }
    rec(rep.cond1, shape_ok, bi, b.root);

    const int r_b = std::max(2, static_cast<int>(std::max<std::size_t>(
                                    connected ? diam : b.size(),
                                    static_cast<std::size_t>(rep.loglog_horizon))) + 1);
    std::vector<int> cyc_dist;
    int rc = 0;
    if (!b.cycle.empty()) {
      rc = cycle_radius(b.cycle.size(), delta, p.d);
      cyc_dist = bfs_distances(g, b.cycle, rc);
    }
    for (Vertex x : b.outer_boundary) {
      ++rep.boundary_incidences;
      rec(rep.cond2a, breakpoint_at(x, r_b), bi, x);
      std::size_t inside = 0;
      for (Vertex y : g.neighbors(x))
        if (b.contains(y)) ++inside;
      rec(rep.cond2b, inside == 1, bi, x);
      if (!b.cycle.empty()) rec(rep.cond2c, cyc_dist[x] < 0 || cyc_dist[x] >= rc, bi, x);
      rec(rep.cond3, !(min_cycle[x] != 0 && static_cast<double>(min_cycle[x]) < d2), bi, x);
    }
  }

  // Growth around breakpoints at the partition's horizon.
  const int r = part.info.horizon > 0 ? part.info.horizon : p.r;
  const std::vector<char> bp = breakpoints(g, p, r);
  const double base = (1.0 + p.epsilon / 3.0) * p.d;
  std::vector<int> dist(n, -1);
  std::vector<Vertex> touched;
  for (Vertex v = 0; v < n; ++v) {
    if (!bp[v]) continue;
    std::vector<Vertex> frontier{v};
    dist[v] = 0;
    touched.push_back(v);
    bool ok = true;
    for (int l = 1; l <= r && !frontier.empty(); ++l) {
      std::vector<Vertex> next;
      for (Vertex u : frontier)
        for (Vertex w : g.neighbors(u))
          if (dist[w] < 0) {
            dist[w] = l;
            touched.push_back(w);
            next.push_back(w);
          }
      if (static_cast<double>(next.size()) > std::pow(base, l)) ok = false;
      frontier.swap(next);
    }
    for (Vertex x : touched) dist[x] = -1;
    touched.clear();
    rec(rep.growth, ok, part.owner[v], v);
  }
  return rep;
}

// ---------------------------------------------------------------------------

double path_density_term(double deg, int k) {
  return 450.0 * (std::log(deg) + deg / static_cast<double>(k));
}

double path_density(std::span<const Vertex> path, const Graph& g, int k) {
  double total = 0.0;
  for (Vertex u : path) total += path_density_term(static_cast<double>(g.degree(u)), k);
  return total;
}

PathDensityReport path_density(const Graph& g, const BlockPartition& part, const Params& p,
                               double bin_width) {
  PathDensityReport rep;
  rep.bin_width = bin_width;
  for (const Block& b : part.blocks) {
    if (b.size() <= 1 || b.inner_boundary.empty()) continue;
    std::vector<Vertex> sources;
    for (Vertex v : b.vertices)
      if (!p.low_degree(g.degree(v))) sources.push_back(v);
    sources.insert(sources.end(), b.cycle.begin(), b.cycle.end());
    std::sort(sources.begin(), sources.end());
    sources.erase(std::unique(sources.begin(), sources.end()), sources.end());
    const std::size_t s = b.size();
    std::vector<std::int64_t> parent(s);
    for (Vertex src : sources) {
      std::fill(parent.begin(), parent.end(), -1);
      const std::size_t si = b.index_of(src);
      parent[si] = static_cast<std::int64_t>(si);
      std::queue<std::size_t> q;
      q.push(si);
      while (!q.empty()) {
        const std::size_t i = q.front();
        q.pop();
        for (Vertex w : g.neighbors(b.vertices[i])) {
          if (!b.contains(w)) continue;
          const std::size_t j = b.index_of(w);
          if (parent[j] < 0) {
            parent[j] = static_cast<std::int64_t>(i);
            q.push(j);
          }
        }
      }
      for (Vertex t : b.inner_boundary) {
        std::size_t j = b.index_of(t);
        if (parent[j] < 0) continue;
        double total = path_density_term(static_cast<double>(g.degree(b.vertices[j])), p.k);
        while (j != si) {
          j = static_cast<std::size_t>(parent[j]);
          total += path_density_term(static_cast<double>(g.degree(b.vertices[j])), p.k);
        }
        rep.values.push_back(total);
      }
    }
  }
  for (double v : rep.values) {
    rep.max = std::max(rep.max, v);
    const auto bin = static_cast<std::size_t>(v / bin_width);
    if (bin >= rep.histogram.size()) rep.histogram.resize(bin + 1, 0);
    ++rep.histogram[bin];
  }
  return rep;
}

}  // namespace blockmix
