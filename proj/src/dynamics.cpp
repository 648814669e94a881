#include "blockmix/dynamics.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>

namespace blockmix {

Configuration Configuration::coloring(std::vector<int> colors, int k) {
  Configuration c;
  c.model = Model::coloring;
  c.k = k;
  c.colors = std::move(colors);
  return c;
}

Configuration Configuration::hardcore(std::vector<char> occupied) {
  Configuration c;
  c.model = Model::hardcore;
  c.occupied = std::move(occupied);
  return c;
}

bool Configuration::valid(const Graph& g) const {
  if (model == Model::coloring) {
    if (colors.size() != g.num_vertices()) return false;
    for (Vertex v = 0; v < g.num_vertices(); ++v) {
      if (colors[v] < 0 || colors[v] >= k) return false;
      for (Vertex w : g.neighbors(v))
        if (colors[w] == colors[v]) return false;
    }
    return true;
  }
  if (occupied.size() != g.num_vertices()) return false;
  for (Vertex v = 0; v < g.num_vertices(); ++v)
    if (occupied[v])
      for (Vertex w : g.neighbors(v))
        if (occupied[w]) return false;
  return true;
}

GreedyResult greedy_initial(const Graph& g, int k, std::uint64_t seed, int retries) {
  if (k < 1) throw Error("greedy_initial: k must be >= 1");
  const std::size_t n = g.num_vertices();
  GreedyResult res;
  std::vector<Vertex> order(n);
  std::vector<char> used(static_cast<std::size_t>(k));
  for (int attempt = 0; attempt < std::max(1, retries); ++attempt) {
    res.attempts = attempt + 1;
    Rng rng = derive_rng(seed, static_cast<std::uint64_t>(attempt));
    std::iota(order.begin(), order.end(), Vertex{0});
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<int> col(n, -1);
    bool ok = true;
    for (Vertex v : order) {
      std::fill(used.begin(), used.end(), 0);
      for (Vertex w : g.neighbors(v))
        if (col[w] >= 0) used[static_cast<std::size_t>(col[w])] = 1;
      int c = 0;
      while (c < k && used[static_cast<std::size_t>(c)]) ++c;
      if (c == k) {
        ok = false;
        res.stuck = v;
        break;
      }
      col[v] = c;
    }
    if (ok) {
      res.ok = true;
      res.cfg = Configuration::coloring(std::move(col), k);
      return res;
    }
  }
  return res;
}

void update_vertex(Configuration& cfg, const Graph& g, Vertex v, double lambda, Rng& rng) {
  if (cfg.model == Model::coloring) {
    // Heat-bath: uniform over colors absent from N(v); contains the current color.
    thread_local std::vector<char> used;
    used.assign(static_cast<std::size_t>(cfg.k), 0);
    std::size_t blocked = 0;
    for (Vertex w : g.neighbors(v)) {
      const int c = cfg.colors[w];
      if (c >= 0 && c < cfg.k && !used[static_cast<std::size_t>(c)]) {
        used[static_cast<std::size_t>(c)] = 1;
        ++blocked;
      }
    }
    const std::size_t avail = static_cast<std::size_t>(cfg.k) - blocked;
    if (avail == 0) throw Error("glauber: no available color at vertex " + std::to_string(v));
    std::uint64_t pick = uniform_below(rng, avail);
    for (int c = 0; c < cfg.k; ++c)
      if (!used[static_cast<std::size_t>(c)] && pick-- == 0) {
        cfg.colors[v] = c;
        break;
      }
    return;
  }
  bool blocked = false;
  for (Vertex w : g.neighbors(v))
    if (cfg.occupied[w]) {
      blocked = true;
      break;
    }
  cfg.occupied[v] = !blocked && uniform01(rng) < lambda / (1.0 + lambda) ? 1 : 0;
}

void update_block(Configuration& cfg, const Graph& g, const Block& b, double lambda, Rng& rng,
                  SampleMode mode) {
  if (b.size() == 1) {
    update_vertex(cfg, g, b.vertices[0], lambda, rng);
    return;
  }
  if (cfg.model == Model::coloring)
    sample_block_coloring(g, b, cfg.colors, cfg.k, rng, mode);
  else
    sample_block_hardcore(g, b, cfg.occupied, lambda, rng);
}

namespace {

void mark_unit(Configuration& cfg, std::size_t unit, std::size_t units) {
  if (cfg.unit_last_update.size() != units) cfg.unit_last_update.assign(units, -1);
  cfg.unit_last_update[unit] = static_cast<std::int64_t>(cfg.step_count);
}

}  // namespace

Vertex glauber_step(Configuration& cfg, const Graph& g, Rng& rng) {
  const auto v = static_cast<Vertex>(uniform_below(rng, g.num_vertices()));
  update_vertex(cfg, g, v, 0.0, rng);
  ++cfg.step_count;
  mark_unit(cfg, v, g.num_vertices());
  if (debug_asserts_enabled()) assert_locally_valid(cfg, g, {v});
  return v;
}

Vertex hardcore_glauber_step(Configuration& cfg, const Graph& g, double lambda, Rng& rng) {
  const auto v = static_cast<Vertex>(uniform_below(rng, g.num_vertices()));
  update_vertex(cfg, g, v, lambda, rng);
  ++cfg.step_count;
  mark_unit(cfg, v, g.num_vertices());
  if (debug_asserts_enabled()) assert_locally_valid(cfg, g, {v});
  return v;
}

std::uint32_t block_step(Configuration& cfg, const Graph& g, const BlockPartition& part, Rng& rng,
                         SampleMode mode) {
  const auto b = static_cast<std::uint32_t>(uniform_below(rng, part.num_blocks()));
  update_block(cfg, g, part.blocks[b], 0.0, rng, mode);
  ++cfg.step_count;
  mark_unit(cfg, b, part.num_blocks());
  if (debug_asserts_enabled()) assert_locally_valid(cfg, g, part.blocks[b].vertices);
  return b;
}

std::uint32_t hardcore_block_step(Configuration& cfg, const Graph& g, const BlockPartition& part,
                                  double lambda, Rng& rng) {
  const auto b = static_cast<std::uint32_t>(uniform_below(rng, part.num_blocks()));
  update_block(cfg, g, part.blocks[b], lambda, rng);
  ++cfg.step_count;
  mark_unit(cfg, b, part.num_blocks());
  if (debug_asserts_enabled()) assert_locally_valid(cfg, g, part.blocks[b].vertices);
  return b;
}

std::string to_string(ChainKind kind) { return kind == ChainKind::glauber ? "glauber" : "block"; }

ChainKind chain_kind_from_string(const std::string& s) {
  if (s == "glauber") return ChainKind::glauber;
  if (s == "block") return ChainKind::block;
  throw Error("unknown chain kind '" + s + "'");
}

std::uint32_t chain_step(Configuration& cfg, const Graph& g, const ChainSpec& spec, Rng& rng) {
  if (spec.kind == ChainKind::glauber) {
    return spec.model == Model::coloring ? glauber_step(cfg, g, rng)
                                         : hardcore_glauber_step(cfg, g, spec.params.lambda, rng);
  }
  if (!spec.partition) throw Error("block dynamics needs a partition");
  return spec.model == Model::coloring
             ? block_step(cfg, g, *spec.partition, rng, spec.mode)
             : hardcore_block_step(cfg, g, *spec.partition, spec.params.lambda, rng);
}

void check_ergodicity(const Graph& g, const ChainSpec& spec) {
  if (spec.kind == ChainKind::block) {
    if (!spec.partition) throw Error("block dynamics needs a partition");
    if (spec.partition->owner.size() != g.num_vertices())
      throw Error("partition does not cover the graph");
  }
  if (spec.force || spec.model == Model::hardcore) return;
  const std::size_t delta = max_degree(g);
  if (spec.kind == ChainKind::glauber) {
    if (static_cast<std::size_t>(spec.params.k) < delta + 2)
      throw Error("ergodicity guard: k=" + std::to_string(spec.params.k) + " < max degree + 2 = " +
                  std::to_string(delta + 2) + " (use --force to override)");
    return;
  }
  // Smoke test: from two greedy starts, a short run must leave its start state.
  int moved = 0;
  for (std::uint64_t s = 0; s < 2; ++s) {
    auto init = greedy_initial(g, spec.params.k, spec.seed ^ (0x5eedULL + s));
    if (!init.ok) throw Error("ergodicity smoke test: greedy start failed");
    Configuration cfg = init.cfg;
    const Configuration start = cfg;
    Rng rng = derive_rng(spec.seed, 0xe7600000ULL + s);
    const std::uint64_t steps = std::min<std::uint64_t>(1000, 10 * spec.partition->num_blocks() + 10);
    for (std::uint64_t t = 0; t < steps; ++t) {
      block_step(cfg, g, *spec.partition, rng, spec.mode);
      if (!cfg.same_state(start)) {
        ++moved;
        break;
      }
    }
  }
  if (moved < 2)
    throw Error("ergodicity smoke test: block dynamics did not leave its start state (use --force)");
}

ChainResult run_chain(const Graph& g, const ChainSpec& spec, Configuration cfg0, std::uint64_t T,
                      const std::vector<Probe>& probes) {
  for (const auto& p : probes)
    if (p.cadence == 0) throw Error("probe '" + p.name + "' has cadence 0");
  ChainResult res;
  Rng rng = derive_rng(spec.seed, spec.stream);
  res.final_state = std::move(cfg0);
  for (std::uint64_t t = 1; t <= T; ++t) {
    chain_step(res.final_state, g, spec, rng);
    for (const auto& p : probes)
      if (t % p.cadence == 0) res.records.push_back({t, p.name, p.fn(res.final_state, g)});
  }
  return res;
}

bool debug_asserts_enabled() {
  static const bool on = [] {
    const char* e = std::getenv("BLOCKMIX_DEBUG_ASSERTS");
    return e != nullptr && std::string(e) == "1";
  }();
  return on;
}

void assert_locally_valid(const Configuration& cfg, const Graph& g,
                          const std::vector<Vertex>& vertices) {
  for (Vertex v : vertices) {
    for (Vertex w : g.neighbors(v)) {
      const bool clash = cfg.model == Model::coloring ? cfg.colors[v] == cfg.colors[w]
                                                      : (cfg.occupied[v] && cfg.occupied[w]);
      if (clash)
        throw Error("invariant violated on edge " + std::to_string(v) + "-" + std::to_string(w));
    }
  }
}

}  // namespace blockmix
