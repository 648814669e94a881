// One line per acceptance criterion. Exit status counts unexpected failures.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "blockmix/bench.hpp"
#include "blockmix/blocksampler.hpp"
#include "blockmix/coupling.hpp"
#include "blockmix/dynamics.hpp"
#include "blockmix/graph.hpp"
#include "blockmix/parallel.hpp"
#include "blockmix/params.hpp"
#include "blockmix/partition.hpp"
#include "blockmix/percolation.hpp"
#include "blockmix/spectral.hpp"
#include "blockmix/stats.hpp"
#include "blockmix/uniformity.hpp"
#include "oracles.hpp"

using namespace blockmix;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::size_t worker_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// --- stationary laws ---------------------------------------------------------

Outcome stationary_coloring() {
  const auto t0 = std::chrono::steady_clock::now();
  const Graph g = families::path(4);
  const StateSpace sp = enumerate_colorings(g, 3);
  const auto part = make_partition(g, {{0, 1}, {2, 3}});
  double dev = 0.0;
  for (const auto& K : {glauber_kernel(sp, KernelKind::discrete), block_kernel(sp, part, KernelKind::discrete)}) {
    const auto pi = stationary(K);
    for (double x : pi) dev = std::max(dev, std::abs(x - 1.0 / 24.0));
  }
  const double secs = seconds_since(t0);
  return {sp.size() == 24 && dev < 1e-10 && secs < 1.0,
          fmt("states=%zu max_dev=%.2e runtime=%.3fs (need 24, <1e-10, <1s)", sp.size(), dev, secs)};
}

Outcome stationary_hardcore() {
  const Graph g = families::complete(3);
  const double lambda = 0.5;
  const StateSpace sp = enumerate_independent_sets(g, lambda);
  const auto pi = stationary(glauber_kernel(sp, KernelKind::discrete));
  double dev = 0.0;
  for (std::size_t i = 0; i < sp.size(); ++i) {
    const bool empty = std::count(sp.states[i].begin(), sp.states[i].end(), 1) == 0;
    dev = std::max(dev, std::abs(pi[i] - (empty ? 0.4 : 0.2)));
  }
  Configuration cfg = Configuration::hardcore(std::vector<char>(3, 0));
  Rng rng = derive_rng(2024, 0);
  const int thin = 10;
  std::vector<std::uint64_t> counts(sp.size(), 0);
  std::vector<int> spins(3);
  for (int t = 1; t <= 1'000'000; ++t) {
    hardcore_glauber_step(cfg, g, lambda, rng);
    if (t % thin) continue;
    for (int v = 0; v < 3; ++v) spins[v] = cfg.occupied[v];
    ++counts[sp.index_of(spins)];
  }
  const auto chi = chi_square(counts, sp.pi());
  return {sp.size() == 4 && dev < 1e-12 && chi.p_value > 1e-3,
          fmt("kernel max_dev=%.2e (need 4 states, <1e-12); chain 1e6 steps thinned by %d: chi2=%.2f p=%.3f",
              dev, thin, chi.statistic, chi.p_value)};
}

// --- block sampler ------------------------------------------------------------

Outcome count_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(77);
  std::size_t mismatches = 0, unicyclic = 0;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = 1 + rng() % 7;
    const bool uni = n >= 3 && rng() % 2;
    const int k = 1 + static_cast<int>(rng() % 4);
    const Graph g = oracle::random_block_graph(n, uni, rng);
    const auto part = whole_partition(g);
    const Block& b = part.blocks[0];
    ColorLists L = ColorLists::full(n, k);
    for (std::size_t v = 0; v < n; ++v)
      for (int c = 0; c < k; ++c)
        if (rng() % 10 < 3) L.set(v, c, false);
    const BigCount got = uni ? count_unicyclic(g, b, L) : count_list_colorings(g, b, L);
    unicyclic += uni;
    if (got != oracle::count_block(g, b, L)) ++mismatches;
  }
  const double secs = seconds_since(t0);
  return {mismatches == 0 && secs < 30.0,
          fmt("1000 instances (%zu unicyclic), mismatches=%zu, runtime=%.2fs (<30s)", unicyclic, mismatches, secs)};
}

Outcome sampler_exactness() {
  const Graph g = families::path(4);
  const StateSpace sp = enumerate_colorings(g, 3);
  const auto part = whole_partition(g);
  std::string detail = fmt("%zu states, 1e5 draws:", sp.size());
  bool ok = sp.size() == 24;
  for (auto [mode, name] : {std::pair{SampleMode::exact, "exact"}, std::pair{SampleMode::fast, "fast"}}) {
    Rng rng = derive_rng(99, static_cast<std::uint64_t>(mode));
    std::vector<int> colors(4, 0);
    std::vector<std::uint64_t> counts(sp.size(), 0);
    for (int i = 0; i < 100000; ++i) {
      sample_block_coloring(g, part.blocks[0], colors, 3, rng, mode);
      ++counts[sp.index_of(colors)];
    }
    const auto chi = chi_square(counts, sp.pi());
    ok = ok && chi.p_value > 1e-3;
    detail += fmt(" %s p=%.3f", name, chi.p_value);
  }
  return {ok, detail + " (need p>0.001)"};
}

// --- coupling ---------------------------------------------------------------------

Outcome contraction() {
  const auto t0 = std::chrono::steady_clock::now();
  const Graph g = families::heawood();
  const auto part = singleton_partition(g);
  Rng rng = derive_rng(31, 0);
  const auto rep = contraction_experiment(g, part, 7, 100000, rng);
  const double secs = seconds_since(t0);
  return {rep.within_bound() && rep.trials >= 100000 && secs < 120.0,
          fmt("k=7 Delta=%zu trials=%llu mean_ratio=%.6f bound=%.6f+3*%.2e runtime=%.1fs", rep.max_degree,
              static_cast<unsigned long long>(rep.trials), rep.mean_ratio, rep.bound, rep.std_error, secs)};
}

Outcome comparison() {
  struct Inst {
    const char* name;
    Graph g;
    int k;
    std::vector<std::vector<Vertex>> two;
  };
  const std::vector<Inst> insts{
      {"P3", families::path(3), 3, {{0}, {1, 2}}},
      {"P4", families::path(4), 3, {{0, 1}, {2, 3}}},
      {"P5", families::path(5), 3, {{0, 1, 2}, {3, 4}}},
      {"P4k4", families::path(4), 4, {{0}, {1, 2, 3}}},
      {"S3", families::star(3), 3, {{0, 1, 2}, {3}}},
      {"S3k4", families::star(3), 4, {{0, 2, 3}, {1}}},
      {"C4", families::cycle(4), 3, {{0, 1}, {2, 3}}},
      {"C5k4", families::cycle(5), 4, {{0, 1, 2}, {3, 4}}},
  };
  std::size_t checked = 0, held = 0;
  double min_slack = std::numeric_limits<double>::infinity();
  std::string worst;
  for (const auto& in : insts) {
    const std::vector<std::pair<const char*, BlockPartition>> parts{
        {"singleton", singleton_partition(in.g)},
        {"one-block", whole_partition(in.g)},
        {"two-block", make_partition(in.g, in.two)}};
    for (const auto& [pname, part] : parts) {
      ComparisonReport rep;
      try {
        rep = comparison_check(in.g, part, in.k);
      } catch (const std::exception& e) {
        throw Error(std::string(in.name) + "/" + pname + ": " + e.what());
      }
      ++checked;
      held += rep.holds;
      if (rep.slack < min_slack) {
        min_slack = rep.slack;
        worst = std::string(in.name) + "/" + pname;
      }
    }
  }
  return {held == checked && checked >= 20,
          fmt("%zu/%zu instances hold exactly, min slack=%.3g (%s)", held, checked, min_slack, worst.c_str())};
}

// --- partitions on G(n, d/n) -------------------------------------------------------

struct SampledPartition {
  Graph g;
  Params p;
  BlockPartition part;
};

SampledPartition sample_partition(std::size_t n, double d, std::uint64_t seed) {
  Graph g = gen_gnp(n, d, seed);
  Params p = Params::make(n, 0.2, d, regime_k(d, 0.2));
  BlockPartition part = build_partition(g, p);
  return {std::move(g), p, std::move(part)};
}

std::size_t multi_vertex_blocks(const BlockPartition& part) {
  return static_cast<std::size_t>(
      std::count_if(part.blocks.begin(), part.blocks.end(), [](const Block& b) { return b.size() > 1; }));
}

Outcome partition_validity() {
  bool ok = true;
  double worst2a = 0.0, worst2c = 0.0;
  std::size_t hard = 0, multi = 0, unchecked = 0, cap = 0, breakpoints = 0;
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto sp = sample_partition(100000, 30.0, 1000 + s);
    const auto rep = validate_partition(sp.g, sp.part, sp.p);
    hard += rep.cond1.violations + rep.cond2b.violations + rep.cond3.violations;
    worst2a = std::max(worst2a, rep.cond2a.rate());
    worst2c = std::max(worst2c, rep.cond2c.rate());
    multi += multi_vertex_blocks(sp.part);
    unchecked += rep.cond3_unchecked;
    cap = rep.cond3_cycle_cap;
    breakpoints += sp.part.info.breakpoints;
    ok = ok && rep.structural_ok() && rep.boundary_sets_agree;
  }
  ok = ok && hard == 0 && worst2a <= 0.05 && worst2c <= 0.05;
  return {ok, fmt("5 samples: cond1/2b/3 violations=%zu, max 2a rate=%.3f, max 2c rate=%.3f; "
                  "breakpoints=%zu, multi-vertex blocks=%zu, cond3 searched to length %zu (%zu samples capped)",
                  hard, worst2a, worst2c, breakpoints, multi, cap, unchecked)};
}

Outcome beta_boundary() {
  std::size_t checked = 0, violations = 0, multi = 0;
  double min_beta = 1.0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto sp = sample_partition(100000, 30.0, 2000 + s);
    if (!validate_partition(sp.g, sp.part, sp.p).structural_ok()) return {false, "partition failed validation"};
    multi += multi_vertex_blocks(sp.part);
    for (const Block& b : sp.part.blocks) {
      for (Vertex u : b.outer_boundary) {
        const auto bw = beta_weights(sp.g, b, u, sp.p);
        for (Vertex w : b.inner_boundary) {
          const double beta = bw.beta[b.index_of(w)];
          ++checked;
          min_beta = std::min(min_beta, beta);
          violations += beta < 0.5;
        }
      }
    }
  }
  return {violations == 0 && checked > 0,
          fmt("10 samples: %zu (u*, w) pairs, violations=%zu, min beta=%.4f, multi-vertex blocks=%zu", checked,
              violations, min_beta, multi)};
}

// --- planted hubs: sparse background, a few high-degree vertices -------------------------

struct Planted {
  Graph g;
  Params p;
  BlockPartition part;
  std::vector<std::uint32_t> hub_blocks;  // tree blocks holding a hub, <= 40 vertices
};

Planted planted_hub_graph(std::uint64_t seed) {
  const std::size_t n = 20000, hubs = 12;
  const Graph bg = gen_gnp(n, 0.5, seed);
  std::set<std::pair<Vertex, Vertex>> edges;
  for (auto e : bg.edges()) edges.insert(e);
  Rng rng = derive_rng(seed, 1);
  std::vector<char> used(n, 0);
  std::vector<Vertex> hub_ids;
  while (hub_ids.size() < hubs) {
    const Vertex h = static_cast<Vertex>(rng() % n);
    if (used[h]) continue;
    used[h] = 1;
    hub_ids.push_back(h);
  }
  for (Vertex h : hub_ids) {
    std::size_t added = 0;
    while (bg.degree(h) + added < 22) {
      const Vertex v = static_cast<Vertex>(rng() % n);
      if (used[v]) continue;
      used[v] = 1;
      edges.insert({std::min(h, v), std::max(h, v)});
      ++added;
    }
  }
  std::vector<Edge> list(edges.begin(), edges.end());
  Planted out{Graph::from_edges(n, list), Params::make(n, 0.2, 20.0, 40), {}, {}};
  out.part = build_partition(out.g, out.p);
  for (std::uint32_t b = 0; b < out.part.num_blocks(); ++b) {
    const Block& B = out.part.blocks[b];
    if (B.kind != BlockKind::tree || B.size() > 40 || B.outer_boundary.empty()) continue;
    for (Vertex v : B.vertices)
      if (!out.p.low_degree(out.g.degree(v))) {
        out.hub_blocks.push_back(b);
        break;
      }
  }
  return out;
}

Outcome domination() {
  const auto t0 = std::chrono::steady_clock::now();
  const Planted pl = planted_hub_graph(4242);
  const auto rep0 = validate_partition(pl.g, pl.part, pl.p);
  const std::size_t use = std::min<std::size_t>(6, pl.hub_blocks.size());
  std::vector<DominationReport> reps(use);
  std::vector<Vertex> ustars(use);
  parallel_for(use, worker_threads(), [&](std::size_t i) {
    const Block& B = pl.part.blocks[pl.hub_blocks[i]];
    ustars[i] = B.outer_boundary.front();
    Rng rng = derive_rng(5150, i);
    reps[i] = domination_test(pl.g, pl.part, pl.p, pl.hub_blocks[i], ustars[i], 100000, rng);
  });
  bool ok = use >= 5 && rep0.structural_ok();
  std::string detail = fmt("%zu hub blocks (<=40 vertices) of %zu eligible, 1e5 trials each; worst excess/sigma:", use,
                           pl.hub_blocks.size());
  for (std::size_t i = 0; i < use; ++i) {
    ok = ok && reps[i].dominates;
    detail += fmt(" %zu:%.2f", pl.part.blocks[pl.hub_blocks[i]].size(), reps[i].worst_excess);
  }
  const double secs = seconds_since(t0);
  ok = ok && secs < 600.0;
  return {ok, detail + fmt(" (need <=3); runtime=%.0fs", secs)};
}

// --- percolation tail on synthetic d = 20 blocks -------------------------------------------

// Tree-like neighborhood of a d = 20 block, rooted at z (vertex 1) hanging off
// u* (vertex 0). Every block vertex has Poisson(d - 1) further neighbors, capped
// so it stays low degree; each is another block vertex with probability q_in and
// an outside breakpoint otherwise. At depth `depth` all further neighbors are outside.
struct Synthetic {
  Graph g;
  BlockPartition part;
};

Synthetic synthetic_block(double d, int depth, double q_in, std::uint64_t seed, const Params& p) {
  Rng rng = derive_rng(seed, 0);
  std::poisson_distribution<int> kids(d - 1.0);
  std::bernoulli_distribution inside(q_in);
  const int cap = static_cast<int>(std::floor(p.dhat())) - 1;
  std::vector<Edge> edges{{0, 1}};
  std::vector<std::vector<Vertex>> groups{{1}, {0}};
  std::vector<Vertex> frontier{1};
  Vertex next = 2;
  for (int level = 0; level <= depth; ++level) {
    std::vector<Vertex> nf;
    for (Vertex v : frontier) {
      const int c = std::min(kids(rng), cap);
      for (int i = 0; i < c; ++i) {
        edges.push_back({v, next});
        if (level < depth && inside(rng)) {
          groups[0].push_back(next);
          nf.push_back(next);
        } else {
          groups.push_back({next});
        }
        ++next;
      }
    }
    frontier = std::move(nf);
  }
  Graph g = Graph::from_edges(next, edges);
  BlockPartition part = make_partition(g, std::move(groups));
  return {std::move(g), std::move(part)};
}

Outcome percolation_tail() {
  const Params p = Params::make(100000, 0.2, 20.0, 40);
  bool ok = true;
  std::string detail = "slope [95% CI] per block:";
  for (std::uint64_t s = 0; s < 4; ++s) {
    const auto syn = synthetic_block(20.0, 5, 0.25, 600 + s, p);
    const Block& B = syn.part.block_of(1);
    Rng rng = derive_rng(700, s);
    const auto rep = tail_experiment(syn.g, B, 0, p, PercolationVariant::simple, 100000, rng, 200);
    const bool pass = rep.fit.points >= 2 && rep.slope_ci_high <= -0.2;
    ok = ok && pass;
    detail += fmt(" |B|=%zu %.3f [%.3f,%.3f] pts=%zu;", B.size(), rep.fit.slope, rep.slope_ci_low,
                  rep.slope_ci_high, rep.fit.points);
  }
  return {ok, detail + " (need upper <= -0.2)"};
}

// --- local uniformity -------------------------------------------------------------------

Outcome local_uniformity() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t n = 5000;
  const Graph g = gen_gnp(n, 20.0, 808);
  const Params p = Params::make(n, 0.2, 20.0, 40);
  const auto part = build_partition(g, p);
  const auto probes = pick_low_degree_probes(g, p, 200, 808);
  UniformityOptions opts;
  opts.c0 = 5.0;
  opts.c = 5.0;
  const auto rep = uniformity_experiment(g, part, p, probes, 909, opts);
  std::size_t min_gap = std::numeric_limits<std::size_t>::max();
  for (std::size_t i = 0; i < probes.size(); ++i) min_gap = std::min(min_gap, rep.min_avail[i]);
  const double secs = seconds_since(t0);
  return {rep.fraction <= 0.01 && probes.size() == 200 && secs < 600.0,
          fmt("%zu probes, %zu ever violate (fraction %.3f, 95%% CI [%.3f, %.3f]; need <=0.01), "
              "blocks=%zu, min available seen=%zu, threshold at d=%.2f, runtime=%.0fs",
              probes.size(), rep.violating, rep.fraction, rep.ci_low, rep.ci_high, rep.blocks, min_gap,
              rep.threshold_at_d, secs)};
}

// --- cost and scaling -----------------------------------------------------------------------

Outcome block_update_cost() {
  std::vector<double> xs, ys, xk, yk;
  for (std::size_t s : {100, 300, 1000, 3000, 10000}) {
    const auto pt = time_block_update(s, 16, 5, 0.2, 7, SampleMode::fast);
    xs.push_back(static_cast<double>(s));
    ys.push_back(pt.ns_per_update);
  }
  for (int k : {8, 16, 32, 64}) {
    const auto pt = time_block_update(1000, k, 5, 0.2, 7, SampleMode::fast);
    xk.push_back(k);
    yk.push_back(pt.ns_per_update);
  }
  const auto fs = log_log_fit(xs, ys);
  const auto fk = log_log_fit(xk, yk);
  return {fs.slope <= 1.2 && fk.slope <= 3.2,
          fmt("|B| exponent=%.3f (<=1.2, k=16), k exponent=%.3f (<=3.2, |B|=1000); %.0f ns at |B|=1e4", fs.slope,
              fk.slope, ys.back())};
}

Outcome coupling_time_scaling() {
  std::vector<double> ratios;
  std::string detail = "median/(N ln N):";
  for (std::size_t n : {500, 1000, 2000, 4000}) {
    const auto sp = sample_partition(n, 20.0, 3000 + n);
    const auto res = coupling_time(sp.g, sp.part, 40, 1'000'000'000, 9, 4000 + n, StartKind::extremal, nullptr, 1,
                                   worker_threads());
    const auto censored = std::count(res.censored.begin(), res.censored.end(), 1);
    ratios.push_back(res.median / res.n_log_n);
    detail += fmt(" n=%zu:%.3f%s", n, ratios.back(), censored ? "(censored)" : "");
  }
  const double spread = *std::max_element(ratios.begin(), ratios.end()) /
                        *std::min_element(ratios.begin(), ratios.end());
  return {spread < 3.0, detail + fmt("; spread=%.3f (<3)", spread)};
}

// --- marginal bias on constructed blocks --------------------------------------------------

struct Constructed {
  Graph g;
  BlockPartition part;
  std::vector<int> colors;  // outside colors, then a proper block coloring drawn given them
};

// Block vertices come first (ids 0..m-1), outside neighbors after. Shapes:
// 0 = hub with arms, 1 = unicyclic with arms, 2 = random low-degree tree.
Constructed construct_block(int shape, const Params& p, bool adversarial, Rng& rng) {
  std::vector<Edge> edges;
  std::vector<Vertex> leaves;
  Vertex next = 0;
  auto arm = [&](Vertex from, int len) {
    Vertex cur = from;
    for (int i = 0; i < len; ++i) {
      edges.push_back({cur, next});
      cur = next++;
    }
    const int fan = 1 + static_cast<int>(rng() % 3);
    for (int i = 0; i < fan; ++i) {
      edges.push_back({cur, next});
      leaves.push_back(next++);
    }
  };
  if (shape == 0) {
    const Vertex hub = next++;
    const int deg = 21 + static_cast<int>(rng() % 6);
    for (int i = 0; i < deg; ++i) arm(hub, 1 + static_cast<int>(rng() % 2));
  } else if (shape == 1) {
    const int len = 4 + static_cast<int>(rng() % 5);
    const Vertex first = next;
    for (int i = 0; i < len; ++i) {
      const Vertex v = next++;
      if (i > 0) edges.push_back({v - 1, v});
    }
    edges.push_back({first, static_cast<Vertex>(first + len - 1)});
    for (int i = 0; i < len; ++i) arm(first + static_cast<Vertex>(i), 1 + static_cast<int>(rng() % 2));
  } else {
    const int size = 15 + static_cast<int>(rng() % 30);
    std::vector<int> deg(size, 0);
    next = static_cast<Vertex>(size);
    for (int v = 1; v < size; ++v) {
      int parent;
      do parent = static_cast<int>(rng() % v);
      while (deg[parent] >= 12);
      edges.push_back({static_cast<Vertex>(parent), static_cast<Vertex>(v)});
      ++deg[parent];
      ++deg[v];
    }
    for (int v = 0; v < size; ++v)
      if (deg[v] == 1) leaves.push_back(static_cast<Vertex>(v));
  }
  const Vertex m = next;
  std::vector<std::vector<Vertex>> groups(1);
  for (Vertex v = 0; v < m; ++v) groups[0].push_back(v);
  for (Vertex leaf : leaves) {
    // block degree is 1 (or small); total stays within dhat
    const int room = static_cast<int>(std::floor(p.dhat())) - 1;
    const int outs = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(room));
    for (int i = 0; i < outs; ++i) {
      edges.push_back({leaf, next});
      groups.push_back({next++});
    }
  }
  Constructed c{Graph::from_edges(next, edges), {}, std::vector<int>(next, 0)};
  c.part = make_partition(c.g, std::move(groups));
  const int palette = adversarial ? p.k / 2 : p.k;
  for (Vertex v = m; v < next; ++v) c.colors[v] = static_cast<int>(rng() % static_cast<std::uint64_t>(palette));
  sample_block_coloring(c.g, c.part.blocks[0], c.colors, p.k, rng, SampleMode::exact);
  return c;
}

Rational max_marginal(const BlockTree& t, const ColorLists& L, std::size_t v) {
  const auto m = marginal_exact(t, L, v);
  return *std::max_element(m.begin(), m.end());
}

Outcome marginal_bias() {
  const auto t0 = std::chrono::steady_clock::now();
  const Params p = Params::make(100000, 0.2, 20.0, 40);
  // epsilon = 1/5 and d = 20 exactly, so the bounds are rational
  const Rational one_plus_eps(6, 5);
  const Rational deep_bound = Rational(1, p.k - 2) + Rational(20, 400);
  Rng rng = derive_rng(1234, 0);
  std::size_t cor_checks = 0, cor_viol = 0, prop_checks = 0, prop_viol = 0;
  double cor_worst = 0.0, prop_worst = 0.0;  // max marginal / bound
  for (int i = 0; i < 100; ++i) {
    const auto c = construct_block(i % 3, p, i % 2 == 1, rng);
    const Graph& g = c.g;
    const Block& B = c.part.blocks[0];
    const BlockTree t = BlockTree::of(g, B);
    const ColorLists base = boundary_lists(g, B, c.colors, p.k);
    auto heavy = [&](Vertex v) { return !p.low_degree(g.degree(v)); };
    for (std::size_t pos = 0; pos < B.size(); ++pos) {
      const Vertex v = B.vertices[pos];
      bool near_heavy = false;
      for (Vertex w : g.neighbors(v)) near_heavy |= heavy(w);
      const bool on_cycle = c.part.on_block_cycle[v] != 0;
      if (!heavy(v) && !near_heavy && !on_cycle) {
        for (int variant = 0; variant < 2; ++variant) {
          ColorLists L = base;
          std::vector<char> pinned(B.size(), 0);
          if (variant == 1)
            for (std::size_t q = 0; q < B.size(); ++q)
              if (q != pos && rng() % 4 == 0) {
                L.pin(q, c.colors[B.vertices[q]]);
                pinned[q] = 1;
              }
          std::size_t free_nbrs = 0;
          for (Vertex w : g.neighbors(v))
            if (B.contains(w) && !pinned[B.index_of(w)]) ++free_nbrs;
          const Rational bound = 1 / (one_plus_eps * std::max<std::size_t>(1, free_nbrs));
          const Rational got = max_marginal(t, L, pos);
          ++cor_checks;
          cor_viol += got > bound;
          cor_worst = std::max(cor_worst, static_cast<double>(got / bound));
        }
      } else {
        for (Vertex u : g.neighbors(v)) {
          ColorLists L = base;
          if (B.contains(u)) L.pin(B.index_of(u), c.colors[u]);
          const Rational got = max_marginal(t, L, pos);
          ++prop_checks;
          prop_viol += got > deep_bound;
          prop_worst = std::max(prop_worst, static_cast<double>(got / deep_bound));
        }
      }
    }
  }
  const double secs = seconds_since(t0);
  return {cor_viol == 0 && prop_viol == 0 && cor_checks > 0 && prop_checks > 0,
          fmt("100 blocks: low-degree bound %zu checks, %zu violations (worst ratio %.3f); deep bound %zu checks, "
              "%zu violations (worst ratio %.3f); runtime=%.0fs",
              cor_checks, cor_viol, cor_worst, prop_checks, prop_viol, prop_worst, secs)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::vector<std::string> only, expect_fail;
  app.add_option("--only", only, "run just these criteria");
  app.add_option("--expect-fail", expect_fail, "criteria known to fail; reported but not counted");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"stationary-coloring", stationary_coloring},
      {"stationary-hardcore", stationary_hardcore},
      {"count-oracle", count_oracle},
      {"sampler-exactness", sampler_exactness},
      {"contraction", contraction},
      {"comparison", comparison},
      {"beta-boundary", beta_boundary},
      {"domination", domination},
      {"percolation-tail", percolation_tail},
      {"local-uniformity", local_uniformity},
      {"partition-validity", partition_validity},
      {"block-update-cost", block_update_cost},
      {"coupling-time-scaling", coupling_time_scaling},
      {"marginal-bias", marginal_bias},
  };
  auto listed = [](const std::vector<std::string>& v, const std::string& s) {
    return std::find(v.begin(), v.end(), s) != v.end();
  };
  int unexpected = 0;
  for (const auto& [name, fn] : criteria) {
    if (!only.empty() && !listed(only, name)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const bool xfail = listed(expect_fail, name);
    const char* tag = o.pass ? (xfail ? "XPASS" : "PASS") : (xfail ? "XFAIL" : "FAIL");
    if (!o.pass && !xfail) ++unexpected;
    std::cout << tag << "  " << name << "  " << o.detail << fmt("  [%.1fs]", seconds_since(t0)) << std::endl;
  }
  return unexpected;
}
