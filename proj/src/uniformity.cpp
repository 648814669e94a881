#include "blockmix/uniformity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "blockmix/stats.hpp"

namespace blockmix {

std::vector<int> available_colors(const Configuration& cfg, const Graph& g, Vertex v) {
  if (cfg.model != Model::coloring) throw Error("available_colors: coloring model only");
  std::vector<char> used(static_cast<std::size_t>(cfg.k), 0);
  for (Vertex w : g.neighbors(v)) {
    const int c = cfg.colors[w];
    if (c >= 0 && c < cfg.k) used[static_cast<std::size_t>(c)] = 1;
  }
  std::vector<int> out;
  for (int c = 0; c < cfg.k; ++c)
    if (!used[static_cast<std::size_t>(c)]) out.push_back(c);
  return out;
}

std::size_t available_count(const Configuration& cfg, const Graph& g, Vertex v) {
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
  return static_cast<std::size_t>(cfg.k) - blocked;
}

double uniformity_threshold(std::size_t deg, int k, double epsilon) {
  const double kk = static_cast<double>(k);
  return (1.0 - epsilon * epsilon) * kk * std::exp(-static_cast<double>(deg) / kk);
}

bool uniformity_violated(std::size_t avail, bool updated, double threshold) {
  if (!updated) return false;
  // Half-ulp guard so an integer count equal to a rounded threshold is not lost.
  const double guard = 0.5 * (std::nextafter(threshold, std::numeric_limits<double>::infinity()) - threshold);
  return static_cast<double>(avail) <= threshold + guard;
}

std::vector<Vertex> pick_low_degree_probes(const Graph& g, const Params& p, std::size_t count,
                                           std::uint64_t seed) {
  std::vector<Vertex> low;
  for (Vertex v = 0; v < g.num_vertices(); ++v)
    if (p.low_degree(g.degree(v))) low.push_back(v);
  Rng rng = derive_rng(seed, 0x9806e5ULL);
  std::shuffle(low.begin(), low.end(), rng);
  if (low.size() > count) low.resize(count);
  std::sort(low.begin(), low.end());
  return low;
}

UniformityReport uniformity_experiment(const Graph& g, const BlockPartition& part, const Params& p,
                                       const std::vector<Vertex>& probes, std::uint64_t seed,
                                       const UniformityOptions& opts) {
  for (Vertex v : probes)
    if (!p.low_degree(g.degree(v)))
      throw Error("uniformity: probe vertex " + std::to_string(v) + " has degree above dhat");
  if (opts.c0 < 0 || opts.c <= 0) throw Error("uniformity: need c0 >= 0 and c > 0");
  UniformityReport rep;
  rep.blocks = part.num_blocks();
  rep.probes = probes;
  rep.max_degree = max_degree(g);
  rep.threshold_at_d = uniformity_threshold(static_cast<std::size_t>(std::lround(p.d)), p.k, p.epsilon);
  const double nb = static_cast<double>(rep.blocks);
  rep.t_begin = static_cast<std::uint64_t>(std::ceil(opts.c0 * nb));
  rep.t_end = static_cast<std::uint64_t>(std::floor((opts.c0 + opts.c) * nb));
  const std::uint64_t cadence = opts.record_cadence ? opts.record_cadence : rep.blocks;

  auto init = greedy_initial(g, p.k, seed);
  if (!init.ok) throw Error("uniformity: greedy start failed at vertex " + std::to_string(init.stuck));
  Configuration x = std::move(init.cfg);
  Rng rng = derive_rng(seed, 1);

  std::vector<double> thr(probes.size());
  for (std::size_t i = 0; i < probes.size(); ++i)
    thr[i] = uniformity_threshold(g.degree(probes[i]), p.k, p.epsilon);
  rep.ever_violated.assign(probes.size(), 0);
  rep.min_avail.assign(probes.size(), std::numeric_limits<std::size_t>::max());

  auto check = [&](std::uint64_t t) {
    const bool record_all = t % cadence == 0;
    for (std::size_t i = 0; i < probes.size(); ++i) {
      const Vertex v = probes[i];
      const std::size_t avail = available_count(x, g, v);
      const bool updated = !x.unit_last_update.empty() && x.unit_last_update[part.owner[v]] >= 0;
      const bool bad = uniformity_violated(avail, updated, thr[i]);
      if (updated) rep.min_avail[i] = std::min(rep.min_avail[i], avail);
      if (bad) rep.ever_violated[i] = 1;
      if (record_all || bad)
        rep.records.push_back({v, g.degree(v), t, avail, updated, thr[i], bad});
    }
  };
  for (std::uint64_t t = 1; t <= rep.t_end; ++t) {
    block_step(x, g, part, rng);
    if (t >= rep.t_begin) check(t);
  }
  rep.violating = static_cast<std::size_t>(std::count(rep.ever_violated.begin(), rep.ever_violated.end(), 1));
  rep.fraction = probes.empty() ? 0.0
                                : static_cast<double>(rep.violating) / static_cast<double>(probes.size());
  const auto [lo, hi] = wilson_interval(rep.violating, probes.size());
  rep.ci_low = lo;
  rep.ci_high = hi;
  return rep;
}

}  // namespace blockmix
