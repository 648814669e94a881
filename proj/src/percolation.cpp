#include "blockmix/percolation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "blockmix/coupling.hpp"
#include "blockmix/dynamics.hpp"

namespace blockmix {

namespace {

bool on_cycle(const Block& b, Vertex v) {
  return std::find(b.cycle.begin(), b.cycle.end(), v) != b.cycle.end();
}

}  // namespace

double percolation_prob(const Graph& g, const Block& b, Vertex v, const Params& p,
                        PercolationVariant variant) {
  const std::size_t i = b.index_of(v);
  const std::size_t deg = g.degree(v);
  if (!p.low_degree(deg) || on_cycle(b, v)) return 1.0;
  const std::uint32_t din = b.deg_in[i];
  if (din == 0) return 1.0;
  const double simple = 1.0 / ((1.0 + p.epsilon) * static_cast<double>(din));
  if (variant == PercolationVariant::simple) return std::min(1.0, simple);
  if (static_cast<std::size_t>(p.k) <= deg)
    throw Error("percolation_prob: slack variant needs k > deg(v) at vertex " + std::to_string(v));
  const double alt = 1.0 / static_cast<double>(static_cast<std::size_t>(p.k) - deg);
  return std::min(1.0, (1.0 + p.delta) * std::min(simple, alt));
}

std::vector<double> percolation_probs(const Graph& g, const Block& b, const Params& p,
                                      PercolationVariant variant) {
  std::vector<double> out(b.size());
  for (std::size_t i = 0; i < b.size(); ++i)
    out[i] = percolation_prob(g, b, b.vertices[i], p, variant);
  return out;
}

namespace {

template <class Reveal>
PercolationSample grow(const Graph& g, const Block& b, Vertex u_star,
                       const std::vector<double>& beta, Reveal&& reveal) {
  PercolationSample out;
  const std::size_t s = b.size();
  // 0 unrevealed, 1 in S_p, 2 revealed absent
  std::vector<char> state(s, 0);
  std::vector<std::size_t> queue;
  auto visit = [&](Vertex w) {
    if (!b.contains(w)) return;
    const std::size_t j = b.index_of(w);
    if (state[j] != 0) return;
    state[j] = reveal(j) ? 1 : 2;
    if (state[j] == 1) queue.push_back(j);
  };
  for (Vertex w : g.neighbors(u_star)) visit(w);
  for (std::size_t h = 0; h < queue.size(); ++h)
    for (Vertex w : g.neighbors(b.vertices[queue[h]])) visit(w);
  for (std::size_t j : queue) {
    out.cluster.push_back(b.vertices[j]);
    if (b.deg_out[j] > 0) out.boundary_hits.push_back(b.vertices[j]);
    if (!beta.empty()) out.z += beta[j];
  }
  return out;
}

}  // namespace

PercolationSample grow_cluster(const Graph& g, const Block& b, Vertex u_star,
                               const std::vector<double>& probs, const std::vector<double>& beta,
                               Rng& rng) {
  if (probs.size() != b.size()) throw Error("grow_cluster: probability vector size mismatch");
  return grow(g, b, u_star, beta, [&](std::size_t j) { return uniform01(rng) < probs[j]; });
}

PercolationSample grow_cluster_crn(const Graph& g, const Block& b, Vertex u_star,
                                   const std::vector<double>& probs,
                                   const std::vector<double>& uniforms) {
  if (probs.size() != b.size() || uniforms.size() != b.size())
    throw Error("grow_cluster_crn: size mismatch");
  return grow(g, b, u_star, {}, [&](std::size_t j) { return uniforms[j] < probs[j]; });
}

BetaWeights beta_weights(const Graph& g, const Block& b, Vertex u_star, const Params& p,
                         PercolationVariant variant) {
  const std::size_t s = b.size();
  const auto probs = percolation_probs(g, b, p, variant);
  for (double x : probs)
    if (!(x > 0.0)) throw Error("beta_weights: p_w must be positive");
  const BlockTree t = BlockTree::of(g, b);
  BetaWeights out;
  out.beta.assign(s, 0.0);
  out.parent.assign(s, -2);
  const double shrink = 1.0 + p.epsilon * p.epsilon;
  std::vector<std::size_t> queue;
  for (Vertex w : g.neighbors(u_star)) {
    if (!b.contains(w)) continue;
    const std::size_t j = b.index_of(w);
    out.parent[j] = -1;
    out.beta[j] = std::min(1.0, 1.0 / (shrink * 1.0) / probs[j]);
    queue.push_back(j);
  }
  if (queue.empty()) throw Error("beta_weights: u* has no neighbor in the block");
  for (std::size_t h = 0; h < queue.size(); ++h) {
    const std::size_t v = queue[h];
    for (std::uint32_t u : t.adj[v]) {
      if (out.parent[u] != -2) continue;
      out.parent[u] = static_cast<std::int64_t>(v);
      out.beta[u] = std::min(1.0, out.beta[v] / (shrink * static_cast<double>(b.deg_in[v])) / probs[u]);
      queue.push_back(u);
    }
  }
  return out;
}

LinearFit survival_fit(const std::vector<std::uint64_t>& hits_at_least, std::uint64_t trials,
                       std::uint64_t min_count) {
  std::vector<double> x, y, w;
  const double n = static_cast<double>(trials);
  for (std::size_t l = 1; l < hits_at_least.size(); ++l) {
    const std::uint64_t h = hits_at_least[l];
    if (h < min_count) break;
    const double s = static_cast<double>(h) / n;
    if (s >= 1.0) continue;
    x.push_back(static_cast<double>(l));
    y.push_back(std::log(s));
    // Delta method: Var[ln s] ~ (1 - s) / (n s).
    w.push_back(n * s / (1.0 - s));
  }
  if (x.size() < 2) {
    LinearFit f;
    f.points = x.size();
    f.slope = -std::numeric_limits<double>::infinity();
    return f;
  }
  return weighted_linear_fit(x, y, w);
}

namespace {

std::vector<std::uint64_t> hits_from_sizes(const std::vector<std::uint32_t>& sizes) {
  std::uint32_t mx = 0;
  for (auto s : sizes) mx = std::max(mx, s);
  std::vector<std::uint64_t> hist(mx + 1, 0);
  for (auto s : sizes) ++hist[s];
  std::vector<std::uint64_t> at_least(mx + 1, 0);
  std::uint64_t acc = 0;
  for (std::size_t l = mx + 1; l-- > 0;) {
    acc += hist[l];
    at_least[l] = acc;
  }
  return at_least;
}

}  // namespace

TailReport tail_experiment(const Graph& g, const Block& b, Vertex u_star, const Params& p,
                           PercolationVariant variant, std::uint64_t trials, Rng& rng,
                           std::size_t bootstrap) {
  if (trials == 0) throw Error("tail_experiment: trials must be >= 1");
  if (!std::binary_search(b.outer_boundary.begin(), b.outer_boundary.end(), u_star))
    throw Error("tail_experiment: u* is not on the outer boundary of the block");
  TailReport rep;
  rep.trials = trials;
  const auto probs = percolation_probs(g, b, p, variant);
  const auto beta = beta_weights(g, b, u_star, p, variant).beta;
  rep.p_sizes.reserve(trials);
  for (std::uint64_t t = 0; t < trials; ++t) {
    const auto smp = grow_cluster(g, b, u_star, probs, beta, rng);
    rep.p_sizes.push_back(static_cast<std::uint32_t>(smp.boundary_hits.size()));
    rep.cluster_sizes.push_back(static_cast<std::uint32_t>(smp.cluster.size()));
    rep.z_values.push_back(smp.z);
  }
  rep.hits_at_least = hits_from_sizes(rep.p_sizes);
  const double n = static_cast<double>(trials);
  for (auto h : rep.hits_at_least) {
    rep.survival.push_back(static_cast<double>(h) / n);
    const auto [lo, hi] = wilson_interval(h, trials);
    rep.lower.push_back(lo);
    rep.upper.push_back(hi);
  }
  rep.fit = survival_fit(rep.hits_at_least, trials);

  // Z survival on integer thresholds.
  double zmax = 0.0;
  for (double z : rep.z_values) zmax = std::max(zmax, z);
  std::vector<std::uint64_t> z_hits(static_cast<std::size_t>(std::floor(zmax)) + 1, 0);
  for (double z : rep.z_values)
    for (std::size_t l = 0; l < z_hits.size() && static_cast<double>(l) <= z; ++l) ++z_hits[l];
  for (auto h : z_hits) rep.z_survival.push_back(static_cast<double>(h) / n);
  rep.z_fit = survival_fit(z_hits, trials);

  // Bootstrap over trials for the slope.
  if (bootstrap > 0 && rep.fit.points >= 2) {
    std::vector<double> slopes;
    std::vector<std::uint32_t> resample(trials);
    for (std::size_t r = 0; r < bootstrap; ++r) {
      for (auto& x : resample) x = rep.p_sizes[uniform_below(rng, trials)];
      const LinearFit f = survival_fit(hits_from_sizes(resample), trials);
      if (f.points >= 2) slopes.push_back(f.slope);
    }
    if (!slopes.empty()) {
      std::sort(slopes.begin(), slopes.end());
      auto at = [&](double q) {
        const auto idx = static_cast<std::size_t>(q * static_cast<double>(slopes.size() - 1));
        return slopes[idx];
      };
      rep.slope_ci_low = at(0.025);
      rep.slope_ci_high = at(0.975);
    }
  } else {
    rep.slope_ci_low = rep.slope_ci_high = rep.fit.slope;
  }
  return rep;
}

std::vector<std::uint32_t> nearby_blocks(const Graph& g, const BlockPartition& part,
                                         std::uint32_t b, int radius) {
  const auto dist = bfs_distances(g, part.blocks.at(b).vertices, radius);
  std::vector<std::uint32_t> out;
  for (Vertex v = 0; v < g.num_vertices(); ++v)
    if (dist[v] >= 0) out.push_back(part.owner[v]);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

DominationReport domination_test(const Graph& g, const BlockPartition& part, const Params& p,
                                 std::uint32_t bi, Vertex u_star, std::uint64_t trials, Rng& rng,
                                 const DominationOptions& opts) {
  const Block& B = part.blocks.at(bi);
  if (!std::binary_search(B.outer_boundary.begin(), B.outer_boundary.end(), u_star))
    throw Error("domination_test: u* is not on the outer boundary of the block");
  if (trials == 0) throw Error("domination_test: trials must be >= 1");
  std::vector<double> probs = percolation_probs(g, B, p, PercolationVariant::slack);
  if (opts.force_prob)
    std::fill(probs.begin(), probs.end(), std::clamp(*opts.force_prob, 0.0, 1.0));

  auto init = greedy_initial(g, p.k, rng());
  if (!init.ok) throw Error("domination_test: greedy start failed");
  Configuration x = std::move(init.cfg);
  const double nb = static_cast<double>(part.num_blocks());
  const std::uint64_t burn = opts.burn_in ? opts.burn_in
                                          : static_cast<std::uint64_t>(20.0 * nb * std::log(nb + 1.0));
  for (std::uint64_t t = 0; t < burn; ++t) block_step(x, g, part, rng);
  const auto local = nearby_blocks(g, part, bi, opts.local_radius);

  std::vector<std::uint64_t> real_hist(B.size() + 1, 0), perc_hist(B.size() + 1, 0);
  std::uint64_t done = 0;
  std::vector<int> alt;
  while (done < trials) {
    // Heat-bath updates on nearby blocks keep X exactly stationary.
    for (std::size_t t = 0; t < 2 * local.size(); ++t)
      update_block(x, g, part.blocks[local[uniform_below(rng, local.size())]], 0.0, rng);
    alt.clear();
    std::vector<char> used(static_cast<std::size_t>(p.k), 0);
    used[static_cast<std::size_t>(x.colors[u_star])] = 1;
    for (Vertex w : g.neighbors(u_star)) used[static_cast<std::size_t>(x.colors[w])] = 1;
    for (int c = 0; c < p.k; ++c)
      if (!used[static_cast<std::size_t>(c)]) alt.push_back(c);
    if (alt.empty()) continue;
    Configuration y = x;
    y.colors[u_star] = alt[uniform_below(rng, alt.size())];
    CoupledState s(x, y, part);
    coupled_update_block(s, g, part, bi, rng);
    std::size_t real = 0;
    for (Vertex v : B.inner_boundary)
      if (s.in_diff(v)) ++real;
    ++real_hist[real];
    const auto smp = grow_cluster(g, B, u_star, probs, {}, rng);
    ++perc_hist[smp.boundary_hits.size()];
    ++done;
  }

  DominationReport rep;
  rep.trials = done;
  rep.worst_excess = -std::numeric_limits<double>::infinity();
  const double n = static_cast<double>(done);
  std::uint64_t racc = 0, pacc = 0;
  std::vector<double> rs(B.size() + 1), ps(B.size() + 1);
  for (std::size_t l = B.size() + 1; l-- > 0;) {
    racc += real_hist[l];
    pacc += perc_hist[l];
    rs[l] = static_cast<double>(racc) / n;
    ps[l] = static_cast<double>(pacc) / n;
  }
  for (std::size_t l = 0; l <= B.size(); ++l) {
    const double sig = std::sqrt(rs[l] * (1 - rs[l]) / n + ps[l] * (1 - ps[l]) / n);
    rep.real_survival.push_back(rs[l]);
    rep.perc_survival.push_back(ps[l]);
    rep.sigma.push_back(sig);
    const double excess = rs[l] - ps[l];
    if (excess > 3.0 * sig) rep.dominates = false;
    if (sig > 0) rep.worst_excess = std::max(rep.worst_excess, excess / sig);
    else if (excess > 0) rep.worst_excess = std::numeric_limits<double>::infinity();
  }
  return rep;
}

}  // namespace blockmix
