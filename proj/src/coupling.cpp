#include "blockmix/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <queue>

#include "blockmix/parallel.hpp"
#include "blockmix/stats.hpp"

namespace blockmix {

CoupledState::CoupledState(Configuration x, Configuration y, const BlockPartition& part)
    : x_(std::move(x)), y_(std::move(y)), part_(&part) {
  if (x_.model != Model::coloring || y_.model != Model::coloring)
    throw Error("coupling: both chains must be colorings");
  if (x_.colors.size() != y_.colors.size() || x_.colors.size() != part.owner.size())
    throw Error("coupling: configurations do not match the partition");
  const std::size_t n = x_.colors.size();
  in_diff_.assign(n, 0);
  hist_.assign(n, 0);
  std::vector<Vertex> all(n);
  std::iota(all.begin(), all.end(), Vertex{0});
  refresh(all);
}

void CoupledState::refresh(const std::vector<Vertex>& touched) {
  for (Vertex v : touched) {
    const bool now = x_.colors[v] != y_.colors[v];
    const bool was = in_diff_[v] != 0;
    if (now == was) continue;
    in_diff_[v] = now ? 1 : 0;
    const bool boundary = part_->deg_out[v] > 0;
    if (now) {
      ++diff_size_;
      if (boundary) {
        ++boundary_diff_;
        if (!hist_[v]) {
          hist_[v] = 1;
          ++hist_size_;
        }
      }
    } else {
      --diff_size_;
      if (boundary) --boundary_diff_;
    }
  }
}

std::vector<Vertex> CoupledState::diff() const {
  std::vector<Vertex> out;
  out.reserve(diff_size_);
  for (Vertex v = 0; v < in_diff_.size(); ++v)
    if (in_diff_[v]) out.push_back(v);
  return out;
}

bool CoupledState::verify() const {
  std::size_t count = 0, boundary = 0;
  for (Vertex v = 0; v < in_diff_.size(); ++v) {
    const bool d = x_.colors[v] != y_.colors[v];
    if (d != (in_diff_[v] != 0)) return false;
    if (d) {
      ++count;
      if (part_->deg_out[v] > 0) {
        ++boundary;
        if (!hist_[v]) return false;
      }
    }
  }
  return count == diff_size_ && boundary == boundary_diff_;
}

// ---------------------------------------------------------------------------

BigCount vertex_distance_weight(const BlockPartition& part, Vertex v) {
  if (part.deg_out[v] == 0) return 1;
  const BigCount n = part.owner.size();
  return n * n * part.deg_out[v];
}

BigCount dist(const Configuration& x, const Configuration& y, const BlockPartition& part) {
  if (x.colors.size() != y.colors.size()) throw Error("dist: size mismatch");
  BigCount boundary = 0, internal = 0;
  for (Vertex v = 0; v < x.colors.size(); ++v) {
    if (x.colors[v] == y.colors[v]) continue;
    if (part.deg_out[v] > 0)
      boundary += part.deg_out[v];
    else
      internal += 1;
  }
  const BigCount n = part.owner.size();
  return internal + n * n * boundary;
}

BigCount dist(const CoupledState& s, const BlockPartition& part) {
  BigCount boundary = 0, internal = 0;
  for (Vertex v : s.diff()) {
    if (part.deg_out[v] > 0)
      boundary += part.deg_out[v];
    else
      internal += 1;
  }
  const BigCount n = part.owner.size();
  return internal + n * n * boundary;
}

double total_variation(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) throw Error("total_variation: size mismatch");
  double tv = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) tv += std::abs(p[i] - q[i]);
  return tv / 2.0;
}

std::pair<int, int> max_couple(const std::vector<double>& p, const std::vector<double>& q,
                               Rng& rng) {
  if (p.size() != q.size()) throw Error("max_couple: size mismatch");
  const std::size_t k = p.size();
  std::vector<double> common(k), rp(k), rq(k);
  double overlap = 0.0, sp = 0.0, sq = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    common[c] = std::min(p[c], q[c]);
    overlap += common[c];
    sp += p[c];
    sq += q[c];
  }
  if (!(sp > 0.0) || !(sq > 0.0)) throw Error("max_couple: empty distribution");
  // Rounding can leave both sums a hair off 1; compare against the mean total.
  if (uniform01(rng) * (sp + sq) / 2.0 < overlap) {
    const int c = sample_weighted(common, rng);
    if (c >= 0) return {c, c};
  }
  for (std::size_t c = 0; c < k; ++c) {
    rp[c] = std::max(0.0, p[c] - common[c]);
    rq[c] = std::max(0.0, q[c] - common[c]);
  }
  int cx = sample_weighted(rp, rng);
  int cy = sample_weighted(rq, rng);
  // Only reachable through rounding when p == q up to ulps.
  if (cx < 0) cx = sample_weighted(p, rng);
  if (cy < 0) cy = sample_weighted(q, rng);
  return {cx, cy};
}

// ---------------------------------------------------------------------------

std::vector<std::uint32_t> coupling_order(const Graph& g, const Block& b, Vertex z) {
  const std::size_t s = b.size();
  std::vector<std::uint32_t> order;
  order.reserve(s);
  std::vector<char> seen(s, 0);
  const auto zi = static_cast<std::uint32_t>(b.index_of(z));
  order.push_back(zi);
  seen[zi] = 1;
  for (std::size_t h = 0; h < order.size(); ++h)
    for (Vertex w : g.neighbors(b.vertices[order[h]])) {
      if (!b.contains(w)) continue;
      const auto j = static_cast<std::uint32_t>(b.index_of(w));
      if (!seen[j]) {
        seen[j] = 1;
        order.push_back(j);
      }
    }
  if (!b.cycle.empty()) {
    std::stable_partition(order.begin(), order.end(), [&](std::uint32_t i) {
      return std::find(b.cycle.begin(), b.cycle.end(), b.vertices[i]) == b.cycle.end();
    });
  }
  return order;
}

namespace {

std::vector<double> list_distribution(const ColorLists& L, std::size_t i) {
  std::vector<double> p(static_cast<std::size_t>(L.k), 0.0);
  const double n = static_cast<double>(L.list_size(i));
  if (n == 0) throw Error("coupling: infeasible boundary");
  for (int c = 0; c < L.k; ++c)
    if (L.allows(i, c)) p[static_cast<std::size_t>(c)] = 1.0 / n;
  return p;
}

}  // namespace

void coupled_update_block(CoupledState& s, const Graph& g, const BlockPartition& part,
                          std::uint32_t bi, Rng& rng) {
  const Block& B = part.blocks[bi];
  Configuration& X = s.X_mut();
  Configuration& Y = s.Y_mut();
  const int k = X.k;
  Vertex u_star = 0;
  bool disagree = false;
  for (Vertex x : B.outer_boundary)
    if (X.colors[x] != Y.colors[x]) {
      u_star = x;
      disagree = true;
      break;
    }

  if (!disagree) {
    // Identical conditionals: one shared sample.
    sample_block_coloring(g, B, X.colors, k, rng);
    for (Vertex v : B.vertices) Y.colors[v] = X.colors[v];
  } else {
    const ColorLists LX = boundary_lists(g, B, X.colors, k);
    const ColorLists LY = boundary_lists(g, B, Y.colors, k);
    Vertex z = B.vertices.front();
    for (Vertex w : g.neighbors(u_star))
      if (B.contains(w)) {
        z = w;
        break;
      }
    if (B.size() == 1) {
      const auto [cx, cy] = max_couple(list_distribution(LX, 0), list_distribution(LY, 0), rng);
      X.colors[B.vertices[0]] = cx;
      Y.colors[B.vertices[0]] = cy;
    } else {
      const BlockTree t = BlockTree::of(g, B);
      const auto order = coupling_order(g, B, z);
      const std::size_t sz = B.size();
      const auto kk = static_cast<std::size_t>(k);
      std::vector<std::uint32_t> rank(sz);
      for (std::uint32_t r = 0; r < sz; ++r) rank[order[r]] = r;
      std::vector<char> hot_out(sz, 0);  // touches a disagreeing outside vertex
      for (std::size_t i = 0; i < sz; ++i)
        for (Vertex w : g.neighbors(B.vertices[i]))
          if (!B.contains(w) && X.colors[w] != Y.colors[w]) hot_out[i] = 1;
      std::vector<int> colX(sz, -1), colY(sz, -1);

      // Next vertex: the earliest eligible one next to a disagreement, else the
      // earliest eligible one. Min-heaps over ranks with lazy deletion.
      using Heap = std::priority_queue<std::uint32_t, std::vector<std::uint32_t>, std::greater<>>;
      Heap hot, cold;
      std::vector<char> queued(sz, 0);
      auto offer = [&](std::uint32_t i, bool h) {
        if (colX[i] >= 0) return;
        if (!queued[i]) {
          queued[i] = 1;
          cold.push(rank[i]);
        }
        if (h || hot_out[i]) hot.push(rank[i]);
      };
      auto next = [&]() -> std::uint32_t {
        for (Heap* q : {&hot, &cold})
          while (!q->empty()) {
            const auto i = order[q->top()];
            q->pop();
            if (colX[i] < 0) return i;
          }
        throw Error("coupling: no eligible vertex");
      };

      const auto zi = static_cast<std::uint32_t>(B.index_of(z));
      std::vector<double> px(kk), py(kk);
      if (!t.cut) {
        // The colored set grows as a subtree around z, so a new vertex sees only
        // its parent and the subtree tables rooted at z give its exact conditional.
        const SubtreeTables tx = subtree_tables(t, LX, zi);
        const SubtreeTables ty = subtree_tables(t, LY, zi);
        if (!std::isfinite(tx.log_count) || !std::isfinite(ty.log_count))
          throw Error("coupling: infeasible boundary");
        offer(zi, false);
        for (std::size_t step = 0; step < sz; ++step) {
          const std::uint32_t v = next();
          const std::int64_t par = tx.parent[v];
          for (std::size_t c = 0; c < kk; ++c) {
            px[c] = tx.q[v * kk + c];
            py[c] = ty.q[v * kk + c];
          }
          if (par >= 0) {
            px[static_cast<std::size_t>(colX[static_cast<std::size_t>(par)])] = 0.0;
            py[static_cast<std::size_t>(colY[static_cast<std::size_t>(par)])] = 0.0;
          }
          const double sx = std::accumulate(px.begin(), px.end(), 0.0);
          const double sy = std::accumulate(py.begin(), py.end(), 0.0);
          for (std::size_t c = 0; c < kk; ++c) {
            px[c] /= sx;
            py[c] /= sy;
          }
          const auto [cx, cy] = max_couple(px, py, rng);
          colX[v] = cx;
          colY[v] = cy;
          for (std::uint32_t j : t.adj[v]) offer(j, cx != cy);
        }
      } else {
        ColorLists PX = LX, PY = LY;
        for (std::uint32_t i = 0; i < sz; ++i) offer(i, false);
        for (std::size_t step = 0; step < sz; ++step) {
          const std::uint32_t v = next();
          const auto [cx, cy] = max_couple(marginal_fast(t, PX, v), marginal_fast(t, PY, v), rng);
          colX[v] = cx;
          colY[v] = cy;
          PX.pin(v, cx);
          PY.pin(v, cy);
          if (cx != cy)
            for (Vertex w : g.neighbors(B.vertices[v]))
              if (B.contains(w)) offer(static_cast<std::uint32_t>(B.index_of(w)), true);
        }
      }
      for (std::size_t i = 0; i < B.size(); ++i) {
        X.colors[B.vertices[i]] = colX[i];
        Y.colors[B.vertices[i]] = colY[i];
      }
    }
  }
  ++X.step_count;
  ++Y.step_count;
  s.refresh(B.vertices);
  s.advance();
  if (debug_asserts_enabled()) {
    assert_locally_valid(X, g, B.vertices);
    assert_locally_valid(Y, g, B.vertices);
    if (!s.verify()) throw Error("coupling: disagreement bookkeeping out of sync");
  }
}

std::uint32_t coupled_block_step(CoupledState& s, const Graph& g, const BlockPartition& part,
                                 Rng& rng) {
  const auto b = static_cast<std::uint32_t>(uniform_below(rng, part.num_blocks()));
  coupled_update_block(s, g, part, b, rng);
  return b;
}

// ---------------------------------------------------------------------------

namespace {

Configuration stationary_start(const Graph& g, const BlockPartition& part, int k, Rng& rng,
                               std::uint64_t burn_in) {
  auto init = greedy_initial(g, k, rng());
  if (!init.ok) throw Error("greedy start failed at vertex " + std::to_string(init.stuck));
  Configuration x = std::move(init.cfg);
  for (std::uint64_t t = 0; t < burn_in; ++t) block_step(x, g, part, rng);
  return x;
}

std::uint64_t default_burn_in(std::size_t blocks) {
  const double nb = static_cast<double>(blocks);
  return static_cast<std::uint64_t>(std::ceil(20.0 * nb * std::log(nb + 1.0)));
}

// Color for v different from its current one and from all its neighbors; -1 if none.
int alternative_color(const Configuration& x, const Graph& g, Vertex v, Rng& rng) {
  std::vector<char> used(static_cast<std::size_t>(x.k), 0);
  used[static_cast<std::size_t>(x.colors[v])] = 1;
  for (Vertex w : g.neighbors(v)) used[static_cast<std::size_t>(x.colors[w])] = 1;
  std::vector<int> avail;
  for (int c = 0; c < x.k; ++c)
    if (!used[static_cast<std::size_t>(c)]) avail.push_back(c);
  if (avail.empty()) return -1;
  return avail[uniform_below(rng, avail.size())];
}

}  // namespace

ContractionReport contraction_experiment(const Graph& g, const BlockPartition& part, int k,
                                         std::uint64_t pairs, Rng& rng,
                                         const ContractionOptions& opts) {
  ContractionReport rep;
  rep.blocks = part.num_blocks();
  rep.max_degree = max_degree(g);
  if (static_cast<std::size_t>(k) <= 2 * rep.max_degree)
    throw Error("contraction: need k > 2 * max degree (k=" + std::to_string(k) +
                ", max degree=" + std::to_string(rep.max_degree) + ")");
  if (opts.check_diameter) {
    const std::size_t gi = girth(g);
    if (gi != 0) {
      for (std::size_t b = 0; b < part.num_blocks(); ++b) {
        const double diam = static_cast<double>(block_diameter(g, part.blocks[b]));
        if (diam > static_cast<double>(gi) / 2.0 - 3.0 && part.blocks[b].size() > 1)
          throw Error("contraction: block " + std::to_string(b) + " has diameter above girth/2 - 3");
      }
    }
  }
  if (pairs == 0) throw Error("contraction: need at least one pair");
  const double nb = static_cast<double>(rep.blocks);
  rep.bound = 1.0 - 1.0 / (2.0 * nb * static_cast<double>(rep.max_degree));
  const std::uint64_t thin = opts.thinning ? opts.thinning : rep.blocks;
  Configuration x = stationary_start(g, part, k, rng,
                                     opts.burn_in ? opts.burn_in : default_burn_in(rep.blocks));
  RunningStats stats;
  for (std::uint64_t trial = 0; trial < pairs; ++trial) {
    for (std::uint64_t t = 0; t < thin; ++t) block_step(x, g, part, rng);
    const auto u = static_cast<Vertex>(uniform_below(rng, g.num_vertices()));
    const int c = alternative_color(x, g, u, rng);
    if (c < 0) throw Error("contraction: no alternative color (k too small)");
    Configuration y = x;
    y.colors[u] = c;
    CoupledState s(x, y, part);
    const BigCount d0 = dist(s, part);
    if (d0 == 0) throw Error("contraction: pair at distance 0");
    coupled_block_step(s, g, part, rng);
    const BigCount d1 = dist(s, part);
    stats.add(static_cast<double>(Rational(d1, d0)));
  }
  rep.trials = pairs;
  rep.mean_ratio = stats.mean();
  rep.std_error = stats.std_error();
  return rep;
}

PropagationReport propagation_probe(const Graph& g, const BlockPartition& part, int k,
                                    std::uint32_t bi, Vertex u_star, std::uint64_t trials,
                                    Rng& rng, std::uint64_t burn_in) {
  const Block& B = part.blocks.at(bi);
  if (!std::binary_search(B.outer_boundary.begin(), B.outer_boundary.end(), u_star))
    throw Error("propagation_probe: u* is not on the outer boundary of the block");
  PropagationReport rep;
  rep.vertices = B.vertices;
  std::vector<std::uint64_t> hits(B.size(), 0);
  Configuration x = stationary_start(g, part, k, rng,
                                     burn_in ? burn_in : default_burn_in(part.num_blocks()));
  std::uint64_t done = 0;
  for (std::uint64_t trial = 0; trial < trials; ++trial) {
    for (std::size_t t = 0; t < part.num_blocks(); ++t) block_step(x, g, part, rng);
    const int c = alternative_color(x, g, u_star, rng);
    if (c < 0) continue;
    Configuration y = x;
    y.colors[u_star] = c;
    CoupledState s(x, y, part);
    coupled_update_block(s, g, part, bi, rng);
    for (std::size_t i = 0; i < B.size(); ++i)
      if (s.in_diff(B.vertices[i])) ++hits[i];
    ++done;
  }
  rep.trials = done;
  rep.freq.resize(B.size());
  rep.std_error.resize(B.size());
  for (std::size_t i = 0; i < B.size(); ++i) {
    const double p = done ? static_cast<double>(hits[i]) / static_cast<double>(done) : 0.0;
    rep.freq[i] = p;
    rep.std_error[i] = done ? std::sqrt(p * (1.0 - p) / static_cast<double>(done)) : 0.0;
  }
  return rep;
}

CouplingTimeResult coupling_time(const Graph& g, const BlockPartition& part, int k,
                                 std::uint64_t t_max, std::size_t replicas, std::uint64_t seed,
                                 StartKind start, std::vector<TraceRow>* trace,
                                 std::uint64_t trace_cadence, std::size_t threads) {
  CouplingTimeResult res;
  res.blocks = part.num_blocks();
  const double nb = static_cast<double>(res.blocks);
  res.n_log_n = nb * std::log(std::max(nb, 2.0));
  if (trace_cadence == 0) trace_cadence = 1;
  res.steps.assign(replicas, 0);
  res.censored.assign(replicas, 0);

  auto replica = [&](std::size_t r) {
    Rng rng = derive_rng(seed, r);
    auto init = greedy_initial(g, k, rng());
    if (!init.ok) throw Error("coupling_time: greedy start failed");
    Configuration x = std::move(init.cfg);
    Configuration y = x;
    if (start == StartKind::extremal) {
      // Random derangement of the palette: every vertex disagrees, Y stays proper.
      std::vector<int> perm(static_cast<std::size_t>(k));
      do {
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
      } while (k > 1 && [&] {
        for (int c = 0; c < k; ++c)
          if (perm[static_cast<std::size_t>(c)] == c) return true;
        return false;
      }());
      for (auto& c : y.colors) c = perm[static_cast<std::size_t>(c)];
    } else {
      const auto u = static_cast<Vertex>(uniform_below(rng, g.num_vertices()));
      const int c = alternative_color(x, g, u, rng);
      if (c >= 0) y.colors[u] = c;
    }
    CoupledState s(std::move(x), std::move(y), part);
    const bool tracing = trace != nullptr && r == 0;
    if (tracing) trace->push_back({0, dist(s, part), s.diff_size(), s.boundary_diff_size(), s.hist_size()});
    std::uint64_t t = 0;
    while (!s.coupled() && t < t_max) {
      coupled_block_step(s, g, part, rng);
      ++t;
      if (tracing && (t % trace_cadence == 0 || s.coupled()))
        trace->push_back({t, dist(s, part), s.diff_size(), s.boundary_diff_size(), s.hist_size()});
    }
    res.steps[r] = t;
    res.censored[r] = s.coupled() ? 0 : 1;
  };

  parallel_for(replicas, threads, replica);
  std::vector<double> v(res.steps.begin(), res.steps.end());
  res.median = median(v);
  return res;
}

}  // namespace blockmix
