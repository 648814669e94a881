#include "blockmix/blocksampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace blockmix {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct Rooting {
  std::vector<std::uint32_t> order;
  std::vector<std::int64_t> parent;
};

Rooting root_tree(const BlockTree& t, std::uint32_t root) {
  const std::size_t s = t.size();
  Rooting rt;
  rt.parent.assign(s, -2);
  rt.order.reserve(s);
  rt.order.push_back(root);
  rt.parent[root] = -1;
  for (std::size_t h = 0; h < rt.order.size(); ++h) {
    const std::uint32_t v = rt.order[h];
    for (std::uint32_t u : t.adj[v])
      if (rt.parent[u] == -2) {
        rt.parent[u] = v;
        rt.order.push_back(u);
      }
  }
  if (rt.order.size() != s) throw Error("block is not connected");
  return rt;
}

// Subtree counts m[i*k + c] for the tree rooted at rt.order[0].
std::vector<BigCount> exact_tables(const BlockTree& t, const Rooting& rt, const ColorLists& L) {
  const auto k = static_cast<std::size_t>(L.k);
  const std::size_t s = t.size();
  std::vector<BigCount> m(s * k);
  std::vector<BigCount> total(s);
  for (std::size_t h = s; h-- > 0;) {
    const std::uint32_t v = rt.order[h];
    for (std::size_t c = 0; c < k; ++c) {
      BigCount& cell = m[v * k + c];
      cell = L.allowed[v * k + c] ? 1 : 0;
      if (cell == 0) continue;
      for (std::uint32_t u : t.adj[v]) {
        if (static_cast<std::int64_t>(u) == rt.parent[v]) continue;
        cell *= total[u] - m[u * k + c];
        if (cell == 0) break;
      }
    }
    BigCount sum = 0;
    for (std::size_t c = 0; c < k; ++c) sum += m[v * k + c];
    total[v] = std::move(sum);
  }
  return m;
}

BigCount root_total(const std::vector<BigCount>& m, std::uint32_t root, int k) {
  BigCount sum = 0;
  for (int c = 0; c < k; ++c) sum += m[root * static_cast<std::size_t>(k) + static_cast<std::size_t>(c)];
  return sum;
}

// Lists with the cut edge's endpoints resolved: a pinned to ca, b barred from ca.
ColorLists cut_lists(const BlockTree& t, const ColorLists& L, int ca) {
  ColorLists out = L;
  out.pin(t.cut->first, ca);
  out.set(t.cut->second, ca, false);
  return out;
}

SubtreeTables fast_tables(const BlockTree& t, const Rooting& rt, const ColorLists& L) {
  const auto k = static_cast<std::size_t>(L.k);
  const std::size_t s = t.size();
  SubtreeTables out;
  out.order = rt.order;
  out.parent = rt.parent;
  out.q.assign(s * k, 0.0);
  std::vector<double> logs(s, 0.0);
  for (std::size_t h = s; h-- > 0;) {
    const std::uint32_t v = rt.order[h];
    double* row = &out.q[v * k];
    double lsum = 0.0;
    for (std::size_t c = 0; c < k; ++c) row[c] = L.allowed[v * k + c] ? 1.0 : 0.0;
    for (std::uint32_t u : t.adj[v]) {
      if (static_cast<std::int64_t>(u) == rt.parent[v]) continue;
      const double* child = &out.q[u * k];
      for (std::size_t c = 0; c < k; ++c) row[c] *= 1.0 - child[c];
      lsum += logs[u];
      // Rescale per child so long products cannot underflow.
      double mx = 0.0;
      for (std::size_t c = 0; c < k; ++c) mx = std::max(mx, row[c]);
      if (mx == 0.0) {
        out.log_count = kNegInf;
        return out;
      }
      for (std::size_t c = 0; c < k; ++c) row[c] /= mx;
      lsum += std::log(mx);
    }
    double sum = 0.0;
    for (std::size_t c = 0; c < k; ++c) sum += row[c];
    if (sum <= 0.0) {
      out.log_count = kNegInf;
      return out;
    }
    for (std::size_t c = 0; c < k; ++c) row[c] /= sum;
    logs[v] = lsum + std::log(sum);
  }
  out.log_count = logs[rt.order[0]];
  return out;
}

template <class Pick>
std::vector<int> backward_sample(const Rooting& rt, int k, Pick&& pick) {
  std::vector<int> col(rt.order.size(), -1);
  for (std::uint32_t v : rt.order) {
    const int forbidden = rt.parent[v] < 0 ? -1 : col[static_cast<std::size_t>(rt.parent[v])];
    col[v] = pick(v, forbidden);
    if (col[v] < 0 || col[v] >= k) throw Error("block sampler: no admissible color");
  }
  return col;
}

std::vector<int> sample_tree_exact(const BlockTree& t, const ColorLists& L, Rng& rng) {
  const Rooting rt = root_tree(t, 0);
  const auto m = exact_tables(t, rt, L);
  const auto k = static_cast<std::size_t>(L.k);
  if (root_total(m, 0, L.k) == 0) throw Error("block sampler: infeasible boundary");
  std::vector<BigCount> w(k);
  return backward_sample(rt, L.k, [&](std::uint32_t v, int forbidden) {
    for (std::size_t c = 0; c < k; ++c)
      w[c] = static_cast<int>(c) == forbidden ? BigCount(0) : m[v * k + c];
    return sample_weighted(w, rng);
  });
}

std::vector<int> sample_tree_fast(const BlockTree& t, const ColorLists& L, Rng& rng) {
  const Rooting rt = root_tree(t, 0);
  const SubtreeTables tab = fast_tables(t, rt, L);
  if (tab.log_count == kNegInf) throw Error("block sampler: infeasible boundary");
  const auto k = static_cast<std::size_t>(L.k);
  std::vector<double> w(k);
  return backward_sample(rt, L.k, [&](std::uint32_t v, int forbidden) {
    for (std::size_t c = 0; c < k; ++c)
      w[c] = static_cast<int>(c) == forbidden ? 0.0 : tab.q[v * k + c];
    return sample_weighted(w, rng);
  });
}

}  // namespace

// ---------------------------------------------------------------------------

ColorLists ColorLists::full(std::size_t size, int k) {
  if (k < 1) throw Error("color lists need k >= 1");
  ColorLists L;
  L.k = k;
  L.allowed.assign(size * static_cast<std::size_t>(k), 1);
  return L;
}

void ColorLists::pin(std::size_t i, int c) {
  const bool had = allows(i, c);
  for (int x = 0; x < k; ++x) set(i, x, false);
  set(i, c, had);
}

std::size_t ColorLists::list_size(std::size_t i) const {
  std::size_t n = 0;
  for (int c = 0; c < k; ++c) n += allows(i, c) ? 1 : 0;
  return n;
}

ColorLists boundary_lists(const Graph& g, const Block& b, const std::vector<int>& colors, int k) {
  ColorLists L = ColorLists::full(b.size(), k);
  const bool indexed = !b.nbr_pos.empty();
  std::size_t j = 0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    const auto nb = g.neighbors(b.vertices[i]);
    if (!b.deg_out.empty() && b.deg_out[i] == 0) {
      j += nb.size();
      continue;
    }
    for (Vertex w : nb) {
      const bool inside = indexed ? b.nbr_pos[j++] != Block::kOutside : b.contains(w);
      if (inside) continue;
      const int c = colors[w];
      if (c >= 0 && c < k) L.set(i, c, false);
    }
  }
  return L;
}

BlockTree BlockTree::of(const Graph& g, const Block& b) {
  if (b.kind == BlockKind::irregular) throw Error("block sampler: irregular block");
  BlockTree t;
  const std::size_t s = b.size();
  t.adj.resize(s);
  if (!b.nbr_pos.empty()) {
    std::size_t j = 0;
    for (std::size_t i = 0; i < s; ++i) {
      t.adj[i].reserve(b.deg_in.empty() ? 0 : b.deg_in[i]);
      for (std::size_t e = 0; e < g.degree(b.vertices[i]); ++e, ++j)
        if (b.nbr_pos[j] != Block::kOutside) t.adj[i].push_back(b.nbr_pos[j]);
    }
  } else {
    for (std::size_t i = 0; i < s; ++i)
      for (Vertex w : g.neighbors(b.vertices[i]))
        if (b.contains(w)) t.adj[i].push_back(static_cast<std::uint32_t>(b.index_of(w)));
  }
  if (b.kind == BlockKind::unicyclic) {
    if (b.cycle.size() < 3) throw Error("unicyclic block without a cycle");
    Edge best{std::numeric_limits<Vertex>::max(), std::numeric_limits<Vertex>::max()};
    for (std::size_t j = 0; j < b.cycle.size(); ++j) {
      Vertex x = b.cycle[j], y = b.cycle[(j + 1) % b.cycle.size()];
      if (x > y) std::swap(x, y);
      best = std::min(best, Edge{x, y});
    }
    const auto a = static_cast<std::uint32_t>(b.index_of(best.first));
    const auto c = static_cast<std::uint32_t>(b.index_of(best.second));
    std::erase(t.adj[a], c);
    std::erase(t.adj[c], a);
    t.cut = std::make_pair(a, c);
  }
  return t;
}

BigCount count_colorings(const BlockTree& t, const ColorLists& L) {
  if (L.size() != t.size()) throw Error("color lists do not match the block");
  if (!t.cut) {
    const Rooting rt = root_tree(t, 0);
    return root_total(exact_tables(t, rt, L), 0, L.k);
  }
  // Fix the cut endpoint a to each color; b is rooted so its table reads the pair counts.
  const Rooting rt = root_tree(t, t.cut->second);
  BigCount sum = 0;
  for (int ca = 0; ca < L.k; ++ca) {
    if (!L.allows(t.cut->first, ca)) continue;
    sum += root_total(exact_tables(t, rt, cut_lists(t, L, ca)), t.cut->second, L.k);
  }
  return sum;
}

BigCount count_list_colorings(const Graph& g, const Block& b, const ColorLists& lists) {
  if (b.kind == BlockKind::unicyclic || b.kind == BlockKind::irregular)
    throw Error("count_list_colorings: block must be a tree or singleton");
  return count_colorings(BlockTree::of(g, b), lists);
}

BigCount count_unicyclic(const Graph& g, const Block& b, const ColorLists& lists) {
  if (b.kind != BlockKind::unicyclic) throw Error("count_unicyclic: block is not unicyclic");
  return count_colorings(BlockTree::of(g, b), lists);
}

BigCount count_block_colorings(const Graph& g, const Block& b, const ColorLists& lists) {
  return count_colorings(BlockTree::of(g, b), lists);
}

// ---------------------------------------------------------------------------

BigCount uniform_big_below(Rng& rng, const BigCount& n) {
  if (n <= 0) throw Error("uniform_big_below: bound must be positive");
  if (n <= std::numeric_limits<std::uint64_t>::max())
    return BigCount(uniform_below(rng, static_cast<std::uint64_t>(n)));
  const std::size_t bits = boost::multiprecision::msb(n) + 1;
  for (;;) {
    BigCount r = 0;
    std::size_t have = 0;
    while (have < bits) {
      r <<= 64;
      r += rng();
      have += 64;
    }
    r >>= static_cast<unsigned>(have - bits);
    if (r < n) return r;
  }
}

int sample_weighted(const std::vector<BigCount>& w, Rng& rng) {
  BigCount total = 0;
  for (const auto& x : w) total += x;
  if (total <= 0) return -1;
  BigCount r = uniform_big_below(rng, total);
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (r < w[i]) return static_cast<int>(i);
    r -= w[i];
  }
  return -1;
}

int sample_weighted(const std::vector<double>& w, Rng& rng) {
  double total = 0.0;
  int last = -1;
  for (std::size_t i = 0; i < w.size(); ++i) {
    total += w[i];
    if (w[i] > 0.0) last = static_cast<int>(i);
  }
  if (!(total > 0.0)) return -1;
  double r = uniform01(rng) * total;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] <= 0.0) continue;
    if (r < w[i]) return static_cast<int>(i);
    r -= w[i];
  }
  return last;
}

std::vector<int> sample_list_coloring(const BlockTree& t, const ColorLists& L, Rng& rng,
                                      SampleMode mode) {
  if (L.size() != t.size()) throw Error("color lists do not match the block");
  if (t.size() == 1) {
    std::vector<int> avail;
    for (int c = 0; c < L.k; ++c)
      if (L.allows(0, c)) avail.push_back(c);
    if (avail.empty()) throw Error("block sampler: infeasible boundary");
    return {avail[uniform_below(rng, avail.size())]};
  }
  const bool exact = mode == SampleMode::exact ||
                     (mode == SampleMode::automatic && t.size() <= kExactSampleLimit);
  if (!t.cut) return exact ? sample_tree_exact(t, L, rng) : sample_tree_fast(t, L, rng);

  // Unicyclic: draw a's color by its count (b excluded from that color), then a tree sample.
  const std::uint32_t a = t.cut->first;
  int ca = -1;
  if (exact) {
    const Rooting rt = root_tree(t, t.cut->second);
    std::vector<BigCount> w(static_cast<std::size_t>(L.k), 0);
    for (int c = 0; c < L.k; ++c)
      if (L.allows(a, c))
        w[static_cast<std::size_t>(c)] = root_total(exact_tables(t, rt, cut_lists(t, L, c)), t.cut->second, L.k);
    ca = sample_weighted(w, rng);
  } else {
    const Rooting rt = root_tree(t, t.cut->second);
    std::vector<double> lw(static_cast<std::size_t>(L.k), kNegInf);
    double mx = kNegInf;
    for (int c = 0; c < L.k; ++c)
      if (L.allows(a, c)) {
        lw[static_cast<std::size_t>(c)] = fast_tables(t, rt, cut_lists(t, L, c)).log_count;
        mx = std::max(mx, lw[static_cast<std::size_t>(c)]);
      }
    if (mx == kNegInf) throw Error("block sampler: infeasible boundary");
    std::vector<double> w(lw.size());
    for (std::size_t c = 0; c < w.size(); ++c) w[c] = lw[c] == kNegInf ? 0.0 : std::exp(lw[c] - mx);
    ca = sample_weighted(w, rng);
  }
  if (ca < 0) throw Error("block sampler: infeasible boundary");
  const ColorLists fixed = cut_lists(t, L, ca);
  return exact ? sample_tree_exact(t, fixed, rng) : sample_tree_fast(t, fixed, rng);
}

void sample_block_coloring(const Graph& g, const Block& b, std::vector<int>& colors, int k,
                           Rng& rng, SampleMode mode) {
  const ColorLists L = boundary_lists(g, b, colors, k);
  if (b.size() == 1) {
    // Heat-bath fast path: uniform over the available colors.
    const std::size_t count = L.list_size(0);
    if (count == 0) throw Error("block sampler: infeasible boundary at vertex " + std::to_string(b.vertices[0]));
    std::uint64_t pick = uniform_below(rng, count);
    for (int c = 0; c < k; ++c)
      if (L.allows(0, c) && pick-- == 0) {
        colors[b.vertices[0]] = c;
        return;
      }
  }
  const BlockTree t = BlockTree::of(g, b);
  const auto col = sample_list_coloring(t, L, rng, mode);
  for (std::size_t i = 0; i < b.size(); ++i) colors[b.vertices[i]] = col[i];
}

// ---------------------------------------------------------------------------

std::vector<Rational> marginal_exact(const BlockTree& t, const ColorLists& L, std::size_t v) {
  const auto k = static_cast<std::size_t>(L.k);
  const Rooting rt = root_tree(t, static_cast<std::uint32_t>(v));
  std::vector<BigCount> num(k, 0);
  auto accumulate = [&](const ColorLists& lists) {
    const auto m = exact_tables(t, rt, lists);
    for (std::size_t c = 0; c < k; ++c) num[c] += m[v * k + c];
  };
  if (!t.cut) {
    accumulate(L);
  } else {
    for (int ca = 0; ca < L.k; ++ca)
      if (L.allows(t.cut->first, ca)) accumulate(cut_lists(t, L, ca));
  }
  BigCount total = 0;
  for (const auto& x : num) total += x;
  if (total == 0) throw Error("marginal: infeasible boundary");
  std::vector<Rational> out(k);
  for (std::size_t c = 0; c < k; ++c) out[c] = Rational(num[c], total);
  return out;
}

double marginal(const Graph& g, const Block& b, const std::vector<int>& colors, int k, Vertex v,
                int c) {
  if (c < 0 || c >= k) throw Error("marginal: color out of range");
  const ColorLists L = boundary_lists(g, b, colors, k);
  const auto m = marginal_exact(BlockTree::of(g, b), L, b.index_of(v));
  return static_cast<double>(m[static_cast<std::size_t>(c)]);
}

SubtreeTables subtree_tables(const BlockTree& t, const ColorLists& lists, std::uint32_t root) {
  return fast_tables(t, root_tree(t, root), lists);
}

std::vector<double> marginal_fast(const BlockTree& t, const ColorLists& L, std::size_t v) {
  const auto k = static_cast<std::size_t>(L.k);
  const Rooting rt = root_tree(t, static_cast<std::uint32_t>(v));
  std::vector<double> out(k, 0.0);
  if (!t.cut) {
    const auto tab = fast_tables(t, rt, L);
    if (tab.log_count == kNegInf) throw Error("marginal: infeasible boundary");
    std::copy(tab.q.begin() + static_cast<std::ptrdiff_t>(v * k),
              tab.q.begin() + static_cast<std::ptrdiff_t>((v + 1) * k), out.begin());
    return out;
  }
  std::vector<SubtreeTables> parts;
  double mx = kNegInf;
  for (int ca = 0; ca < L.k; ++ca) {
    if (!L.allows(t.cut->first, ca)) continue;
    parts.push_back(fast_tables(t, rt, cut_lists(t, L, ca)));
    mx = std::max(mx, parts.back().log_count);
  }
  if (mx == kNegInf) throw Error("marginal: infeasible boundary");
  double total = 0.0;
  for (const auto& p : parts) {
    if (p.log_count == kNegInf) continue;
    const double w = std::exp(p.log_count - mx);
    for (std::size_t c = 0; c < k; ++c) out[c] += w * p.q[v * k + c];
    total += w;
  }
  for (auto& x : out) x /= total;
  return out;
}

// --- hard-core -------------------------------------------------------------------

namespace {

// force: 0 free, 1 vacant, 2 occupied. z1[i] = Pr[i occupied] within its subtree.
struct HardcoreTables {
  std::vector<double> z1;
  double log_z = kNegInf;
};

HardcoreTables hardcore_tables(const BlockTree& t, const Rooting& rt,
                               const std::vector<char>& force, double lambda) {
  const std::size_t s = t.size();
  HardcoreTables out;
  out.z1.assign(s, 0.0);
  std::vector<double> logs(s, 0.0);
  for (std::size_t h = s; h-- > 0;) {
    const std::uint32_t v = rt.order[h];
    double r0 = force[v] == 2 ? 0.0 : 1.0;
    double r1 = force[v] == 1 ? 0.0 : lambda;
    double lsum = 0.0;
    for (std::uint32_t u : t.adj[v]) {
      if (static_cast<std::int64_t>(u) == rt.parent[v]) continue;
      r1 *= 1.0 - out.z1[u];
      lsum += logs[u];
    }
    const double sum = r0 + r1;
    if (sum <= 0.0) return out;
    out.z1[v] = r1 / sum;
    logs[v] = lsum + std::log(sum);
  }
  out.log_z = logs[rt.order[0]];
  return out;
}

std::vector<char> hardcore_draw(const Rooting& rt, const HardcoreTables& tab, Rng& rng) {
  std::vector<char> occ(rt.order.size(), 0);
  for (std::uint32_t v : rt.order) {
    const bool parent_occ = rt.parent[v] >= 0 && occ[static_cast<std::size_t>(rt.parent[v])];
    occ[v] = !parent_occ && uniform01(rng) < tab.z1[v] ? 1 : 0;
  }
  return occ;
}

}  // namespace

std::vector<char> hardcore_blocked(const Graph& g, const Block& b,
                                   const std::vector<char>& occupied) {
  std::vector<char> blocked(b.size(), 0);
  for (std::size_t i = 0; i < b.size(); ++i)
    for (Vertex w : g.neighbors(b.vertices[i]))
      if (!b.contains(w) && occupied[w]) blocked[i] = 1;
  return blocked;
}

double hardcore_log_partition(const BlockTree& t, const std::vector<char>& blocked,
                              double lambda) {
  if (!(lambda >= 0.0)) throw Error("hard-core: lambda must be >= 0");
  std::vector<char> force(blocked.begin(), blocked.end());
  if (!t.cut) return hardcore_tables(t, root_tree(t, 0), force, lambda).log_z;
  const auto [a, b] = *t.cut;
  const Rooting rt = root_tree(t, b);
  std::vector<char> f0 = force, f1 = force;
  f0[a] = 1;
  f1[a] = force[a] == 1 ? 1 : 2;
  f1[b] = 1;
  const double l0 = hardcore_tables(t, rt, f0, lambda).log_z;
  const double l1 = force[a] == 1 ? kNegInf : hardcore_tables(t, rt, f1, lambda).log_z;
  const double mx = std::max(l0, l1);
  if (mx == kNegInf) return kNegInf;
  return mx + std::log((l0 == kNegInf ? 0.0 : std::exp(l0 - mx)) +
                       (l1 == kNegInf ? 0.0 : std::exp(l1 - mx)));
}

std::vector<char> sample_hardcore(const BlockTree& t, const std::vector<char>& blocked,
                                  double lambda, Rng& rng) {
  if (!(lambda >= 0.0)) throw Error("hard-core: lambda must be >= 0");
  std::vector<char> force(blocked.begin(), blocked.end());
  if (!t.cut) {
    const Rooting rt = root_tree(t, 0);
    return hardcore_draw(rt, hardcore_tables(t, rt, force, lambda), rng);
  }
  const auto [a, b] = *t.cut;
  const Rooting rt = root_tree(t, b);
  std::vector<char> f0 = force, f1 = force;
  f0[a] = 1;
  f1[a] = 2;
  f1[b] = 1;
  const auto t0 = hardcore_tables(t, rt, f0, lambda);
  const bool a_free = force[a] != 1;
  HardcoreTables t1;
  if (a_free) t1 = hardcore_tables(t, rt, f1, lambda);
  const double mx = std::max(t0.log_z, t1.log_z);
  const double w0 = t0.log_z == kNegInf ? 0.0 : std::exp(t0.log_z - mx);
  const double w1 = t1.log_z == kNegInf ? 0.0 : std::exp(t1.log_z - mx);
  const bool pick_occ = uniform01(rng) * (w0 + w1) >= w0;
  return hardcore_draw(rt, pick_occ ? t1 : t0, rng);
}

void sample_block_hardcore(const Graph& g, const Block& b, std::vector<char>& occupied,
                           double lambda, Rng& rng) {
  const auto blocked = hardcore_blocked(g, b, occupied);
  if (b.size() == 1) {
    const Vertex v = b.vertices[0];
    occupied[v] = !blocked[0] && uniform01(rng) < lambda / (1.0 + lambda) ? 1 : 0;
    return;
  }
  const auto occ = sample_hardcore(BlockTree::of(g, b), blocked, lambda, rng);
  for (std::size_t i = 0; i < b.size(); ++i) occupied[b.vertices[i]] = occ[i];
}

}  // namespace blockmix
