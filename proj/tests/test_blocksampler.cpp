#include <cmath>
#include <map>

#include "doctest.h"

#include "blockmix/blocksampler.hpp"
#include "blockmix/stats.hpp"
#include "oracles.hpp"

using namespace blockmix;

namespace {

Block whole(const Graph& g) { return whole_partition(g).blocks[0]; }

ColorLists random_lists(std::size_t n, int k, Rng& rng) {
  ColorLists L = ColorLists::full(n, k);
  for (std::size_t i = 0; i < n; ++i)
    for (int c = 0; c < k; ++c) L.set(i, c, uniform01(rng) < 0.7);
  return L;
}

}  // namespace

TEST_CASE("small counts") {
  Graph p3 = families::path(3);
  CHECK(count_list_colorings(p3, whole(p3), ColorLists::full(3, 3)) == 12);
  Graph one = families::empty(1);
  ColorLists L = ColorLists::full(1, 3);
  L.set(0, 0, false);
  CHECK(count_list_colorings(one, whole(one), L) == 2);
  Graph tri = families::cycle(3);
  CHECK(count_unicyclic(tri, whole(tri), ColorLists::full(3, 3)) == 6);
  Graph c4 = families::cycle(4);
  CHECK(count_unicyclic(c4, whole(c4), ColorLists::full(4, 3)) == 18);
  CHECK_THROWS_AS(count_list_colorings(c4, whole(c4), ColorLists::full(4, 3)), Error);
  // chromatic polynomial of C_n
  for (std::size_t n = 3; n <= 9; ++n) {
    Graph c = families::cycle(n);
    const long long want = static_cast<long long>(std::pow(4, n)) + (n % 2 ? -4 : 4);
    CHECK(count_block_colorings(c, whole(c), ColorLists::full(n, 5)) == want);
  }
}

TEST_CASE("counts agree with exhaustive enumeration") {
  Rng rng = derive_rng(11, 0);
  int mismatches = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const bool uni = trial % 2 == 1;
    const std::size_t n = (uni ? 3 : 1) + uniform_below(rng, uni ? 5 : 7);
    const int k = 1 + static_cast<int>(uniform_below(rng, 4));
    Graph g = oracle::random_block_graph(n, uni, rng);
    Block b = whole(g);
    ColorLists L = random_lists(n, k, rng);
    const BigCount got = uni ? count_unicyclic(g, b, L) : count_list_colorings(g, b, L);
    if (got != oracle::count_block(g, b, L)) ++mismatches;
  }
  CHECK(mismatches == 0);
}

TEST_CASE("boundary lists remove outside colors") {
  Graph p3 = families::path(3);
  auto part = make_partition(p3, {{0}, {1}, {2}});
  std::vector<int> colors{0, 2, 1};
  auto L = boundary_lists(p3, part.blocks[1], colors, 4);
  CHECK(L.list_size(0) == 2);
  CHECK_FALSE(L.allows(0, 0));
  CHECK_FALSE(L.allows(0, 1));
  CHECK(L.allows(0, 2));
  CHECK(L.allows(0, 3));
}

TEST_CASE("singleton sampling is uniform over available colors") {
  // v = 0 with neighbors colored 0 and 1, k = 4
  Graph star = families::star(2);
  auto part = singleton_partition(star);
  std::vector<int> colors{2, 0, 1};
  Rng rng = derive_rng(5, 0);
  std::vector<std::uint64_t> freq(4, 0);
  for (int i = 0; i < 40000; ++i) {
    sample_block_coloring(star, part.blocks[0], colors, 4, rng);
    ++freq[static_cast<std::size_t>(colors[0])];
  }
  CHECK(freq[0] == 0);
  CHECK(freq[1] == 0);
  CHECK(chi_square({freq[2], freq[3]}, {0.5, 0.5}).p_value > 0.001);
}

TEST_CASE("star block draws are uniform over its 24 colorings") {
  Graph star = families::star(3);
  Block b = whole(star);
  Rng rng = derive_rng(6, 0);
  for (SampleMode mode : {SampleMode::exact, SampleMode::fast}) {
    std::map<std::vector<int>, std::uint64_t> freq;
    std::vector<int> colors(4, 0);
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) {
      sample_block_coloring(star, b, colors, 3, rng, mode);
      for (Vertex v = 1; v < 4; ++v) REQUIRE(colors[v] != colors[0]);
      ++freq[colors];
    }
    REQUIRE(freq.size() == 24);
    std::vector<std::uint64_t> obs;
    for (auto& [c, f] : freq) {
      obs.push_back(f);
      const double sd = std::sqrt(draws * (1.0 / 24) * (23.0 / 24));
      CHECK(std::abs(static_cast<double>(f) - draws / 24.0) <= 4 * sd);
    }
    CHECK(chi_square(obs, std::vector<double>(24, 1.0 / 24)).p_value > 0.001);
  }
}

TEST_CASE("unicyclic sampler respects boundary and is uniform") {
  // 4-cycle block 0..3 plus a pendant outside vertex 4 attached to 0
  std::vector<Edge> e{{0, 1}, {1, 2}, {2, 3}, {0, 3}, {0, 4}};
  Graph g = Graph::from_edges(5, e);
  auto part = make_partition(g, {{0, 1, 2, 3}, {4}});
  const Block& b = part.blocks[0];
  std::vector<int> colors{1, 0, 1, 0, 0};
  ColorLists L = boundary_lists(g, b, colors, 3);
  const auto total = count_block_colorings(g, b, L);
  CHECK(total == 12);  // 18 colorings of C4, two thirds avoid color 0 at vertex 0
  Rng rng = derive_rng(7, 0);
  std::map<std::vector<int>, std::uint64_t> freq;
  for (int i = 0; i < 50000; ++i) {
    sample_block_coloring(g, b, colors, 3, rng);
    REQUIRE(colors[0] != 0);
    ++freq[colors];
  }
  CHECK(freq.size() == 12);
  std::vector<std::uint64_t> obs;
  for (auto& [c, f] : freq) obs.push_back(f);
  CHECK(chi_square(obs, std::vector<double>(obs.size(), 1.0 / 12)).p_value > 0.001);
}

TEST_CASE("marginals") {
  Graph star = families::star(1);  // v = 0, neighbor 1
  auto part = singleton_partition(star);
  std::vector<int> colors{0, 0};
  CHECK(marginal(star, part.blocks[0], colors, 3, 0, 1) == doctest::Approx(0.5));
  CHECK(marginal(star, part.blocks[0], colors, 3, 0, 0) == 0.0);

  Rng rng = derive_rng(8, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const bool uni = trial % 2;
    const std::size_t n = 3 + uniform_below(rng, 5);
    Graph g = oracle::random_block_graph(n, uni, rng);
    BlockTree t = BlockTree::of(g, whole(g));
    ColorLists L = random_lists(n, 4, rng);
    if (count_colorings(t, L) == 0) continue;
    for (std::size_t v = 0; v < n; ++v) {
      auto ex = marginal_exact(t, L, v);
      auto fast = marginal_fast(t, L, v);
      Rational sum = 0;
      for (int c = 0; c < 4; ++c) {
        sum += ex[static_cast<std::size_t>(c)];
        CHECK(fast[static_cast<std::size_t>(c)] ==
              doctest::Approx(static_cast<double>(ex[static_cast<std::size_t>(c)])).epsilon(1e-12));
      }
      CHECK(sum == 1);
    }
  }
}

TEST_CASE("path marginal matches sampled frequency") {
  std::vector<Edge> e{{0, 1}, {1, 2}, {2, 3}, {3, 4}, {0, 5}, {4, 6}, {2, 7}};
  Graph g = Graph::from_edges(8, e);
  auto part = make_partition(g, {{0, 1, 2, 3, 4}, {5}, {6}, {7}});
  const Block& b = part.blocks[0];
  std::vector<int> colors{0, 0, 0, 0, 0, 1, 2, 0};
  const double m = marginal(g, b, colors, 4, 2, 3);
  Rng rng = derive_rng(9, 0);
  const int draws = 1000000;
  int hits = 0;
  for (int i = 0; i < draws; ++i) {
    sample_block_coloring(g, b, colors, 4, rng);
    hits += colors[2] == 3;
  }
  const double sd = std::sqrt(m * (1 - m) / draws);
  CHECK(std::abs(hits / static_cast<double>(draws) - m) <= 4 * sd);
}

TEST_CASE("subtree tables condition on the parent") {
  Graph g = families::path(4);
  BlockTree t = BlockTree::of(g, whole(g));
  auto tab = subtree_tables(t, ColorLists::full(4, 3), 0);
  CHECK(tab.order.front() == 0);
  CHECK(tab.parent[0] < 0);
  // leaf 3 below its parent: uniform over the 3 colors before the parent constraint
  for (int c = 0; c < 3; ++c) CHECK(tab.q[3 * 3 + static_cast<std::size_t>(c)] == doctest::Approx(1.0 / 3));
  CHECK(std::exp(tab.log_count) == doctest::Approx(24.0));
}

TEST_CASE("hard-core blocks") {
  Graph edge = families::path(2);
  BlockTree t = BlockTree::of(edge, whole(edge));
  std::vector<char> none(2, 0);
  CHECK(std::exp(hardcore_log_partition(t, none, 1.0)) == doctest::Approx(3.0));
  Graph tri = families::cycle(3);
  BlockTree tt = BlockTree::of(tri, whole(tri));
  for (double lam : {0.5, 1.0, 2.5})
    CHECK(std::exp(hardcore_log_partition(tt, std::vector<char>(3, 0), lam)) == doctest::Approx(1 + 3 * lam));

  Rng rng = derive_rng(10, 0);
  std::vector<std::uint64_t> freq(3, 0);  // empty, {0}, {1}
  for (int i = 0; i < 60000; ++i) {
    auto occ = sample_hardcore(t, none, 1.0, rng);
    REQUIRE_FALSE((occ[0] && occ[1]));
    ++freq[occ[0] ? 1 : occ[1] ? 2 : 0];
  }
  CHECK(chi_square(freq, {1.0 / 3, 1.0 / 3, 1.0 / 3}).p_value > 0.001);

  // blocked vertex stays vacant
  std::vector<Edge> e{{0, 1}, {1, 2}};
  Graph p3 = Graph::from_edges(3, e);
  auto part = make_partition(p3, {{0, 1}, {2}});
  std::vector<char> occ{0, 0, 1};
  auto blocked = hardcore_blocked(p3, part.blocks[0], occ);
  CHECK(blocked == std::vector<char>{0, 1});
  for (int i = 0; i < 100; ++i) {
    sample_block_hardcore(p3, part.blocks[0], occ, 3.0, rng);
    CHECK(occ[1] == 0);
  }
}

TEST_CASE("hard-core sampler matches exhaustive weights on small blocks") {
  Rng rng = derive_rng(12, 0);
  for (int trial = 0; trial < 6; ++trial) {
    const bool uni = trial % 2;
    const std::size_t n = 4 + uniform_below(rng, 4);
    Graph g = oracle::random_block_graph(n, uni, rng);
    BlockTree t = BlockTree::of(g, whole(g));
    std::vector<char> blocked(n, 0);
    blocked[0] = trial % 3 == 0;
    const double lam = 0.7;
    std::map<std::vector<int>, double> weight;
    oracle::for_each_assignment(n, 2, [&](const std::vector<int>& a) {
      for (std::size_t i = 0; i < n; ++i)
        if (a[i] && blocked[i]) return;
      for (auto [u, v] : g.edges())
        if (a[u] && a[v]) return;
      int occ = 0;
      for (int x : a) occ += x;
      weight[a] = std::pow(lam, occ);
    });
    double z = 0;
    for (auto& [a, w] : weight) z += w;
    CHECK(std::exp(hardcore_log_partition(t, blocked, lam)) == doctest::Approx(z));
    std::map<std::vector<int>, std::uint64_t> freq;
    for (int i = 0; i < 100000; ++i) {
      auto s = sample_hardcore(t, blocked, lam, rng);
      ++freq[std::vector<int>(s.begin(), s.end())];
    }
    std::vector<std::uint64_t> obs;
    std::vector<double> exp;
    for (auto& [a, w] : weight) {
      obs.push_back(freq[a]);
      exp.push_back(w / z);
    }
    CHECK(freq.size() == weight.size());
    CHECK(chi_square(obs, exp).p_value > 0.001);
  }
}

TEST_CASE("weighted helpers") {
  Rng rng = derive_rng(13, 0);
  std::vector<double> w{0.0, 1.0, 3.0};
  std::vector<std::uint64_t> f(3, 0);
  for (int i = 0; i < 40000; ++i) ++f[static_cast<std::size_t>(sample_weighted(w, rng))];
  CHECK(f[0] == 0);
  CHECK(chi_square({f[1], f[2]}, {0.25, 0.75}).p_value > 0.001);
  std::vector<BigCount> bw{BigCount(0), BigCount(1) << 100, BigCount(3) << 100};
  std::vector<std::uint64_t> g(3, 0);
  for (int i = 0; i < 40000; ++i) ++g[static_cast<std::size_t>(sample_weighted(bw, rng))];
  CHECK(g[0] == 0);
  CHECK(chi_square({g[1], g[2]}, {0.25, 0.75}).p_value > 0.001);
  const BigCount big = (BigCount(1) << 90) + 7;
  for (int i = 0; i < 100; ++i) CHECK(uniform_big_below(rng, big) < big);
}
