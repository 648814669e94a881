#include <cmath>

#include "doctest.h"

#include "blockmix/coupling.hpp"
#include "blockmix/stats.hpp"

using namespace blockmix;

TEST_CASE("distance weights") {
  Graph p4 = families::path(4);
  auto part = make_partition(p4, {{0, 1}, {2, 3}});
  auto x = Configuration::coloring({0, 1, 0, 1}, 3);
  CHECK(dist(x, x, part) == 0);
  auto y = x;
  y.colors[0] = 2;
  CHECK(dist(x, y, part) == 1);
  y = x;
  y.colors[1] = 2;
  CHECK(dist(x, y, part) == 16);  // n^2 * deg_out = 16 * 1

  // boundary vertex with deg_out = 3
  Graph star = families::star(3);
  auto sp = singleton_partition(star);
  auto a = Configuration::coloring({0, 1, 1, 1}, 3);
  auto b = a;
  b.colors[0] = 2;
  CHECK(dist(a, b, sp) == 3 * 16);
  CHECK(vertex_distance_weight(sp, 0) == 48);
}

TEST_CASE("coupled state bookkeeping") {
  Graph p4 = families::path(4);
  auto part = make_partition(p4, {{0, 1}, {2, 3}});
  auto x = Configuration::coloring({0, 1, 0, 1}, 3);
  auto y = x;
  y.colors[3] = 2;
  CoupledState s(x, y, part);
  CHECK(s.diff_size() == 1);
  CHECK(s.in_diff(3));
  CHECK(s.boundary_diff_size() == 0);
  CHECK(s.hist_size() == 0);  // 3 is interior
  s.Y_mut().colors[3] = 1;
  s.Y_mut().colors[2] = 2;
  s.refresh({2, 3});
  CHECK(s.diff_size() == 1);
  CHECK(s.boundary_diff_size() == 1);
  CHECK(s.hist_size() == 1);
  s.Y_mut().colors[2] = 0;
  s.refresh({2});
  CHECK(s.coupled());
  CHECK(s.boundary_diff_size() == 0);
  CHECK(s.hist_size() == 1);
  CHECK(s.in_hist(2));
  CHECK(s.verify());
  CHECK_THROWS_AS(CoupledState(x, Configuration::hardcore({0, 0, 0, 0}), part), Error);
}

TEST_CASE("max_couple") {
  Rng rng = derive_rng(1, 0);
  std::vector<double> p{0.5, 0.5, 0.0}, q{0.0, 0.5, 0.5};
  for (int i = 0; i < 1000; ++i) {
    auto [a, b] = max_couple(p, p, rng);
    CHECK(a == b);
  }
  for (int i = 0; i < 100; ++i) {
    auto [a, b] = max_couple({1, 0, 0}, {0, 1, 0}, rng);
    CHECK(a == 0);
    CHECK(b == 1);
  }
  const int n = 1000000;
  int diff = 0;
  std::vector<std::uint64_t> fa(3, 0), fb(3, 0);
  for (int i = 0; i < n; ++i) {
    auto [a, b] = max_couple(p, q, rng);
    diff += a != b;
    ++fa[static_cast<std::size_t>(a)];
    ++fb[static_cast<std::size_t>(b)];
  }
  CHECK(std::abs(diff / double(n) - 0.5) <= 4 * std::sqrt(0.25 / n));
  CHECK(fa[2] == 0);
  CHECK(fb[0] == 0);
  CHECK(total_variation(p, q) == doctest::Approx(0.5));
}

TEST_CASE("identity coupling without disagreement") {
  Graph g = gen_gnp(100, 4.0, 2);
  auto part = build_partition(g, Params::make(100, 0.2, 4.0, 12));
  auto init = greedy_initial(g, 12, 3);
  REQUIRE(init.ok);
  CoupledState s(init.cfg, init.cfg, part);
  Rng rng = derive_rng(2, 0);
  for (int i = 0; i < 2000; ++i) {
    coupled_block_step(s, g, part, rng);
    REQUIRE(s.coupled());
  }
  CHECK(s.X().valid(g));
  CHECK(s.t() == 2000);
}

TEST_CASE("singleton with identical neighborhood couples surely") {
  Graph p3 = families::path(3);
  auto part = singleton_partition(p3);
  Rng rng = derive_rng(3, 0);
  for (int i = 0; i < 500; ++i) {
    auto x = Configuration::coloring({0, 1, 2}, 4);
    auto y = x;
    y.colors[0] = 3;  // disagreement at 0, not adjacent to 2
    CoupledState s(x, y, part);
    coupled_update_block(s, p3, part, part.owner[2], rng);
    CHECK(s.X().colors[2] == s.Y().colors[2]);
  }
}

TEST_CASE("edge block: disagreement probability equals TV of exact conditionals") {
  // u* = 0 outside, block {1, 2}, extra outside neighbors 3 (of 1) and 4 (of 2)
  std::vector<Edge> e{{0, 1}, {1, 2}, {1, 3}, {2, 4}};
  Graph g = Graph::from_edges(5, e);
  auto part = make_partition(g, {{0}, {1, 2}, {3}, {4}});
  const auto bi = part.owner[1];
  const int k = 5;
  auto x = Configuration::coloring({0, 2, 3, 4, 0}, k);
  auto y = x;
  y.colors[0] = 1;
  std::vector<double> mx(k), my(k);
  for (int c = 0; c < k; ++c) {
    mx[static_cast<std::size_t>(c)] = marginal(g, part.blocks[bi], x.colors, k, 1, c);
    my[static_cast<std::size_t>(c)] = marginal(g, part.blocks[bi], y.colors, k, 1, c);
  }
  const double tv = total_variation(mx, my);
  CHECK(tv > 0.0);
  Rng rng = derive_rng(4, 0);
  const int n = 200000;
  int diff = 0;
  for (int i = 0; i < n; ++i) {
    CoupledState s(x, y, part);
    coupled_update_block(s, g, part, bi, rng);
    diff += s.X().colors[1] != s.Y().colors[1];
    REQUIRE(s.X().valid(g));
    REQUIRE(s.Y().valid(g));
  }
  CHECK(std::abs(diff / double(n) - tv) <= 4 * std::sqrt(tv * (1 - tv) / n));
}

TEST_CASE("coupled marginals are the exact block conditionals") {
  // unicyclic block with a boundary disagreement; each chain's law must be exact
  std::vector<Edge> e{{0, 1}, {1, 2}, {2, 3}, {3, 4}, {1, 4}, {5, 3}};
  Graph g = Graph::from_edges(6, e);
  auto part = make_partition(g, {{0}, {1, 2, 3, 4}, {5}});
  const auto bi = part.owner[1];
  auto x = Configuration::coloring({0, 1, 0, 1, 2, 2}, 3);
  auto y = x;
  y.colors[0] = 2;
  y.colors[4] = 0;
  REQUIRE(y.valid(g));
  const double mx = marginal(g, part.blocks[bi], x.colors, 3, 3, 0);
  const double my = marginal(g, part.blocks[bi], y.colors, 3, 3, 0);
  Rng rng = derive_rng(5, 0);
  const int n = 100000;
  int hx = 0, hy = 0;
  for (int i = 0; i < n; ++i) {
    CoupledState s(x, y, part);
    coupled_update_block(s, g, part, bi, rng);
    hx += s.X().colors[3] == 0;
    hy += s.Y().colors[3] == 0;
  }
  CHECK(std::abs(hx / double(n) - mx) <= 4 * std::sqrt(mx * (1 - mx) / n) + 1e-12);
  CHECK(std::abs(hy / double(n) - my) <= 4 * std::sqrt(my * (1 - my) / n) + 1e-12);
}

TEST_CASE("coupling order puts cycle vertices last") {
  std::vector<Edge> e{{0, 1}, {1, 2}, {2, 3}, {3, 1}, {0, 4}};
  Graph g = Graph::from_edges(5, e);
  auto part = whole_partition(g);
  auto order = coupling_order(g, part.blocks[0], 4);
  REQUIRE(order.size() == 5);
  CHECK(part.blocks[0].vertices[order[0]] == 4);
  for (std::size_t i = 2; i < 5; ++i) CHECK(part.on_block_cycle[part.blocks[0].vertices[order[i]]]);
}

TEST_CASE("contraction on the Heawood graph") {
  Graph h = families::heawood();
  auto part = singleton_partition(h);
  Rng rng = derive_rng(6, 0);
  auto rep = contraction_experiment(h, part, 7, 20000, rng);
  CHECK(rep.bound == doctest::Approx(1.0 - 1.0 / (2 * 14 * 3)));
  CHECK(rep.within_bound());
  CHECK_THROWS_AS(contraction_experiment(h, part, 6, 10, rng), Error);
  Graph p4 = families::path(4);
  auto one = whole_partition(p4);
  auto r1 = contraction_experiment(p4, one, 5, 100, rng);
  CHECK(r1.mean_ratio == 0.0);
}

TEST_CASE("propagation probe") {
  // block is a path 1-2-3 hanging off u* = 0, plus a far vertex 4 after 3
  std::vector<Edge> e{{0, 1}, {1, 2}, {2, 3}, {3, 4}};
  Graph g = Graph::from_edges(5, e);
  auto part = make_partition(g, {{0}, {1, 2, 3}, {4}});
  Rng rng = derive_rng(7, 0);
  auto rep = propagation_probe(g, part, 7, part.owner[1], 0, 20000, rng, 50);
  REQUIRE(rep.vertices.size() == 3);
  CHECK(rep.freq[0] > 0.0);
  CHECK(rep.freq[0] >= rep.freq[2]);
  CHECK_THROWS_AS(propagation_probe(g, part, 7, part.owner[1], 2, 10, rng), Error);

  // singleton, k = 2 Delta + 1: p <= 1/(k - Delta)
  Graph hw = families::heawood();
  auto sp = singleton_partition(hw);
  const Vertex z = hw.neighbors(0)[0];
  auto r2 = propagation_probe(hw, sp, 7, sp.owner[z], 0, 20000, rng);
  CHECK(r2.freq[0] <= 1.0 / 4 + 3 * r2.std_error[0]);
}

TEST_CASE("coupling time") {
  Graph p4 = families::path(4);
  auto one = whole_partition(p4);
  auto res = coupling_time(p4, one, 5, 1000, 50, 1);
  for (auto s : res.steps) CHECK(s == 1);
  Graph g = gen_gnp(200, 5.0, 9);
  const int k = 2 * static_cast<int>(max_degree(g)) + 1;
  auto part = singleton_partition(g);
  std::vector<TraceRow> trace;
  auto r = coupling_time(g, part, k, 1000000, 4, 2, StartKind::extremal, &trace, 50);
  for (char c : r.censored) CHECK(c == 0);
  REQUIRE(trace.size() >= 2);
  CHECK(trace.front().diff == 200);
  CHECK(trace.back().diff == 0);
  CHECK(trace.back().dist == 0);
  auto again = coupling_time(g, part, k, 1000000, 4, 2);
  CHECK(again.steps == r.steps);
}
