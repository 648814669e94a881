#include <cmath>
#include <numeric>

#include "doctest.h"

#include "blockmix/partition.hpp"
#include "blockmix/rng.hpp"

using namespace blockmix;

namespace {

Params p20() {
  Params p;
  p.epsilon = 0.2;
  p.d = 20;
  p.k = 40;
  p.r = 2;
  return p;
}

// Hub 0 with three arms of length 3.
Graph star_of_paths() {
  std::vector<Edge> e;
  for (Vertex a = 0; a < 3; ++a) {
    const Vertex base = 1 + 3 * a;
    e.push_back({0, base});
    e.push_back({base, base + 1});
    e.push_back({base + 1, base + 2});
  }
  return Graph::from_edges(10, e);
}

bool connected_within(const Graph& g, const Block& b) {
  std::vector<char> seen(b.size(), 0);
  std::vector<std::size_t> stack{0};
  seen[0] = 1;
  std::size_t count = 1;
  while (!stack.empty()) {
    auto i = stack.back();
    stack.pop_back();
    for (Vertex w : g.neighbors(b.vertices[i]))
      if (b.contains(w) && !seen[b.index_of(w)]) {
        seen[b.index_of(w)] = 1;
        ++count;
        stack.push_back(b.index_of(w));
      }
  }
  return count == b.size();
}

}  // namespace

TEST_CASE("vertex weights") {
  Params p = p20();
  CHECK(std::exp(log_vertex_weight(10, p)) == doctest::Approx(1.0 / 1.02));
  CHECK(std::exp(log_vertex_weight(0, p)) == doctest::Approx(1.0 / 1.02));
  CHECK(log_vertex_weight(50, p) == doctest::Approx(15 * std::log(20.0) + std::log(50.0)));
  CHECK(log_vertex_weight(20, p) < 0);
  CHECK(log_vertex_weight(21, p) > 0);
}

TEST_CASE("path weights") {
  Params p = p20();
  // Vertex 1 gets degree 50 via pendant leaves.
  std::vector<Edge> e{{0, 1}, {1, 2}};
  for (Vertex v = 3; v < 51; ++v) e.push_back({1, v});
  Graph g = Graph::from_edges(51, e);
  std::vector<Vertex> lhl{0, 1, 2};
  CHECK(path_log_weight(lhl, g, p) ==
        doctest::Approx(-2 * std::log(1.02) + 15 * std::log(20.0) + std::log(50.0)));
  Graph p3 = families::path(3);
  std::vector<Vertex> all{0, 1, 2};
  CHECK(std::exp(path_log_weight(all, p3, p)) == doctest::Approx(std::pow(1.02, -3)));
  std::vector<Vertex> one{1};
  CHECK(std::exp(path_log_weight(one, p3, p)) == doctest::Approx(1.0 / 1.02));
  std::vector<Vertex> broken{0, 2};
  CHECK_THROWS_AS(path_log_weight(broken, p3, p), Error);
}

TEST_CASE("breakpoints") {
  Params p = p20();
  Graph iso = families::empty(1);
  CHECK(is_breakpoint(0, iso, p, 5));
  Graph p20g = families::path(20);
  for (int r : {1, 2, 7}) {
    auto bp = breakpoints(p20g, p, r);
    CHECK(std::accumulate(bp.begin(), bp.end(), 0) == 20);
  }
  std::vector<Edge> e;
  for (Vertex v = 1; v <= 25; ++v) e.push_back({0, v});
  Graph star = Graph::from_edges(26, e);
  CHECK_FALSE(is_breakpoint(1, star, p, 1));
  CHECK(is_breakpoint(1, star, p, 0));
  CHECK_FALSE(is_breakpoint(0, star, p, 0));
  // Agreement of the scanner with the per-vertex definition.
  Graph g = gen_gnp(300, 20.0, 3);
  for (int r : {1, 2, 3}) {
    auto bp = breakpoints(g, p, r);
    for (Vertex v = 0; v < 300; v += 7) CHECK(static_cast<bool>(bp[v]) == is_breakpoint(v, g, p, r));
  }
}

TEST_CASE("tree input with all breakpoints gives singletons") {
  Params p = p20();
  Graph g = families::path(12);
  auto part = build_partition(g, p);
  CHECK(part.num_blocks() == 12);
  for (const auto& b : part.blocks) CHECK(b.kind == BlockKind::singleton);
  auto rep = validate_partition(g, part, p);
  CHECK(rep.structural_ok());
  CHECK(rep.cond2a.violations == 0);
}

TEST_CASE("hub with low-degree arms forms one tree block") {
  Params p = p20();
  p.d = 2.0;  // dhat = 2.0667, hub degree 3 is high
  p.r = 2;
  Graph g = star_of_paths();
  auto part = build_partition(g, p);
  const Block& hub = part.block_of(0);
  CHECK(hub.kind == BlockKind::tree);
  CHECK(hub.vertices == std::vector<Vertex>{0, 1, 2, 4, 5, 7, 8});
  for (Vertex leaf : {3u, 6u, 9u}) {
    CHECK(part.block_of(leaf).kind == BlockKind::singleton);
    CHECK(part.is_boundary(leaf));
  }
  CHECK(hub.outer_boundary == std::vector<Vertex>{3, 6, 9});
  CHECK(hub.inner_boundary == std::vector<Vertex>{2, 5, 8});
  auto rep = validate_partition(g, part, p);
  CHECK(rep.cond2b.violations == 0);
  CHECK(rep.cond1.violations == 0);
}

TEST_CASE("make_partition derives structure") {
  Graph c4 = families::cycle(4);
  auto part = make_partition(c4, {{0, 1, 2}, {3}});
  CHECK(part.blocks[0].kind == BlockKind::tree);
  CHECK(part.blocks[0].outer_boundary == std::vector<Vertex>{3});
  CHECK(part.deg_in[0] == 1);
  CHECK(part.deg_out[0] == 1);
  CHECK(part.deg_in[1] == 2);
  CHECK(part.deg_out[1] == 0);
  auto whole = make_partition(c4, {{0, 1, 2, 3}});
  CHECK(whole.blocks[0].kind == BlockKind::unicyclic);
  CHECK(whole.blocks[0].cycle.size() == 4);
  CHECK_THROWS_AS(make_partition(c4, {{0, 1}, {1, 2, 3}}), Error);
  CHECK_THROWS_AS(make_partition(c4, {{0, 2}, {1, 3}}), Error);  // disconnected groups
  CHECK_THROWS_AS(make_partition(families::complete(4), {{0, 1, 2, 3}}), Error);
  CHECK_NOTHROW(make_partition(families::complete(4), {{0, 1, 2, 3}}, true));
  for (Vertex v = 0; v < 4; ++v) CHECK(part.deg_in[v] + part.deg_out[v] == c4.degree(v));
}

TEST_CASE("validator flags a boundary vertex with two inside neighbors") {
  Params p = p20();
  Graph c4 = families::cycle(4);
  auto part = make_partition(c4, {{0, 1, 2}, {3}});
  auto rep = validate_partition(c4, part, p);
  CHECK(rep.cond2b.violations == 1);
  REQUIRE(rep.cond2b.witnesses.size() == 1);
  CHECK(rep.cond2b.witnesses[0].second == 3);
  CHECK_FALSE(rep.structural_ok());
}

TEST_CASE("singleton partition of a tree passes everything") {
  Params p = p20();
  Graph g = families::star(6);
  auto part = singleton_partition(g);
  auto rep = validate_partition(g, part, p);
  CHECK(rep.structural_ok());
  CHECK(rep.cond2c.violations == 0);
  CHECK(rep.boundary_sets_agree);
}

TEST_CASE("build_partition on a sparse random graph") {
  Params p = Params::make(2000, 0.2, 20, 40);
  Graph g = gen_gnp(2000, 20.0, 1);
  auto part = build_partition(g, p);
  REQUIRE(part.owner.size() == 2000);
  std::vector<std::size_t> seen(2000, 0);
  for (std::uint32_t bi = 0; bi < part.num_blocks(); ++bi)
    for (Vertex v : part.blocks[bi].vertices) {
      ++seen[v];
      CHECK(part.owner[v] == bi);
    }
  for (auto s : seen) CHECK(s == 1);
  for (const auto& b : part.blocks) {
    CHECK(connected_within(g, b));
    CHECK(b.kind != BlockKind::irregular);
  }
  auto rep = validate_partition(g, part, p);
  CHECK(rep.structural_ok());
  CHECK(rep.boundary_sets_agree);
}

TEST_CASE("cycle helpers") {
  CHECK(default_cycle_cap(10, 20) == 3);
  CHECK(default_cycle_cap(1000, 3) == kMaxDefaultCycleCap);
  CHECK(cycle_radius(3, 1, 20) >= 1);
  CHECK(cycle_radius(3, 30, 20) == static_cast<int>(std::ceil(2 * std::log(90.0))));
}

TEST_CASE("path density") {
  CHECK(3 * path_density_term(10, 36) == doctest::Approx(3483.6).epsilon(1e-4));
  const double dh = 20.0 + 2.0 / 3.0;
  CHECK(path_density_term(dh, 36) == doctest::Approx(450 * (std::log(dh) + dh / 36)));
  CHECK(path_density_term(dh, 36) == doctest::Approx(1622.0).epsilon(1e-3));  // 1621.17
  Graph g = families::path(8);
  Params p = p20();
  auto rep = path_density(g, singleton_partition(g), p);
  CHECK(rep.values.empty());
  CHECK(rep.max == 0.0);
}

TEST_CASE("block diameter") {
  Graph g = families::path(6);
  auto part = whole_partition(g);
  CHECK(block_diameter(g, part.blocks[0]) == 5);
}
