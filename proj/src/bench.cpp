#include "blockmix/bench.hpp"

#include <chrono>
#include <cmath>

namespace blockmix {

BenchInstance bench_instance(std::size_t size, int k, std::uint64_t seed) {
  if (size == 0 || k < 3) throw Error("bench: need size >= 1 and k >= 3");
  Rng rng = derive_rng(seed, 0xbe7c4ULL);
  std::vector<Edge> edges;
  for (Vertex v = 1; v < size; ++v) edges.push_back({static_cast<Vertex>(uniform_below(rng, v)), v});
  std::vector<std::vector<Vertex>> groups(1);
  for (Vertex v = 0; v < size; ++v) groups[0].push_back(v);
  auto n = static_cast<Vertex>(size);
  for (Vertex v = 0; v < size; v += 3) {
    edges.push_back({v, n});
    groups.push_back({n});
    ++n;
  }
  BenchInstance inst;
  inst.g = Graph::from_edges(n, edges);
  inst.part = make_partition(inst.g, std::move(groups));
  auto init = greedy_initial(inst.g, k, seed);
  if (!init.ok) throw Error("bench: greedy coloring failed");
  inst.cfg = std::move(init.cfg);
  return inst;
}

BenchPoint time_block_update(std::size_t size, int k, std::uint64_t seed, double min_seconds,
                             int batches, SampleMode mode) {
  BenchInstance inst = bench_instance(size, k, seed);
  Rng rng = derive_rng(seed, 1);
  const Block& b = inst.part.blocks[0];
  using clock = std::chrono::steady_clock;
  std::vector<double> per;
  BenchPoint pt;
  pt.k = k;
  pt.block_size = size;
  update_block(inst.cfg, inst.g, b, 0.0, rng, mode);  // warm-up
  for (int batch = 0; batch < std::max(1, batches); ++batch) {
    std::uint64_t done = 0;
    const auto t0 = clock::now();
    double elapsed = 0.0;
    do {
      update_block(inst.cfg, inst.g, b, 0.0, rng, mode);
      ++done;
      elapsed = std::chrono::duration<double>(clock::now() - t0).count();
    } while (elapsed < min_seconds || done < 3);
    per.push_back(elapsed * 1e9 / static_cast<double>(done));
    pt.updates += done;
  }
  pt.ns_per_update = median(per);
  return pt;
}

LinearFit log_log_fit(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  return linear_fit(lx, ly);
}

}  // namespace blockmix
