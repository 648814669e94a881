#ifndef BLOCKMIX_BENCH_HPP
#define BLOCKMIX_BENCH_HPP

#include <cstdint>
#include <vector>

#include "blockmix/blocksampler.hpp"
#include "blockmix/dynamics.hpp"
#include "blockmix/partition.hpp"
#include "blockmix/stats.hpp"

namespace blockmix {

// A random recursive tree of `size` vertices forms block 0; every third tree
// vertex gets a pendant outside neighbor (its own singleton block).
struct BenchInstance {
  Graph g;
  BlockPartition part;
  Configuration cfg;
};
BenchInstance bench_instance(std::size_t size, int k, std::uint64_t seed);

struct BenchPoint {
  int k = 0;
  std::size_t block_size = 0;
  double ns_per_update = 0.0;  // median over batches
  std::uint64_t updates = 0;
};

// Times repeated heat-bath resampling of block 0.
BenchPoint time_block_update(std::size_t size, int k, std::uint64_t seed, double min_seconds = 0.05,
                             int batches = 5, SampleMode mode = SampleMode::fast);

// Least-squares slope of ln y against ln x.
LinearFit log_log_fit(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace blockmix

#endif  // BLOCKMIX_BENCH_HPP
