#ifndef BLOCKMIX_UNIFORMITY_HPP
#define BLOCKMIX_UNIFORMITY_HPP

#include <cstdint>
#include <vector>

#include "blockmix/dynamics.hpp"
#include "blockmix/graph.hpp"
#include "blockmix/params.hpp"
#include "blockmix/partition.hpp"

namespace blockmix {

// [k] minus the colors on N(v), ascending.
std::vector<int> available_colors(const Configuration& cfg, const Graph& g, Vertex v);
std::size_t available_count(const Configuration& cfg, const Graph& g, Vertex v);

// (1 - eps^2) k exp(-deg/k)
double uniformity_threshold(std::size_t deg, int k, double epsilon);

// The local-uniformity event |A| <= 1[updated] * threshold.
bool uniformity_violated(std::size_t avail, bool updated, double threshold);

struct UniformityRecord {
  Vertex vertex = 0;
  std::size_t deg = 0;
  std::uint64_t t = 0;
  std::size_t avail = 0;
  bool updated = false;
  double threshold = 0.0;
  bool violated = false;
};

struct UniformityOptions {
  double c0 = 5.0;
  double c = 5.0;
  std::uint64_t record_cadence = 0;  // 0: every N steps; violations are always recorded
};

struct UniformityReport {
  std::size_t blocks = 0;
  std::uint64_t t_begin = 0, t_end = 0;
  std::vector<Vertex> probes;
  std::vector<char> ever_violated;   // per probe
  std::vector<std::size_t> min_avail;  // per probe, over the window while updated
  std::size_t violating = 0;
  double fraction = 0.0;
  double ci_low = 0.0, ci_high = 0.0;  // Wilson 95%
  double threshold_at_d = 0.0;         // threshold for deg = d, compared with k - max degree
  std::size_t max_degree = 0;
  std::vector<UniformityRecord> records;
};

// Block dynamics from a greedy start; over t in [c0 N, (c0 + c) N] checks the
// event for each probe vertex (all probes must have deg <= dhat).
UniformityReport uniformity_experiment(const Graph& g, const BlockPartition& part, const Params& p,
                                       const std::vector<Vertex>& probes, std::uint64_t seed,
                                       const UniformityOptions& opts = {});

// `count` distinct vertices with deg <= dhat, chosen uniformly.
std::vector<Vertex> pick_low_degree_probes(const Graph& g, const Params& p, std::size_t count,
                                           std::uint64_t seed);

}  // namespace blockmix

#endif  // BLOCKMIX_UNIFORMITY_HPP
