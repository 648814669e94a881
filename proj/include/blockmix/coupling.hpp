#ifndef BLOCKMIX_COUPLING_HPP
#define BLOCKMIX_COUPLING_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "blockmix/blocksampler.hpp"
#include "blockmix/dynamics.hpp"
#include "blockmix/partition.hpp"

namespace blockmix {

// Two coloring chains with incremental disagreement bookkeeping.
class CoupledState {
 public:
  CoupledState(Configuration x, Configuration y, const BlockPartition& part);

  const Configuration& X() const { return x_; }
  const Configuration& Y() const { return y_; }
  Configuration& X_mut() { return x_; }
  Configuration& Y_mut() { return y_; }

  // Re-examine `touched` vertices after both chains changed them.
  void refresh(const std::vector<Vertex>& touched);
  void advance() { ++t_; }

  std::uint64_t t() const { return t_; }
  std::size_t diff_size() const { return diff_size_; }
  bool in_diff(Vertex v) const { return in_diff_[v] != 0; }
  std::vector<Vertex> diff() const;
  bool coupled() const { return diff_size_ == 0; }
  std::size_t boundary_diff_size() const { return boundary_diff_; }  // |D_t|
  std::size_t hist_size() const { return hist_size_; }                // |D_{<=t}|
  bool in_hist(Vertex v) const { return hist_[v] != 0; }

  // Recomputes the disagreement set from scratch and compares.
  bool verify() const;

 private:
  Configuration x_, y_;
  const BlockPartition* part_;
  std::vector<char> in_diff_;
  std::vector<char> hist_;
  std::size_t diff_size_ = 0;
  std::size_t boundary_diff_ = 0;
  std::size_t hist_size_ = 0;
  std::uint64_t t_ = 0;
};

// Weight of a disagreement at v: 1 inside a block, n^2 deg_out(v) on the boundary.
BigCount vertex_distance_weight(const BlockPartition& part, Vertex v);
BigCount dist(const Configuration& x, const Configuration& y, const BlockPartition& part);
BigCount dist(const CoupledState& s, const BlockPartition& part);

// Maximal coupling of two color distributions; Pr[cx != cy] = TV(p, q).
std::pair<int, int> max_couple(const std::vector<double>& p, const std::vector<double>& q,
                               Rng& rng);
double total_variation(const std::vector<double>& p, const std::vector<double>& q);

// Coupled update of block b: identity coupling when its outer boundary agrees,
// otherwise vertex by vertex from z, the block neighbor of the first disagreeing
// boundary vertex. Vertices next to a disagreement go first; ties follow
// coupling_order. Each pair is maximally coupled from the exact conditionals.
void coupled_update_block(CoupledState& s, const Graph& g, const BlockPartition& part,
                          std::uint32_t b, Rng& rng);
// Uniform block, then coupled_update_block. Returns the block index.
std::uint32_t coupled_block_step(CoupledState& s, const Graph& g, const BlockPartition& part,
                                 Rng& rng);

// BFS order of block positions from z, cycle vertices last. Tie-break order of the coupled update.
std::vector<std::uint32_t> coupling_order(const Graph& g, const Block& b, Vertex z);

struct ContractionOptions {
  std::uint64_t burn_in = 0;      // 0: 20 N ln(N+1) block steps
  std::uint64_t thinning = 0;     // 0: N block steps between trials
  bool check_diameter = false;    // require diam(B) <= girth/2 - 3
};

struct ContractionReport {
  std::uint64_t trials = 0;
  std::size_t blocks = 0;
  std::size_t max_degree = 0;
  double mean_ratio = 0.0;  // mean of dist(X',Y') / dist(X,Y)
  double std_error = 0.0;
  double bound = 0.0;       // 1 - 1/(2 N Delta)
  bool within_bound() const { return mean_ratio <= bound + 3.0 * std_error; }
};

ContractionReport contraction_experiment(const Graph& g, const BlockPartition& part, int k,
                                         std::uint64_t pairs, Rng& rng,
                                         const ContractionOptions& opts = {});

struct PropagationReport {
  std::vector<Vertex> vertices;  // block vertices
  std::vector<double> freq;      // p̂_v
  std::vector<double> std_error;
  std::uint64_t trials = 0;
};

// Disagreement at u_star (outside the block) is forced; frequencies with which
// each block vertex ends up disagreeing after the coupled update.
PropagationReport propagation_probe(const Graph& g, const BlockPartition& part, int k,
                                    std::uint32_t block, Vertex u_star, std::uint64_t trials,
                                    Rng& rng, std::uint64_t burn_in = 0);

enum class StartKind { single_disagreement, extremal };

struct CouplingTimeResult {
  std::vector<std::uint64_t> steps;  // coalescence step, or t_max when censored
  std::vector<char> censored;
  std::size_t blocks = 0;
  double median = 0.0;
  double n_log_n = 0.0;  // N ln N
};

struct TraceRow {
  std::uint64_t t;
  BigCount dist;
  std::size_t diff, d_t, d_hist;
};

CouplingTimeResult coupling_time(const Graph& g, const BlockPartition& part, int k,
                                 std::uint64_t t_max, std::size_t replicas, std::uint64_t seed,
                                 StartKind start = StartKind::extremal,
                                 std::vector<TraceRow>* trace = nullptr,
                                 std::uint64_t trace_cadence = 1, std::size_t threads = 1);

}  // namespace blockmix

#endif  // BLOCKMIX_COUPLING_HPP
