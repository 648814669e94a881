#ifndef BLOCKMIX_PERCOLATION_HPP
#define BLOCKMIX_PERCOLATION_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "blockmix/graph.hpp"
#include "blockmix/params.hpp"
#include "blockmix/partition.hpp"
#include "blockmix/rng.hpp"
#include "blockmix/stats.hpp"

namespace blockmix {

enum class PercolationVariant { simple, slack };

// p_v for v in block b: 1/((1+eps) deg_in) for low-degree off-cycle vertices
// (slack: (1+delta) min{that, 1/(k - deg)}), 1 otherwise; clamped to 1.
double percolation_prob(const Graph& g, const Block& b, Vertex v, const Params& p,
                        PercolationVariant variant);
// Per block position.
std::vector<double> percolation_probs(const Graph& g, const Block& b, const Params& p,
                                      PercolationVariant variant);

struct PercolationSample {
  std::vector<Vertex> cluster;         // C_{u*}
  std::vector<Vertex> boundary_hits;   // P_{u*} = C_{u*} ∩ ∂_in B
  double z = 0.0;                      // sum of beta over the cluster
};

// Reveals S_p lazily in BFS order from the block neighbors of u_star.
// `probs` and `beta` are indexed by block position; beta may be empty (z = 0).
PercolationSample grow_cluster(const Graph& g, const Block& b, Vertex u_star,
                               const std::vector<double>& probs, const std::vector<double>& beta,
                               Rng& rng);

// Common random numbers: one uniform per block position decides membership
// (v ∈ S_p iff u[v] < p_v), so raising any p_v can only grow the cluster.
PercolationSample grow_cluster_crn(const Graph& g, const Block& b, Vertex u_star,
                                   const std::vector<double>& probs,
                                   const std::vector<double>& uniforms);

struct BetaWeights {
  std::vector<double> beta;            // by block position
  std::vector<std::int64_t> parent;    // block position, -1 for children of u*
};

// beta(u*) = 1; beta(w) = min{1, beta(par)/((1+eps^2) deg_in(par)) / p_w},
// deg_in(u*) taken as 1, parents from BFS over the block's spanning tree.
BetaWeights beta_weights(const Graph& g, const Block& b, Vertex u_star, const Params& p,
                         PercolationVariant variant = PercolationVariant::simple);

struct TailReport {
  std::uint64_t trials = 0;
  std::vector<std::uint64_t> hits_at_least;  // # trials with |P| >= l, l = 0..
  std::vector<double> survival, lower, upper;  // Wilson 95% bands
  LinearFit fit;                     // ln survival vs l over l >= 1 with enough mass
  double slope_ci_low = 0.0, slope_ci_high = 0.0;  // bootstrap 95%
  std::vector<double> z_survival;    // Pr[Z >= l]
  LinearFit z_fit;
  std::vector<std::uint32_t> p_sizes;  // |P| per trial
  std::vector<double> z_values;        // Z per trial
  std::vector<std::uint32_t> cluster_sizes;
};

TailReport tail_experiment(const Graph& g, const Block& b, Vertex u_star, const Params& p,
                           PercolationVariant variant, std::uint64_t trials, Rng& rng,
                           std::size_t bootstrap = 200);

// Survival fit shared with the CLI: points l >= 1 whose count is at least min_count.
LinearFit survival_fit(const std::vector<std::uint64_t>& hits_at_least, std::uint64_t trials,
                       std::uint64_t min_count = 5);

struct DominationReport {
  std::uint64_t trials = 0;
  std::vector<double> real_survival;  // Pr[|D ∩ ∂_in B| >= l]
  std::vector<double> perc_survival;  // Pr[|P| >= l]
  std::vector<double> sigma;          // combined standard error per l
  double worst_excess = 0.0;          // max_l (real - perc) / sigma, -inf if always below
  bool dominates = true;              // real <= perc + 3 sigma for every l
};

struct DominationOptions {
  std::uint64_t burn_in = 0;  // 0: 20 N ln(N+1)
  int local_radius = 3;       // blocks within this distance of B are resampled between trials
  std::optional<double> force_prob;  // override p_v on the percolation side
};

DominationReport domination_test(const Graph& g, const BlockPartition& part, const Params& p,
                                 std::uint32_t block, Vertex u_star, std::uint64_t trials,
                                 Rng& rng, const DominationOptions& opts = {});

// Blocks owning a vertex within `radius` of block b (b included), ascending.
std::vector<std::uint32_t> nearby_blocks(const Graph& g, const BlockPartition& part,
                                         std::uint32_t b, int radius);

}  // namespace blockmix

#endif  // BLOCKMIX_PERCOLATION_HPP
