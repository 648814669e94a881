#ifndef BLOCKMIX_SPECTRAL_HPP
#define BLOCKMIX_SPECTRAL_HPP

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "blockmix/dynamics.hpp"
#include "blockmix/graph.hpp"
#include "blockmix/partition.hpp"

namespace blockmix {

// Exhaustive list of proper colorings or independent sets. Vertices whose entry
// in `fixed` is >= 0 are held at that spin; the rest vary.
struct StateSpace {
  Model model = Model::coloring;
  int k = 0;            // colors (coloring) or 2 (hard-core)
  double lambda = 0.0;  // hard-core fugacity
  std::size_t n = 0;
  std::vector<int> fixed;                  // -1 = free
  std::vector<std::vector<int>> states;    // spin per vertex
  std::vector<std::uint64_t> codes;        // ascending, one per state
  std::vector<double> weights;             // unnormalized stationary weights

  std::size_t size() const { return states.size(); }
  std::uint64_t encode(const std::vector<int>& spins) const;
  // Throws if the configuration is not in the space.
  std::size_t index_of(const std::vector<int>& spins) const;
  std::vector<double> pi() const;
};

inline constexpr std::size_t kStateLimit = 1'000'000;

StateSpace enumerate_colorings(const Graph& g, int k, std::size_t limit = kStateLimit);
StateSpace enumerate_independent_sets(const Graph& g, double lambda,
                                      std::size_t limit = kStateLimit);
StateSpace enumerate_restricted(const Graph& g, Model model, int k, double lambda,
                                const std::vector<int>& fixed, std::size_t limit = kStateLimit);

enum class KernelKind { discrete, generator };

struct KernelMatrix {
  Eigen::MatrixXd m;
  KernelKind kind = KernelKind::discrete;
  std::size_t units = 0;
};

// Heat-bath over the given units: discrete P = mean of P_U, generator L = sum of (P_U - I).
KernelMatrix unit_kernel(const StateSpace& space, const std::vector<std::vector<Vertex>>& units,
                         KernelKind kind);
KernelMatrix glauber_kernel(const StateSpace& space, KernelKind kind);
KernelMatrix block_kernel(const StateSpace& space, const BlockPartition& part, KernelKind kind);

// Max |row sum - target| (1 for discrete, 0 for generators).
double row_sum_error(const KernelMatrix& k);
// Max |pi_i P_ij - pi_j P_ji|.
double reversibility_error(const KernelMatrix& k, const std::vector<double>& pi);
bool irreducible(const KernelMatrix& k);

// Linear solve of pi P = pi (or pi L = 0) with sum 1. Throws on reducible kernels.
std::vector<double> stationary(const KernelMatrix& k);

// 1/(1 - lambda_2) for discrete kernels, 1/gap for generators, from the symmetric
// matrix D^{1/2} K D^{-1/2}. A single heat-bath unit is a projection: exactly 1.
double relaxation_time(const KernelMatrix& k, const std::vector<double>& pi);

// Smallest t with max_x TV(P^t(x, .), pi) <= eps. Discrete kernels only.
std::uint64_t exact_tmix(const KernelMatrix& k, const std::vector<double>& pi, double eps = 0.25,
                         std::uint64_t cap = 100000);

struct ComparisonReport {
  double tau = 0.0;         // continuous-time single-site
  double tau_block = 0.0;   // continuous-time block dynamics
  double tau_b_max = 0.0;   // max over blocks and realized boundary conditions
  double q_max = 1.0;       // blocks are disjoint
  std::size_t boundary_conditions = 0;
  std::size_t states = 0;
  bool holds = false;
  double slack = 0.0;       // tau_block * tau_b_max * q_max - tau
};

ComparisonReport comparison_check(const Graph& g, const BlockPartition& part, int k);

}  // namespace blockmix

#endif  // BLOCKMIX_SPECTRAL_HPP
