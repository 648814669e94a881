#ifndef BLOCKMIX_DYNAMICS_HPP
#define BLOCKMIX_DYNAMICS_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "blockmix/blocksampler.hpp"
#include "blockmix/graph.hpp"
#include "blockmix/params.hpp"
#include "blockmix/partition.hpp"
#include "blockmix/rng.hpp"

namespace blockmix {

enum class Model { coloring, hardcore };

struct Configuration {
  Model model = Model::coloring;
  int k = 0;
  std::vector<int> colors;      // coloring model
  std::vector<char> occupied;   // hard-core model
  std::uint64_t step_count = 0;
  // Step at which each unit (block, or vertex under Glauber) was last updated; -1 = never.
  std::vector<std::int64_t> unit_last_update;

  static Configuration coloring(std::vector<int> colors, int k);
  static Configuration hardcore(std::vector<char> occupied);

  // Proper coloring, or independent occupied set.
  bool valid(const Graph& g) const;
  bool same_state(const Configuration& o) const {
    return model == o.model && colors == o.colors && occupied == o.occupied;
  }
};

struct GreedyResult {
  bool ok = false;
  Configuration cfg;
  Vertex stuck = 0;  // last failing vertex when !ok
  int attempts = 0;
};

// Greedy coloring in a seeded random vertex order; retries with derived seeds.
GreedyResult greedy_initial(const Graph& g, int k, std::uint64_t seed, int retries = 16);

// Heat-bath updates. Each returns the vertex or block index that was updated.
Vertex glauber_step(Configuration& cfg, const Graph& g, Rng& rng);
std::uint32_t block_step(Configuration& cfg, const Graph& g, const BlockPartition& part, Rng& rng,
                         SampleMode mode = SampleMode::automatic);
Vertex hardcore_glauber_step(Configuration& cfg, const Graph& g, double lambda, Rng& rng);
std::uint32_t hardcore_block_step(Configuration& cfg, const Graph& g, const BlockPartition& part,
                                  double lambda, Rng& rng);

// Resamples one given unit; used by the steppers and by the coupling.
void update_block(Configuration& cfg, const Graph& g, const Block& b, double lambda, Rng& rng,
                  SampleMode mode = SampleMode::automatic);
void update_vertex(Configuration& cfg, const Graph& g, Vertex v, double lambda, Rng& rng);

enum class ChainKind { glauber, block };

std::string to_string(ChainKind kind);
ChainKind chain_kind_from_string(const std::string& s);

struct ChainSpec {
  ChainKind kind = ChainKind::glauber;
  Model model = Model::coloring;
  Params params;
  const BlockPartition* partition = nullptr;  // required for ChainKind::block
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;  // replica index
  bool force = false;        // skip the ergodicity guard
  SampleMode mode = SampleMode::automatic;
};

// Throws unless the chain can be trusted to be ergodic (or spec.force is set):
// Glauber colorings need k >= max degree + 2; block dynamics passes a reachability
// smoke test from two greedy starts.
void check_ergodicity(const Graph& g, const ChainSpec& spec);

// One step of the chain described by spec; returns the updated unit.
std::uint32_t chain_step(Configuration& cfg, const Graph& g, const ChainSpec& spec, Rng& rng);

struct Probe {
  std::string name;
  std::uint64_t cadence = 1;  // record after steps cadence, 2*cadence, ...
  std::function<std::vector<double>(const Configuration&, const Graph&)> fn;
};

struct ProbeRecord {
  std::uint64_t step = 0;
  std::string probe;
  std::vector<double> values;
};

struct ChainResult {
  Configuration final_state;
  std::vector<ProbeRecord> records;
};

// Runs T steps from cfg0 with the RNG stream (spec.seed, spec.stream).
ChainResult run_chain(const Graph& g, const ChainSpec& spec, Configuration cfg0, std::uint64_t T,
                      const std::vector<Probe>& probes = {});

// BLOCKMIX_DEBUG_ASSERTS=1 in the environment.
bool debug_asserts_enabled();

// Throws if any edge touching `vertices` is monochromatic (or doubly occupied).
void assert_locally_valid(const Configuration& cfg, const Graph& g,
                          const std::vector<Vertex>& vertices);

}  // namespace blockmix

#endif  // BLOCKMIX_DYNAMICS_HPP
