#ifndef BLOCKMIX_RNG_HPP
#define BLOCKMIX_RNG_HPP

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace blockmix {

using Rng = std::mt19937_64;

// Thrown for precondition failures and malformed inputs across the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::uint64_t splitmix64(std::uint64_t& state);

// Independent stream for (seed, stream) pairs. Replicas use stream = replica index.
Rng derive_rng(std::uint64_t seed, std::uint64_t stream);

// Uniform double in [0, 1) with 53 random bits.
double uniform01(Rng& rng);

// Unbiased integer in [0, n). n must be positive.
std::uint64_t uniform_below(Rng& rng, std::uint64_t n);

std::string rng_state(const Rng& rng);
void set_rng_state(Rng& rng, const std::string& state);

}  // namespace blockmix

#endif  // BLOCKMIX_RNG_HPP
