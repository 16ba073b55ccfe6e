// sampling.hpp
// Deterministic, seeded conversion of outcome distributions into shot counts.
//
// The generator is pinned to xoshiro256** seeded through splitmix64 so that
// identical (seed, distribution, shots) triples give identical counts on any
// platform. Shots are drawn one at a time by CDF inversion.

#pragma once

#include "btsim/common.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace btsim {

struct Counts {
    std::vector<int> bit_order; // measured qubits; leftmost key character first
    std::map<std::string, std::int64_t> table;
    std::int64_t total_shots = 0;
};

inline constexpr char kSamplerAlgorithm[] = "xoshiro256ss-cdf-v1";
inline constexpr std::uint64_t kDefaultSeed = 42;

class SeededSampler {
public:
    explicit SeededSampler(std::uint64_t seed);

    std::uint64_t seed() const { return seed_; }
    const char* algorithm_id() const { return kSamplerAlgorithm; }

    std::uint64_t next_u64();
    // Uniform in [0, 1) with 53 random bits.
    double next_double();

private:
    std::uint64_t seed_;
    std::uint64_t state_[4];
};

// Sweep-index seed derivation: seed XOR (index * large odd constant).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

// Multinomial draw of `shots` outcomes from `probs` (length 2^|measured|,
// bit i of each key reads measured[i]).
Counts sample_counts(const std::vector<double>& probs, const std::vector<int>& measured,
                     std::int64_t shots, SeededSampler& sampler);

// Sums counts over discarded bit positions; `keep` must be a subset of
// bit_order and defines the output bit order.
Counts marginalize(const Counts& counts, const std::vector<int>& keep);

// Same marginalization on exact probability arrays.
std::vector<double> marginalize_probs(const std::vector<double>& probs, int n_qubits,
                                      const std::vector<int>& keep);

} // namespace btsim
