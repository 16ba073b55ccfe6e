#include "btsim/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace btsim {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

std::string index_to_key(std::size_t index, std::size_t n_bits) {
    std::string key(n_bits, '0');
    for (std::size_t b = 0; b < n_bits; ++b)
        if (index & (std::size_t{1} << (n_bits - 1 - b))) key[b] = '1';
    return key;
}

} // namespace

SeededSampler::SeededSampler(std::uint64_t seed) : seed_(seed) {
    std::uint64_t sm = seed;
    for (auto& s : state_) s = splitmix64(sm);
}

std::uint64_t SeededSampler::next_u64() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double SeededSampler::next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    return seed ^ (index * 0x9E3779B97F4A7C15ull);
}

Counts sample_counts(const std::vector<double>& probs, const std::vector<int>& measured,
                     std::int64_t shots, SeededSampler& sampler) {
    if (shots <= 0) throw validation_error("sample_counts: shots must be >= 1");
    if (measured.empty()) throw validation_error("sample_counts: no measured qubits");
    if (probs.size() != (std::size_t{1} << measured.size()))
        throw shape_error("sample_counts: probability array length does not match measured set");

    double sum = 0.0;
    for (double p : probs) {
        if (p < -tol.prob_negative)
            throw validation_error("sample_counts: negative probability entry");
        sum += std::max(p, 0.0);
    }
    if (std::abs(sum - 1.0) > tol.prob_normalization)
        throw validation_error("sample_counts: probabilities sum to " + std::to_string(sum));

    // Cumulative distribution, silently renormalized.
    std::vector<double> cdf(probs.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        acc += std::max(probs[i], 0.0) / sum;
        cdf[i] = acc;
    }
    cdf.back() = 1.0;

    std::vector<std::int64_t> tallies(probs.size(), 0);
    for (std::int64_t s = 0; s < shots; ++s) {
        const double u = sampler.next_double();
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        ++tallies[static_cast<std::size_t>(it - cdf.begin())];
    }

    Counts counts;
    counts.bit_order = measured;
    counts.total_shots = shots;
    for (std::size_t i = 0; i < tallies.size(); ++i)
        if (tallies[i] > 0) counts.table.emplace(index_to_key(i, measured.size()), tallies[i]);
    return counts;
}

Counts marginalize(const Counts& counts, const std::vector<int>& keep) {
    std::vector<std::size_t> positions;
    positions.reserve(keep.size());
    for (int q : keep) {
        const auto it = std::find(counts.bit_order.begin(), counts.bit_order.end(), q);
        if (it == counts.bit_order.end())
            throw validation_error("marginalize: qubit " + std::to_string(q) +
                                   " is not in bit_order");
        positions.push_back(static_cast<std::size_t>(it - counts.bit_order.begin()));
    }

    Counts out;
    out.bit_order = keep;
    out.total_shots = counts.total_shots;
    for (const auto& [key, n] : counts.table) {
        std::string reduced(keep.size(), '0');
        for (std::size_t b = 0; b < positions.size(); ++b) reduced[b] = key.at(positions[b]);
        out.table[reduced] += n;
    }
    return out;
}

std::vector<double> marginalize_probs(const std::vector<double>& probs, int n_qubits,
                                      const std::vector<int>& keep) {
    if (probs.size() != (std::size_t{1} << n_qubits))
        throw shape_error("marginalize_probs: array length does not match qubit count");
    for (int q : keep)
        if (q < 0 || q >= n_qubits) throw index_error("marginalize_probs: qubit out of range");
    std::vector<double> out(std::size_t{1} << keep.size(), 0.0);
    for (std::size_t i = 0; i < probs.size(); ++i) {
        std::size_t key = 0;
        for (std::size_t b = 0; b < keep.size(); ++b) {
            const std::size_t bit = (i >> (n_qubits - 1 - keep[b])) & 1u;
            key |= bit << (keep.size() - 1 - b);
        }
        out[key] += probs[i];
    }
    return out;
}

} // namespace btsim
