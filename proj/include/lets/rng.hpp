#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "lets/errors.hpp"

namespace lets {

// Deterministic generator used throughout: every randomized routine takes one of
// these explicitly, so a run is reproducible from (seed, config) alone. The
// distribution helpers are hand-rolled to keep output independent of the
// standard library's unspecified std::*_distribution algorithms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Independent per-trial stream; mixing the trial index through splitmix64
    // keeps streams decorrelated even for adjacent indices.
    static Rng for_trial(std::uint64_t master_seed, std::uint64_t trial_index);

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Uniform on {0, ..., n-1}.
    std::size_t uniform_index(std::size_t n) {
        require(n > 0, ErrorCode::InvalidArgument, "uniform_index needs n > 0");
        return static_cast<std::size_t>(
            (static_cast<unsigned __int128>(engine_()) * n) >> 64);
    }

    bool coin() { return (engine_() >> 63) != 0; }

    bool bernoulli(double p) { return uniform() < p; }

    // Standard normal via Box-Muller, one cached deviate.
    double normal();

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = uniform_index(i);
            std::swap(v[i - 1], v[j]);
        }
    }

    // k distinct values from {0, ..., n-1}, in selection order.
    std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k);

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace lets
