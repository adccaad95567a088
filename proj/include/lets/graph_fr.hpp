#pragma once

#include <cstdint>
#include <vector>

#include "lets/core.hpp"
#include "lets/rng.hpp"

namespace lets {

struct MstEdge {
    std::uint32_t i = 0; // endpoint indices with i < j
    std::uint32_t j = 0;
    double weight = 0.0;
};

struct Mst {
    std::size_t n = 0;
    std::vector<MstEdge> edges; // n - 1 edges, in the order Kruskal accepted them
};

// Euclidean minimum spanning tree over the complete graph, built with Kruskal's
// algorithm. Equal-weight edges are taken in (weight, min index, max index)
// order, so the tree is unique and reproducible even on tied distances.
Mst euclidean_mst(const std::vector<FeatureVector>& points);

double total_weight(const Mst& tree);

// Number of tree edges whose endpoints carry different labels.
std::size_t cut_edge_count(const Mst& tree, const std::vector<Label>& labels);

enum class MomentMethod { Exhaustive, MonteCarlo };

// Mean and variance of the cut-edge count over uniformly random labelings with
// fixed class counts. Enumerated exactly when there are at most
// kExhaustiveLimit labelings, otherwise estimated from num_perms shuffles
// (population variance when exact, Bessel-corrected when sampled).
struct NullMoments {
    double mean = 0.0;
    double var = 0.0;
    MomentMethod method = MomentMethod::MonteCarlo;
    std::uint64_t draws = 0;
};

inline constexpr std::uint64_t kExhaustiveLimit = 10000;

NullMoments null_moments(const Mst& tree, std::size_t n0, std::size_t n1,
                         std::size_t num_perms, Rng& rng);

// Standardized cut-edge count (r - mean) / sqrt(var).
double fr_statistic(std::size_t r, const NullMoments& moments);

double normal_cdf(double x);

// Lower-tail normal approximation to the permutation p-value.
double fr_p_value_normal(double w);

// Lower-tail permutation p-value: fraction of relabelings with a cut count at
// most the observed one. Exact over all labelings when feasible, otherwise the
// add-one smoothed Monte Carlo estimate (1 + hits) / (1 + num_perms).
double fr_p_value_permutation(const Mst& tree, const std::vector<Label>& labels,
                              std::size_t num_perms, Rng& rng);

enum class PValueMode { Permutation, NormalApprox };

struct FrResult {
    std::size_t r_n = 0;
    double w_n = 0.0;
    double p_value = 1.0;
    NullMoments moments;
};

// Full edge-count test on a labeled point set: cut count, standardized
// statistic and p-value under the requested mode. One pass of labelings feeds
// both the moments and the permutation p-value.
FrResult fr_test(const Mst& tree, const std::vector<Label>& labels,
                 std::size_t num_perms, PValueMode mode, Rng& rng);

} // namespace lets
