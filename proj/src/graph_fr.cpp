#include "lets/graph_fr.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace lets {

namespace {

struct DisjointSets {
    std::vector<std::uint32_t> parent;

    explicit DisjointSets(std::size_t n) : parent(n) {
        std::iota(parent.begin(), parent.end(), 0u);
    }

    std::uint32_t find(std::uint32_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }

    bool unite(std::uint32_t a, std::uint32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[b] = a;
        return true;
    }
};

double euclidean_distance(const FeatureVector& a, const FeatureVector& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        double d = a[k] - b[k];
        s += d * d;
    }
    return std::sqrt(s);
}

// min(C(n, k), cap + 1); the running product stays integral because every
// prefix is itself a binomial coefficient.
std::uint64_t binomial_capped(std::uint64_t n, std::uint64_t k, std::uint64_t cap) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t c = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        if (c > (cap + 1) / (n - k + i) * i) return cap + 1;
        c = c * (n - k + i) / i;
        if (c > cap) return cap + 1;
    }
    return c;
}

// Calls fn(labels) for every labeling of n points with exactly n0 zeros.
template <typename Fn>
void for_each_labeling(std::size_t n, std::size_t n0, Fn&& fn) {
    std::vector<std::size_t> zeros(n0);
    std::iota(zeros.begin(), zeros.end(), std::size_t{0});
    std::vector<Label> labels(n, 1);
    for (;;) {
        for (std::size_t idx : zeros) labels[idx] = 0;
        fn(static_cast<const std::vector<Label>&>(labels));
        for (std::size_t idx : zeros) labels[idx] = 1;

        std::size_t i = n0;
        while (i > 0 && zeros[i - 1] == n - n0 + (i - 1)) --i;
        if (i == 0) break;
        ++zeros[i - 1];
        for (std::size_t j = i; j < n0; ++j) zeros[j] = zeros[j - 1] + 1;
    }
}

void check_labels(const Mst& tree, const std::vector<Label>& labels) {
    require(labels.size() == tree.n, ErrorCode::LengthMismatch,
            "label count must match the tree's point count");
    for (Label z : labels) {
        require(z == 0 || z == 1, ErrorCode::InvalidArgument, "labels must be 0 or 1");
    }
}

struct LabelingSummary {
    NullMoments moments;
    double p_value = 1.0; // lower-tail, relative to r_obs
};

LabelingSummary summarize_labelings(const Mst& tree, std::size_t n0, std::size_t n1,
                                    std::size_t r_obs, std::size_t num_perms, Rng& rng) {
    require(n0 >= 1 && n1 >= 1, ErrorCode::InvalidCounts,
            "both classes need at least one point");
    require(n0 + n1 == tree.n, ErrorCode::InvalidCounts,
            "class counts must add up to the tree's point count");

    LabelingSummary out;
    double sum = 0.0, sum_sq = 0.0;
    std::uint64_t hits = 0, draws = 0;

    std::uint64_t total = binomial_capped(tree.n, n0, kExhaustiveLimit);
    if (total <= kExhaustiveLimit) {
        for_each_labeling(tree.n, n0, [&](const std::vector<Label>& labels) {
            auto r = static_cast<double>(cut_edge_count(tree, labels));
            sum += r;
            sum_sq += r * r;
            if (r <= static_cast<double>(r_obs)) ++hits;
            ++draws;
        });
        out.moments.method = MomentMethod::Exhaustive;
        out.moments.mean = sum / static_cast<double>(draws);
        out.moments.var = sum_sq / static_cast<double>(draws) - out.moments.mean * out.moments.mean;
        out.moments.var = std::max(out.moments.var, 0.0);
        out.p_value = static_cast<double>(hits) / static_cast<double>(draws);
    } else {
        require(num_perms >= 2, ErrorCode::InvalidArgument,
                "Monte Carlo moments need at least two permutations");
        std::vector<Label> perm(tree.n, 1);
        std::fill(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n0), 0);
        for (std::size_t t = 0; t < num_perms; ++t) {
            rng.shuffle(perm);
            auto r = static_cast<double>(cut_edge_count(tree, perm));
            sum += r;
            sum_sq += r * r;
            if (r <= static_cast<double>(r_obs)) ++hits;
            ++draws;
        }
        out.moments.method = MomentMethod::MonteCarlo;
        auto m = static_cast<double>(draws);
        out.moments.mean = sum / m;
        out.moments.var = std::max((sum_sq - sum * sum / m) / (m - 1.0), 0.0);
        out.p_value = static_cast<double>(1 + hits) / static_cast<double>(1 + draws);
    }
    out.moments.draws = draws;
    return out;
}

} // namespace

Mst euclidean_mst(const std::vector<FeatureVector>& points) {
    require(points.size() >= 2, ErrorCode::TooFewPoints, "tree needs at least two points");
    const std::size_t n = points.size();
    const std::size_t dim = points[0].size();
    require(dim >= 1, ErrorCode::DimensionMismatch, "points need at least one dimension");
    for (const auto& p : points) {
        require(p.size() == dim, ErrorCode::DimensionMismatch,
                "all points must share one dimension");
        require(is_finite_vector(p), ErrorCode::InvalidArgument, "points must be finite");
    }

    std::vector<MstEdge> all;
    all.reserve(n * (n - 1) / 2);
    for (std::uint32_t i = 0; i + 1 < n; ++i) {
        for (std::uint32_t j = i + 1; j < n; ++j) {
            all.push_back({i, j, euclidean_distance(points[i], points[j])});
        }
    }
    std::sort(all.begin(), all.end(), [](const MstEdge& a, const MstEdge& b) {
        if (a.weight != b.weight) return a.weight < b.weight;
        if (a.i != b.i) return a.i < b.i;
        return a.j < b.j;
    });

    Mst tree;
    tree.n = n;
    tree.edges.reserve(n - 1);
    DisjointSets sets(n);
    for (const MstEdge& e : all) {
        if (sets.unite(e.i, e.j)) {
            tree.edges.push_back(e);
            if (tree.edges.size() == n - 1) break;
        }
    }
    return tree;
}

double total_weight(const Mst& tree) {
    double s = 0.0;
    for (const MstEdge& e : tree.edges) s += e.weight;
    return s;
}

std::size_t cut_edge_count(const Mst& tree, const std::vector<Label>& labels) {
    check_labels(tree, labels);
    std::size_t r = 0;
    for (const MstEdge& e : tree.edges) {
        r += labels[e.i] != labels[e.j];
    }
    return r;
}

NullMoments null_moments(const Mst& tree, std::size_t n0, std::size_t n1,
                         std::size_t num_perms, Rng& rng) {
    return summarize_labelings(tree, n0, n1, 0, num_perms, rng).moments;
}

double fr_statistic(std::size_t r, const NullMoments& moments) {
    require(moments.var > 0.0, ErrorCode::ZeroVariance,
            "null variance is zero, statistic undefined");
    return (static_cast<double>(r) - moments.mean) / std::sqrt(moments.var);
}

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

double fr_p_value_normal(double w) {
    return normal_cdf(w);
}

double fr_p_value_permutation(const Mst& tree, const std::vector<Label>& labels,
                              std::size_t num_perms, Rng& rng) {
    check_labels(tree, labels);
    std::size_t n0 = static_cast<std::size_t>(
        std::count(labels.begin(), labels.end(), 0));
    std::size_t r_obs = cut_edge_count(tree, labels);
    return summarize_labelings(tree, n0, labels.size() - n0, r_obs, num_perms, rng).p_value;
}

FrResult fr_test(const Mst& tree, const std::vector<Label>& labels,
                 std::size_t num_perms, PValueMode mode, Rng& rng) {
    check_labels(tree, labels);
    std::size_t n0 = static_cast<std::size_t>(
        std::count(labels.begin(), labels.end(), 0));

    FrResult res;
    res.r_n = cut_edge_count(tree, labels);
    auto summary = summarize_labelings(tree, n0, labels.size() - n0, res.r_n, num_perms, rng);
    res.moments = summary.moments;
    res.w_n = fr_statistic(res.r_n, res.moments);
    res.p_value = mode == PValueMode::Permutation ? summary.p_value
                                                  : fr_p_value_normal(res.w_n);
    return res;
}

} // namespace lets
