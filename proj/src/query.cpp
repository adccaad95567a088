#include "lets/query.hpp"

#include <algorithm>
#include <cmath>

namespace lets {

namespace {

constexpr double kFeasibilityTol = 1e-12;

struct SideBests {
    // (posterior, index) for the best and second-best unqueried point, one
    // slot per side; higher posterior wins, lower index breaks ties.
    std::size_t best[2] = {0, 0};
    double best_q[2] = {-1.0, -1.0};
    std::size_t second[2] = {0, 0};
    double second_q[2] = {-1.0, -1.0};
    std::size_t considered = 0;
};

SideBests scan_unqueried(const UnlabeledPool& pool, const Predictor& pred) {
    SideBests sb;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        if (pool.is_queried(i)) continue;
        auto [q0, q1] = pred.predict(pool.feature(i));
        double q[2] = {q0, q1};
        for (int side = 0; side < 2; ++side) {
            if (q[side] > sb.best_q[side]) {
                sb.second_q[side] = sb.best_q[side];
                sb.second[side] = sb.best[side];
                sb.best_q[side] = q[side];
                sb.best[side] = i;
            } else if (q[side] > sb.second_q[side]) {
                sb.second_q[side] = q[side];
                sb.second[side] = i;
            }
        }
        ++sb.considered;
    }
    return sb;
}

void validate_posteriors(const std::vector<double>& posterior0) {
    require(!posterior0.empty(), ErrorCode::InvalidArgument, "support must be non-empty");
    for (double p : posterior0) {
        require(std::isfinite(p) && p >= 0.0 && p <= 1.0, ErrorCode::BadProbability,
                "posteriors must lie in [0, 1]");
    }
}

} // namespace

std::size_t argmax_posterior(const UnlabeledPool& pool, const Predictor& pred, Label side) {
    require(side == 0 || side == 1, ErrorCode::InvalidArgument, "side must be 0 or 1");
    require(pool.num_unqueried() >= 1, ErrorCode::PoolExhausted, "no unqueried points left");
    SideBests sb = scan_unqueried(pool, pred);
    return sb.best[side];
}

std::pair<QueryChoice, QueryChoice> bimodal_pair(const UnlabeledPool& pool,
                                                 const Predictor& pred) {
    require(pool.num_unqueried() >= 2, ErrorCode::PoolExhausted,
            "two-point selection needs at least two unqueried points");
    SideBests sb = scan_unqueried(pool, pred);

    QueryChoice c0{sb.best[0], QuerySide::MaxQ0};
    QueryChoice c1{sb.best[1], QuerySide::MaxQ1};
    if (c0.index == c1.index) {
        if (sb.best_q[1] > sb.best_q[0]) {
            c0.index = sb.second[0];
        } else {
            c1.index = sb.second[1];
        }
    }
    return {c0, c1};
}

QueryChoice bimodal_single(const UnlabeledPool& pool, const Predictor& pred, Rng& rng) {
    require(pool.num_unqueried() >= 1, ErrorCode::PoolExhausted, "no unqueried points left");
    Label side = rng.coin() ? 1 : 0;
    SideBests sb = scan_unqueried(pool, pred);
    return {sb.best[side], side == 0 ? QuerySide::MaxQ0 : QuerySide::MaxQ1};
}

std::vector<std::size_t> uniform_sample(const UnlabeledPool& pool, std::size_t k, Rng& rng) {
    require(k >= 1, ErrorCode::InvalidArgument, "sample size must be at least 1");
    auto unqueried = pool.unqueried_indices();
    require(k <= unqueried.size(), ErrorCode::PoolExhausted,
            "fewer unqueried points than requested");
    auto picks = rng.sample_indices(unqueried.size(), k);
    std::vector<std::size_t> out;
    out.reserve(k);
    for (std::size_t p : picks) out.push_back(unqueried[p]);
    return out;
}

std::vector<double> optimal_query_density(const std::vector<double>& posterior0, double u) {
    validate_posteriors(posterior0);
    require(std::isfinite(u) && u > 0.0 && u < 1.0, ErrorCode::InfeasiblePrior,
            "class-0 prior must lie in (0, 1)");

    std::size_t lo_idx = 0, hi_idx = 0;
    for (std::size_t i = 1; i < posterior0.size(); ++i) {
        if (posterior0[i] < posterior0[lo_idx]) lo_idx = i;
        if (posterior0[i] > posterior0[hi_idx]) hi_idx = i;
    }
    double lo = posterior0[lo_idx];
    double hi = posterior0[hi_idx];

    if (hi - lo <= kFeasibilityTol) {
        // Flat posterior: the constraint pins u to the common value and every
        // density is optimal.
        require(std::abs(u - hi) <= 1e-9, ErrorCode::InfeasiblePrior,
                "prior is unreachable under a flat posterior");
        return std::vector<double>(posterior0.size(),
                                   1.0 / static_cast<double>(posterior0.size()));
    }

    require(u >= lo - kFeasibilityTol && u <= hi + kFeasibilityTol,
            ErrorCode::InfeasiblePrior,
            "prior lies outside the posterior range of the support");

    double mass_hi = std::clamp((u - lo) / (hi - lo), 0.0, 1.0);
    std::vector<double> mass(posterior0.size(), 0.0);
    mass[hi_idx] = mass_hi;
    mass[lo_idx] += 1.0 - mass_hi;
    return mass;
}

double expected_posterior_product(const std::vector<double>& mass,
                                  const std::vector<double>& posterior0) {
    validate_posteriors(posterior0);
    require(mass.size() == posterior0.size(), ErrorCode::LengthMismatch,
            "density and posterior supports differ");
    double total = 0.0, value = 0.0;
    for (std::size_t i = 0; i < mass.size(); ++i) {
        require(std::isfinite(mass[i]) && mass[i] >= -kFeasibilityTol,
                ErrorCode::BadProbability, "density masses must be non-negative");
        total += mass[i];
        value += mass[i] * posterior0[i] * (1.0 - posterior0[i]);
    }
    require(std::abs(total - 1.0) <= 1e-9, ErrorCode::BadProbability,
            "density masses must sum to 1");
    return value;
}

} // namespace lets
