#pragma once

#include <utility>

#include "lets/core.hpp"
#include "lets/predictors.hpp"
#include "lets/rng.hpp"

namespace lets {

enum class QuerySide { MaxQ0, MaxQ1, Uniform };

struct QueryChoice {
    std::size_t index = 0; // pool index
    QuerySide side = QuerySide::Uniform;
};

// Unqueried index maximizing Q(side | s); posterior ties resolve toward the
// lowest pool index.
std::size_t argmax_posterior(const UnlabeledPool& pool, const Predictor& pred, Label side);

// The two-point rule: one index maximizing Q(0|s), one maximizing Q(1|s). When
// both sides pick the same index it keeps the side with the larger posterior
// (Q0 on an exact tie) and the other side falls back to its runner-up.
std::pair<QueryChoice, QueryChoice> bimodal_pair(const UnlabeledPool& pool,
                                                 const Predictor& pred);

// Single-point variant: a fair coin picks the side, then the argmax for that
// side is returned.
QueryChoice bimodal_single(const UnlabeledPool& pool, const Predictor& pred, Rng& rng);

// k distinct unqueried indices drawn uniformly, in selection order.
std::vector<std::size_t> uniform_sample(const UnlabeledPool& pool, std::size_t k, Rng& rng);

// Query-density mass per support atom minimizing the expected posterior
// product sum_i mass_i * P(0|s_i) * P(1|s_i) subject to sum_i mass_i = 1 and
// sum_i mass_i * P(0|s_i) = u. The minimizer puts all mass on the extreme
// posterior atoms; with every posterior equal the constraint forces u to that
// value and the uniform density is returned by convention.
std::vector<double> optimal_query_density(const std::vector<double>& posterior0, double u);

// Objective value sum_i mass_i * P(0|s_i) * (1 - P(0|s_i)).
double expected_posterior_product(const std::vector<double>& mass,
                                  const std::vector<double>& posterior0);

} // namespace lets
