#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lets/errors.hpp"

namespace lets {

using FeatureVector = std::vector<double>;

// Binary class label; every boundary that accepts labels validates {0, 1}.
using Label = int;

bool is_finite_vector(const FeatureVector& v);

// Ordered list of (feature, label) pairs kept as parallel arrays.
struct LabeledSet {
    std::vector<FeatureVector> features;
    std::vector<Label> labels;

    std::size_t size() const { return features.size(); }
    bool empty() const { return features.empty(); }

    void push_back(FeatureVector f, Label z) {
        features.push_back(std::move(f));
        labels.push_back(z);
    }
};

// Features by class, in first-appearance order.
std::pair<std::vector<FeatureVector>, std::vector<FeatureVector>>
split_by_label(const LabeledSet& set);

// Unlabeled sample pool with a query-once label oracle. Labels are supplied at
// construction and are readable only through query(), one index at a time;
// query_count() is the audit trail for label-budget accounting.
class UnlabeledPool {
public:
    UnlabeledPool(std::vector<FeatureVector> features, std::vector<Label> labels);

    std::size_t size() const { return features_.size(); }
    std::size_t dim() const { return dim_; }

    const FeatureVector& feature(std::size_t i) const;
    const std::vector<FeatureVector>& features() const { return features_; }

    bool is_queried(std::size_t i) const;
    std::size_t num_unqueried() const { return features_.size() - query_count_; }
    std::vector<std::size_t> unqueried_indices() const;

    Label query(std::size_t i);
    std::size_t query_count() const { return query_count_; }

    // Axis-aligned bounding box over all features: (lo, hi) per dimension.
    std::pair<FeatureVector, FeatureVector> bounding_box() const;

private:
    std::vector<FeatureVector> features_;
    std::vector<Label> hidden_labels_;
    std::vector<bool> queried_;
    std::size_t query_count_ = 0;
    std::size_t dim_ = 0;
};

// Label budget: n_init uniform warm-up labels out of n_total overall.
struct Budget {
    std::size_t n_init = 0;
    std::size_t n_total = 0;

    void validate(std::size_t pool_size) const;
};

struct SignificanceLevel {
    double alpha = 0.05;

    void validate() const {
        require(alpha > 0.0 && alpha < 1.0, ErrorCode::InvalidArgument,
                "alpha must lie in (0, 1)");
    }
};

enum class Outcome { RejectH0, RetainH0 };

struct Decision {
    Outcome outcome = Outcome::RetainH0;
    std::size_t labels_used = 0;
    // Step at which a sequential test stopped; absent for retained or batch runs.
    std::optional<std::size_t> stop_step;
};

const char* outcome_name(Outcome o);

} // namespace lets
