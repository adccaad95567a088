#include "lets/core.hpp"

#include <cmath>
#include <limits>

namespace lets {

bool is_finite_vector(const FeatureVector& v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

std::pair<std::vector<FeatureVector>, std::vector<FeatureVector>>
split_by_label(const LabeledSet& set) {
    require(set.features.size() == set.labels.size(), ErrorCode::LengthMismatch,
            "labeled set has mismatched feature/label counts");
    std::vector<FeatureVector> class0, class1;
    for (std::size_t i = 0; i < set.size(); ++i) {
        Label z = set.labels[i];
        require(z == 0 || z == 1, ErrorCode::InvalidArgument, "labels must be 0 or 1");
        (z == 0 ? class0 : class1).push_back(set.features[i]);
    }
    return {std::move(class0), std::move(class1)};
}

UnlabeledPool::UnlabeledPool(std::vector<FeatureVector> features, std::vector<Label> labels)
    : features_(std::move(features)), hidden_labels_(std::move(labels)) {
    require(!features_.empty(), ErrorCode::TooFewPoints, "pool must be non-empty");
    require(features_.size() == hidden_labels_.size(), ErrorCode::LengthMismatch,
            "pool feature/label counts differ");
    dim_ = features_[0].size();
    require(dim_ >= 1, ErrorCode::DimensionMismatch, "features need at least one dimension");
    for (const auto& f : features_) {
        require(f.size() == dim_, ErrorCode::DimensionMismatch,
                "all pool features must share one dimension");
        require(is_finite_vector(f), ErrorCode::InvalidArgument,
                "pool features must be finite");
    }
    for (Label z : hidden_labels_) {
        require(z == 0 || z == 1, ErrorCode::InvalidArgument, "labels must be 0 or 1");
    }
    queried_.assign(features_.size(), false);
}

const FeatureVector& UnlabeledPool::feature(std::size_t i) const {
    require(i < features_.size(), ErrorCode::OutOfRange, "feature index out of range");
    return features_[i];
}

bool UnlabeledPool::is_queried(std::size_t i) const {
    require(i < features_.size(), ErrorCode::OutOfRange, "index out of range");
    return queried_[i];
}

std::vector<std::size_t> UnlabeledPool::unqueried_indices() const {
    std::vector<std::size_t> out;
    out.reserve(num_unqueried());
    for (std::size_t i = 0; i < features_.size(); ++i) {
        if (!queried_[i]) out.push_back(i);
    }
    return out;
}

Label UnlabeledPool::query(std::size_t i) {
    require(i < features_.size(), ErrorCode::OutOfRange, "query index out of range");
    require(!queried_[i], ErrorCode::AlreadyQueried, "index was already queried");
    queried_[i] = true;
    ++query_count_;
    return hidden_labels_[i];
}

std::pair<FeatureVector, FeatureVector> UnlabeledPool::bounding_box() const {
    FeatureVector lo(dim_, std::numeric_limits<double>::infinity());
    FeatureVector hi(dim_, -std::numeric_limits<double>::infinity());
    for (const auto& f : features_) {
        for (std::size_t j = 0; j < dim_; ++j) {
            lo[j] = std::min(lo[j], f[j]);
            hi[j] = std::max(hi[j], f[j]);
        }
    }
    return {lo, hi};
}

void Budget::validate(std::size_t pool_size) const {
    require(n_init >= 1, ErrorCode::InvalidArgument, "budget needs n_init >= 1");
    require(n_init < n_total, ErrorCode::InvalidArgument, "budget needs n_init < n_total");
    require(n_total <= pool_size, ErrorCode::BudgetExceedsPool,
            "total label budget exceeds pool size");
}

const char* outcome_name(Outcome o) {
    return o == Outcome::RejectH0 ? "reject" : "retain";
}

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::OutOfRange: return "OutOfRange";
        case ErrorCode::AlreadyQueried: return "AlreadyQueried";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::TooFewPoints: return "TooFewPoints";
        case ErrorCode::InvalidCounts: return "InvalidCounts";
        case ErrorCode::ZeroVariance: return "ZeroVariance";
        case ErrorCode::EmptyTraining: return "EmptyTraining";
        case ErrorCode::BadHyperparameter: return "BadHyperparameter";
        case ErrorCode::BadProbability: return "BadProbability";
        case ErrorCode::PoolExhausted: return "PoolExhausted";
        case ErrorCode::InfeasiblePrior: return "InfeasiblePrior";
        case ErrorCode::BudgetExceedsPool: return "BudgetExceedsPool";
        case ErrorCode::DegenerateJoint: return "DegenerateJoint";
        case ErrorCode::SupportMismatch: return "SupportMismatch";
        case ErrorCode::ZeroDenominator: return "ZeroDenominator";
        case ErrorCode::IntegrationFailure: return "IntegrationFailure";
        case ErrorCode::EmptyCell: return "EmptyCell";
        case ErrorCode::InvalidState: return "InvalidState";
        case ErrorCode::BadSpec: return "BadSpec";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::Internal: return "Internal";
    }
    return "Unknown";
}

} // namespace lets
