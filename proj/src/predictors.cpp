#include "lets/predictors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lets {

namespace {

double squared_distance(const FeatureVector& a, const FeatureVector& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        double d = a[k] - b[k];
        s += d * d;
    }
    return s;
}

void validate_config(const PredictorConfig& cfg) {
    require(cfg.clip_eps > 0.0 && cfg.clip_eps < 0.5, ErrorCode::BadHyperparameter,
            "clip_eps must lie in (0, 0.5)");
    if (cfg.kind == PredictorKind::Knn && cfg.k.has_value()) {
        require(*cfg.k >= 1, ErrorCode::BadHyperparameter, "k must be at least 1");
    }
    if (cfg.kind == PredictorKind::Kernel && cfg.bandwidth.has_value()) {
        require(*cfg.bandwidth > 0.0, ErrorCode::BadHyperparameter,
                "bandwidth must be positive");
    }
    if (cfg.kind == PredictorKind::Partition) {
        require(cfg.grid.has_value(), ErrorCode::BadHyperparameter,
                "partition predictor needs a grid; resolve_predictor_config supplies one");
        const PartitionGrid& g = *cfg.grid;
        require(g.cells_per_dim >= 1, ErrorCode::BadHyperparameter,
                "grid needs at least one cell per dimension");
        require(!g.lo.empty() && g.lo.size() == g.hi.size(), ErrorCode::BadHyperparameter,
                "grid bounds are inconsistent");
        double log_cells = static_cast<double>(g.lo.size()) *
                           std::log2(static_cast<double>(g.cells_per_dim));
        require(log_cells < 62.0, ErrorCode::BadHyperparameter, "grid has too many cells");
        for (std::size_t j = 0; j < g.lo.size(); ++j) {
            require(g.lo[j] <= g.hi[j], ErrorCode::BadHyperparameter,
                    "grid bounds must satisfy lo <= hi");
        }
    }
}

std::size_t default_cells_per_dim(std::size_t dim) {
    double target = std::pow(8.0, dim >= 2 ? 2.0 : 1.0);
    auto per_dim = static_cast<std::size_t>(
        std::floor(std::pow(target, 1.0 / static_cast<double>(dim)) + 1e-9));
    return std::max<std::size_t>(per_dim, 1);
}

} // namespace

const char* predictor_kind_name(PredictorKind kind) {
    switch (kind) {
        case PredictorKind::Knn: return "knn";
        case PredictorKind::Kernel: return "kernel";
        case PredictorKind::Partition: return "partition";
    }
    return "unknown";
}

PredictorConfig resolve_predictor_config(PredictorConfig cfg, const UnlabeledPool& pool) {
    if (cfg.kind != PredictorKind::Partition || cfg.grid.has_value()) return cfg;
    if (cfg.cells_per_dim.has_value()) {
        require(*cfg.cells_per_dim >= 1, ErrorCode::BadHyperparameter,
                "cells_per_dim must be at least 1");
    }
    PartitionGrid grid;
    auto [lo, hi] = pool.bounding_box();
    grid.lo = std::move(lo);
    grid.hi = std::move(hi);
    grid.cells_per_dim = cfg.cells_per_dim.value_or(default_cells_per_dim(pool.dim()));
    cfg.grid = std::move(grid);
    return cfg;
}

Predictor Predictor::fit(const PredictorConfig& cfg, const LabeledSet& training) {
    validate_config(cfg);
    require(!training.empty(), ErrorCode::EmptyTraining, "training set is empty");
    require(training.features.size() == training.labels.size(), ErrorCode::LengthMismatch,
            "training feature/label counts differ");

    Predictor p;
    p.cfg_ = cfg;
    p.dim_ = cfg.kind == PredictorKind::Partition ? cfg.grid->lo.size()
                                                  : training.features[0].size();
    for (std::size_t i = 0; i < training.size(); ++i) {
        p.ingest(training.features[i], training.labels[i]);
    }
    p.refresh_bandwidth();
    return p;
}

void Predictor::update(const FeatureVector& s, Label z) {
    ingest(s, z);
    refresh_bandwidth();
    ++update_count_;
}

void Predictor::ingest(const FeatureVector& s, Label z) {
    require(s.size() == dim_, ErrorCode::DimensionMismatch,
            "training point dimension mismatch");
    require(is_finite_vector(s), ErrorCode::InvalidArgument, "training point must be finite");
    require(z == 0 || z == 1, ErrorCode::InvalidArgument, "labels must be 0 or 1");

    if (cfg_.kind == PredictorKind::Partition) {
        CellCounts& c = cells_[cell_of(s)];
        c.total += 1;
        c.ones += static_cast<std::size_t>(z);
        global_.total += 1;
        global_.ones += static_cast<std::size_t>(z);
    } else {
        points_.push_back(s);
        labels_.push_back(z);
    }
    ++training_size_;
}

void Predictor::refresh_bandwidth() {
    if (cfg_.kind != PredictorKind::Kernel) return;
    if (cfg_.bandwidth.has_value()) {
        bandwidth_ = *cfg_.bandwidth;
        return;
    }
    // Half the median pairwise distance; degenerate training (a single point
    // or all duplicates) falls back to unit bandwidth.
    const std::size_t m = points_.size();
    if (m < 2) {
        bandwidth_ = 1.0;
        return;
    }
    std::vector<double> dists;
    dists.reserve(m * (m - 1) / 2);
    for (std::size_t i = 0; i + 1 < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            dists.push_back(std::sqrt(squared_distance(points_[i], points_[j])));
        }
    }
    std::size_t mid = dists.size() / 2;
    std::nth_element(dists.begin(), dists.begin() + static_cast<std::ptrdiff_t>(mid),
                     dists.end());
    double median = dists[mid];
    if (dists.size() % 2 == 0) {
        double below = *std::max_element(
            dists.begin(), dists.begin() + static_cast<std::ptrdiff_t>(mid));
        median = 0.5 * (median + below);
    }
    bandwidth_ = median > 0.0 ? 0.5 * median : 1.0;
}

std::size_t Predictor::cell_of(const FeatureVector& s) const {
    const PartitionGrid& g = *cfg_.grid;
    std::size_t index = 0;
    for (std::size_t j = 0; j < g.lo.size(); ++j) {
        double span = g.hi[j] - g.lo[j];
        std::size_t cell = 0;
        if (span > 0.0) {
            double t = (s[j] - g.lo[j]) / span * static_cast<double>(g.cells_per_dim);
            auto raw = static_cast<long long>(std::floor(t));
            raw = std::clamp<long long>(raw, 0,
                                        static_cast<long long>(g.cells_per_dim) - 1);
            cell = static_cast<std::size_t>(raw);
        }
        index = index * g.cells_per_dim + cell;
    }
    return index;
}

std::pair<double, double> Predictor::clip(double q1) const {
    q1 = std::clamp(q1, cfg_.clip_eps, 1.0 - cfg_.clip_eps);
    return {1.0 - q1, q1};
}

std::pair<double, double> Predictor::predict(const FeatureVector& s) const {
    require(training_size_ > 0, ErrorCode::EmptyTraining, "predictor has no training data");
    require(s.size() == dim_, ErrorCode::DimensionMismatch, "query dimension mismatch");
    require(is_finite_vector(s), ErrorCode::InvalidArgument, "query point must be finite");

    switch (cfg_.kind) {
        case PredictorKind::Knn: {
            const std::size_t m = points_.size();
            std::size_t k = cfg_.k.has_value()
                                ? std::min(*cfg_.k, m)
                                : static_cast<std::size_t>(
                                      std::ceil(std::sqrt(static_cast<double>(m))));
            std::vector<std::pair<double, std::size_t>> order(m);
            for (std::size_t i = 0; i < m; ++i) {
                order[i] = {squared_distance(s, points_[i]), i};
            }
            // Distance ties resolve toward earlier training points.
            std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k - 1),
                             order.end());
            std::size_t ones = 0;
            for (std::size_t i = 0; i < k; ++i) {
                ones += static_cast<std::size_t>(labels_[order[i].second]);
            }
            return clip(static_cast<double>(ones) / static_cast<double>(k));
        }
        case PredictorKind::Kernel: {
            const std::size_t m = points_.size();
            double min_sq = std::numeric_limits<double>::infinity();
            std::vector<double> sq(m);
            for (std::size_t i = 0; i < m; ++i) {
                sq[i] = squared_distance(s, points_[i]);
                min_sq = std::min(min_sq, sq[i]);
            }
            // Weights are shifted by the nearest squared distance before
            // exponentiation; the ratio is unchanged and never underflows to
            // an all-zero sum.
            double inv = 1.0 / (2.0 * bandwidth_ * bandwidth_);
            double wsum = 0.0, wones = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                double w = std::exp(-(sq[i] - min_sq) * inv);
                wsum += w;
                wones += w * static_cast<double>(labels_[i]);
            }
            return clip(wones / wsum);
        }
        case PredictorKind::Partition: {
            auto it = cells_.find(cell_of(s));
            const CellCounts& c = (it != cells_.end() && it->second.total > 0)
                                      ? it->second
                                      : global_;
            return clip(static_cast<double>(c.ones) / static_cast<double>(c.total));
        }
    }
    fail(ErrorCode::Internal, "unreachable predictor kind");
}

} // namespace lets
