#pragma once

#include <optional>
#include <unordered_map>
#include <utility>

#include "lets/core.hpp"

namespace lets {

enum class PredictorKind { Knn, Kernel, Partition };

const char* predictor_kind_name(PredictorKind kind);

// Axis-aligned uniform grid used by the partition predictor. Cells are
// half-open along each axis with points clamped into the outermost cells.
struct PartitionGrid {
    FeatureVector lo;
    FeatureVector hi;
    std::size_t cells_per_dim = 0;
};

struct PredictorConfig {
    PredictorKind kind = PredictorKind::Knn;

    // Knn: absent means ceil(sqrt(training size)), recomputed as data arrives.
    std::optional<std::size_t> k;

    // Kernel: absent means half the median pairwise training distance,
    // recomputed as data arrives. Explicit values must be positive.
    std::optional<double> bandwidth;

    // Partition: grid resolution when the grid itself is derived from a pool.
    std::optional<std::size_t> cells_per_dim;
    std::optional<PartitionGrid> grid;

    // Posteriors are clamped into [clip_eps, 1 - clip_eps] and renormalized,
    // keeping every likelihood ratio finite.
    double clip_eps = 1e-3;
};

// Fills in the partition grid from the pool's bounding box when absent. The
// default resolution targets 8^min(d,2) cells in total.
PredictorConfig resolve_predictor_config(PredictorConfig cfg, const UnlabeledPool& pool);

// Posterior estimate Q(z | s) for binary labels, trained once and then grown
// point by point. fit on a full set and folding update over the same pairs
// produce identical predictors.
class Predictor {
public:
    static Predictor fit(const PredictorConfig& cfg, const LabeledSet& training);

    // (Q(0|s), Q(1|s)), clipped; sums to one.
    std::pair<double, double> predict(const FeatureVector& s) const;

    void update(const FeatureVector& s, Label z);

    std::size_t training_size() const { return training_size_; }
    std::size_t update_count() const { return update_count_; }
    const PredictorConfig& config() const { return cfg_; }

private:
    Predictor() = default;

    void ingest(const FeatureVector& s, Label z);
    void refresh_bandwidth();
    std::size_t cell_of(const FeatureVector& s) const;
    std::pair<double, double> clip(double q1) const;

    PredictorConfig cfg_;
    std::size_t dim_ = 0;
    std::size_t training_size_ = 0;
    std::size_t update_count_ = 0;

    // Knn / Kernel keep the raw pairs.
    std::vector<FeatureVector> points_;
    std::vector<Label> labels_;
    double bandwidth_ = 1.0;

    // Partition keeps per-cell and global counts only.
    struct CellCounts {
        std::size_t total = 0;
        std::size_t ones = 0;
    };
    std::unordered_map<std::size_t, CellCounts> cells_;
    CellCounts global_;
};

} // namespace lets
