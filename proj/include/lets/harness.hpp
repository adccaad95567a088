#pragma once

#include <string>

#include "lets/batch_test.hpp"
#include "lets/csv.hpp"
#include "lets/sequential_test.hpp"

namespace lets {

enum class SyntheticKind { TwoGaussians, GaussianVsMixture, NullIdentical };

// Synthetic two-sample problems at a fixed class-1 weight prior1.
//   TwoGaussians:      spherical Gaussians, class means mu0/mu1 on coordinate 0.
//   GaussianVsMixture: class 0 standard normal, class 1 an equal-weight mixture
//                      of unit Gaussians centered on a radius-3 circle (first
//                      two coordinates; on a line for d = 1).
//   NullIdentical:     features standard normal, labels independent coin flips.
struct SyntheticSpec {
    SyntheticKind kind = SyntheticKind::NullIdentical;
    std::size_t d = 1;
    std::size_t n = 100;
    double prior1 = 0.5;
    double mu0 = 0.0;
    double mu1 = 1.0;
    double sigma = 1.0;
    std::size_t components = 2;

    void validate() const;
};

Dataset generate_dataset(const SyntheticSpec& spec, Rng& rng);
UnlabeledPool generate_pool(const SyntheticSpec& spec, Rng& rng);

enum class TestKind { BatchFR, BQAST, BaselineSeq, PartitionExample, PlainFR };

const char* test_kind_name(TestKind kind);

struct ExperimentConfig {
    TestKind test = TestKind::BatchFR;
    SyntheticSpec spec;
    Budget budget{20, 100};
    SignificanceLevel level;
    PredictorConfig predictor;
    std::size_t permutations = 1000;
    PValueMode p_value_mode = PValueMode::Permutation;
    bool budget_includes_init = true;
    PartitionPlan partition; // PartitionExample only
    std::size_t trials = 100;
    std::uint64_t seed = 0;
    std::size_t threads = 1;

    void validate() const;
};

struct TrialRow {
    std::size_t trial = 0;
    std::string decision; // reject | retain | error
    std::size_t labels_used = 0;
    std::optional<std::size_t> stop_step;
    // Batch and plain runs record the p-value; sequential runs record the
    // final martingale value, with the exact log alongside since the plain
    // value saturates for long retained runs.
    std::optional<double> p_or_u_final;
    std::optional<double> log_stat_final;
    std::string error; // message for decision == error
};

struct ExperimentReport {
    ExperimentConfig config;
    std::string config_hash; // 16 hex digits over the canonical config JSON
    std::size_t rejections = 0;
    std::size_t errors = 0;
    double rejection_rate = 0.0; // over non-error trials
    double wilson_lo = 0.0;
    double wilson_hi = 1.0;
    double mean_labels_used = 0.0;
    std::vector<TrialRow> rows;
    // First trial's per-step record for sequential tests, for trajectory export.
    std::vector<StepRecord> first_trajectory;
    double wall_seconds = 0.0; // console metadata, never serialized
};

// Runs config.trials independent trials, each with its own pool and RNG stream
// derived from (seed, trial index), across config.threads workers. Results are
// identical for any worker count; a failed trial becomes an error row and is
// excluded from the rate.
ExperimentReport run_experiment(const ExperimentConfig& config);

std::vector<ExperimentReport> run_sweep(const std::vector<ExperimentConfig>& configs);

// 95% Wilson score interval for a binomial proportion.
std::pair<double, double> wilson_interval(std::size_t successes, std::size_t n);

std::string trials_csv(const ExperimentReport& report);
std::string sweep_summary_csv(const std::vector<ExperimentReport>& reports);
std::string sweep_trials_csv(const std::vector<ExperimentReport>& reports);

} // namespace lets
