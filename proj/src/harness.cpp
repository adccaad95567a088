#include "lets/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <thread>

#include "lets/config_io.hpp"

namespace lets {

void SyntheticSpec::validate() const {
    require(d >= 1, ErrorCode::BadSpec, "synthetic spec needs d >= 1");
    require(n >= 2, ErrorCode::BadSpec, "synthetic spec needs n >= 2");
    require(prior1 > 0.0 && prior1 < 1.0, ErrorCode::BadSpec,
            "prior1 must lie in (0, 1)");
    require(sigma > 0.0, ErrorCode::BadSpec, "sigma must be positive");
    require(components >= 1, ErrorCode::BadSpec, "mixture needs at least one component");
}

namespace {

FeatureVector draw_feature(const SyntheticSpec& spec, Label z, Rng& rng) {
    FeatureVector f(spec.d);
    switch (spec.kind) {
        case SyntheticKind::NullIdentical:
            for (double& x : f) x = rng.normal();
            break;
        case SyntheticKind::TwoGaussians:
            for (double& x : f) x = spec.sigma * rng.normal();
            f[0] += z == 1 ? spec.mu1 : spec.mu0;
            break;
        case SyntheticKind::GaussianVsMixture: {
            for (double& x : f) x = rng.normal();
            if (z == 1) {
                auto j = static_cast<double>(rng.uniform_index(spec.components));
                double angle =
                    2.0 * std::numbers::pi * j / static_cast<double>(spec.components);
                f[0] += 3.0 * std::cos(angle);
                if (spec.d >= 2) f[1] += 3.0 * std::sin(angle);
            }
            break;
        }
    }
    return f;
}

} // namespace

Dataset generate_dataset(const SyntheticSpec& spec, Rng& rng) {
    spec.validate();
    Dataset data;
    data.features.reserve(spec.n);
    data.labels.reserve(spec.n);
    for (std::size_t i = 0; i < spec.n; ++i) {
        Label z = rng.bernoulli(spec.prior1) ? 1 : 0;
        data.features.push_back(draw_feature(spec, z, rng));
        data.labels.push_back(z);
    }
    return data;
}

UnlabeledPool generate_pool(const SyntheticSpec& spec, Rng& rng) {
    Dataset data = generate_dataset(spec, rng);
    return UnlabeledPool(std::move(data.features), std::move(data.labels));
}

const char* test_kind_name(TestKind kind) {
    switch (kind) {
        case TestKind::BatchFR: return "batch";
        case TestKind::BQAST: return "bqast";
        case TestKind::BaselineSeq: return "baseline-seq";
        case TestKind::PartitionExample: return "partition";
        case TestKind::PlainFR: return "plain-fr";
    }
    return "unknown";
}

void ExperimentConfig::validate() const {
    spec.validate();
    level.validate();
    require(trials >= 1, ErrorCode::ConfigError, "need at least one trial");
    require(threads >= 1, ErrorCode::ConfigError, "need at least one worker");
    if (test == TestKind::PlainFR) {
        require(budget.n_total >= 2 && budget.n_total <= spec.n, ErrorCode::ConfigError,
                "plain run needs 2 <= n_total <= pool size");
    } else {
        budget.validate(spec.n);
    }
    if (test == TestKind::BatchFR || test == TestKind::PlainFR) {
        require(permutations >= 2, ErrorCode::ConfigError,
                "edge-count tests need at least two permutations");
    }
    if (test == TestKind::BQAST || test == TestKind::BaselineSeq ||
        test == TestKind::PartitionExample) {
        std::size_t steps =
            budget_includes_init ? budget.n_total - budget.n_init : budget.n_total;
        require(budget.n_init + steps <= spec.n, ErrorCode::ConfigError,
                "label budget exceeds pool size");
    }
    if (test == TestKind::PartitionExample) {
        require(!partition.cells.empty(), ErrorCode::ConfigError,
                "partition test needs at least one cell");
        for (const CellSpec& c : partition.cells) {
            require(c.box.lo.size() == spec.d && c.box.hi.size() == spec.d,
                    ErrorCode::ConfigError, "partition cell dimension mismatch");
            require(c.prior0 > 0.0 && c.prior0 < 1.0, ErrorCode::ConfigError,
                    "cell priors must lie in (0, 1)");
        }
    }
}

namespace {

double saturated_exp(double log_x) {
    if (log_x > 700.0) return std::numeric_limits<double>::max();
    return std::exp(log_x);
}

void fill_sequential_row(TrialRow& row, const Decision& decision, double log_stat) {
    row.decision = outcome_name(decision.outcome);
    row.labels_used = decision.labels_used;
    row.stop_step = decision.stop_step;
    row.log_stat_final = log_stat;
    row.p_or_u_final = saturated_exp(log_stat);
}

void run_single_trial(const ExperimentConfig& config, std::size_t trial, TrialRow& row,
                      std::vector<StepRecord>* trajectory_out) {
    row.trial = trial;
    Rng rng = Rng::for_trial(config.seed, trial);
    try {
        UnlabeledPool pool = generate_pool(config.spec, rng);
        switch (config.test) {
            case TestKind::BatchFR: {
                BatchConfig bc{config.budget, config.level, config.predictor,
                               config.permutations, config.p_value_mode};
                BatchReport rep = run_batch(pool, bc, rng);
                row.decision = outcome_name(rep.decision.outcome);
                row.labels_used = rep.decision.labels_used;
                if (rep.fr.has_value()) row.p_or_u_final = rep.fr->p_value;
                break;
            }
            case TestKind::PlainFR: {
                LabeledSet queried;
                for (std::size_t idx : uniform_sample(pool, config.budget.n_total, rng)) {
                    queried.push_back(pool.feature(idx), pool.query(idx));
                }
                auto ones = static_cast<std::size_t>(
                    std::count(queried.labels.begin(), queried.labels.end(), 1));
                if (ones == 0 || ones == queried.size()) {
                    row.decision = outcome_name(Outcome::RetainH0);
                } else {
                    FrResult fr = fr_test(euclidean_mst(queried.features), queried.labels,
                                          config.permutations, config.p_value_mode, rng);
                    row.decision = outcome_name(fr.p_value < config.level.alpha
                                                    ? Outcome::RejectH0
                                                    : Outcome::RetainH0);
                    row.p_or_u_final = fr.p_value;
                }
                row.labels_used = pool.query_count();
                break;
            }
            case TestKind::BQAST:
            case TestKind::BaselineSeq: {
                SequentialConfig sc{config.budget, config.level, config.predictor,
                                    config.budget_includes_init};
                SequentialResult res = config.test == TestKind::BQAST
                                           ? run_bqast(pool, sc, rng)
                                           : run_baseline_sequential(pool, sc, rng);
                fill_sequential_row(row, res.decision, res.state.log_u);
                if (trajectory_out) *trajectory_out = std::move(res.trajectory);
                break;
            }
            case TestKind::PartitionExample: {
                SequentialConfig sc{config.budget, config.level, config.predictor,
                                    config.budget_includes_init};
                PartitionExampleResult res =
                    run_partition_example(pool, config.partition, sc, rng);
                fill_sequential_row(row, res.decision, res.state.log_t);
                if (trajectory_out) *trajectory_out = std::move(res.trajectory);
                break;
            }
        }
    } catch (const Error& e) {
        row.decision = "error";
        row.error = e.what();
        row.p_or_u_final.reset();
        row.log_stat_final.reset();
        row.stop_step.reset();
    } catch (const std::exception& e) {
        row.decision = "error";
        row.error = e.what();
    }
}

} // namespace

std::pair<double, double> wilson_interval(std::size_t successes, std::size_t n) {
    if (n == 0) return {0.0, 1.0};
    const double z = 1.959963984540054;
    double nf = static_cast<double>(n);
    double p = static_cast<double>(successes) / nf;
    double z2 = z * z;
    double denom = 1.0 + z2 / nf;
    double center = (p + z2 / (2.0 * nf)) / denom;
    double half = z * std::sqrt(p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
    config.validate();
    auto start = std::chrono::steady_clock::now();

    ExperimentReport report;
    report.config = config;
    report.config_hash = config_hash(experiment_config_to_json(config));
    report.rows.resize(config.trials);

    const bool sequential = config.test == TestKind::BQAST ||
                            config.test == TestKind::BaselineSeq ||
                            config.test == TestKind::PartitionExample;

    std::size_t workers = std::min(config.threads, config.trials);
    if (workers <= 1) {
        for (std::size_t t = 0; t < config.trials; ++t) {
            run_single_trial(config, t, report.rows[t],
                             sequential && t == 0 ? &report.first_trajectory : nullptr);
        }
    } else {
        std::atomic<std::size_t> next{0};
        auto work = [&] {
            for (;;) {
                std::size_t t = next.fetch_add(1);
                if (t >= config.trials) return;
                run_single_trial(config, t, report.rows[t],
                                 sequential && t == 0 ? &report.first_trajectory : nullptr);
            }
        };
        std::vector<std::thread> threads;
        threads.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(work);
        for (std::thread& th : threads) th.join();
    }

    std::size_t labels_total = 0;
    for (const TrialRow& row : report.rows) {
        if (row.decision == "error") {
            ++report.errors;
            continue;
        }
        labels_total += row.labels_used;
        if (row.decision == outcome_name(Outcome::RejectH0)) ++report.rejections;
    }
    std::size_t effective = config.trials - report.errors;
    report.rejection_rate =
        effective > 0 ? static_cast<double>(report.rejections) / static_cast<double>(effective)
                      : 0.0;
    std::tie(report.wilson_lo, report.wilson_hi) =
        wilson_interval(report.rejections, effective);
    report.mean_labels_used =
        effective > 0 ? static_cast<double>(labels_total) / static_cast<double>(effective)
                      : 0.0;
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

std::vector<ExperimentReport> run_sweep(const std::vector<ExperimentConfig>& configs) {
    require(!configs.empty(), ErrorCode::ConfigError, "sweep needs at least one config");
    std::vector<ExperimentReport> reports;
    reports.reserve(configs.size());
    for (const ExperimentConfig& cfg : configs) {
        reports.push_back(run_experiment(cfg));
    }
    return reports;
}

namespace {

void append_trial_rows(std::ostringstream& out, const ExperimentReport& report,
                       bool with_hash) {
    for (const TrialRow& row : report.rows) {
        if (with_hash) out << report.config_hash << ',';
        out << row.trial << ',' << row.decision << ',' << row.labels_used << ',';
        if (row.stop_step.has_value()) out << *row.stop_step;
        out << ',';
        if (row.p_or_u_final.has_value()) out << format_double(*row.p_or_u_final);
        out << ',';
        if (row.log_stat_final.has_value()) out << format_double(*row.log_stat_final);
        out << '\n';
    }
}

constexpr const char* kTrialColumns = "trial,decision,labels_used,stop_step,p_or_u_final,log_stat_final";

} // namespace

std::string trials_csv(const ExperimentReport& report) {
    std::ostringstream out;
    out << kTrialColumns << '\n';
    append_trial_rows(out, report, false);
    return out.str();
}

std::string sweep_summary_csv(const std::vector<ExperimentReport>& reports) {
    std::ostringstream out;
    out << "config_hash,test,spec_kind,d,n,trials,errors,rejections,rejection_rate,"
           "wilson_lo,wilson_hi,mean_labels_used\n";
    for (const ExperimentReport& r : reports) {
        const char* kind = r.config.spec.kind == SyntheticKind::TwoGaussians
                               ? "two-gaussians"
                               : r.config.spec.kind == SyntheticKind::GaussianVsMixture
                                     ? "gaussian-vs-mixture"
                                     : "null-identical";
        out << r.config_hash << ',' << test_kind_name(r.config.test) << ',' << kind << ','
            << r.config.spec.d << ',' << r.config.spec.n << ',' << r.config.trials << ','
            << r.errors << ',' << r.rejections << ',' << format_double(r.rejection_rate)
            << ',' << format_double(r.wilson_lo) << ',' << format_double(r.wilson_hi) << ','
            << format_double(r.mean_labels_used) << '\n';
    }
    return out.str();
}

std::string sweep_trials_csv(const std::vector<ExperimentReport>& reports) {
    std::ostringstream out;
    out << "config_hash," << kTrialColumns << '\n';
    for (const ExperimentReport& r : reports) append_trial_rows(out, r, true);
    return out.str();
}

} // namespace lets
