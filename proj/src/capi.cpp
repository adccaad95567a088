#include "lets/lets_c.h"

#include <cstdlib>
#include <cstring>
#include <sstream>
#include <string>

#include "lets/config_io.hpp"
#include "lets/diagnostics.hpp"
#include "lets/harness.hpp"

struct lets_report {
    lets::ExperimentReport body;
};

struct lets_sweep {
    std::vector<lets::ExperimentReport> reports;
};

struct lets_pool {
    lets::UnlabeledPool body;
};

namespace {

thread_local std::string g_last_error;

lets_status status_for(lets::ErrorCode code) {
    using lets::ErrorCode;
    switch (code) {
        case ErrorCode::ConfigError:
        case ErrorCode::BadSpec:
            return LETS_ERR_CONFIG;
        case ErrorCode::IoError:
            return LETS_ERR_IO;
        case ErrorCode::InvalidArgument:
        case ErrorCode::OutOfRange:
        case ErrorCode::AlreadyQueried:
        case ErrorCode::DimensionMismatch:
        case ErrorCode::LengthMismatch:
        case ErrorCode::TooFewPoints:
        case ErrorCode::InvalidCounts:
        case ErrorCode::BadHyperparameter:
        case ErrorCode::BadProbability:
        case ErrorCode::BudgetExceedsPool:
        case ErrorCode::InfeasiblePrior:
            return LETS_ERR_INVALID;
        case ErrorCode::Internal:
            return LETS_ERR_INTERNAL;
        default:
            return LETS_ERR_RUNTIME;
    }
}

template <typename Fn>
lets_status guarded(Fn&& fn) noexcept {
    try {
        fn();
        g_last_error.clear();
        return LETS_OK;
    } catch (const lets::Error& e) {
        g_last_error = e.what();
        return status_for(e.code());
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return LETS_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown failure";
        return LETS_ERR_INTERNAL;
    }
}

char* copy_out(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.data(), s.size() + 1);
    return out;
}

void require_arg(bool ok, const char* what) {
    lets::require(ok, lets::ErrorCode::InvalidArgument, what);
}

} // namespace

extern "C" {

const char* lets_version(void) { return "1.0.0"; }

const char* lets_last_error_message(void) { return g_last_error.c_str(); }

void lets_string_free(char* s) { std::free(s); }

lets_status lets_config_canonicalize(const char* text, char** out_json) {
    return guarded([&] {
        require_arg(text != nullptr && out_json != nullptr, "null argument");
        auto cfg = lets::experiment_config_from_json(lets::parse_config_text(text));
        *out_json = copy_out(lets::experiment_config_to_json(cfg).dump(2) + "\n");
    });
}

lets_status lets_dataset_generate_csv(const char* spec_json, uint64_t seed,
                                      char** out_csv) {
    return guarded([&] {
        require_arg(spec_json != nullptr && out_csv != nullptr, "null argument");
        auto spec =
            lets::synthetic_spec_from_json(lets::parse_config_text(spec_json));
        lets::Rng rng(seed);
        lets::Dataset data = lets::generate_dataset(spec, rng);
        std::ostringstream out;
        lets::write_dataset_csv(out, data);
        *out_csv = copy_out(out.str());
    });
}

lets_status lets_experiment_run(const char* config_json, lets_report** out) {
    return guarded([&] {
        require_arg(config_json != nullptr && out != nullptr, "null argument");
        auto cfg =
            lets::experiment_config_from_json(lets::parse_config_text(config_json));
        auto* report = new lets_report{lets::run_experiment(cfg)};
        *out = report;
    });
}

void lets_report_free(lets_report* report) { delete report; }

lets_status lets_report_json(const lets_report* report, char** out) {
    return guarded([&] {
        require_arg(report != nullptr && out != nullptr, "null argument");
        *out = copy_out(lets::report_json(report->body));
    });
}

lets_status lets_report_trials_csv(const lets_report* report, char** out) {
    return guarded([&] {
        require_arg(report != nullptr && out != nullptr, "null argument");
        *out = copy_out(lets::trials_csv(report->body));
    });
}

lets_status lets_report_trajectory_csv(const lets_report* report, char** out) {
    return guarded([&] {
        require_arg(report != nullptr && out != nullptr, "null argument");
        std::ostringstream buf;
        lets::write_trajectory_csv(buf, report->body.first_trajectory);
        *out = copy_out(buf.str());
    });
}

double lets_report_rejection_rate(const lets_report* report) {
    return report ? report->body.rejection_rate : -1.0;
}

lets_status lets_sweep_run(const char* configs_json, lets_sweep** out) {
    return guarded([&] {
        require_arg(configs_json != nullptr && out != nullptr, "null argument");
        auto configs =
            lets::sweep_configs_from_json(lets::parse_config_text(configs_json));
        auto* sweep = new lets_sweep{lets::run_sweep(configs)};
        *out = sweep;
    });
}

void lets_sweep_free(lets_sweep* sweep) { delete sweep; }

size_t lets_sweep_count(const lets_sweep* sweep) {
    return sweep ? sweep->reports.size() : 0;
}

lets_status lets_sweep_report_json(const lets_sweep* sweep, size_t index, char** out) {
    return guarded([&] {
        require_arg(sweep != nullptr && out != nullptr, "null argument");
        lets::require(index < sweep->reports.size(), lets::ErrorCode::OutOfRange,
                      "sweep index out of range");
        *out = copy_out(lets::report_json(sweep->reports[index]));
    });
}

lets_status lets_sweep_summary_csv(const lets_sweep* sweep, char** out) {
    return guarded([&] {
        require_arg(sweep != nullptr && out != nullptr, "null argument");
        *out = copy_out(lets::sweep_summary_csv(sweep->reports));
    });
}

lets_status lets_sweep_trials_csv(const lets_sweep* sweep, char** out) {
    return guarded([&] {
        require_arg(sweep != nullptr && out != nullptr, "null argument");
        *out = copy_out(lets::sweep_trials_csv(sweep->reports));
    });
}

lets_status lets_fr_run_csv(const char* dataset_path, double alpha, size_t permutations,
                            int use_normal_approx, uint64_t seed, char** out_json) {
    return guarded([&] {
        require_arg(dataset_path != nullptr && out_json != nullptr, "null argument");
        lets::SignificanceLevel level{alpha};
        level.validate();
        lets::Dataset data = lets::load_dataset_csv(dataset_path);
        lets::Rng rng(seed);
        lets::Mst tree = lets::euclidean_mst(data.features);
        lets::FrResult fr = lets::fr_test(
            tree, data.labels, permutations,
            use_normal_approx ? lets::PValueMode::NormalApprox
                              : lets::PValueMode::Permutation,
            rng);
        nlohmann::json out;
        out["n"] = data.labels.size();
        out["cut_edges"] = fr.r_n;
        out["w"] = fr.w_n;
        out["p_value"] = fr.p_value;
        out["null_mean"] = fr.moments.mean;
        out["null_var"] = fr.moments.var;
        out["moment_method"] =
            fr.moments.method == lets::MomentMethod::Exhaustive ? "exhaustive"
                                                                : "monte-carlo";
        out["alpha"] = alpha;
        out["decision"] = lets::outcome_name(fr.p_value < alpha ? lets::Outcome::RejectH0
                                                                : lets::Outcome::RetainH0);
        *out_json = copy_out(out.dump(2) + "\n");
    });
}

lets_status lets_power_bounds(const lets_power_inputs* inputs, double* out_guided,
                              double* out_uniform) {
    return guarded([&] {
        require_arg(inputs != nullptr && out_guided != nullptr && out_uniform != nullptr,
                    "null argument");
        lets::PowerBoundInputs in;
        in.n_labels = inputs->n_labels;
        in.alpha = inputs->alpha;
        in.mi = inputs->mi;
        in.delta = inputs->delta;
        in.eps1 = inputs->eps1;
        in.eps2 = inputs->eps2;
        in.sigma = inputs->sigma;
        lets::PowerBounds bounds = lets::power_lower_bounds(in);
        *out_guided = bounds.guided;
        *out_uniform = bounds.uniform;
    });
}

lets_status lets_pool_generate(const char* spec_json, uint64_t seed, lets_pool** out) {
    return guarded([&] {
        require_arg(spec_json != nullptr && out != nullptr, "null argument");
        auto spec =
            lets::synthetic_spec_from_json(lets::parse_config_text(spec_json));
        lets::Rng rng(seed);
        *out = new lets_pool{lets::generate_pool(spec, rng)};
    });
}

lets_status lets_pool_load_csv(const char* path, lets_pool** out) {
    return guarded([&] {
        require_arg(path != nullptr && out != nullptr, "null argument");
        lets::Dataset data = lets::load_dataset_csv(path);
        *out = new lets_pool{
            lets::UnlabeledPool(std::move(data.features), std::move(data.labels))};
    });
}

void lets_pool_free(lets_pool* pool) { delete pool; }

size_t lets_pool_size(const lets_pool* pool) { return pool ? pool->body.size() : 0; }

size_t lets_pool_dim(const lets_pool* pool) { return pool ? pool->body.dim() : 0; }

size_t lets_pool_query_count(const lets_pool* pool) {
    return pool ? pool->body.query_count() : 0;
}

lets_status lets_pool_query(lets_pool* pool, size_t index, int* out_label) {
    return guarded([&] {
        require_arg(pool != nullptr && out_label != nullptr, "null argument");
        *out_label = pool->body.query(index);
    });
}

} // extern "C"
