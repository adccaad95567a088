#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "lets/lets_c.h"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

int exit_code_for(lets_status status) {
    return status == LETS_ERR_CONFIG || status == LETS_ERR_IO ? 2 : 1;
}

[[noreturn]] void die(lets_status status) {
    std::cerr << "error: " << lets_last_error_message() << '\n';
    std::exit(exit_code_for(status));
}

std::string take(char* s) {
    std::string out = s ? s : "";
    lets_string_free(s);
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in.good()) {
        std::cerr << "error: cannot open '" << path << "'\n";
        std::exit(2);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    out.flush();
    if (!out.good()) {
        std::cerr << "error: cannot write '" << path.string() << "'\n";
        std::exit(1);
    }
}

bool has_data_rows(const std::string& csv) {
    std::size_t first_newline = csv.find('\n');
    return first_newline != std::string::npos && first_newline + 1 < csv.size();
}

struct ExperimentArgs {
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    std::size_t trials = 0;
    double alpha = 0.0;
    std::size_t threads = 0;
    CLI::Option* seed_opt = nullptr;
    CLI::Option* trials_opt = nullptr;
    CLI::Option* alpha_opt = nullptr;
    CLI::Option* threads_opt = nullptr;
};

void add_experiment_options(CLI::App* cmd, ExperimentArgs& args) {
    cmd->add_option("-c,--config", args.config_path, "JSON or TOML experiment config");
    cmd->add_option("-o,--out", args.out_dir,
                    "directory for report.json, trials.csv, and trajectory.csv");
    args.seed_opt = cmd->add_option("--seed", args.seed, "master seed override");
    args.trials_opt = cmd->add_option("--trials", args.trials, "trial count override");
    args.alpha_opt = cmd->add_option("--alpha", args.alpha, "level override");
    args.threads_opt = cmd->add_option("--threads", args.threads, "worker count override");
}

int run_experiment_command(const char* test_name, const ExperimentArgs& args) {
    std::string text = args.config_path.empty() ? "{}" : read_file(args.config_path);
    char* canon_raw = nullptr;
    lets_status st = lets_config_canonicalize(text.c_str(), &canon_raw);
    if (st != LETS_OK) die(st);
    json cfg = json::parse(take(canon_raw));

    cfg["test"] = test_name;
    if (args.seed_opt->count() > 0) cfg["seed"] = args.seed;
    if (args.trials_opt->count() > 0) cfg["trials"] = args.trials;
    if (args.alpha_opt->count() > 0) cfg["alpha"] = args.alpha;
    if (args.threads_opt->count() > 0) cfg["threads"] = args.threads;

    auto start = std::chrono::steady_clock::now();
    lets_report* report = nullptr;
    st = lets_experiment_run(cfg.dump().c_str(), &report);
    if (st != LETS_OK) die(st);
    double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    char* report_raw = nullptr;
    st = lets_report_json(report, &report_raw);
    if (st != LETS_OK) die(st);
    std::string report_text = take(report_raw);
    json rj = json::parse(report_text);

    const json& spec = rj["config"]["spec"];
    std::cout << "test: " << test_name << "  spec: " << spec["kind"].get<std::string>()
              << " d=" << spec["d"] << " n=" << spec["n"] << '\n'
              << "trials: " << rj["trials"] << "  errors: " << rj["errors"] << '\n'
              << "rejections: " << rj["rejections"]
              << "  rate: " << rj["rejection_rate"]
              << "  wilson95: " << rj["wilson_ci95"].dump() << '\n'
              << "mean labels used: " << rj["mean_labels_used"] << '\n'
              << "config hash: " << rj["config_hash"].get<std::string>() << '\n'
              << "wall: " << seconds << " s\n";

    if (!args.out_dir.empty()) {
        fs::create_directories(args.out_dir);
        fs::path dir(args.out_dir);
        write_file(dir / "report.json", report_text);

        char* trials_raw = nullptr;
        st = lets_report_trials_csv(report, &trials_raw);
        if (st != LETS_OK) die(st);
        write_file(dir / "trials.csv", take(trials_raw));

        char* traj_raw = nullptr;
        st = lets_report_trajectory_csv(report, &traj_raw);
        if (st != LETS_OK) die(st);
        std::string traj = take(traj_raw);
        if (has_data_rows(traj)) write_file(dir / "trajectory.csv", traj);

        std::cout << "wrote " << (dir / "report.json").string() << '\n';
    }
    lets_report_free(report);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"label-efficient two-sample testing"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "draw a synthetic labeled dataset as CSV");
    std::string gen_config, gen_out, gen_kind = "null-identical";
    std::size_t gen_d = 1, gen_n = 100, gen_components = 2;
    double gen_prior1 = 0.5, gen_mu0 = 0.0, gen_mu1 = 1.0, gen_sigma = 1.0;
    std::uint64_t gen_seed = 0;
    auto* gen_config_opt =
        gen->add_option("-c,--config", gen_config, "spec as JSON or TOML");
    gen->add_option("-o,--out", gen_out, "output CSV path")->required();
    gen->add_option("--seed", gen_seed, "rng seed");
    std::vector<CLI::Option*> gen_spec_opts = {
        gen->add_option("--kind", gen_kind,
                        "two-gaussians | gaussian-vs-mixture | null-identical"),
        gen->add_option("--d", gen_d, "feature dimension"),
        gen->add_option("--n", gen_n, "number of points"),
        gen->add_option("--prior1", gen_prior1, "class-1 weight"),
        gen->add_option("--mu0", gen_mu0, "class-0 mean shift"),
        gen->add_option("--mu1", gen_mu1, "class-1 mean shift"),
        gen->add_option("--sigma", gen_sigma, "two-gaussians scale"),
        gen->add_option("--components", gen_components, "mixture component count"),
    };
    for (CLI::Option* opt : gen_spec_opts) opt->excludes(gen_config_opt);

    // experiments
    ExperimentArgs xargs;
    auto* batch = app.add_subcommand(
        "batch", "guided batch edge-count test over synthetic trials");
    auto* bqast = app.add_subcommand(
        "bqast", "anytime-valid sequential test with bimodal queries");
    auto* baseline =
        app.add_subcommand("baseline-seq", "sequential test with uniform queries");
    auto* partition = app.add_subcommand(
        "partition", "cell-selection workflow with a known-prior sequential test");
    ExperimentArgs batch_args, bqast_args, baseline_args, partition_args;
    add_experiment_options(batch, batch_args);
    add_experiment_options(bqast, bqast_args);
    add_experiment_options(baseline, baseline_args);
    add_experiment_options(partition, partition_args);

    // fr
    auto* fr = app.add_subcommand("fr", "edge-count two-sample test on a labeled CSV");
    std::string fr_data, fr_out;
    double fr_alpha = 0.05;
    std::size_t fr_perms = 1000;
    bool fr_normal = false;
    std::uint64_t fr_seed = 0;
    fr->add_option("--data", fr_data, "labeled dataset CSV")->required();
    fr->add_option("--alpha", fr_alpha, "level");
    fr->add_option("--permutations", fr_perms, "label shuffles for the null");
    fr->add_flag("--normal", fr_normal, "limiting-normal p-value instead of permutation");
    fr->add_option("--seed", fr_seed, "rng seed");
    fr->add_option("-o,--out", fr_out, "write the JSON result here");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "run a list of experiment configs");
    std::string sweep_config, sweep_out;
    sweep->add_option("-c,--config", sweep_config, "sweep config (JSON or TOML)")
        ->required();
    sweep->add_option("-o,--out", sweep_out, "directory for summary and per-run reports");

    // bounds
    auto* bounds =
        app.add_subcommand("bounds", "label-complexity power lower bounds");
    lets_power_inputs pb{};
    pb.alpha = 0.05;
    std::string bounds_out;
    bounds->add_option("--n", pb.n_labels, "label budget")->required();
    bounds->add_option("--alpha", pb.alpha, "level");
    bounds->add_option("--mi", pb.mi, "feature-label information, nats")->required();
    bounds->add_option("--delta", pb.delta, "guided-query information gain");
    bounds->add_option("--eps1", pb.eps1, "predictor log-ratio error bound");
    bounds->add_option("--eps2", pb.eps2, "swapped-law log-ratio error bound");
    bounds->add_option("--sigma", pb.sigma, "information-spectrum deviation");
    bounds->add_option("-o,--out", bounds_out, "write the JSON result here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (gen->parsed()) {
        std::string spec_text;
        if (!gen_config.empty()) {
            spec_text = read_file(gen_config);
        } else {
            json spec = {{"kind", gen_kind},     {"d", gen_d},
                         {"n", gen_n},           {"prior1", gen_prior1},
                         {"mu0", gen_mu0},       {"mu1", gen_mu1},
                         {"sigma", gen_sigma},   {"components", gen_components}};
            spec_text = spec.dump();
        }
        char* csv_raw = nullptr;
        lets_status st = lets_dataset_generate_csv(spec_text.c_str(), gen_seed, &csv_raw);
        if (st != LETS_OK) die(st);
        write_file(gen_out, take(csv_raw));
        std::cout << "wrote " << gen_out << '\n';
        return 0;
    }
    if (batch->parsed()) return run_experiment_command("batch", batch_args);
    if (bqast->parsed()) return run_experiment_command("bqast", bqast_args);
    if (baseline->parsed()) return run_experiment_command("baseline-seq", baseline_args);
    if (partition->parsed()) return run_experiment_command("partition", partition_args);

    if (fr->parsed()) {
        char* out_raw = nullptr;
        lets_status st = lets_fr_run_csv(fr_data.c_str(), fr_alpha, fr_perms,
                                         fr_normal ? 1 : 0, fr_seed, &out_raw);
        if (st != LETS_OK) die(st);
        std::string out_text = take(out_raw);
        std::cout << out_text;
        if (!fr_out.empty()) write_file(fr_out, out_text);
        return 0;
    }

    if (sweep->parsed()) {
        lets_sweep* sw = nullptr;
        lets_status st = lets_sweep_run(read_file(sweep_config).c_str(), &sw);
        if (st != LETS_OK) die(st);
        char* summary_raw = nullptr;
        st = lets_sweep_summary_csv(sw, &summary_raw);
        if (st != LETS_OK) die(st);
        std::string summary = take(summary_raw);
        std::cout << summary;
        if (!sweep_out.empty()) {
            fs::create_directories(sweep_out);
            fs::path dir(sweep_out);
            write_file(dir / "sweep_summary.csv", summary);
            char* trials_raw = nullptr;
            st = lets_sweep_trials_csv(sw, &trials_raw);
            if (st != LETS_OK) die(st);
            write_file(dir / "sweep_trials.csv", take(trials_raw));
            for (std::size_t i = 0; i < lets_sweep_count(sw); ++i) {
                char* rep_raw = nullptr;
                st = lets_sweep_report_json(sw, i, &rep_raw);
                if (st != LETS_OK) die(st);
                std::string rep = take(rep_raw);
                std::string hash = json::parse(rep)["config_hash"].get<std::string>();
                write_file(dir / ("report_" + std::to_string(i) + "_" + hash + ".json"),
                           rep);
            }
            std::cout << "wrote " << (dir / "sweep_summary.csv").string() << '\n';
        }
        lets_sweep_free(sw);
        return 0;
    }

    if (bounds->parsed()) {
        double guided = 0.0, uniform = 0.0;
        lets_status st = lets_power_bounds(&pb, &guided, &uniform);
        if (st != LETS_OK) die(st);
        json out = {{"n_labels", pb.n_labels}, {"alpha", pb.alpha},
                    {"mi", pb.mi},             {"delta", pb.delta},
                    {"eps1", pb.eps1},         {"eps2", pb.eps2},
                    {"sigma", pb.sigma},       {"guided", guided},
                    {"uniform", uniform}};
        std::string out_text = out.dump(2) + "\n";
        std::cout << out_text;
        if (!bounds_out.empty()) write_file(bounds_out, out_text);
        return 0;
    }
    return 0;
}
