#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lets/config_io.hpp"
#include "lets/harness.hpp"

using namespace lets;
using nlohmann::json;

namespace {

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

ExperimentConfig small_bqast() {
    ExperimentConfig cfg;
    cfg.test = TestKind::BQAST;
    cfg.spec.kind = SyntheticKind::TwoGaussians;
    cfg.spec.d = 1;
    cfg.spec.n = 150;
    cfg.spec.mu1 = 4.0;
    cfg.budget = Budget{15, 40};
    cfg.trials = 6;
    cfg.seed = 3;
    return cfg;
}

} // namespace

TEST_CASE("wilson intervals match reference values") {
    auto empty = wilson_interval(0, 0);
    CHECK(empty.first == 0.0);
    CHECK(empty.second == 1.0);

    auto none = wilson_interval(0, 100);
    CHECK(none.first == doctest::Approx(0.0).scale(1.0));
    CHECK(none.second == doctest::Approx(0.0369935));

    auto half = wilson_interval(50, 100);
    CHECK(half.first == doctest::Approx(0.4038315));
    CHECK(half.second == doctest::Approx(0.5961685));
    CHECK(half.first + half.second == doctest::Approx(1.0).epsilon(1e-12));

    auto all = wilson_interval(10, 10);
    CHECK(all.first == doctest::Approx(0.7224672));
    CHECK(all.second == doctest::Approx(1.0));

    auto few = wilson_interval(3, 7);
    CHECK(few.first == doctest::Approx(0.1582199));
    CHECK(few.second == doctest::Approx(0.7495416));
}

TEST_CASE("synthetic specs reject impossible parameters") {
    SyntheticSpec good;
    CHECK_NOTHROW(good.validate());

    SyntheticSpec bad = good;
    bad.d = 0;
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = good;
    bad.n = 1;
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = good;
    bad.prior1 = 0.0;
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = good;
    bad.prior1 = 1.0;
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = good;
    bad.sigma = 0.0;
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = good;
    bad.kind = SyntheticKind::GaussianVsMixture;
    bad.components = 0;
    CHECK_THROWS_AS(bad.validate(), Error);
    try {
        bad.validate();
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::BadSpec);
    }
}

TEST_CASE("generated data follows the nominal law") {
    SyntheticSpec null_spec;
    null_spec.kind = SyntheticKind::NullIdentical;
    null_spec.d = 3;
    null_spec.n = 4000;
    Rng rng(42);
    Dataset null_data = generate_dataset(null_spec, rng);
    REQUIRE(null_data.features.size() == 4000);
    REQUIRE(null_data.features[0].size() == 3);
    double ones = 0.0, coord0 = 0.0;
    for (std::size_t i = 0; i < null_data.features.size(); ++i) {
        ones += null_data.labels[i];
        coord0 += null_data.features[i][0];
    }
    CHECK(ones / 4000.0 == doctest::Approx(0.5).epsilon(0.06));
    CHECK(coord0 / 4000.0 == doctest::Approx(0.0).scale(1.0).epsilon(0.08));

    SyntheticSpec gauss;
    gauss.kind = SyntheticKind::TwoGaussians;
    gauss.d = 2;
    gauss.n = 4000;
    gauss.prior1 = 0.3;
    gauss.mu1 = 3.0;
    Rng rng2(7);
    Dataset gdata = generate_dataset(gauss, rng2);
    double n1 = 0.0, m1 = 0.0, m0 = 0.0, cross = 0.0;
    for (std::size_t i = 0; i < gdata.features.size(); ++i) {
        cross += gdata.features[i][1];
        if (gdata.labels[i] == 1) {
            n1 += 1.0;
            m1 += gdata.features[i][0];
        } else {
            m0 += gdata.features[i][0];
        }
    }
    CHECK(n1 / 4000.0 == doctest::Approx(0.3).epsilon(0.1));
    CHECK(m1 / n1 == doctest::Approx(3.0).epsilon(0.05));
    CHECK(m0 / (4000.0 - n1) == doctest::Approx(0.0).scale(1.0).epsilon(0.08));
    CHECK(cross / 4000.0 == doctest::Approx(0.0).scale(1.0).epsilon(0.08));

    SyntheticSpec ring;
    ring.kind = SyntheticKind::GaussianVsMixture;
    ring.d = 2;
    ring.n = 3000;
    ring.components = 3;
    Rng rng3(11);
    Dataset rdata = generate_dataset(ring, rng3);
    double r1 = 0.0, c1 = 0.0, r0 = 0.0, c0 = 0.0;
    for (std::size_t i = 0; i < rdata.features.size(); ++i) {
        double radius = std::hypot(rdata.features[i][0], rdata.features[i][1]);
        if (rdata.labels[i] == 1) {
            r1 += radius;
            c1 += 1.0;
        } else {
            r0 += radius;
            c0 += 1.0;
        }
    }
    CHECK(r1 / c1 > 2.9);
    CHECK(r1 / c1 < 3.6);
    CHECK(r0 / c0 > 1.0);
    CHECK(r0 / c0 < 1.5);
}

TEST_CASE("dataset generation is seed deterministic") {
    SyntheticSpec spec;
    spec.kind = SyntheticKind::TwoGaussians;
    spec.n = 50;
    Rng a(9), b(9);
    Dataset da = generate_dataset(spec, a);
    Dataset db = generate_dataset(spec, b);
    CHECK(da.labels == db.labels);
    CHECK(da.features == db.features);

    Rng c = Rng::for_trial(9, 0);
    Rng d = Rng::for_trial(9, 1);
    Dataset dc = generate_dataset(spec, c);
    Dataset dd = generate_dataset(spec, d);
    CHECK(dc.features != dd.features);
}

TEST_CASE("generated pools answer label queries") {
    SyntheticSpec spec;
    spec.n = 30;
    spec.d = 2;
    Rng rng(5);
    UnlabeledPool pool = generate_pool(spec, rng);
    CHECK(pool.size() == 30);
    CHECK(pool.dim() == 2);
    CHECK(pool.query_count() == 0);
    Label z = pool.query(4);
    CHECK((z == 0 || z == 1));
    CHECK(pool.query_count() == 1);
}

TEST_CASE("experiment reports are byte reproducible") {
    ExperimentConfig cfg = small_bqast();
    ExperimentReport first = run_experiment(cfg);
    ExperimentReport second = run_experiment(cfg);
    CHECK(report_json(first) == report_json(second));
    CHECK(first.config_hash.size() == 16);
    CHECK(first.config_hash.find_first_not_of("0123456789abcdef") == std::string::npos);
    CHECK(!first.first_trajectory.empty());
    CHECK(first.rows.size() == 6);
}

TEST_CASE("worker count never changes the results") {
    ExperimentConfig cfg = small_bqast();
    cfg.trials = 8;
    ExperimentReport serial = run_experiment(cfg);
    cfg.threads = 3;
    ExperimentReport threaded = run_experiment(cfg);
    CHECK(trials_csv(serial) == trials_csv(threaded));
    CHECK(serial.rejections == threaded.rejections);
    CHECK(serial.errors == threaded.errors);
    CHECK(serial.mean_labels_used == threaded.mean_labels_used);
    REQUIRE(serial.first_trajectory.size() == threaded.first_trajectory.size());
    if (!serial.first_trajectory.empty()) {
        CHECK(serial.first_trajectory.back().log_stat_after ==
              threaded.first_trajectory.back().log_stat_after);
    }
}

TEST_CASE("failed trials become error rows outside the rate") {
    ExperimentConfig cfg;
    cfg.test = TestKind::PlainFR;
    cfg.spec.kind = SyntheticKind::NullIdentical;
    cfg.spec.n = 60;
    cfg.budget = Budget{0, 2};
    cfg.permutations = 50;
    cfg.trials = 40;
    cfg.seed = 1;
    ExperimentReport report = run_experiment(cfg);
    CHECK(report.errors > 0);
    CHECK(report.errors < 40);
    CHECK(report.rejections == 0);
    CHECK(report.rejection_rate == 0.0);
    std::size_t seen_errors = 0;
    for (const TrialRow& row : report.rows) {
        if (row.decision == "error") {
            ++seen_errors;
            CHECK(!row.error.empty());
            CHECK(!row.p_or_u_final.has_value());
        } else {
            CHECK(row.decision == "retain");
            CHECK(row.labels_used == 2);
        }
    }
    CHECK(seen_errors == report.errors);
    CHECK(report.mean_labels_used == 2.0);
}

TEST_CASE("guided batch runs hold level and find strong signals") {
    ExperimentConfig null_cfg;
    null_cfg.test = TestKind::BatchFR;
    null_cfg.spec.kind = SyntheticKind::NullIdentical;
    null_cfg.spec.n = 200;
    null_cfg.budget = Budget{20, 60};
    null_cfg.permutations = 300;
    null_cfg.trials = 30;
    null_cfg.seed = 5;
    ExperimentReport null_report = run_experiment(null_cfg);
    CHECK(null_report.errors == 0);
    CHECK(null_report.rejection_rate <= 0.2);

    ExperimentConfig alt_cfg = null_cfg;
    alt_cfg.spec.kind = SyntheticKind::TwoGaussians;
    alt_cfg.spec.mu1 = 4.0;
    ExperimentReport alt_report = run_experiment(alt_cfg);
    CHECK(alt_report.errors == 0);
    CHECK(alt_report.rejection_rate >= 0.9);
    CHECK(alt_report.mean_labels_used == 60.0);
}

TEST_CASE("sweeps key every row by config hash") {
    ExperimentConfig plain;
    plain.test = TestKind::PlainFR;
    plain.spec.n = 80;
    plain.budget = Budget{0, 20};
    plain.permutations = 200;
    plain.trials = 5;
    plain.seed = 2;

    ExperimentConfig batch;
    batch.test = TestKind::BatchFR;
    batch.spec.n = 100;
    batch.budget = Budget{10, 30};
    batch.permutations = 200;
    batch.trials = 4;
    batch.seed = 2;

    std::vector<ExperimentReport> reports = run_sweep({plain, batch});
    REQUIRE(reports.size() == 2);
    CHECK(report_json(reports[0]) == report_json(run_experiment(plain)));
    CHECK(reports[0].config_hash != reports[1].config_hash);

    auto summary = split_lines(sweep_summary_csv(reports));
    REQUIRE(summary.size() == 3);
    CHECK(summary[0] ==
          "config_hash,test,spec_kind,d,n,trials,errors,rejections,rejection_rate,"
          "wilson_lo,wilson_hi,mean_labels_used");
    auto row0 = split_fields(summary[1]);
    REQUIRE(row0.size() == 12);
    CHECK(row0[0] == reports[0].config_hash);
    CHECK(row0[1] == "plain-fr");
    CHECK(row0[2] == "null-identical");
    CHECK(row0[5] == "5");
    auto row1 = split_fields(summary[2]);
    CHECK(row1[0] == reports[1].config_hash);
    CHECK(row1[1] == "batch");

    auto trials = split_lines(sweep_trials_csv(reports));
    REQUIRE(trials.size() == 1 + 5 + 4);
    CHECK(trials[0] == "config_hash,trial,decision,labels_used,stop_step,p_or_u_final,"
                       "log_stat_final");
    CHECK(split_fields(trials[1])[0] == reports[0].config_hash);
    CHECK(split_fields(trials[6])[0] == reports[1].config_hash);

    CHECK_THROWS_AS(run_sweep({}), Error);
}

TEST_CASE("trial tables keep one column layout per kind") {
    ExperimentConfig cfg;
    cfg.test = TestKind::BatchFR;
    cfg.spec.kind = SyntheticKind::TwoGaussians;
    cfg.spec.n = 100;
    cfg.budget = Budget{10, 30};
    cfg.permutations = 100;
    cfg.trials = 3;
    cfg.seed = 4;
    ExperimentReport batch = run_experiment(cfg);
    auto lines = split_lines(trials_csv(batch));
    REQUIRE(lines.size() == 4);
    CHECK(lines[0] == "trial,decision,labels_used,stop_step,p_or_u_final,log_stat_final");
    auto fields = split_fields(lines[1]);
    REQUIRE(fields.size() == 6);
    CHECK(fields[0] == "0");
    CHECK(fields[3].empty());
    CHECK(!fields[4].empty());
    CHECK(fields[5].empty());

    ExperimentReport seq = run_experiment(small_bqast());
    auto seq_fields = split_fields(split_lines(trials_csv(seq))[1]);
    REQUIRE(seq_fields.size() == 6);
    CHECK(!seq_fields[4].empty());
    CHECK(!seq_fields[5].empty());
}

TEST_CASE("json and toml configs normalize identically") {
    const std::string json_text = R"({
        "test": "batch",
        "alpha": 0.05,
        "permutations": 1000,
        "trials": 4,
        "seed": 11,
        "spec": {"kind": "two-gaussians", "d": 2, "n": 120, "prior1": 0.4, "mu1": 2.0},
        "budget": {"n_init": 10, "n_total": 30},
        "predictor": {"kind": "knn", "k": 5}
    })";
    const std::string toml_text =
        "# same experiment, different syntax\n"
        "test = \"batch\"\n"
        "alpha = 0.05\n"
        "permutations = 1_000\n"
        "trials = 4\n"
        "seed = 11\n"
        "\n"
        "[spec]\n"
        "kind = \"two-gaussians\"\n"
        "d = 2\n"
        "n = 120\n"
        "prior1 = 0.4\n"
        "mu1 = 2.0\n"
        "\n"
        "[budget]\n"
        "n_init = 10\n"
        "n_total = 30\n"
        "\n"
        "[predictor]\n"
        "kind = \"knn\"\n"
        "k = 5\n";

    ExperimentConfig from_json_cfg = experiment_config_from_json(parse_config_text(json_text));
    ExperimentConfig from_toml_cfg = experiment_config_from_json(parse_config_text(toml_text));
    json canon_json = experiment_config_to_json(from_json_cfg);
    json canon_toml = experiment_config_to_json(from_toml_cfg);
    CHECK(canon_json.dump() == canon_toml.dump());
    CHECK(config_hash(canon_json) == config_hash(canon_toml));
    CHECK(from_toml_cfg.permutations == 1000);
    CHECK(from_toml_cfg.spec.prior1 == 0.4);
    CHECK(from_toml_cfg.predictor.k.has_value());
}

TEST_CASE("config round trips are canonical") {
    json minimal = json::object();
    minimal["test"] = "bqast";
    ExperimentConfig cfg = experiment_config_from_json(minimal);
    json once = experiment_config_to_json(cfg);
    json twice = experiment_config_to_json(experiment_config_from_json(once));
    CHECK(once.dump() == twice.dump());
    CHECK(once.contains("alpha"));
    CHECK(once.contains("spec"));
    CHECK(once.contains("budget"));
    CHECK(once["test"] == "bqast");
}

TEST_CASE("unknown or malformed config keys are rejected") {
    auto expect_config_error = [](const std::string& text) {
        try {
            experiment_config_from_json(parse_config_text(text));
            CHECK(false);
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::ConfigError);
        }
    };
    expect_config_error(R"({"test": "batch", "bogus": 1})");
    expect_config_error(R"({"spec": {"kind": "null-identical", "shape": 3}})");
    expect_config_error(R"({"budget": {"n_init": 5, "cap": 9}})");
    expect_config_error(R"({"predictor": {"kind": "knn", "leaves": 2}})");
    expect_config_error(R"({"test": "warp-drive"})");
    expect_config_error(R"({"trials": -3})");
    expect_config_error(R"({"alpha": "high"})");
    expect_config_error(R"({"seed": 1.5})");
    expect_config_error("trials = [1, 2\n");

    ExperimentConfig cfg = experiment_config_from_json(
        parse_config_text(R"({"test": "batch", "permutations": 1})"));
    CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("toml parsing covers the documented subset") {
    json parsed = parse_config_text(
        "title = \"quoted # not a comment\" # trailing comment\n"
        "count = 12_500\n"
        "ratio = -0.25\n"
        "flag = true\n"
        "tags = [1, 2, 3]\n"
        "nested = { lo = [0.0, 1.0], n = 4 }\n"
        "\n"
        "[outer.inner]\n"
        "value = 7\n");
    CHECK(parsed["title"] == "quoted # not a comment");
    CHECK(parsed["count"] == 12500);
    CHECK(parsed["ratio"] == -0.25);
    CHECK(parsed["flag"] == true);
    CHECK(parsed["tags"] == json::array({1, 2, 3}));
    CHECK(parsed["nested"]["lo"][1] == 1.0);
    CHECK(parsed["nested"]["n"] == 4);
    CHECK(parsed["outer"]["inner"]["value"] == 7);

    json as_json_array = parse_config_text("[1, 2, 3]");
    CHECK(as_json_array.is_array());

    CHECK_THROWS_AS(parse_config_text("a = 1\na = 2\n"), Error);
    CHECK_THROWS_AS(parse_config_text("a = \n"), Error);
    CHECK_THROWS_AS(parse_config_text("just words\n"), Error);
}

TEST_CASE("sweep files expand shared bases") {
    json sweep = parse_config_text(R"({
        "base": {"test": "batch", "trials": 3, "spec": {"n": 100}, "budget": {"n_init": 10, "n_total": 30}},
        "experiments": [{"seed": 1}, {"seed": 2, "alpha": 0.01}]
    })");
    std::vector<ExperimentConfig> configs = sweep_configs_from_json(sweep);
    REQUIRE(configs.size() == 2);
    CHECK(configs[0].seed == 1);
    CHECK(configs[0].level.alpha == 0.05);
    CHECK(configs[1].seed == 2);
    CHECK(configs[1].level.alpha == 0.01);
    CHECK(configs[0].trials == 3);
    CHECK(configs[1].trials == 3);
    CHECK(configs[0].spec.n == 100);

    json bare = json::array({experiment_config_to_json(configs[0])});
    CHECK(sweep_configs_from_json(bare).size() == 1);

    CHECK_THROWS_AS(sweep_configs_from_json(json::object()), Error);
    CHECK_THROWS_AS(sweep_configs_from_json(json::parse(R"({"experiments": []})")), Error);
}

TEST_CASE("config hashes fingerprint the canonical form") {
    ExperimentConfig cfg;
    json canon = experiment_config_to_json(cfg);
    CHECK(config_hash(canon) == "432724d26f3df398");

    ExperimentConfig reseeded = cfg;
    reseeded.seed = 99;
    CHECK(config_hash(experiment_config_to_json(reseeded)) != config_hash(canon));

    json reordered = json::parse(R"({"seed": 0, "test": "batch"})");
    json direct = json::parse(R"({"test": "batch", "seed": 0})");
    CHECK(config_hash(experiment_config_to_json(experiment_config_from_json(reordered))) ==
          config_hash(experiment_config_to_json(experiment_config_from_json(direct))));
}

TEST_CASE("report json carries everything but the clock") {
    ExperimentConfig cfg = small_bqast();
    ExperimentReport report = run_experiment(cfg);
    std::string text = report_json(report);
    CHECK(text.find("wall") == std::string::npos);
    CHECK(text.back() == '\n');

    json parsed = json::parse(text);
    CHECK(parsed["config_hash"] == report.config_hash);
    CHECK(parsed["per_trial"].size() == 6);
    CHECK(parsed["trials"] == 6);
    CHECK(parsed["rejection_rate"].get<double>() ==
          doctest::Approx(report.rejection_rate).epsilon(1e-12));
    CHECK(parsed["config"].dump() == experiment_config_to_json(cfg).dump());
    CHECK(parsed["wilson_ci95"].size() == 2);
    for (const json& row : parsed["per_trial"]) {
        CHECK(row.contains("trial"));
        CHECK(row.contains("decision"));
        CHECK(row.contains("labels_used"));
    }
}
