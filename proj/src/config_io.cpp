#include "lets/config_io.hpp"

#include <cctype>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string_view>

namespace lets {

using nlohmann::json;

namespace {

[[noreturn]] void config_fail(const std::string& msg) {
    fail(ErrorCode::ConfigError, msg);
}

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const char* where) {
    if (!j.is_object()) config_fail(std::string(where) + " must be an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* key : allowed) {
            if (it.key() == key) {
                known = true;
                break;
            }
        }
        if (!known) config_fail("unknown key '" + it.key() + "' in " + where);
    }
}

double get_double(const json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_number()) config_fail(std::string(key) + " must be a number");
    return v.get<double>();
}

std::size_t get_size(const json& j, const char* key, std::size_t fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_number_integer())
        config_fail(std::string(key) + " must be a non-negative integer");
    auto raw = v.get<std::int64_t>();
    if (raw < 0) config_fail(std::string(key) + " must be a non-negative integer");
    return static_cast<std::size_t>(raw);
}

std::uint64_t get_u64(const json& j, const char* key, std::uint64_t fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_number_integer())
        config_fail(std::string(key) + " must be a non-negative integer");
    auto raw = v.get<std::int64_t>();
    if (raw < 0) config_fail(std::string(key) + " must be a non-negative integer");
    return static_cast<std::uint64_t>(raw);
}

bool get_bool(const json& j, const char* key, bool fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_boolean()) config_fail(std::string(key) + " must be a boolean");
    return v.get<bool>();
}

std::string get_string(const json& j, const char* key) {
    const json& v = j.at(key);
    if (!v.is_string()) config_fail(std::string(key) + " must be a string");
    return v.get<std::string>();
}

FeatureVector number_array(const json& v, const char* where) {
    if (!v.is_array()) config_fail(std::string(where) + " must be an array of numbers");
    FeatureVector out;
    out.reserve(v.size());
    for (const json& x : v) {
        if (!x.is_number())
            config_fail(std::string(where) + " must be an array of numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

SyntheticKind synthetic_kind_from_name(const std::string& name) {
    if (name == "two-gaussians") return SyntheticKind::TwoGaussians;
    if (name == "gaussian-vs-mixture") return SyntheticKind::GaussianVsMixture;
    if (name == "null-identical") return SyntheticKind::NullIdentical;
    config_fail("unknown synthetic kind '" + name + "'");
}

const char* synthetic_kind_name(SyntheticKind kind) {
    switch (kind) {
        case SyntheticKind::TwoGaussians: return "two-gaussians";
        case SyntheticKind::GaussianVsMixture: return "gaussian-vs-mixture";
        case SyntheticKind::NullIdentical: return "null-identical";
    }
    return "unknown";
}

TestKind test_kind_from_name(const std::string& name) {
    if (name == "batch") return TestKind::BatchFR;
    if (name == "bqast") return TestKind::BQAST;
    if (name == "baseline-seq") return TestKind::BaselineSeq;
    if (name == "partition") return TestKind::PartitionExample;
    if (name == "plain-fr") return TestKind::PlainFR;
    config_fail("unknown test kind '" + name + "'");
}

PredictorKind predictor_kind_from_name(const std::string& name) {
    if (name == "knn") return PredictorKind::Knn;
    if (name == "kernel") return PredictorKind::Kernel;
    if (name == "partition") return PredictorKind::Partition;
    config_fail("unknown predictor kind '" + name + "'");
}

PredictorConfig predictor_from_json(const json& j) {
    check_keys(j, {"kind", "k", "bandwidth", "cells_per_dim", "grid", "clip_eps"},
               "predictor");
    PredictorConfig cfg;
    if (j.contains("kind")) cfg.kind = predictor_kind_from_name(get_string(j, "kind"));
    if (j.contains("k")) cfg.k = get_size(j, "k", 0);
    if (j.contains("bandwidth")) cfg.bandwidth = get_double(j, "bandwidth", 0.0);
    if (j.contains("cells_per_dim")) cfg.cells_per_dim = get_size(j, "cells_per_dim", 0);
    if (j.contains("grid")) {
        const json& g = j.at("grid");
        check_keys(g, {"lo", "hi", "cells_per_dim"}, "predictor grid");
        PartitionGrid grid;
        grid.lo = number_array(g.at("lo"), "grid lo");
        grid.hi = number_array(g.at("hi"), "grid hi");
        grid.cells_per_dim = get_size(g, "cells_per_dim", 0);
        cfg.grid = std::move(grid);
    }
    cfg.clip_eps = get_double(j, "clip_eps", cfg.clip_eps);
    return cfg;
}

json predictor_to_json(const PredictorConfig& cfg) {
    json out;
    out["kind"] = predictor_kind_name(cfg.kind);
    out["clip_eps"] = cfg.clip_eps;
    if (cfg.k.has_value()) out["k"] = *cfg.k;
    if (cfg.bandwidth.has_value()) out["bandwidth"] = *cfg.bandwidth;
    if (cfg.cells_per_dim.has_value()) out["cells_per_dim"] = *cfg.cells_per_dim;
    if (cfg.grid.has_value()) {
        out["grid"] = {{"lo", cfg.grid->lo},
                       {"hi", cfg.grid->hi},
                       {"cells_per_dim", cfg.grid->cells_per_dim}};
    }
    return out;
}

PartitionPlan partition_from_json(const json& j) {
    check_keys(j, {"lo", "hi", "prior0"}, "partition");
    if (!j.contains("lo") || !j.contains("hi") || !j.contains("prior0"))
        config_fail("partition needs lo, hi, and prior0");
    const json& lo = j.at("lo");
    const json& hi = j.at("hi");
    const json& prior0 = j.at("prior0");
    if (!lo.is_array() || !hi.is_array() || !prior0.is_array() ||
        lo.size() != hi.size() || lo.size() != prior0.size())
        config_fail("partition lo, hi, and prior0 must be arrays of equal length");
    PartitionPlan plan;
    plan.cells.reserve(lo.size());
    for (std::size_t i = 0; i < lo.size(); ++i) {
        CellSpec cell;
        cell.box.lo = number_array(lo.at(i), "partition cell lo");
        cell.box.hi = number_array(hi.at(i), "partition cell hi");
        if (!prior0.at(i).is_number()) config_fail("partition prior0 entries must be numbers");
        cell.prior0 = prior0.at(i).get<double>();
        plan.cells.push_back(std::move(cell));
    }
    return plan;
}

json partition_to_json(const PartitionPlan& plan) {
    json lo = json::array();
    json hi = json::array();
    json prior0 = json::array();
    for (const CellSpec& cell : plan.cells) {
        lo.push_back(cell.box.lo);
        hi.push_back(cell.box.hi);
        prior0.push_back(cell.prior0);
    }
    return {{"lo", lo}, {"hi", hi}, {"prior0", prior0}};
}

// ----- TOML subset ---------------------------------------------------------
//
// Supported: # comments, [section] and [a.b] headers, bare keys, strings with
// \\ \" \n \t escapes, integers, floats, booleans, single-line arrays, and
// inline tables. Everything normalizes to the same JSON tree the JSON loader
// produces.

struct TomlCursor {
    std::string_view text;
    std::size_t pos = 0;
    std::size_t line = 1;

    [[noreturn]] void fail_here(const std::string& msg) const {
        config_fail("config line " + std::to_string(line) + ": " + msg);
    }

    bool done() const { return pos >= text.size(); }
    char peek() const { return text[pos]; }

    void skip_inline_space() {
        while (!done() && (peek() == ' ' || peek() == '\t')) ++pos;
    }
};

json parse_toml_value(TomlCursor& cur);

std::string parse_toml_string(TomlCursor& cur) {
    ++cur.pos; // opening quote
    std::string out;
    while (!cur.done() && cur.peek() != '"') {
        char c = cur.text[cur.pos++];
        if (c == '\n') cur.fail_here("unterminated string");
        if (c == '\\') {
            if (cur.done()) cur.fail_here("unterminated escape");
            char e = cur.text[cur.pos++];
            switch (e) {
                case '"': out.push_back('"'); break;
                case '\\': out.push_back('\\'); break;
                case 'n': out.push_back('\n'); break;
                case 't': out.push_back('\t'); break;
                default: cur.fail_here("unsupported escape in string");
            }
        } else {
            out.push_back(c);
        }
    }
    if (cur.done()) cur.fail_here("unterminated string");
    ++cur.pos; // closing quote
    return out;
}

std::string parse_toml_key(TomlCursor& cur) {
    std::size_t start = cur.pos;
    while (!cur.done()) {
        char c = cur.peek();
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-') ++cur.pos;
        else break;
    }
    if (cur.pos == start) cur.fail_here("expected a key");
    return std::string(cur.text.substr(start, cur.pos - start));
}

json parse_toml_number(TomlCursor& cur) {
    std::size_t start = cur.pos;
    while (!cur.done()) {
        char c = cur.peek();
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '+' || c == '-' ||
            c == '.' || c == 'e' || c == 'E' || c == '_')
            ++cur.pos;
        else
            break;
    }
    std::string token(cur.text.substr(start, cur.pos - start));
    std::erase(token, '_');
    if (token.empty()) cur.fail_here("expected a value");
    const char* first = token.data();
    const char* last = first + token.size();
    std::int64_t as_int = 0;
    auto [ip, iec] = std::from_chars(first, last, as_int);
    if (iec == std::errc() && ip == last) return json(as_int);
    double as_double = 0.0;
    auto [dp, dec] = std::from_chars(first, last, as_double);
    if (dec == std::errc() && dp == last) return json(as_double);
    cur.fail_here("malformed number '" + token + "'");
}

json parse_toml_array(TomlCursor& cur) {
    ++cur.pos; // '['
    json out = json::array();
    for (;;) {
        cur.skip_inline_space();
        if (cur.done()) cur.fail_here("unterminated array");
        if (cur.peek() == ']') {
            ++cur.pos;
            return out;
        }
        out.push_back(parse_toml_value(cur));
        cur.skip_inline_space();
        if (cur.done()) cur.fail_here("unterminated array");
        if (cur.peek() == ',') {
            ++cur.pos;
            continue;
        }
        if (cur.peek() == ']') {
            ++cur.pos;
            return out;
        }
        cur.fail_here("expected ',' or ']' in array");
    }
}

json parse_toml_inline_table(TomlCursor& cur) {
    ++cur.pos; // '{'
    json out = json::object();
    cur.skip_inline_space();
    if (!cur.done() && cur.peek() == '}') {
        ++cur.pos;
        return out;
    }
    for (;;) {
        cur.skip_inline_space();
        std::string key = parse_toml_key(cur);
        cur.skip_inline_space();
        if (cur.done() || cur.peek() != '=') cur.fail_here("expected '=' in inline table");
        ++cur.pos;
        cur.skip_inline_space();
        out[key] = parse_toml_value(cur);
        cur.skip_inline_space();
        if (cur.done()) cur.fail_here("unterminated inline table");
        if (cur.peek() == ',') {
            ++cur.pos;
            continue;
        }
        if (cur.peek() == '}') {
            ++cur.pos;
            return out;
        }
        cur.fail_here("expected ',' or '}' in inline table");
    }
}

json parse_toml_value(TomlCursor& cur) {
    cur.skip_inline_space();
    if (cur.done()) cur.fail_here("expected a value");
    char c = cur.peek();
    if (c == '"') return json(parse_toml_string(cur));
    if (c == '[') return parse_toml_array(cur);
    if (c == '{') return parse_toml_inline_table(cur);
    if (cur.text.substr(cur.pos, 4) == "true") {
        cur.pos += 4;
        return json(true);
    }
    if (cur.text.substr(cur.pos, 5) == "false") {
        cur.pos += 5;
        return json(false);
    }
    return parse_toml_number(cur);
}

json* descend_dotted(json& root, const std::string& dotted, TomlCursor& cur) {
    json* node = &root;
    std::size_t start = 0;
    for (;;) {
        std::size_t dot = dotted.find('.', start);
        std::string part = dotted.substr(start, dot == std::string::npos
                                                    ? std::string::npos
                                                    : dot - start);
        if (part.empty()) cur.fail_here("empty name in section header");
        json& child = (*node)[part];
        if (child.is_null()) child = json::object();
        if (!child.is_object()) cur.fail_here("section '" + dotted + "' clashes with a value");
        node = &child;
        if (dot == std::string::npos) return node;
        start = dot + 1;
    }
}

json parse_toml(std::string_view text) {
    json root = json::object();
    json* table = &root;
    TomlCursor cur{text};
    while (!cur.done()) {
        cur.skip_inline_space();
        if (cur.done()) break;
        char c = cur.peek();
        if (c == '\n') {
            ++cur.pos;
            ++cur.line;
            continue;
        }
        if (c == '\r') {
            ++cur.pos;
            continue;
        }
        if (c == '#') {
            while (!cur.done() && cur.peek() != '\n') ++cur.pos;
            continue;
        }
        if (c == '[') {
            ++cur.pos;
            cur.skip_inline_space();
            std::string name = parse_toml_key(cur);
            while (!cur.done() && cur.peek() == '.') {
                ++cur.pos;
                name += '.' + parse_toml_key(cur);
            }
            cur.skip_inline_space();
            if (cur.done() || cur.peek() != ']') cur.fail_here("unterminated section header");
            ++cur.pos;
            table = descend_dotted(root, name, cur);
        } else {
            std::string key = parse_toml_key(cur);
            cur.skip_inline_space();
            if (cur.done() || cur.peek() != '=') cur.fail_here("expected '=' after key");
            ++cur.pos;
            json value = parse_toml_value(cur);
            if (table->contains(key)) cur.fail_here("duplicate key '" + key + "'");
            (*table)[key] = std::move(value);
        }
        cur.skip_inline_space();
        if (!cur.done() && cur.peek() == '\r') ++cur.pos;
        if (!cur.done() && cur.peek() == '#') {
            while (!cur.done() && cur.peek() != '\n') ++cur.pos;
        }
        if (!cur.done()) {
            if (cur.peek() != '\n') cur.fail_here("trailing characters after value");
            ++cur.pos;
            ++cur.line;
        }
    }
    return root;
}

} // namespace

json parse_config_text(const std::string& text) {
    std::size_t first = text.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) config_fail("empty config");
    char c = text[first];
    if (c == '{' || c == '[') {
        try {
            return json::parse(text);
        } catch (const json::parse_error& e) {
            if (c == '{') config_fail(std::string("malformed JSON config: ") + e.what());
            // A leading '[' can also open a TOML section header.
        }
    }
    return parse_toml(text);
}

json load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), ErrorCode::IoError, "cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    require(!in.bad(), ErrorCode::IoError, "cannot read config file '" + path + "'");
    return parse_config_text(buf.str());
}

ExperimentConfig experiment_config_from_json(const json& j) {
    check_keys(j,
               {"test", "spec", "budget", "alpha", "predictor", "permutations",
                "p_value_mode", "partition", "trials", "seed", "threads"},
               "experiment config");
    ExperimentConfig cfg;
    if (j.contains("test")) cfg.test = test_kind_from_name(get_string(j, "test"));
    if (j.contains("spec")) cfg.spec = synthetic_spec_from_json(j.at("spec"));
    if (j.contains("budget")) {
        const json& b = j.at("budget");
        check_keys(b, {"n_init", "n_total", "includes_init"}, "budget");
        cfg.budget.n_init = get_size(b, "n_init", cfg.budget.n_init);
        cfg.budget.n_total = get_size(b, "n_total", cfg.budget.n_total);
        cfg.budget_includes_init = get_bool(b, "includes_init", cfg.budget_includes_init);
    }
    cfg.level.alpha = get_double(j, "alpha", cfg.level.alpha);
    if (j.contains("predictor")) cfg.predictor = predictor_from_json(j.at("predictor"));
    cfg.permutations = get_size(j, "permutations", cfg.permutations);
    if (j.contains("p_value_mode")) {
        std::string mode = get_string(j, "p_value_mode");
        if (mode == "permutation") cfg.p_value_mode = PValueMode::Permutation;
        else if (mode == "normal") cfg.p_value_mode = PValueMode::NormalApprox;
        else config_fail("p_value_mode must be 'permutation' or 'normal'");
    }
    if (j.contains("partition")) cfg.partition = partition_from_json(j.at("partition"));
    cfg.trials = get_size(j, "trials", cfg.trials);
    cfg.seed = get_u64(j, "seed", cfg.seed);
    cfg.threads = get_size(j, "threads", cfg.threads);
    return cfg;
}

json experiment_config_to_json(const ExperimentConfig& cfg) {
    json out;
    out["test"] = test_kind_name(cfg.test);
    out["spec"] = {{"kind", synthetic_kind_name(cfg.spec.kind)},
                   {"d", cfg.spec.d},
                   {"n", cfg.spec.n},
                   {"prior1", cfg.spec.prior1},
                   {"mu0", cfg.spec.mu0},
                   {"mu1", cfg.spec.mu1},
                   {"sigma", cfg.spec.sigma},
                   {"components", cfg.spec.components}};
    out["budget"] = {{"n_init", cfg.budget.n_init},
                     {"n_total", cfg.budget.n_total},
                     {"includes_init", cfg.budget_includes_init}};
    out["alpha"] = cfg.level.alpha;
    out["predictor"] = predictor_to_json(cfg.predictor);
    out["permutations"] = cfg.permutations;
    out["p_value_mode"] =
        cfg.p_value_mode == PValueMode::Permutation ? "permutation" : "normal";
    if (!cfg.partition.cells.empty()) out["partition"] = partition_to_json(cfg.partition);
    out["trials"] = cfg.trials;
    out["seed"] = cfg.seed;
    out["threads"] = cfg.threads;
    return out;
}

SyntheticSpec synthetic_spec_from_json(const json& j) {
    check_keys(j, {"kind", "d", "n", "prior1", "mu0", "mu1", "sigma", "components"},
               "spec");
    SyntheticSpec spec;
    if (j.contains("kind")) spec.kind = synthetic_kind_from_name(get_string(j, "kind"));
    spec.d = get_size(j, "d", spec.d);
    spec.n = get_size(j, "n", spec.n);
    spec.prior1 = get_double(j, "prior1", spec.prior1);
    spec.mu0 = get_double(j, "mu0", spec.mu0);
    spec.mu1 = get_double(j, "mu1", spec.mu1);
    spec.sigma = get_double(j, "sigma", spec.sigma);
    spec.components = get_size(j, "components", spec.components);
    return spec;
}

std::vector<ExperimentConfig> sweep_configs_from_json(const json& j) {
    json base = json::object();
    json list = json::array();
    if (j.is_array()) {
        list = j;
    } else if (j.is_object()) {
        check_keys(j, {"base", "experiments"}, "sweep config");
        if (j.contains("base")) {
            base = j.at("base");
            if (!base.is_object()) config_fail("sweep base must be an object");
        }
        if (!j.contains("experiments") || !j.at("experiments").is_array())
            config_fail("sweep config needs an 'experiments' array");
        list = j.at("experiments");
    } else {
        config_fail("sweep config must be an array or an object");
    }
    if (list.empty()) config_fail("sweep config lists no experiments");
    std::vector<ExperimentConfig> configs;
    configs.reserve(list.size());
    for (const json& entry : list) {
        if (!entry.is_object()) config_fail("each experiment must be an object");
        json merged = base;
        merged.merge_patch(entry);
        configs.push_back(experiment_config_from_json(merged));
    }
    return configs;
}

std::string config_hash(const json& canonical_config) {
    std::string dump = canonical_config.dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : dump) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    std::ostringstream out;
    out << std::hex;
    for (int shift = 60; shift >= 0; shift -= 4) out << ((h >> shift) & 0xF);
    return out.str();
}

std::string report_json(const ExperimentReport& report) {
    json out;
    out["config"] = experiment_config_to_json(report.config);
    out["config_hash"] = report.config_hash;
    out["trials"] = report.config.trials;
    out["errors"] = report.errors;
    out["rejections"] = report.rejections;
    out["rejection_rate"] = report.rejection_rate;
    out["wilson_ci95"] = json::array({report.wilson_lo, report.wilson_hi});
    out["mean_labels_used"] = report.mean_labels_used;
    json rows = json::array();
    for (const TrialRow& row : report.rows) {
        json r;
        r["trial"] = row.trial;
        r["decision"] = row.decision;
        r["labels_used"] = row.labels_used;
        r["stop_step"] = row.stop_step.has_value() ? json(*row.stop_step) : json();
        r["p_or_u_final"] =
            row.p_or_u_final.has_value() ? json(*row.p_or_u_final) : json();
        r["log_stat_final"] =
            row.log_stat_final.has_value() ? json(*row.log_stat_final) : json();
        r["error"] = row.error.empty() ? json() : json(row.error);
        rows.push_back(std::move(r));
    }
    out["per_trial"] = std::move(rows);
    return out.dump(2) + "\n";
}

} // namespace lets
