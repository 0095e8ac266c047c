#pragma once

// Run records for the coset-lab commands and the code that executes them.
// Every run writes its resolved record to <output_dir>/config.json; feeding
// that file back through --config reproduces the outputs byte for byte.

#include "cosetlab/checkpoint.hpp"
#include "cosetlab/circuits.hpp"
#include "cosetlab/fourier.hpp"
#include "cosetlab/model.hpp"
#include "cosetlab/subgroup.hpp"

#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace cosetlab::commands {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;
namespace fs = std::filesystem;

/// Reads keys out of a JSON object and rejects anything left over.
class ConfigReader {
public:
    ConfigReader(const json& j, std::string context) : j_(j), context_(std::move(context)) {
        if (!j_.is_object()) throw ConfigError(context_ + ": config must be a JSON object");
    }

    template <class T>
    void get(const char* key, T& out) {
        seen_.insert(key);
        if (!j_.contains(key)) return;
        try {
            out = j_.at(key).get<T>();
        } catch (const json::exception&) {
            throw ConfigError(context_ + ": bad value for '" + key + "'");
        }
    }

    void finish() const {
        for (const auto& [k, v] : j_.items())
            if (!seen_.count(k)) throw ConfigError(context_ + ": unknown key '" + k + "'");
    }

private:
    const json& j_;
    std::string context_;
    std::set<std::string> seen_;
};

inline json read_json_file(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot read config " + file.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("malformed config " + file.string() + ": " + e.what());
    }
}

inline void write_text(const fs::path& file, const std::string& text) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw Error("cannot write " + file.string());
    out << text;
    if (!out) throw Error("short write to " + file.string());
}

inline fs::path require_output_dir(const std::string& dir, const char* command) {
    if (dir.empty()) throw ConfigError(std::string(command) + ": output_dir is required");
    fs::create_directories(dir);
    return dir;
}

inline void write_config(const fs::path& dir, const ordered_json& record) {
    write_text(dir / "config.json", record.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// train

struct TrainRun {
    TrainConfig train;
    std::string output_dir{};
};

inline ordered_json to_json(const TrainRun& r) {
    const auto& c = r.train;
    return ordered_json{{"command", "train"},
                        {"n", c.n},
                        {"d", c.d},
                        {"w", c.w},
                        {"seed", c.seed},
                        {"epochs", c.epochs},
                        {"learning_rate", c.learning_rate},
                        {"beta1", c.beta1},
                        {"beta2", c.beta2},
                        {"epsilon", c.epsilon},
                        {"weight_decay", c.weight_decay},
                        {"train_fraction", c.train_fraction},
                        {"log_every", c.log_every},
                        {"log_entropy", c.log_entropy},
                        {"stop_after_perfect", c.stop_after_perfect},
                        {"output_dir", r.output_dir}};
}

inline void check_command(const json& j, const char* command) {
    if (j.contains("command") && j.at("command") != command)
        throw ConfigError(std::string("config is for command '") + j.at("command").dump() + "', not '" + command + "'");
}

inline TrainRun train_run_from_json(const json& j) {
    check_command(j, "train");
    TrainRun r;
    auto& c = r.train;
    ConfigReader in(j, "train");
    std::string command;
    in.get("command", command);
    in.get("n", c.n);
    in.get("d", c.d);
    in.get("w", c.w);
    in.get("seed", c.seed);
    in.get("epochs", c.epochs);
    in.get("learning_rate", c.learning_rate);
    in.get("beta1", c.beta1);
    in.get("beta2", c.beta2);
    in.get("epsilon", c.epsilon);
    in.get("weight_decay", c.weight_decay);
    in.get("train_fraction", c.train_fraction);
    in.get("log_every", c.log_every);
    in.get("log_entropy", c.log_entropy);
    in.get("stop_after_perfect", c.stop_after_perfect);
    in.get("output_dir", r.output_dir);
    in.finish();
    return r;
}

/// <out>/config.json, <out>/checkpoint/, <out>/history.csv.
inline TrainResult run_train(const TrainRun& run, std::ostream* log = nullptr) {
    run.train.validate();
    const auto dir = require_output_dir(run.output_dir, "train");
    const auto record = to_json(run);
    write_config(dir, record);
    auto result = train(run.train, [log](const HistoryRecord& h) {
        if (!log) return;
        *log << "epoch " << h.epoch << "  train " << format_double(h.train_loss) << " / "
             << format_double(h.train_acc) << "  test " << format_double(h.test_loss) << " / "
             << format_double(h.test_acc) << '\n';
    });
    save_checkpoint(dir / "checkpoint", result.params, json::parse(record.dump()));
    write_history_csv(dir / "history.csv", result.history);
    return result;
}

// ---------------------------------------------------------------------------
// oracle

struct OracleRun {
    int n = 5;
    int redundancy = 1;
    bool include_sign = true;
    double sign_magnitude = 1.0;
    std::string output_dir{};
};

inline ordered_json to_json(const OracleRun& r) {
    return ordered_json{{"command", "oracle"},         {"n", r.n},
                        {"redundancy", r.redundancy},  {"include_sign", r.include_sign},
                        {"sign_magnitude", r.sign_magnitude}, {"output_dir", r.output_dir}};
}

inline OracleRun oracle_run_from_json(const json& j) {
    check_command(j, "oracle");
    OracleRun r;
    ConfigReader in(j, "oracle");
    std::string command;
    in.get("command", command);
    in.get("n", r.n);
    in.get("redundancy", r.redundancy);
    in.get("include_sign", r.include_sign);
    in.get("sign_magnitude", r.sign_magnitude);
    in.get("output_dir", r.output_dir);
    in.finish();
    return r;
}

/// Handcrafted stabilizer-family network: <out>/checkpoint/ and
/// <out>/circuits.csv.
inline CosetNetwork run_oracle(const OracleRun& run) {
    if (run.n < 3 || run.n > kMaxModelDegree) throw CapacityError("oracle: n must be in 3.." + std::to_string(kMaxModelDegree));
    const auto dir = require_output_dir(run.output_dir, "oracle");
    const auto record = to_json(run);
    auto net = build_coset_network(run.n, stabilizer_family(run.n),
                                   {.redundancy = run.redundancy,
                                    .include_sign = run.include_sign,
                                    .sign_magnitude = run.sign_magnitude});
    write_config(dir, record);
    save_checkpoint(dir / "checkpoint", net.params, json::parse(record.dump()));
    std::ostringstream csv;
    csv << "circuit,kind,left_subgroup,right_subgroup,neurons,target_size\n";
    for (std::size_t k = 0; k < net.circuits.size(); ++k) {
        const auto& c = net.circuits[k];
        std::string neurons;
        for (const auto& nn : c.neurons) neurons += (neurons.empty() ? "" : " ") + std::to_string(nn.index);
        std::size_t target = 0;
        for (char t : c.target) target += t != 0;
        csv << k << ',' << to_string(c.kind) << ',' << csv_field(c.left_subgroup.generator_string()) << ','
            << csv_field(c.right_subgroup.generator_string()) << ',' << neurons << ',' << target << '\n';
    }
    write_text(dir / "circuits.csv", csv.str());
    return net;
}

// ---------------------------------------------------------------------------
// shared by analyze / ablate / intervene

/// Accepts a checkpoint directory or a run directory holding checkpoint/.
inline Checkpoint load_run_checkpoint(const std::string& path) {
    if (path.empty()) throw ConfigError("checkpoint path is required");
    const fs::path p(path);
    if (!fs::exists(p / "manifest.json") && fs::exists(p / "checkpoint" / "manifest.json"))
        return load_checkpoint(p / "checkpoint");
    return load_checkpoint(p);
}

/// "auto" or "sN" (N must match the model degree).
inline SubgroupCatalog resolve_catalog(const std::string& spec, int n) {
    int m = n;
    if (spec != "auto") {
        if (spec.size() < 2 || (spec[0] != 's' && spec[0] != 'S'))
            throw ConfigError("catalog must be 'auto' or 'sN', got '" + spec + "'");
        try {
            m = std::stoi(spec.substr(1));
        } catch (const std::exception&) {
            throw ConfigError("catalog must be 'auto' or 'sN', got '" + spec + "'");
        }
        if (m != n) throw ConfigError("catalog " + spec + " does not match the model's S" + std::to_string(n));
    }
    return SubgroupCatalog::proper_nontrivial(m, /*allow_large=*/false);
}

// ---------------------------------------------------------------------------
// analyze

struct AnalyzeRun {
    std::string checkpoint{};
    std::string catalog = "auto";
    double classify_threshold = 0.1;
    std::string output_dir{};
};

inline ordered_json to_json(const AnalyzeRun& r) {
    return ordered_json{{"command", "analyze"},
                        {"checkpoint", r.checkpoint},
                        {"catalog", r.catalog},
                        {"classify_threshold", r.classify_threshold},
                        {"output_dir", r.output_dir}};
}

inline AnalyzeRun analyze_run_from_json(const json& j) {
    check_command(j, "analyze");
    AnalyzeRun r;
    ConfigReader in(j, "analyze");
    std::string command;
    in.get("command", command);
    in.get("checkpoint", r.checkpoint);
    in.get("catalog", r.catalog);
    in.get("classify_threshold", r.classify_threshold);
    in.get("output_dir", r.output_dir);
    in.finish();
    return r;
}

inline void check_threshold(double t, const char* what) {
    if (!(t >= 0.0 && t <= 1.0)) throw ConfigError(std::string(what) + " must lie in [0, 1]");
}

/// profiles.csv, spectrum.csv, circuits.csv, correlation.csv.
inline std::vector<NeuronProfile> run_analyze(const AnalyzeRun& run) {
    check_threshold(run.classify_threshold, "classify_threshold");
    const auto ck = load_run_checkpoint(run.checkpoint);
    const auto catalog = resolve_catalog(run.catalog, ck.params.n);
    const auto dir = require_output_dir(run.output_dir, "analyze");
    write_config(dir, to_json(run));
    const auto profiles = classify_neurons(ck.params, catalog, {.threshold = run.classify_threshold});
    write_profiles_csv(dir / "profiles.csv", profiles);
    write_distribution_csv(dir / "circuits.csv", profiles);
    write_correlation_csv(dir / "correlation.csv", unembed_correlation(ck.params, profiles), profiles);

    std::ostringstream csv;
    csv << "neuron";
    for (const auto& lambda : partitions(ck.params.n))
        if (lambda.rows() != 1) csv << ',' << csv_field(lambda.to_string());
    csv << ",entropy\n";
    for (const auto& p : profiles) {
        csv << p.neuron;
        if (p.dead) {
            for (const auto& lambda : partitions(ck.params.n))
                if (lambda.rows() != 1) csv << ',';
        } else {
            for (const auto& e : p.irrep_power) csv << ',' << format_double(e.share);
        }
        csv << ',' << format_double(p.fourier_entropy) << '\n';
    }
    write_text(dir / "spectrum.csv", csv.str());
    return profiles;
}

// ---------------------------------------------------------------------------
// ablate

inline AblationMetric parse_metric(const std::string& s) {
    if (s == "top_irrep_share") return AblationMetric::top_irrep_share;
    if (s == "coset_concentration") return AblationMetric::coset_concentration;
    throw ConfigError("unknown ablation metric '" + s + "'");
}

inline AblationMode parse_mode(const std::string& s) {
    if (s == "keep_above") return AblationMode::keep_above;
    if (s == "remove_above") return AblationMode::remove_above;
    throw ConfigError("unknown ablation mode '" + s + "'");
}

/// "0.9", or an inclusive sweep "0.1..0.9" / "0.1..0.9:0.2" (step 0.1 by default).
inline std::vector<double> parse_thresholds(const std::vector<std::string>& items) {
    std::vector<double> out;
    auto number = [](const std::string& s) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            throw ConfigError("bad threshold '" + s + "'");
        }
        if (used != s.size()) throw ConfigError("bad threshold '" + s + "'");
        return v;
    };
    for (const auto& item : items) {
        const auto dots = item.find("..");
        if (dots == std::string::npos) {
            out.push_back(number(item));
            continue;
        }
        const auto colon = item.find(':', dots);
        const double lo = number(item.substr(0, dots));
        const double hi = number(item.substr(dots + 2, colon == std::string::npos ? std::string::npos : colon - dots - 2));
        const double step = colon == std::string::npos ? 0.1 : number(item.substr(colon + 1));
        if (!(step > 0.0) || hi < lo) throw ConfigError("bad threshold sweep '" + item + "'");
        const auto count = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
        for (long k = 0; k <= count; ++k) out.push_back(std::round((lo + static_cast<double>(k) * step) * 1e12) / 1e12);
    }
    for (double t : out) check_threshold(t, "ablation threshold");
    if (out.empty()) throw ConfigError("ablate: no thresholds given");
    return out;
}

struct AblateRun {
    std::string checkpoint{};
    std::string catalog = "auto";
    double classify_threshold = 0.1;
    std::string metric = "top_irrep_share";
    std::string mode = "keep_above";
    std::vector<std::string> threshold{"0.9"};
    std::string output_dir{};
};

inline ordered_json to_json(const AblateRun& r) {
    return ordered_json{{"command", "ablate"},   {"checkpoint", r.checkpoint},
                        {"catalog", r.catalog},  {"classify_threshold", r.classify_threshold},
                        {"metric", r.metric},    {"mode", r.mode},
                        {"threshold", r.threshold}, {"output_dir", r.output_dir}};
}

inline AblateRun ablate_run_from_json(const json& j) {
    check_command(j, "ablate");
    AblateRun r;
    ConfigReader in(j, "ablate");
    std::string command;
    in.get("command", command);
    in.get("checkpoint", r.checkpoint);
    in.get("catalog", r.catalog);
    in.get("classify_threshold", r.classify_threshold);
    in.get("metric", r.metric);
    in.get("mode", r.mode);
    in.get("threshold", r.threshold);
    in.get("output_dir", r.output_dir);
    in.finish();
    return r;
}

struct AblationRow {
    double threshold;
    std::size_t kept;
    EvalResult eval;
};

/// ablation.csv: one row per threshold, evaluated on every pair.
inline std::vector<AblationRow> run_ablate(const AblateRun& run) {
    check_threshold(run.classify_threshold, "classify_threshold");
    const auto metric = parse_metric(run.metric);
    const auto mode = parse_mode(run.mode);
    const auto thresholds = parse_thresholds(run.threshold);
    const auto ck = load_run_checkpoint(run.checkpoint);
    const auto catalog = resolve_catalog(run.catalog, ck.params.n);
    const auto dir = require_output_dir(run.output_dir, "ablate");
    write_config(dir, to_json(run));
    const auto profiles = classify_neurons(ck.params, catalog, {.threshold = run.classify_threshold});
    const auto pairs = all_pairs(ck.params.n);
    std::vector<AblationRow> rows;
    std::ostringstream csv;
    csv << "metric,mode,threshold,kept,accuracy,loss\n";
    for (double t : thresholds) {
        const auto r = ablate(ck.params, {metric, t, mode}, profiles, pairs);
        rows.push_back({t, r.kept_count, r.eval});
        csv << run.metric << ',' << run.mode << ',' << format_double(t) << ',' << r.kept_count << ','
            << format_double(r.eval.accuracy) << ',' << format_double(r.eval.loss) << '\n';
    }
    write_text(dir / "ablation.csv", csv.str());
    return rows;
}

// ---------------------------------------------------------------------------
// intervene

/// "abs", "sign_flip_left", "perturb(-1,1)", "perturb_pre(1,0.5)",
/// "relu_clip_patch(0.001)"; bare perturb is N(0,1), bare relu_clip_patch
/// uses threshold 1e-3.
inline InterventionSpec parse_intervention(const std::string& text, std::uint64_t seed) {
    InterventionSpec spec;
    spec.seed = seed;
    std::string name = text;
    std::vector<double> args;
    if (const auto open = text.find('('); open != std::string::npos) {
        if (text.back() != ')') throw ConfigError("bad intervention '" + text + "'");
        name = text.substr(0, open);
        std::stringstream ss(text.substr(open + 1, text.size() - open - 2));
        std::string item;
        while (std::getline(ss, item, ',')) {
            try {
                std::size_t used = 0;
                args.push_back(std::stod(item, &used));
                if (item.find_first_not_of(' ', used) != std::string::npos) throw ConfigError("");
            } catch (const std::exception&) {
                throw ConfigError("bad intervention argument in '" + text + "'");
            }
        }
    }
    if (name == "perturb_pre") {
        spec.pre_activation = true;
        name = "perturb";
    }
    spec.kind = parse_intervention_kind(name);
    const std::size_t allowed = spec.kind == InterventionKind::perturb           ? 2
                                : spec.kind == InterventionKind::relu_clip_patch ? 1
                                                                                 : 0;
    if (args.size() > allowed || (spec.kind == InterventionKind::perturb && args.size() == 1))
        throw ConfigError("wrong number of arguments in '" + text + "'");
    if (spec.kind == InterventionKind::perturb && args.size() == 2) {
        spec.mean = args[0];
        spec.std = args[1];
    }
    if (spec.kind == InterventionKind::relu_clip_patch && args.size() == 1) spec.threshold = args[0];
    return spec;
}

/// The set behind `--kind all`.
inline std::vector<std::string> standard_interventions() {
    return {"none",           "embedding_swap", "sign_flip_left",   "sign_flip_right", "sign_flip_both",
            "abs",            "perturb(-1,1)",  "perturb(1,1)",     "relu_clip_patch(0.001)"};
}

struct InterveneRun {
    std::string checkpoint{};
    std::vector<std::string> kind{"all"};
    std::uint64_t seed = 0;
    std::string output_dir{};
};

inline ordered_json to_json(const InterveneRun& r) {
    return ordered_json{{"command", "intervene"},
                        {"checkpoint", r.checkpoint},
                        {"kind", r.kind},
                        {"seed", r.seed},
                        {"output_dir", r.output_dir}};
}

inline InterveneRun intervene_run_from_json(const json& j) {
    check_command(j, "intervene");
    InterveneRun r;
    ConfigReader in(j, "intervene");
    std::string command;
    in.get("command", command);
    in.get("checkpoint", r.checkpoint);
    in.get("kind", r.kind);
    in.get("seed", r.seed);
    in.get("output_dir", r.output_dir);
    in.finish();
    return r;
}

struct InterventionRow {
    std::string spec{};
    EvalResult eval;
};

/// interventions.csv: one row per spec, evaluated on every pair.
inline std::vector<InterventionRow> run_intervene(const InterveneRun& run) {
    std::vector<std::string> kinds;
    for (const auto& k : run.kind) {
        if (k == "all") {
            for (const auto& s : standard_interventions()) kinds.push_back(s);
        } else {
            kinds.push_back(k);
        }
    }
    if (kinds.empty()) throw ConfigError("intervene: no kinds given");
    std::vector<InterventionSpec> specs;
    for (const auto& k : kinds) specs.push_back(parse_intervention(k, run.seed));
    const auto ck = load_run_checkpoint(run.checkpoint);
    const auto dir = require_output_dir(run.output_dir, "intervene");
    write_config(dir, to_json(run));
    const auto pairs = all_pairs(ck.params.n);
    std::vector<InterventionRow> rows;
    std::ostringstream csv;
    csv << "spec,accuracy,loss,seed\n";
    for (std::size_t k = 0; k < specs.size(); ++k) {
        const auto r = intervene(ck.params, specs[k], pairs);
        rows.push_back({kinds[k], r});
        csv << csv_field(kinds[k]) << ',' << format_double(r.accuracy) << ',' << format_double(r.loss) << ','
            << run.seed << '\n';
    }
    write_text(dir / "interventions.csv", csv.str());
    return rows;
}

// ---------------------------------------------------------------------------
// catalog

struct CatalogRun {
    int n = 5;
    bool allow_large = false;
    std::string output_dir{}; // empty: CSV to stdout, no config written
};

inline ordered_json to_json(const CatalogRun& r) {
    return ordered_json{
        {"command", "catalog"}, {"n", r.n}, {"allow_large", r.allow_large}, {"output_dir", r.output_dir}};
}

inline CatalogRun catalog_run_from_json(const json& j) {
    check_command(j, "catalog");
    CatalogRun r;
    ConfigReader in(j, "catalog");
    std::string command;
    in.get("command", command);
    in.get("n", r.n);
    in.get("allow_large", r.allow_large);
    in.get("output_dir", r.output_dir);
    in.finish();
    return r;
}

inline std::string catalog_csv(const std::vector<Subgroup>& subgroups) {
    std::ostringstream csv;
    csv << "id,order,generators,iso_label,is_normal\n";
    for (std::size_t k = 0; k < subgroups.size(); ++k) {
        const auto& H = subgroups[k];
        csv << k << ',' << H.order() << ',' << csv_field(H.generator_string()) << ',' << csv_field(H.label) << ','
            << (is_normal(H) ? "true" : "false") << '\n';
    }
    return csv.str();
}

inline std::size_t run_catalog(const CatalogRun& run, std::ostream& out) {
    const auto subgroups = all_subgroups(run.n, run.allow_large);
    const auto text = catalog_csv(subgroups);
    if (run.output_dir.empty()) {
        out << text;
    } else {
        const auto dir = require_output_dir(run.output_dir, "catalog");
        write_config(dir, to_json(run));
        write_text(dir / "catalog.csv", text);
    }
    return subgroups.size();
}

// ---------------------------------------------------------------------------
// spectrum

struct SpectrumRun {
    int n = 5;
    std::string indicator{};               // iso label, first match in census order
    std::vector<std::string> generators{}; // cycle strings; overrides indicator
    std::string output_dir{};              // empty: CSV to stdout
};

inline ordered_json to_json(const SpectrumRun& r) {
    return ordered_json{{"command", "spectrum"},
                        {"n", r.n},
                        {"indicator", r.indicator},
                        {"generators", r.generators},
                        {"output_dir", r.output_dir}};
}

inline SpectrumRun spectrum_run_from_json(const json& j) {
    check_command(j, "spectrum");
    SpectrumRun r;
    ConfigReader in(j, "spectrum");
    std::string command;
    in.get("command", command);
    in.get("n", r.n);
    in.get("indicator", r.indicator);
    in.get("generators", r.generators);
    in.get("output_dir", r.output_dir);
    in.finish();
    return r;
}

/// Irrep contributions of centered subgroup indicators: one row per census
/// subgroup other than S_n, or a single row for --indicator / --generators.
inline std::size_t run_spectrum(const SpectrumRun& run, std::ostream& out) {
    if (run.n < 2 || run.n > kCensusDefaultMaxDegree)
        throw CapacityError("spectrum: n must be in 2.." + std::to_string(kCensusDefaultMaxDegree));
    std::vector<std::pair<std::size_t, Subgroup>> rows;
    if (!run.generators.empty()) {
        std::vector<Permutation> gens;
        for (const auto& g : run.generators) gens.push_back(parse_cycles(run.n, g));
        rows.emplace_back(0, generate(run.n, gens));
    } else {
        const auto all = all_subgroups(run.n);
        for (std::size_t k = 0; k < all.size(); ++k) {
            if (all[k].order() == factorial(run.n)) continue;
            if (!run.indicator.empty() && all[k].label != run.indicator) continue;
            rows.emplace_back(k, all[k]);
            if (!run.indicator.empty()) break;
        }
        if (rows.empty()) throw ConfigError("spectrum: no subgroup labeled '" + run.indicator + "'");
    }
    if (rows.front().second.order() == factorial(run.n))
        throw ConfigError("spectrum: the whole group has a zero centered indicator");
    std::ostringstream csv;
    csv << "id,label,order,generators";
    for (const auto& lambda : partitions(run.n))
        if (lambda.rows() != 1) csv << ',' << csv_field(lambda.to_string());
    csv << '\n';
    for (const auto& [id, H] : rows) {
        csv << id << ',' << csv_field(H.label) << ',' << H.order() << ',' << csv_field(H.generator_string());
        for (const auto& e : irrep_contribution(centered_indicator(H))) csv << ',' << format_double(e.share);
        csv << '\n';
    }
    if (run.output_dir.empty()) {
        out << csv.str();
    } else {
        const auto dir = require_output_dir(run.output_dir, "spectrum");
        write_config(dir, to_json(run));
        write_text(dir / "spectrum.csv", csv.str());
    }
    return rows.size();
}

} // namespace cosetlab::commands
