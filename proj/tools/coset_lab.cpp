#include "cosetlab/commands.hpp"

#include "CLI11.hpp"

#include <functional>
#include <iostream>

using namespace cosetlab;
using namespace cosetlab::commands;

namespace {

enum Exit { ok = 0, failure = 1, config = 2, divergence = 3, corrupt = 4, capacity = 5 };

// Flags override keys of the same name (dashes read as underscores) in the
// --config file, which in turn overrides the defaults.
template <class Run>
Run resolve(CLI::App* sub, const std::string& config_path, const Run& parsed, Run (*from_json)(const json&)) {
    json base = config_path.empty() ? json::parse(to_json(Run{}).dump()) : read_json_file(config_path);
    const json flags = json::parse(to_json(parsed).dump());
    for (const CLI::Option* opt : sub->get_options()) {
        if (opt->count() == 0) continue;
        auto names = opt->get_lnames();
        if (names.empty()) names.push_back(opt->get_name());
        for (auto key : names) {
            std::replace(key.begin(), key.end(), '-', '_');
            if (flags.contains(key)) base[key] = flags[key];
        }
    }
    return from_json(base);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"coset-lab: coset circuits in networks trained on symmetric-group composition"};
    app.require_subcommand(1);
    std::string config_path;
    std::function<int()> action;

    // train
    TrainRun tr;
    auto* train_cmd = app.add_subcommand("train", "train the one-hidden-layer model");
    train_cmd->add_option("--config", config_path, "JSON run record");
    train_cmd->add_option("--out,--output-dir", tr.output_dir, "output directory");
    train_cmd->add_option("--n", tr.train.n, "degree of S_n");
    train_cmd->add_option("--d", tr.train.d, "embedding width");
    train_cmd->add_option("--w", tr.train.w, "hidden width");
    train_cmd->add_option("--seed", tr.train.seed);
    train_cmd->add_option("--epochs", tr.train.epochs);
    train_cmd->add_option("--learning-rate", tr.train.learning_rate);
    train_cmd->add_option("--beta1", tr.train.beta1);
    train_cmd->add_option("--beta2", tr.train.beta2);
    train_cmd->add_option("--epsilon", tr.train.epsilon);
    train_cmd->add_option("--weight-decay", tr.train.weight_decay);
    train_cmd->add_option("--train-fraction", tr.train.train_fraction);
    train_cmd->add_option("--log-every", tr.train.log_every);
    train_cmd->add_option("--log-entropy", tr.train.log_entropy);
    train_cmd->add_option("--stop-after-perfect", tr.train.stop_after_perfect);
    train_cmd->callback([&] {
        action = [&] {
            const auto run = resolve(train_cmd, config_path, tr, train_run_from_json);
            const auto result = run_train(run, &std::cerr);
            const auto& last = result.history.records.back();
            std::cout << "epochs " << result.epochs_run << "  train_acc " << format_double(last.train_acc)
                      << "  test_acc " << format_double(last.test_acc) << '\n';
            return 0;
        };
    });

    // oracle
    OracleRun orc;
    auto* oracle_cmd = app.add_subcommand("oracle", "write a handcrafted coset-circuit checkpoint");
    oracle_cmd->add_option("--config", config_path, "JSON run record");
    oracle_cmd->add_option("n", orc.n, "degree of S_n");
    oracle_cmd->add_option("--out,--output-dir", orc.output_dir, "output directory");
    oracle_cmd->add_option("--redundancy", orc.redundancy);
    oracle_cmd->add_option("--include-sign", orc.include_sign);
    oracle_cmd->add_option("--sign-magnitude", orc.sign_magnitude);
    oracle_cmd->callback([&] {
        action = [&] {
            const auto run = resolve(oracle_cmd, config_path, orc, oracle_run_from_json);
            const auto net = run_oracle(run);
            const auto r = evaluate(net.params, all_pairs(run.n));
            std::cout << net.circuits.size() << " circuits, " << net.params.w << " neurons, accuracy "
                      << format_double(r.accuracy) << '\n';
            return 0;
        };
    });

    // analyze
    AnalyzeRun an;
    auto* analyze_cmd = app.add_subcommand("analyze", "classify neurons of a checkpoint");
    analyze_cmd->add_option("--config", config_path, "JSON run record");
    analyze_cmd->add_option("--checkpoint", an.checkpoint, "checkpoint or run directory");
    analyze_cmd->add_option("--out,--output-dir", an.output_dir, "output directory");
    analyze_cmd->add_option("--catalog", an.catalog, "'auto' or sN");
    analyze_cmd->add_option("--classify-threshold", an.classify_threshold, "coset score needed for a label");
    analyze_cmd->callback([&] {
        action = [&] {
            const auto run = resolve(analyze_cmd, config_path, an, analyze_run_from_json);
            const auto profiles = run_analyze(run);
            for (const auto& [label, frac] : circuit_distribution(profiles))
                std::cout << label << ' ' << format_double(frac) << '\n';
            return 0;
        };
    });

    // ablate
    AblateRun ab;
    auto* ablate_cmd = app.add_subcommand("ablate", "zero neurons by spectral or coset metric");
    ablate_cmd->add_option("--config", config_path, "JSON run record");
    ablate_cmd->add_option("--checkpoint", ab.checkpoint, "checkpoint or run directory");
    ablate_cmd->add_option("--out,--output-dir", ab.output_dir, "output directory");
    ablate_cmd->add_option("--catalog", ab.catalog, "'auto' or sN");
    ablate_cmd->add_option("--classify-threshold", ab.classify_threshold);
    ablate_cmd->add_option("--metric", ab.metric, "top_irrep_share | coset_concentration");
    ablate_cmd->add_option("--mode", ab.mode, "keep_above | remove_above");
    ablate_cmd->add_option("--threshold", ab.threshold, "value or sweep a..b[:step]");
    ablate_cmd->callback([&] {
        action = [&] {
            const auto run = resolve(ablate_cmd, config_path, ab, ablate_run_from_json);
            for (const auto& row : run_ablate(run))
                std::cout << "threshold " << format_double(row.threshold) << "  kept " << row.kept << "  accuracy "
                          << format_double(row.eval.accuracy) << '\n';
            return 0;
        };
    });

    // intervene
    InterveneRun iv;
    auto* intervene_cmd = app.add_subcommand("intervene", "evaluate under forward-pass interventions");
    intervene_cmd->add_option("--config", config_path, "JSON run record");
    intervene_cmd->add_option("--checkpoint", iv.checkpoint, "checkpoint or run directory");
    intervene_cmd->add_option("--out,--output-dir", iv.output_dir, "output directory");
    intervene_cmd->add_option("--kind", iv.kind, "abs, embedding_swap, sign_flip_left, perturb(-1,1), ... or all");
    intervene_cmd->add_option("--seed", iv.seed);
    intervene_cmd->callback([&] {
        action = [&] {
            const auto run = resolve(intervene_cmd, config_path, iv, intervene_run_from_json);
            for (const auto& row : run_intervene(run))
                std::cout << row.spec << "  accuracy " << format_double(row.eval.accuracy) << "  loss "
                          << format_double(row.eval.loss) << '\n';
            return 0;
        };
    });

    // catalog
    CatalogRun ca;
    auto* catalog_cmd = app.add_subcommand("catalog", "list every subgroup of S_n");
    catalog_cmd->add_option("--config", config_path, "JSON run record");
    catalog_cmd->add_option("n", ca.n, "degree of S_n");
    catalog_cmd->add_option("--out,--output-dir", ca.output_dir, "output directory (stdout when omitted)");
    catalog_cmd->add_flag("--allow-large", ca.allow_large, "permit n = 6");
    catalog_cmd->callback([&] {
        action = [&] {
            const auto run = resolve(catalog_cmd, config_path, ca, catalog_run_from_json);
            const auto count = run_catalog(run, std::cout);
            if (!run.output_dir.empty()) std::cout << count << " subgroups\n";
            return 0;
        };
    });

    // spectrum
    SpectrumRun sp;
    auto* spectrum_cmd = app.add_subcommand("spectrum", "irrep contributions of centered subgroup indicators");
    spectrum_cmd->add_option("--config", config_path, "JSON run record");
    spectrum_cmd->add_option("n", sp.n, "degree of S_n");
    spectrum_cmd->add_option("--indicator", sp.indicator, "isomorphism label, e.g. F20");
    spectrum_cmd->add_option("--generators", sp.generators, "cycle strings, e.g. \"(1 2 3 4 5)\"");
    spectrum_cmd->add_option("--out,--output-dir", sp.output_dir, "output directory (stdout when omitted)");
    spectrum_cmd->callback([&] {
        action = [&] {
            const auto run = resolve(spectrum_cmd, config_path, sp, spectrum_run_from_json);
            const auto count = run_spectrum(run, std::cout);
            if (!run.output_dir.empty()) std::cout << count << " rows\n";
            return 0;
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : config;
    }

    try {
        return action();
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return config;
    } catch (const DivergenceError& e) {
        std::cerr << "divergence: " << e.what() << '\n';
        return divergence;
    } catch (const CorruptArtifactError& e) {
        std::cerr << "corrupt artifact: " << e.what() << '\n';
        return corrupt;
    } catch (const CapacityError& e) {
        std::cerr << "capacity: " << e.what() << '\n';
        return capacity;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return failure;
    }
}
