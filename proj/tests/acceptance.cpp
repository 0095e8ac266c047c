// Acceptance suite: one PASS/FAIL line per criterion.
//   acceptance [--only ID] [--cli PATH] [--work DIR]
// Exit 0 when every selected criterion passes, 1 on a failure, 77 when the
// only failures are the subgroup-spectra rows listed in kKnownBadRows.

#include "cosetlab/circuits.hpp"
#include "cosetlab/fourier.hpp"
#include "cosetlab/model.hpp"
#include "cosetlab/representation.hpp"
#include "cosetlab/rng.hpp"
#include "cosetlab/subgroup.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

using namespace cosetlab;
namespace fs = std::filesystem;

namespace {

enum class Verdict { pass, fail, known_fail };

struct Context {
    std::string cli;
    fs::path work;
};

struct Criterion {
    std::string id;
    std::string title;
    Verdict (*run)(const Context&, std::ostream& detail);
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double max_abs(const Matrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

// ---------------------------------------------------------------------------

Verdict representation_suite(const Context&, std::ostream& out) {
    const auto t0 = std::chrono::steady_clock::now();
    double hom = 0.0, orth = 0.0, chars = 0.0;
    bool sums = true;
    Rng rng(2024);
    for (int n = 3; n <= 6; ++n) {
        const auto& G = symmetric_group(n);
        const auto& table = representation_table(n);
        const auto& irs = irreps(n);
        std::uint64_t dsq = 0;
        for (const auto& ir : irs) dsq += ir.dim() * ir.dim();
        sums = sums && dsq == factorial(n);

        const std::size_t samples = n <= 5 ? G.order() * G.order() : 20000;
        for (std::size_t l = 0; l < irs.size(); ++l) {
            for (std::size_t s = 0; s < samples; ++s) {
                const Rank a = n <= 5 ? s / G.order() : rng.below(G.order());
                const Rank b = n <= 5 ? s % G.order() : rng.below(G.order());
                hom = std::max(hom, max_abs(table.at(l, a) * table.at(l, b) - table.at(l, G.multiply(a, b))));
            }
            for (Rank g = 0; g < G.order(); ++g) {
                const Matrix& m = table.at(l, g);
                orth = std::max(orth, max_abs(m.transpose() * m - Matrix::Identity(m.rows(), m.cols())));
            }
        }
        // <chi_a, chi_b> = delta_ab, characters from traces
        std::vector<std::vector<double>> chi(irs.size(), std::vector<double>(G.order()));
        for (std::size_t l = 0; l < irs.size(); ++l)
            for (Rank g = 0; g < G.order(); ++g) chi[l][g] = table.at(l, g).trace();
        for (std::size_t a = 0; a < irs.size(); ++a)
            for (std::size_t b = 0; b < irs.size(); ++b) {
                double ip = 0.0;
                for (Rank g = 0; g < G.order(); ++g) ip += chi[a][g] * chi[b][G.inverse_of(g)];
                ip /= static_cast<double>(G.order());
                chars = std::max(chars, std::abs(ip - (a == b ? 1.0 : 0.0)));
            }
    }
    const double secs = seconds_since(t0);
    out << "homomorphism " << hom << ", orthogonality " << orth << ", characters " << chars
        << ", sum d^2 = n! " << (sums ? "yes" : "NO") << ", " << secs << " s";
    return hom < 1e-10 && orth < 1e-10 && chars < 1e-10 && sums && secs < 60 ? Verdict::pass : Verdict::fail;
}

// ---------------------------------------------------------------------------

Verdict fourier_suite(const Context&, std::ostream& out) {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(77);
    double round_trip = 0.0, fast_vs_naive = 0.0, plancherel = 0.0;
    for (int t = 0; t < 20; ++t) {
        auto f = GroupFunction::zeros(5);
        for (auto& v : f.values) v = rng.normal();
        const auto naive = fourier_transform(f);
        const auto fast = fast_fourier_transform(f);
        for (std::size_t l = 0; l < naive.coeffs.size(); ++l)
            fast_vs_naive = std::max(fast_vs_naive, max_abs(naive.coeffs[l] - fast.coeffs[l]));
        const auto back = inverse_fourier(naive);
        for (Rank r = 0; r < 120; ++r) round_trip = std::max(round_trip, std::abs(back[r] - f[r]));
        double lhs = 0.0, rhs = 0.0;
        for (double v : f.values) lhs += v * v;
        for (const auto& c : naive.coeffs) rhs += static_cast<double>(c.rows()) * c.squaredNorm();
        rhs /= 120.0;
        plancherel = std::max(plancherel, std::abs(lhs - rhs) / lhs);
    }
    double off_support = 0.0;
    std::size_t subgroups = 0;
    for (const auto& H : all_subgroups(5)) {
        ++subgroups;
        const auto support = coset_fourier_support(H);
        for (Side side : {Side::left, Side::right}) {
            const auto d = cosets(H, side);
            std::vector<double> level(d.size());
            for (auto& v : level) v = rng.normal();
            auto f = GroupFunction::zeros(5);
            for (Rank r = 0; r < 120; ++r) f.values[r] = level[d.block_of[r]];
            const auto F = fast_fourier_transform(f);
            for (std::size_t l = 0; l < F.coeffs.size(); ++l)
                if (std::find(support.begin(), support.end(), F.partitions[l]) == support.end())
                    off_support = std::max(off_support, F.coeffs[l].norm());
        }
    }
    const double secs = seconds_since(t0);
    out << "round trip " << round_trip << ", fast vs naive " << fast_vs_naive << ", Plancherel " << plancherel
        << ", off-support " << off_support << " over " << subgroups << " subgroups, " << secs << " s";
    return round_trip < 1e-9 && fast_vs_naive < 1e-9 && plancherel < 1e-9 && off_support < 1e-8 && subgroups == 156 &&
                   secs < 300
               ? Verdict::pass
               : Verdict::fail;
}

// ---------------------------------------------------------------------------

struct SpectrumRow {
    std::string name;
    std::vector<std::string> generators;
    std::size_t order;
    std::array<double, 6> percent; // (4,1) (3,2) (3,1^2) (2^2,1) (2,1^3) (1^5)
};

const std::vector<SpectrumRow>& spectrum_rows() {
    static const std::vector<SpectrumRow> rows{
        {"C2", {"(1 2)"}, 2, {20.3, 25.4, 30.5, 17, 6.8, 0}},
        {"C2", {"(1 2)(3 4)"}, 2, {13.6, 25.4, 20.3, 25.4, 13.6, 1.7}},
        {"C3", {"(1 2 3)"}, 3, {20.1, 12.8, 30.8, 12.8, 20.5, 2.6}},
        {"C4", {"(1 2 3 4)"}, 4, {13.6, 25.4, 20.3, 25.4, 13.6, 1.7}},
        {"C2xC2", {"(1 2)", "(3 4)"}, 4, {27.6, 34.5, 20.7, 17.2, 0, 0}},
        {"C2xC2", {"(1 2)(3 4)", "(1 3)(2 4)"}, 4, {13.8, 34.5, 0, 34.5, 13.8, 3.5}},
        {"C5", {"(1 2 3 4 5)"}, 5, {0, 21.7, 52.2, 21.7, 0, 4.4}},
        {"C6", {"(1 2 3)", "(4 5)"}, 6, {21.1, 26.3, 31.6, 0, 21.1, 0}},
        {"S3", {"(1 2 3)", "(1 2)"}, 6, {42.1, 26.3, 31.6, 0, 0, 0}},
        {"S3", {"(1 2 3)", "(1 2)(4 5)"}, 6, {21.1, 26.3, 0, 26.3, 21.1, 5.3}},
        {"D8", {"(1 2 3 4)", "(1 3)"}, 8, {28.6, 35.7, 0, 35.7, 0, 0}},
        {"D10", {"(1 2 3 4 5)", "(2 5)(3 4)"}, 10, {0, 45.5, 0, 45.5, 0, 1}},
        {"S3xS2", {"(1 2 3)", "(1 2)", "(4 5)"}, 12, {55.6, 44.4, 0, 0, 0, 0}},
        {"A4", {"(1 2)(3 4)", "(1 2 3)"}, 12, {44.4, 0, 0, 0, 44.4, 11.2}},
        {"F20", {"(1 2 3 4 5)", "(2 3 5 4)"}, 20, {0, 0, 0, 100, 0, 0}},
        {"S4", {"(1 2 3 4 5)", "(1 2)"}, 24, {100, 0, 0, 0, 0, 0}},
        {"A5", {"(1 2 3 4 5)", "(1 2 3)"}, 60, {0, 0, 0, 0, 0, 100}},
    };
    return rows;
}

// Rows whose reference values are inconsistent with their own generators:
// C3 (20.1 where the (4,1) and (2,1^3) shares must agree by the sign twist),
// C4 (a copy of the <(12)(34)> row), D10 (sign share 9.1, not 1), S3xS2
// (first two shares swapped), S4 (the generators give all of S5).
const std::set<std::size_t> kKnownBadRows{2, 3, 11, 12, 15};

Verdict subgroup_spectra(const Context&, std::ostream& out) {
    const auto& rows = spectrum_rows();
    std::set<std::size_t> failed;
    std::ostringstream lines;
    lines.setf(std::ios::fixed);
    lines.precision(1);
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const auto& row = rows[k];
        const auto H = generate_from_cycles(5, row.generators);
        lines << "\n    " << row.name << " " << H.generator_string() << ": ";
        if (H.order() != row.order) {
            lines << "generators give order " << H.order() << ", expected " << row.order << "  FAIL";
            failed.insert(k);
            continue;
        }
        const auto shares = irrep_contribution(centered_indicator(H));
        double dev = 0.0;
        lines << "got";
        for (std::size_t c = 0; c < 6; ++c) {
            lines << ' ' << 100 * shares[c].share;
            dev = std::max(dev, std::abs(100 * shares[c].share - row.percent[c]));
        }
        lines << " expected";
        for (double v : row.percent) lines << ' ' << v;
        lines.precision(2);
        lines << " (max dev " << dev << " pp)";
        lines.precision(1);
        if (dev > 0.2) {
            lines << "  FAIL";
            failed.insert(k);
        }
    }
    out << rows.size() - failed.size() << "/" << rows.size() << " rows within 0.2 pp" << lines.str();
    if (failed.empty()) return Verdict::pass;
    for (std::size_t k : failed)
        if (!kKnownBadRows.count(k)) return Verdict::fail;
    return Verdict::known_fail;
}

// ---------------------------------------------------------------------------

Verdict census(const Context&, std::ostream& out) {
    const auto all = all_subgroups(5);
    bool divides = true;
    std::set<std::size_t> orders;
    for (const auto& H : all) {
        divides = divides && 120 % H.order() == 0;
        orders.insert(H.order());
    }
    bool listed = true;
    for (const auto& row : spectrum_rows()) listed = listed && orders.count(row.order);
    out << all.size() << " subgroups, orders divide 120: " << (divides ? "yes" : "NO")
        << ", listed orders present: " << (listed ? "yes" : "NO");
    return all.size() == 156 && divides && listed ? Verdict::pass : Verdict::fail;
}

// ---------------------------------------------------------------------------

const CosetNetwork& oracle_network() {
    static const CosetNetwork net = build_coset_network(5, stabilizer_family(5), {.include_sign = true});
    return net;
}

std::vector<Eigen::Index> argmaxes(const ModelParams& p, const std::vector<Pair>& pairs, Activation act) {
    std::vector<Eigen::Index> out;
    out.reserve(pairs.size());
    for (const auto& pr : pairs) {
        const auto f = forward(p, pr.left, pr.right, act);
        Eigen::Index best = 0;
        f.logits.maxCoeff(&best);
        out.push_back(best);
    }
    return out;
}

Verdict oracle(const Context&, std::ostream& out) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto pairs = all_pairs(5);
    const auto net = build_coset_network(5, stabilizer_family(5));
    const auto r = evaluate(net.params, pairs);
    const auto correct = static_cast<std::size_t>(std::llround(r.accuracy * static_cast<double>(r.count)));

    std::map<std::vector<bool>, Rank> decode;
    bool consistent = true;
    for (const auto& p : pairs) {
        const auto [it, fresh] = decode.emplace(silent_circuits(net, p.left, p.right), product_rank(5, p));
        consistent = consistent && it->second == product_rank(5, p);
    }
    const bool collision_free = consistent && decode.size() == 120;

    const double x = 1.0;
    const auto& full = oracle_network();
    const auto& sc = full.circuits.back();
    std::set<double> values;
    for (const auto& p : pairs) values.insert(circuit_pre_activation(full, sc, p.left, p.right));
    const bool three = values == std::set<double>{-2 * x, 0.0, 2 * x};
    const double secs = seconds_since(t0);
    out << correct << "/" << r.count << " correct, " << decode.size() << " distinct silent patterns"
        << (collision_free ? " (collision-free)" : " (COLLISION)") << ", sign pre-activations {";
    for (double v : values) out << ' ' << v;
    out << " }, " << secs << " s";
    return correct == 14400 && r.count == 14400 && collision_free && three && secs < 120 ? Verdict::pass
                                                                                         : Verdict::fail;
}

// ---------------------------------------------------------------------------

Verdict interventions(const Context&, std::ostream& out) {
    const auto& P = oracle_network().params;
    const auto pairs = all_pairs(5);
    const auto base = argmaxes(P, pairs, Activation::relu);

    auto flipped = P;
    flipped.e_l = -flipped.e_l;
    flipped.e_r = -flipped.e_r;
    const auto both = argmaxes(flipped, pairs, Activation::relu);
    const auto absn = argmaxes(P, pairs, Activation::abs);
    std::size_t same_both = 0, same_abs = 0;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        same_both += both[k] == base[k];
        same_abs += absn[k] == base[k];
    }
    const double left = intervene(P, {.kind = InterventionKind::sign_flip_left}, pairs).accuracy;
    const double right = intervene(P, {.kind = InterventionKind::sign_flip_right}, pairs).accuracy;
    const double swap = intervene(P, {.kind = InterventionKind::embedding_swap}, pairs).accuracy;
    out << "argmax kept: sign_flip_both " << same_both << "/" << pairs.size() << ", abs " << same_abs << "/"
        << pairs.size() << "; accuracy sign_flip_left " << left << ", sign_flip_right " << right
        << ", embedding_swap " << swap;
    return same_both == pairs.size() && same_abs == pairs.size() && left < 0.05 && right < 0.05 && swap < 0.05
               ? Verdict::pass
               : Verdict::fail;
}

// ---------------------------------------------------------------------------

// Extended-precision loss computed pair by pair, independent of the batched
// implementation.
long double reference_loss(const ModelParams& p, const std::vector<Pair>& pairs) {
    const auto& G = symmetric_group(p.n);
    const auto g = static_cast<Eigen::Index>(p.group_order());
    long double total = 0.0L;
    std::vector<long double> acts(static_cast<std::size_t>(p.w)), logits(static_cast<std::size_t>(g));
    for (const auto& pr : pairs) {
        for (int k = 0; k < p.w; ++k) {
            long double z = 0.0L;
            for (int t = 0; t < p.d; ++t)
                z += static_cast<long double>(p.l(k, t)) * p.e_l(t, pr.left) +
                     static_cast<long double>(p.r(k, t)) * p.e_r(t, pr.right);
            acts[static_cast<std::size_t>(k)] = z > 0 ? z : 0.0L;
        }
        long double m = -1e300L;
        for (Eigen::Index c = 0; c < g; ++c) {
            long double z = 0.0L;
            for (int k = 0; k < p.w; ++k) z += static_cast<long double>(p.u(c, k)) * acts[static_cast<std::size_t>(k)];
            logits[static_cast<std::size_t>(c)] = z;
            m = std::max(m, z);
        }
        long double s = 0.0L;
        for (auto z : logits) s += std::exp(z - m);
        total += m + std::log(s) - logits[G.multiply(pr.left, pr.right)];
    }
    return total / static_cast<long double>(pairs.size());
}

double gradient_check(const TrainConfig& cfg) {
    auto p = init_params(cfg.n, cfg.d, cfg.w, cfg.seed);
    const auto split = split_pairs(cfg.n, cfg.train_fraction, cfg.seed);
    Gradients g;
    loss_and_gradients(p, split.train, g);
    Rng rng(cfg.seed + 1);
    const double h = 1e-6;
    double worst = 0.0;
    auto check = [&](Matrix& m, const Matrix& grad) {
        for (int t = 0; t < 20; ++t) {
            const auto i = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(m.rows())));
            const auto j = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(m.cols())));
            const double keep = m(i, j);
            m(i, j) = keep + h;
            const long double up = reference_loss(p, split.train);
            m(i, j) = keep - h;
            const long double down = reference_loss(p, split.train);
            m(i, j) = keep;
            const double numeric = static_cast<double>((up - down) / (2 * static_cast<long double>(h)));
            const double scale = std::max({std::abs(numeric), std::abs(grad(i, j)), 1e-8});
            worst = std::max(worst, std::abs(numeric - grad(i, j)) / scale);
        }
    };
    check(p.e_l, g.e_l);
    check(p.e_r, g.e_r);
    check(p.l, g.l);
    check(p.r, g.r);
    check(p.u, g.u);
    return worst;
}

Verdict grokking(const Context&, std::ostream& out) {
    const auto t0 = std::chrono::steady_clock::now();
    TrainConfig cfg;
    cfg.n = 4;
    cfg.d = 64;
    cfg.w = 128;
    cfg.weight_decay = 1.0;
    cfg.train_fraction = 0.5;
    cfg.epochs = 100000;
    cfg.log_every = 1000;
    cfg.log_entropy = false;
    const double grad_err = gradient_check(cfg);
    const auto result = train(cfg);
    const auto test = evaluate(result.params, result.split.test);
    long grokked_at = -1;
    for (const auto& h : result.history.records)
        if (grokked_at < 0 && h.test_acc == 1.0) grokked_at = h.epoch;

    const auto catalog = SubgroupCatalog::proper_nontrivial(4);
    const auto profiles = classify_neurons(result.params, catalog);
    const auto pairs = all_pairs(4);
    const auto keep = ablate(result.params, {AblationMetric::top_irrep_share, 0.9, AblationMode::keep_above}, profiles, pairs);
    const auto drop =
        ablate(result.params, {AblationMetric::top_irrep_share, 0.9, AblationMode::remove_above}, profiles, pairs);
    std::size_t focused = 0, labeled = 0;
    for (const auto& p : profiles)
        if (p.top_irrep_share > 0.9) {
            ++focused;
            labeled += p.classified();
        }
    out << "held-out accuracy " << test.accuracy << " (first 100% at epoch " << grokked_at << " of " << cfg.epochs
        << "), gradient check " << grad_err << ", keep_above 0.9: " << keep.eval.accuracy << " with "
        << keep.kept_count << " neurons, remove_above 0.9: " << drop.eval.accuracy << "; " << labeled << "/"
        << focused << " focused neurons carry a coset label; " << seconds_since(t0) << " s";
    return test.accuracy == 1.0 && grad_err < 1e-5 && keep.eval.accuracy >= 0.95 && drop.eval.accuracy < 0.25
               ? Verdict::pass
               : Verdict::fail;
}

// ---------------------------------------------------------------------------

std::map<std::string, std::string> snapshot(const fs::path& dir) {
    std::map<std::string, std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        if (!e.is_regular_file()) continue;
        std::ifstream in(e.path(), std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        files[fs::relative(e.path(), dir).string()] = ss.str();
    }
    return files;
}

int shell(const std::string& command) {
    const int status = std::system((command + " > /dev/null 2>&1").c_str());
    return status == -1 ? -1 : WEXITSTATUS(status);
}

std::string quote(const std::string& s) { return "'" + s + "'"; }

Verdict determinism(const Context& ctx, std::ostream& out) {
    if (ctx.cli.empty()) {
        out << "no --cli binary given";
        return Verdict::fail;
    }
    const fs::path root = ctx.work / "determinism";
    fs::remove_all(root);
    fs::create_directories(root);
    const auto cli = quote(ctx.cli);
    const auto dir = [&](const char* name) { return (root / name).string(); };
    {
        std::ofstream cfg(root / "train.json");
        cfg << R"({"n": 3, "d": 8, "w": 16, "seed": 5, "epochs": 300, "log_every": 50, "output_dir": ")"
            << dir("train") << "\"}\n";
    }
    const std::vector<std::pair<std::string, std::string>> runs{
        {"train", cli + " train --config " + quote((root / "train.json").string())},
        {"oracle", cli + " oracle 4 --redundancy 2 --out " + quote(dir("oracle"))},
        {"analyze", cli + " analyze --checkpoint " + quote(dir("train")) + " --out " + quote(dir("analyze"))},
        {"ablate", cli + " ablate --checkpoint " + quote(dir("train")) + " --threshold 0..1:0.25 --out " +
                       quote(dir("ablate"))},
        {"intervene", cli + " intervene --checkpoint " + quote(dir("train")) + " --kind all --seed 3 --out " +
                          quote(dir("intervene"))},
        {"catalog", cli + " catalog 4 --out " + quote(dir("catalog"))},
        {"spectrum", cli + " spectrum 4 --out " + quote(dir("spectrum"))},
    };
    std::size_t identical = 0;
    std::string broken;
    for (const auto& [name, command] : runs) {
        if (shell("COSET_LAB_THREADS=1 " + command) != 0) {
            broken += " " + name + "(run failed)";
            continue;
        }
        const auto first = snapshot(root / name);
        const int rc = shell("COSET_LAB_THREADS=3 " + cli + " " + name + " --config " +
                             quote((root / name / "config.json").string()));
        const auto second = snapshot(root / name);
        if (rc == 0 && first == second && first.count("config.json")) ++identical;
        else broken += " " + name;
    }
    out << identical << "/" << runs.size() << " commands byte-identical on rerun from their recorded config";
    if (!broken.empty()) out << "; differing:" << broken;
    return identical == runs.size() ? Verdict::pass : Verdict::fail;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"coset-lab acceptance suite"};
    std::string only;
    Context ctx;
    std::string work = (fs::temp_directory_path() / "coset_lab_acceptance").string();
    app.add_option("--only", only, "run a single criterion");
    app.add_option("--cli", ctx.cli, "path to the coset-lab binary");
    app.add_option("--work", work, "scratch directory");
    CLI11_PARSE(app, argc, argv);
    ctx.work = work;

    const std::vector<Criterion> criteria{
        {"representation", "representation suite", representation_suite},
        {"fourier", "Fourier suite", fourier_suite},
        {"subgroup_spectra", "irrep contributions of S5 subgroup indicators", subgroup_spectra},
        {"census", "S5 subgroup census", census},
        {"oracle", "handcrafted S5 network exactness", oracle},
        {"interventions", "oracle intervention invariances", interventions},
        {"grokking", "desk-scale S4 grokking and ablation", grokking},
        {"determinism", "byte-identical command reruns", determinism},
    };

    bool any = false, failed = false, known = false;
    for (const auto& c : criteria) {
        if (!only.empty() && c.id != only) continue;
        any = true;
        std::ostringstream detail;
        Verdict v = Verdict::fail;
        try {
            v = c.run(ctx, detail);
        } catch (const std::exception& e) {
            detail << " exception: " << e.what();
        }
        const char* tag = v == Verdict::pass ? "PASS" : v == Verdict::known_fail ? "FAIL (known)" : "FAIL";
        std::cout << tag << "  " << c.id << "  [" << c.title << "]  " << detail.str() << std::endl;
        failed = failed || v == Verdict::fail;
        known = known || v == Verdict::known_fail;
    }
    if (!any) {
        std::cerr << "unknown criterion '" << only << "'\n";
        return 2;
    }
    return failed ? 1 : known ? 77 : 0;
}
