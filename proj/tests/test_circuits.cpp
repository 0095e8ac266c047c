#include "cosetlab/circuits.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

using namespace cosetlab;

namespace {

const CosetNetwork& oracle5() {
    static const CosetNetwork net = build_coset_network(5, stabilizer_family(5), {.include_sign = true});
    return net;
}

const SubgroupCatalog& catalog5() {
    static const SubgroupCatalog c = SubgroupCatalog::proper_nontrivial(5);
    return c;
}

std::vector<Eigen::Index> argmaxes(const ModelParams& p, Activation act = Activation::relu) {
    std::vector<Eigen::Index> out;
    for (const auto& pr : all_pairs(p.n)) {
        const auto f = forward(p, pr.left, pr.right, act);
        Eigen::Index best = 0;
        f.logits.maxCoeff(&best);
        out.push_back(best);
    }
    return out;
}

std::string first_line(const std::filesystem::path& f) {
    std::ifstream in(f);
    std::string line;
    std::getline(in, line);
    return line;
}

} // namespace

TEST(Oracle, S5StabilizerNetworkIsExact) {
    const auto net = build_coset_network(5, stabilizer_family(5));
    EXPECT_EQ(net.circuits.size(), 25u);
    EXPECT_EQ(net.params.w, 50);
    const auto r = evaluate(net.params, all_pairs(5));
    EXPECT_EQ(r.count, 14400u);
    EXPECT_EQ(r.accuracy, 1.0);
}

TEST(Oracle, S4StabilizerNetworkIsExact) {
    const auto net = build_coset_network(4, stabilizer_family(4));
    EXPECT_EQ(net.circuits.size(), 16u);
    const auto r = evaluate(net.params, all_pairs(4));
    EXPECT_EQ(r.count, 576u);
    EXPECT_EQ(r.accuracy, 1.0);
}

TEST(Oracle, WithSignCircuitAndRedundancyStaysExact) {
    EXPECT_EQ(evaluate(oracle5().params, all_pairs(5)).accuracy, 1.0);
    const auto net = build_coset_network(4, stabilizer_family(4), {.redundancy = 3, .include_sign = true});
    EXPECT_EQ(net.params.w, 17 * 6);
    EXPECT_EQ(evaluate(net.params, all_pairs(4)).accuracy, 1.0);
}

TEST(Oracle, TargetIsLetterJInPositionI) {
    // independent description of the (H_i, H_j) target double coset
    const auto& G = symmetric_group(5);
    const auto& net = oracle5();
    for (int i = 1; i <= 5; ++i)
        for (int j = 1; j <= 5; ++j) {
            const auto& c = net.circuits[static_cast<std::size_t>((i - 1) * 5 + (j - 1))];
            for (Rank t = 0; t < G.order(); ++t)
                ASSERT_EQ(static_cast<bool>(c.target[t]), G.element(t).one_line()[i - 1] == j) << i << "," << j;
        }
}

TEST(Oracle, DecodingPatternsAreCollisionFree) {
    const auto net = build_coset_network(5, stabilizer_family(5));
    std::map<std::vector<bool>, Rank> decode;
    for (const auto& p : all_pairs(5)) {
        const auto pattern = silent_circuits(net, p.left, p.right);
        const Rank prod = product_rank(5, p);
        const auto [it, fresh] = decode.emplace(pattern, prod);
        ASSERT_EQ(it->second, prod) << "two products share a silent pattern";
    }
    EXPECT_EQ(decode.size(), 120u);
}

TEST(Oracle, SignCircuitPreActivationsTakeThreeValues) {
    const double x = 1.5;
    const auto net = build_coset_network(5, {}, {.include_sign = true, .sign_magnitude = x});
    const auto& G = symmetric_group(5);
    const auto& c = net.circuits.front();
    std::set<double> left_values, values;
    for (const auto& p : all_pairs(5)) {
        const auto f = forward(net.params, p.left, p.right);
        const auto idx = static_cast<Eigen::Index>(c.neurons.front().index);
        const double v = f.pre(idx);
        values.insert(v);
        EXPECT_EQ(v == 0.0, sign(G.element(p.left)) == sign(G.element(p.right)));
        left_values.insert((net.params.l * net.params.e_l.col(static_cast<Eigen::Index>(p.left)))(idx));
    }
    EXPECT_EQ(values, (std::set<double>{-2 * x, 0.0, 2 * x}));
    EXPECT_EQ(left_values, (std::set<double>{-x, x}));
}

TEST(Oracle, SignCircuitAloneCarriesOneBit) {
    const auto net = build_coset_network(5, {}, {.include_sign = true});
    EXPECT_DOUBLE_EQ(evaluate(net.params, all_pairs(5)).accuracy, 2.0 / 120.0);
}

TEST(Oracle, ZeroSetIsTheTargetWithUnitGap) {
    const auto& net = oracle5();
    const auto& G = symmetric_group(5);
    for (const auto& c : net.circuits) {
        if (c.kind != CircuitKind::conjugate_pair) continue;
        const auto plus = static_cast<Eigen::Index>(c.neurons[0].index);
        const auto minus = static_cast<Eigen::Index>(c.neurons[1].index);
        for (Rank a = 0; a < G.order(); a += 7)
            for (Rank b = 0; b < G.order(); ++b) {
                const auto f = forward(net.params, a, b);
                const double summed = f.acts(plus) + f.acts(minus);
                EXPECT_EQ(summed, std::abs(f.pre(plus)));
                if (c.target[G.multiply(a, b)]) EXPECT_EQ(summed, 0.0);
                else EXPECT_GE(summed, 1.0);
            }
    }
}

TEST(Oracle, UnpairableSubgroupsAreRejected) {
    const auto C2 = generate_from_cycles(5, {"(1 2)"});
    EXPECT_THROW(build_coset_network(5, {{C2, C2}}), StructureError);
    EXPECT_THROW(build_coset_network(5, {{point_stabilizer(5, 1), alternating_group(5)}}), StructureError);
    EXPECT_THROW(build_coset_network(5, {}), ConfigError);
}

TEST(Intervention, PolarityPairsMakeSignFlipBothAndAbsExact) {
    const auto& P = oracle5().params;
    const auto pairs = all_pairs(5);
    EXPECT_EQ(intervene(P, {.kind = InterventionKind::sign_flip_both}, pairs).accuracy, 1.0);
    EXPECT_EQ(intervene(P, {.kind = InterventionKind::abs_nonlinearity}, pairs).accuracy, 1.0);
    EXPECT_EQ(argmaxes(P, Activation::abs), argmaxes(P));
    const auto f = forward(P, 17, 93);
    const auto g = forward(P, 17, 93, Activation::abs);
    EXPECT_TRUE(g.logits.isApprox(2.0 * f.logits));
}

TEST(Intervention, BreakingTheCodeDestroysAccuracy) {
    const auto& P = oracle5().params;
    const auto pairs = all_pairs(5);
    for (auto kind : {InterventionKind::sign_flip_left, InterventionKind::sign_flip_right,
                      InterventionKind::embedding_swap}) {
        const auto r = intervene(P, {.kind = kind}, pairs);
        EXPECT_LT(r.accuracy, 0.05) << to_string(kind);
    }
}

TEST(Intervention, NoneMatchesPlainEvaluation) {
    const auto p = init_params(3, 8, 16, 4);
    const auto pairs = all_pairs(3);
    const auto a = evaluate(p, pairs);
    const auto b = intervene(p, {}, pairs);
    EXPECT_EQ(a.accuracy, b.accuracy);
    EXPECT_EQ(a.loss, b.loss);
    const auto c = intervene(p, {.kind = InterventionKind::perturb, .mean = 0.0, .std = 0.0}, pairs);
    EXPECT_EQ(a.loss, c.loss);
}

TEST(Intervention, StochasticKindsAreSeededAndThreadIndependent) {
    const auto& P = oracle5().params;
    const auto pairs = all_pairs(5);
    for (auto kind : {InterventionKind::perturb, InterventionKind::relu_clip_patch}) {
        InterventionSpec spec{.kind = kind, .mean = 1.0, .std = 1.0, .seed = 9};
        setenv("COSET_LAB_THREADS", "1", 1);
        const auto a = intervene(P, spec, pairs);
        setenv("COSET_LAB_THREADS", "3", 1);
        const auto b = intervene(P, spec, pairs);
        unsetenv("COSET_LAB_THREADS");
        EXPECT_EQ(a.loss, b.loss) << to_string(kind);
        EXPECT_EQ(a.accuracy, b.accuracy);
        spec.seed = 10;
        EXPECT_NE(intervene(P, spec, pairs).loss, a.loss);
    }
    InterventionSpec pre{.kind = InterventionKind::perturb, .mean = -1.0, .std = 1.0, .pre_activation = true};
    EXPECT_NE(intervene(P, pre, pairs).loss, intervene(P, {.kind = InterventionKind::perturb, .mean = -1.0}, pairs).loss);
}

TEST(Intervention, ParseKinds) {
    EXPECT_EQ(parse_intervention_kind("abs"), InterventionKind::abs_nonlinearity);
    EXPECT_EQ(parse_intervention_kind("embedding_swap"), InterventionKind::embedding_swap);
    EXPECT_THROW(parse_intervention_kind("flip"), ConfigError);
}

TEST(Classify, HandcraftedNeuronsGetTheirSubgroups) {
    const auto& net = oracle5();
    const auto profiles = classify_neurons(net.params, catalog5());
    ASSERT_EQ(profiles.size(), 52u);

    const auto& s = profiles[50];
    EXPECT_EQ(s.label, "sign");
    EXPECT_EQ(s.best_left_name, "A5");
    EXPECT_LT(s.best_left->score, 1e-9);
    EXPECT_LT(s.best_right->score, 1e-9);
    EXPECT_NEAR(s.top_irrep_share, 1.0, 1e-12);
    EXPECT_EQ(s.top_irrep, Partition({1, 1, 1, 1, 1}));

    const auto& h = profiles[(4 * 5 + 0) * 2]; // (H5, H1)
    EXPECT_EQ(h.best_left_name, "H5");
    EXPECT_EQ(h.best_left->side, Side::right);
    EXPECT_EQ(h.best_right_name, "H1");
    EXPECT_EQ(h.best_right->side, Side::left);
    EXPECT_LT(h.best_left->score, 1e-9);
    EXPECT_LT(h.best_right->score, 1e-9);
    EXPECT_EQ(h.label, "coset(H5,H1)");

    for (const auto& p : profiles) {
        EXPECT_TRUE(p.classified());
        double total = 0.0;
        for (const auto& e : p.irrep_power) total += e.share;
        EXPECT_NEAR(total, 1.0, 1e-12);
    }
}

TEST(Classify, DeadNeuronsAreUnclassified) {
    auto p = ModelParams::zeros(4, 4, 3);
    p.e_l.setRandom();
    p.e_r.setRandom();
    p.l.row(1).setRandom();
    const auto profiles = classify_neurons(p, SubgroupCatalog::proper_nontrivial(4));
    EXPECT_TRUE(profiles[0].dead);
    EXPECT_EQ(profiles[0].label, "unclassified");
    EXPECT_FALSE(profiles[1].dead);
    EXPECT_FALSE(profiles[1].best_right.has_value());
    EXPECT_EQ(profiles[1].label, "unclassified");
}

TEST(Classify, RandomInitIsMostlyUnclassified) {
    const auto p = init_params(4, 16, 32, 1);
    const auto profiles = classify_neurons(p, SubgroupCatalog::proper_nontrivial(4));
    std::size_t labeled = 0;
    for (const auto& pr : profiles) labeled += pr.classified();
    EXPECT_LT(labeled, profiles.size() / 4);
}

TEST(Classify, RejectsCatalogWithTrivialSubgroups) {
    const auto p = init_params(3, 4, 4, 1);
    EXPECT_THROW(classify_neurons(p, SubgroupCatalog(all_subgroups(3))), StructureError);
}

TEST(Ablation, ThresholdZeroKeepsEverything) {
    const auto& net = oracle5();
    const auto profiles = classify_neurons(net.params, catalog5());
    const auto r = ablate(net.params, {.threshold = 0.0, .mode = AblationMode::keep_above}, profiles);
    EXPECT_EQ(r.kept_count, 52u);
    EXPECT_EQ(r.eval.accuracy, 1.0);
}

TEST(Ablation, ModesAreComplementary) {
    const auto p = init_params(4, 16, 32, 2);
    const auto profiles = classify_neurons(p, SubgroupCatalog::proper_nontrivial(4));
    for (auto metric : {AblationMetric::top_irrep_share, AblationMetric::coset_concentration})
        for (double t : {0.1, 0.3, 0.5, 0.9}) {
            const auto keep = ablation_mask(profiles, {metric, t, AblationMode::keep_above});
            const auto drop = ablation_mask(profiles, {metric, t, AblationMode::remove_above});
            for (std::size_t k = 0; k < keep.size(); ++k) EXPECT_NE(keep[k], drop[k]);
        }
    EXPECT_THROW(ablation_mask(profiles, {.threshold = 1.5}), ConfigError);
}

TEST(Ablation, RemovingEverythingGivesChance) {
    const auto net = build_coset_network(4, stabilizer_family(4));
    const auto profiles = classify_neurons(net.params, SubgroupCatalog::proper_nontrivial(4));
    const auto r = ablate(net.params, {.threshold = 0.0, .mode = AblationMode::remove_above}, profiles);
    EXPECT_EQ(r.kept_count, 0u);
    EXPECT_DOUBLE_EQ(r.eval.accuracy, 1.0 / 24.0);
    EXPECT_TRUE(r.params.u.isZero());
}

TEST(Attribution, PartitionSumsToLogits) {
    const auto& P = oracle5().params;
    std::vector<std::size_t> all(52), even, odd;
    for (std::size_t k = 0; k < 52; ++k) {
        all[k] = k;
        (k % 2 ? odd : even).push_back(k);
    }
    for (Rank i : {0u, 5u, 77u})
        for (Rank j : {3u, 119u}) {
            const auto f = forward(P, i, j);
            EXPECT_EQ(logit_attribution(P, all, i, j), f.logits);
            EXPECT_EQ(logit_attribution(P, even, i, j) + logit_attribution(P, odd, i, j), f.logits);
        }
    const auto q = init_params(3, 5, 7, 3);
    const std::vector<std::size_t> a{0, 2, 4, 6}, b{1, 3, 5};
    const auto f = forward(q, 2, 4);
    EXPECT_TRUE((logit_attribution(q, a, 2, 4) + logit_attribution(q, b, 2, 4)).isApprox(f.logits, 1e-14));
    EXPECT_THROW(logit_attribution(q, std::vector<std::size_t>{7}, 0, 0), RangeError);
}

TEST(Attribution, CircuitPenalizesItsTargetWhenFiring) {
    const auto& net = oracle5();
    const auto& G = symmetric_group(5);
    const auto& c = net.circuits[0]; // (H1, H1)
    const std::vector<std::size_t> subset{c.neurons[0].index, c.neurons[1].index};
    std::size_t firing = 0, silent = 0;
    for (Rank i = 0; i < G.order(); i += 11)
        for (Rank j = 0; j < G.order(); j += 3) {
            const auto v = logit_attribution(net.params, subset, i, j);
            if (c.target[G.multiply(i, j)]) {
                EXPECT_TRUE(v.isZero());
                ++silent;
            } else {
                ++firing;
                for (Rank t = 0; t < G.order(); ++t) {
                    if (G.element(t).one_line()[0] == 1) EXPECT_LT(v(t), 0.0);
                    else EXPECT_EQ(v(t), 0.0);
                }
            }
        }
    EXPECT_GT(firing, 0u);
    EXPECT_GT(silent, 0u);
}

TEST(Correlation, RedundantAndPolarityPartnersCorrelatePerfectly) {
    const auto net = build_coset_network(4, stabilizer_family(4), {.redundancy = 2});
    const auto profiles = classify_neurons(net.params, SubgroupCatalog::proper_nontrivial(4));
    const auto c = unembed_correlation(net.params, profiles);
    std::vector<std::size_t> pos(c.order.size());
    for (std::size_t k = 0; k < c.order.size(); ++k) pos[c.order[k]] = k;
    const auto& nn = net.circuits[5].neurons;
    for (const auto& a : nn)
        for (const auto& b : nn)
            EXPECT_NEAR(c.correlation(static_cast<Eigen::Index>(pos[a.index]), static_cast<Eigen::Index>(pos[b.index])),
                        1.0, 1e-12);
    for (std::size_t k = 1; k < c.order.size(); ++k)
        EXPECT_LE(profiles[c.order[k - 1]].label, profiles[c.order[k]].label);
}

TEST(Correlation, DuplicateAndConstantColumns) {
    auto p = init_params(3, 4, 4, 5);
    p.u.col(2) = p.u.col(0);
    p.u.col(3).setConstant(0.5);
    std::vector<NeuronProfile> profiles(4);
    for (std::size_t k = 0; k < 4; ++k) profiles[k].neuron = k;
    const auto c = unembed_correlation(p, profiles);
    EXPECT_NEAR(c.correlation(0, 2), 1.0, 1e-12);
    EXPECT_TRUE(c.constant[3]);
    EXPECT_EQ(c.correlation(3, 0), 0.0);
    EXPECT_EQ(c.correlation(3, 3), 0.0);
}

TEST(Export, CsvHeaders) {
    const auto dir = std::filesystem::temp_directory_path() / "cosetlab_circuits_csv";
    std::filesystem::create_directories(dir);
    const auto net = build_coset_network(3, stabilizer_family(3));
    const auto profiles = classify_neurons(net.params, SubgroupCatalog::proper_nontrivial(3));
    write_profiles_csv(dir / "profiles.csv", profiles);
    write_distribution_csv(dir / "dist.csv", profiles);
    write_correlation_csv(dir / "corr.csv", unembed_correlation(net.params, profiles), profiles);
    EXPECT_EQ(first_line(dir / "profiles.csv"),
              "neuron,top_irrep,top_irrep_share,entropy,best_left_subgroup,left_score,best_right_subgroup,"
              "right_score,label");
    EXPECT_EQ(first_line(dir / "dist.csv"), "label,neuron_fraction");
    EXPECT_EQ(first_line(dir / "corr.csv").substr(0, 22), "neuron,label,constant,");
    std::filesystem::remove_all(dir);
}
