#pragma once

// Coset circuits: handcrafted networks that compute the product exactly,
// per-neuron spectral and coset classification of trained weights, neuron
// ablation, forward-pass interventions, logit attribution and unembedding
// correlation.

#include "cosetlab/checkpoint.hpp"
#include "cosetlab/fourier.hpp"
#include "cosetlab/model.hpp"
#include "cosetlab/parallel.hpp"
#include "cosetlab/rng.hpp"
#include "cosetlab/subgroup.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace cosetlab {

enum class CircuitKind { sign, conjugate_pair };

inline const char* to_string(CircuitKind k) { return k == CircuitKind::sign ? "sign" : "conjugate_pair"; }

struct CircuitNeuron {
    std::size_t index = 0;
    int polarity = 1; // +1 or -1
};

/// One coset circuit of a handcrafted network. The left factor is read
/// through the right cosets of `left_subgroup`, the right factor through the
/// left cosets of `right_subgroup`.
struct CircuitBlueprint {
    CircuitKind kind = CircuitKind::conjugate_pair;
    Subgroup left_subgroup;
    Subgroup right_subgroup;
    std::optional<CosetPairing> pairing; // conjugate_pair only
    std::vector<double> coset_values;    // c_k per right coset of left_subgroup
    double magnitude = 1.0;              // x; sign circuits only
    std::size_t left_dim = 0;            // embedding row carrying the left code
    std::size_t right_dim = 0;           // embedding row carrying the right code
    std::vector<CircuitNeuron> neurons;  // polarity pairs, `redundancy` of each
    std::vector<char> target;            // rank -> member of the penalized set
    std::string name;
};

struct CosetNetwork {
    ModelParams params;
    std::vector<CircuitBlueprint> circuits;
};

struct NetworkOptions {
    int redundancy = 1;
    bool include_sign = false;
    double sign_magnitude = 1.0;
};

/// The n^2 point-stabilizer pairs (H_i, H_j), i-major.
inline std::vector<std::pair<Subgroup, Subgroup>> stabilizer_family(int n) {
    std::vector<Subgroup> H;
    for (int i = 1; i <= n; ++i) H.push_back(point_stabilizer(n, i));
    std::vector<std::pair<Subgroup, Subgroup>> out;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out.emplace_back(H[i], H[j]);
    return out;
}

/// Embedding rows [0, C) hold left codes, [C, 2C) right codes, one pair per
/// circuit; each circuit gets `redundancy` (+, -) neuron pairs sharing one
/// penalty column over its target set. Pre-activation of a + neuron is
/// c(left) - c(matched right block of right), zero exactly on matched pairs.
inline CosetNetwork build_coset_network(int n, const std::vector<std::pair<Subgroup, Subgroup>>& families,
                                        const NetworkOptions& opt = {}) {
    if (opt.redundancy < 1) throw ConfigError("build_coset_network: redundancy must be >= 1");
    if (families.empty() && !opt.include_sign) throw ConfigError("build_coset_network: no circuits requested");
    if (n < 2 || n > kMaxModelDegree) throw CapacityError("build_coset_network: n out of range");
    const auto& G = symmetric_group(n);
    const std::size_t g = G.order();
    const std::size_t circuits = families.size() + (opt.include_sign ? 1 : 0);
    const auto per = static_cast<std::size_t>(opt.redundancy) * 2;

    CosetNetwork net;
    net.params = ModelParams::zeros(n, static_cast<int>(2 * circuits), static_cast<int>(circuits * per));
    auto& P = net.params;

    auto wire = [&](CircuitBlueprint& c, std::size_t slot) {
        c.left_dim = slot;
        c.right_dim = circuits + slot;
        for (std::size_t k = 0; k < per; ++k) {
            const std::size_t idx = slot * per + k;
            const int pol = k % 2 == 0 ? 1 : -1;
            c.neurons.push_back({idx, pol});
            P.l(static_cast<Eigen::Index>(idx), static_cast<Eigen::Index>(c.left_dim)) = pol;
            P.r(static_cast<Eigen::Index>(idx), static_cast<Eigen::Index>(c.right_dim)) = pol;
            for (Rank t = 0; t < g; ++t)
                if (c.target[t]) P.u(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(idx)) = -1.0;
        }
    };

    std::size_t slot = 0;
    for (const auto& [Hi, Hj] : families) {
        if (Hi.n != n || Hj.n != n) throw DimensionError("build_coset_network: subgroup from a different S_n");
        CircuitBlueprint c;
        c.kind = CircuitKind::conjugate_pair;
        c.left_subgroup = Hi;
        c.right_subgroup = Hj;
        c.pairing = paired_cosets(Hi, Hj);
        const auto& pr = *c.pairing;
        const std::size_t blocks = pr.right_cosets.size();
        for (std::size_t k = 0; k < blocks; ++k) c.coset_values.push_back(static_cast<double>(k + 1));
        std::vector<std::size_t> matched_right(pr.left_cosets.size());
        for (std::size_t k = 0; k < blocks; ++k) matched_right[pr.partner[k]] = k;
        for (Rank x = 0; x < g; ++x) {
            P.e_l(static_cast<Eigen::Index>(slot), static_cast<Eigen::Index>(x)) =
                c.coset_values[pr.right_cosets.block_of[x]];
            P.e_r(static_cast<Eigen::Index>(circuits + slot), static_cast<Eigen::Index>(x)) =
                -c.coset_values[matched_right[pr.left_cosets.block_of[x]]];
        }
        c.target.assign(g, 0);
        for (Rank t : pr.double_cosets.blocks[pr.target_block]) c.target[t] = 1;
        c.name = "(" + Hi.generator_string() + "," + Hj.generator_string() + ")";
        wire(c, slot);
        net.circuits.push_back(std::move(c));
        ++slot;
    }
    if (opt.include_sign) {
        if (!(opt.sign_magnitude > 0.0)) throw ConfigError("build_coset_network: sign magnitude must be positive");
        CircuitBlueprint c;
        c.kind = CircuitKind::sign;
        c.left_subgroup = c.right_subgroup = alternating_group(n);
        c.magnitude = opt.sign_magnitude;
        c.coset_values = {opt.sign_magnitude, -opt.sign_magnitude};
        for (Rank x = 0; x < g; ++x) {
            const double s = sign(G.element(x)) * opt.sign_magnitude;
            P.e_l(static_cast<Eigen::Index>(slot), static_cast<Eigen::Index>(x)) = s;
            P.e_r(static_cast<Eigen::Index>(circuits + slot), static_cast<Eigen::Index>(x)) = -s;
        }
        c.target.assign(g, 0);
        for (Rank t : c.left_subgroup.elements) c.target[t] = 1;
        c.name = "sign";
        wire(c, slot);
        net.circuits.push_back(std::move(c));
    }
    return net;
}

/// Pre-activation of the circuit's first + neuron on (i, j).
inline double circuit_pre_activation(const CosetNetwork& net, const CircuitBlueprint& c, Rank i, Rank j) {
    const auto& P = net.params;
    const auto idx = static_cast<Eigen::Index>(c.neurons.front().index);
    return P.l.row(idx).dot(P.e_l.col(static_cast<Eigen::Index>(i))) +
           P.r.row(idx).dot(P.e_r.col(static_cast<Eigen::Index>(j)));
}

/// Which circuits are silent on (i, j), in circuit order.
inline std::vector<bool> silent_circuits(const CosetNetwork& net, Rank i, Rank j) {
    std::vector<bool> out;
    out.reserve(net.circuits.size());
    for (const auto& c : net.circuits) out.push_back(circuit_pre_activation(net, c, i, j) == 0.0);
    return out;
}

// ---------------------------------------------------------------------------
// Neuron classification

struct NeuronProfile {
    std::size_t neuron = 0;
    std::vector<IrrepShare> irrep_power; // non-trivial irreps, shares sum to 1
    double fourier_entropy = 0.0;
    std::optional<SubgroupMatch> best_left;  // left weights against right cosets
    std::optional<SubgroupMatch> best_right; // right weights against left cosets
    std::string best_left_name;
    std::string best_right_name;
    std::string label = "unclassified"; // "sign", "coset(A,B)" or "unclassified"
    Partition top_irrep;
    double top_irrep_share = 0.0;
    bool dead = false;

    bool classified() const { return label != "unclassified"; }
};

struct ClassifyOptions {
    double threshold = 0.1; // a side matches H when C_H <= threshold
};

/// "H3" for a point stabilizer, "A5" for the alternating group, otherwise
/// "#index:label".
inline std::string subgroup_name(const SubgroupCatalog& catalog, std::size_t index) {
    const auto& H = catalog[index];
    const auto& G = symmetric_group(H.n);
    if (H.order() * 2 == G.order()) {
        bool even = true;
        for (Rank r : H.elements) even = even && sign(G.element(r)) == 1;
        if (even) return "A" + std::to_string(H.n);
    }
    if (H.order() * static_cast<std::size_t>(H.n) == G.order()) {
        for (int i = 1; i <= H.n; ++i) {
            bool fixes = true;
            for (Rank r : H.elements) fixes = fixes && G.element(r).one_line()[i - 1] == i;
            if (fixes) return "H" + std::to_string(i);
        }
    }
    return "#" + std::to_string(index) + ":" + (H.label.empty() ? "?" : H.label);
}

namespace detail {

/// Largest subgroup scoring within the threshold, or the plain argmin when
/// none does.
inline SubgroupMatch match_side(std::span<const double> f, const SubgroupCatalog& catalog, Side side,
                                double threshold) {
    const auto best = best_subgroup(f, catalog, side);
    if (best.score > threshold) return best;
    return best_subgroup(f, catalog, side, threshold - best.score);
}

inline bool is_constant(std::span<const double> f) {
    const auto [lo, hi] = std::minmax_element(f.begin(), f.end());
    return *hi - *lo <= 1e-12 * std::max(1.0, std::max(std::abs(*hi), std::abs(*lo)));
}

} // namespace detail

inline NeuronProfile classify_neuron(const Eigen::Ref<const Eigen::RowVectorXd>& left_row,
                                     const Eigen::Ref<const Eigen::RowVectorXd>& right_row, int n,
                                     const SubgroupCatalog& catalog, const ClassifyOptions& opt = {}) {
    NeuronProfile prof;
    std::vector<double> lf(left_row.data(), left_row.data() + left_row.size());
    std::vector<double> rf(right_row.data(), right_row.data() + right_row.size());
    const bool lconst = detail::is_constant(lf);
    const bool rconst = detail::is_constant(rf);
    if (lconst && rconst) {
        prof.dead = true;
        return prof;
    }

    const auto FL = fourier_transform(GroupFunction(n, lf));
    const auto FR = fourier_transform(GroupFunction(n, rf));
    const auto sl = spectrum(FL, false);
    const auto sr = spectrum(FR, false);
    double total = 0.0;
    for (std::size_t k = 0; k < sl.size(); ++k)
        if (sl[k].partition.rows() != 1) total += sl[k].dim * (sl[k].frobenius_power + sr[k].frobenius_power);
    double h = 0.0;
    for (std::size_t k = 0; k < sl.size(); ++k) {
        if (sl[k].partition.rows() == 1) continue;
        const double share = sl[k].dim * (sl[k].frobenius_power + sr[k].frobenius_power) / total;
        prof.irrep_power.push_back({sl[k].partition, share});
        if (share > 0.0) h -= share * std::log(share);
        if (share > prof.top_irrep_share) {
            prof.top_irrep_share = share;
            prof.top_irrep = sl[k].partition;
        }
    }
    prof.fourier_entropy = h;

    if (!lconst) {
        prof.best_left = detail::match_side(lf, catalog, Side::right, opt.threshold);
        prof.best_left_name = subgroup_name(catalog, prof.best_left->index);
    }
    if (!rconst) {
        prof.best_right = detail::match_side(rf, catalog, Side::left, opt.threshold);
        prof.best_right_name = subgroup_name(catalog, prof.best_right->index);
    }
    if (prof.best_left && prof.best_right && prof.best_left->score <= opt.threshold &&
        prof.best_right->score <= opt.threshold) {
        const bool sign_like = prof.best_left_name == "A" + std::to_string(n) && prof.best_right_name == prof.best_left_name;
        prof.label = sign_like ? "sign" : "coset(" + prof.best_left_name + "," + prof.best_right_name + ")";
    }
    return prof;
}

/// One profile per hidden neuron: left function g -> (L E_l)[k, g], right
/// function g -> (R E_r)[k, g].
inline std::vector<NeuronProfile> classify_neurons(const ModelParams& params, const SubgroupCatalog& catalog,
                                                   const ClassifyOptions& opt = {}) {
    params.check_shapes();
    for (const auto& H : catalog.subgroups()) {
        if (H.n != params.n) throw DimensionError("classify_neurons: catalog from a different S_n");
        if (H.order() == 1 || H.order() == params.group_order())
            throw StructureError("classify_neurons: catalog must exclude {e} and G");
    }
    const Matrix left = params.l * params.e_l;
    const Matrix right = params.r * params.e_r;
    std::vector<NeuronProfile> out(static_cast<std::size_t>(params.w));
    for_each_chunk(out.size(), 1, [&](std::size_t, std::size_t b, std::size_t) {
        const auto k = static_cast<Eigen::Index>(b);
        out[b] = classify_neuron(left.row(k), right.row(k), params.n, catalog, opt);
        out[b].neuron = b;
    });
    return out;
}

/// Fraction of neurons per label, labels sorted.
inline std::vector<std::pair<std::string, double>> circuit_distribution(const std::vector<NeuronProfile>& profiles) {
    std::map<std::string, std::size_t> counts;
    for (const auto& p : profiles) ++counts[p.label];
    std::vector<std::pair<std::string, double>> out;
    for (const auto& [label, c] : counts)
        out.emplace_back(label, static_cast<double>(c) / static_cast<double>(profiles.size()));
    return out;
}

// ---------------------------------------------------------------------------
// Ablation

enum class AblationMetric { top_irrep_share, coset_concentration };
enum class AblationMode { keep_above, remove_above };

struct AblationSpec {
    AblationMetric metric = AblationMetric::top_irrep_share;
    double threshold = 0.9;
    AblationMode mode = AblationMode::keep_above;
};

/// top_irrep_share, or 1 - max(left score, right score) for coset
/// concentration; 0 for dead or one-sided neurons.
inline double ablation_metric(const NeuronProfile& p, AblationMetric m) {
    if (m == AblationMetric::top_irrep_share) return p.top_irrep_share;
    if (!p.best_left || !p.best_right) return 0.0;
    return std::clamp(1.0 - std::max(p.best_left->score, p.best_right->score), 0.0, 1.0);
}

/// keep_above keeps neurons with metric >= threshold; remove_above drops
/// exactly those.
inline std::vector<char> ablation_mask(const std::vector<NeuronProfile>& profiles, const AblationSpec& spec) {
    if (!(spec.threshold >= 0.0 && spec.threshold <= 1.0)) throw ConfigError("ablation threshold must lie in [0, 1]");
    std::vector<char> keep;
    keep.reserve(profiles.size());
    for (const auto& p : profiles) {
        const bool above = ablation_metric(p, spec.metric) >= spec.threshold;
        keep.push_back(spec.mode == AblationMode::keep_above ? above : !above);
    }
    return keep;
}

struct AblationResult {
    ModelParams params;
    EvalResult eval;
    std::vector<char> kept;
    std::size_t kept_count = 0;
};

/// Zeroes the unembedding columns of masked neurons and evaluates on `pairs`
/// (all pairs when empty).
inline AblationResult ablate(const ModelParams& params, const AblationSpec& spec,
                             const std::vector<NeuronProfile>& profiles, std::span<const Pair> pairs = {}) {
    if (profiles.size() != static_cast<std::size_t>(params.w))
        throw DimensionError("ablate: profile count does not match the hidden width");
    AblationResult out;
    out.kept = ablation_mask(profiles, spec);
    out.params = params;
    for (std::size_t k = 0; k < out.kept.size(); ++k) {
        if (out.kept[k]) ++out.kept_count;
        else out.params.u.col(static_cast<Eigen::Index>(k)).setZero();
    }
    std::vector<Pair> all;
    if (pairs.empty()) {
        all = all_pairs(params.n);
        pairs = all;
    }
    out.eval = evaluate(out.params, pairs);
    return out;
}

// ---------------------------------------------------------------------------
// Interventions

enum class InterventionKind {
    none,
    embedding_swap,
    sign_flip_left,
    sign_flip_right,
    sign_flip_both,
    abs_nonlinearity,
    perturb,
    relu_clip_patch
};

inline const char* to_string(InterventionKind k) {
    switch (k) {
    case InterventionKind::none: return "none";
    case InterventionKind::embedding_swap: return "embedding_swap";
    case InterventionKind::sign_flip_left: return "sign_flip_left";
    case InterventionKind::sign_flip_right: return "sign_flip_right";
    case InterventionKind::sign_flip_both: return "sign_flip_both";
    case InterventionKind::abs_nonlinearity: return "abs";
    case InterventionKind::perturb: return "perturb";
    case InterventionKind::relu_clip_patch: return "relu_clip_patch";
    }
    return "?";
}

inline InterventionKind parse_intervention_kind(const std::string& s) {
    for (auto k : {InterventionKind::none, InterventionKind::embedding_swap, InterventionKind::sign_flip_left,
                   InterventionKind::sign_flip_right, InterventionKind::sign_flip_both,
                   InterventionKind::abs_nonlinearity, InterventionKind::perturb, InterventionKind::relu_clip_patch})
        if (s == to_string(k)) return k;
    if (s == "abs_nonlinearity") return InterventionKind::abs_nonlinearity;
    throw ConfigError("unknown intervention kind '" + s + "'");
}

struct InterventionSpec {
    InterventionKind kind = InterventionKind::none;
    double mean = 0.0;          // perturb
    double std = 1.0;           // perturb; replacement spread is measured for relu_clip_patch
    bool pre_activation = false; // perturb before the nonlinearity instead of after
    double threshold = 1e-3;    // relu_clip_patch
    std::uint64_t seed = 0;
};

/// Noise for neuron k on the pair at global position `pos`; independent of
/// chunking and thread count.
inline double intervention_noise(std::uint64_t seed, std::size_t pos, Eigen::Index k, Eigen::Index w) {
    return counter_normal(seed, static_cast<std::uint64_t>(pos) * static_cast<std::uint64_t>(w) +
                                    static_cast<std::uint64_t>(k));
}

inline EvalResult intervene(const ModelParams& params, const InterventionSpec& spec, std::span<const Pair> pairs) {
    ModelParams p = params;
    ForwardHooks hooks;
    const auto w = static_cast<Eigen::Index>(params.w);
    switch (spec.kind) {
    case InterventionKind::none: break;
    case InterventionKind::embedding_swap: std::swap(p.e_l, p.e_r); break;
    case InterventionKind::sign_flip_left: p.e_l = -p.e_l; break;
    case InterventionKind::sign_flip_right: p.e_r = -p.e_r; break;
    case InterventionKind::sign_flip_both:
        p.e_l = -p.e_l;
        p.e_r = -p.e_r;
        break;
    case InterventionKind::abs_nonlinearity: hooks.activation = Activation::abs; break;
    case InterventionKind::perturb: {
        if (!(spec.std >= 0.0) || !std::isfinite(spec.mean)) throw ConfigError("perturb: invalid mean/std");
        auto add = [&spec, w](Matrix& m, std::size_t first) {
            for (Eigen::Index c = 0; c < m.cols(); ++c)
                for (Eigen::Index k = 0; k < m.rows(); ++k)
                    m(k, c) += spec.mean +
                               spec.std * intervention_noise(spec.seed, first + static_cast<std::size_t>(c), k, w);
        };
        if (spec.pre_activation) hooks.on_pre = add;
        else hooks.on_acts = add;
        break;
    }
    case InterventionKind::relu_clip_patch: {
        if (!(spec.threshold >= 0.0)) throw ConfigError("relu_clip_patch: threshold must be >= 0");
        // per-neuron mean and spread of the activations above threshold
        std::vector<double> sum(static_cast<std::size_t>(w), 0.0), sq(sum), cnt(sum);
        const std::size_t chunks = chunk_count(pairs.size(), kPairChunk);
        std::vector<Matrix> partial(chunks);
        ForwardHooks stats;
        stats.on_acts = [&](Matrix& acts, std::size_t first) {
            Matrix s = Matrix::Zero(w, 3);
            for (Eigen::Index c = 0; c < acts.cols(); ++c)
                for (Eigen::Index k = 0; k < w; ++k)
                    if (acts(k, c) > spec.threshold) {
                        s(k, 0) += acts(k, c);
                        s(k, 1) += acts(k, c) * acts(k, c);
                        s(k, 2) += 1.0;
                    }
            partial[first / kPairChunk] = std::move(s);
        };
        evaluate(p, pairs, stats);
        std::vector<double> mu(sum.size(), 0.0), sd(sum.size(), 0.0);
        for (std::size_t k = 0; k < sum.size(); ++k) {
            for (const auto& s : partial) {
                sum[k] += s(static_cast<Eigen::Index>(k), 0);
                sq[k] += s(static_cast<Eigen::Index>(k), 1);
                cnt[k] += s(static_cast<Eigen::Index>(k), 2);
            }
            if (cnt[k] > 0) {
                mu[k] = sum[k] / cnt[k];
                sd[k] = std::sqrt(std::max(0.0, sq[k] / cnt[k] - mu[k] * mu[k]));
            }
        }
        hooks.on_acts = [&spec, w, mu, sd](Matrix& acts, std::size_t first) {
            for (Eigen::Index c = 0; c < acts.cols(); ++c)
                for (Eigen::Index k = 0; k < w; ++k)
                    if (acts(k, c) > spec.threshold)
                        acts(k, c) = mu[static_cast<std::size_t>(k)] +
                                     sd[static_cast<std::size_t>(k)] *
                                         intervention_noise(spec.seed, first + static_cast<std::size_t>(c), k, w);
        };
        break;
    }
    }
    return evaluate(p, pairs, hooks);
}

// ---------------------------------------------------------------------------
// Attribution and unembedding structure

/// U[:, subset] acts[subset] for one input pair.
inline Eigen::VectorXd logit_attribution(const ModelParams& params, std::span<const std::size_t> subset, Rank i,
                                         Rank j) {
    const auto f = forward(params, i, j);
    Eigen::VectorXd acts = Eigen::VectorXd::Zero(f.acts.size());
    for (std::size_t k : subset) {
        if (k >= static_cast<std::size_t>(params.w)) throw RangeError("logit_attribution: neuron index out of range");
        acts(static_cast<Eigen::Index>(k)) = f.acts(static_cast<Eigen::Index>(k));
    }
    return params.u * acts;
}

struct UnembedCorrelation {
    Matrix correlation;             // in `order`
    std::vector<std::size_t> order; // neurons sorted by (label, index)
    std::vector<char> constant;     // per position in `order`
};

/// Pearson correlation of U's columns; a constant column correlates 0 with
/// everything (itself included) and is flagged.
inline UnembedCorrelation unembed_correlation(const ModelParams& params, const std::vector<NeuronProfile>& profiles) {
    if (profiles.size() != static_cast<std::size_t>(params.w))
        throw DimensionError("unembed_correlation: profile count does not match the hidden width");
    UnembedCorrelation out;
    out.order.resize(profiles.size());
    for (std::size_t k = 0; k < profiles.size(); ++k) out.order[k] = k;
    std::stable_sort(out.order.begin(), out.order.end(),
                     [&](std::size_t a, std::size_t b) { return profiles[a].label < profiles[b].label; });
    const auto m = static_cast<Eigen::Index>(out.order.size());
    Matrix centered(params.u.rows(), m);
    std::vector<double> norm(out.order.size());
    for (Eigen::Index c = 0; c < m; ++c) {
        const auto col = params.u.col(static_cast<Eigen::Index>(out.order[static_cast<std::size_t>(c)]));
        centered.col(c) = col.array() - col.mean();
        norm[static_cast<std::size_t>(c)] = centered.col(c).norm();
        const double scale = col.cwiseAbs().maxCoeff();
        out.constant.push_back(!(norm[static_cast<std::size_t>(c)] > 1e-12 * std::max(scale, 1e-300)));
    }
    out.correlation = Matrix::Zero(m, m);
    for (Eigen::Index a = 0; a < m; ++a)
        for (Eigen::Index b = a; b < m; ++b) {
            if (out.constant[static_cast<std::size_t>(a)] || out.constant[static_cast<std::size_t>(b)]) continue;
            const double r = std::clamp(centered.col(a).dot(centered.col(b)) /
                                            (norm[static_cast<std::size_t>(a)] * norm[static_cast<std::size_t>(b)]),
                                        -1.0, 1.0);
            out.correlation(a, b) = out.correlation(b, a) = r;
        }
    return out;
}

// ---------------------------------------------------------------------------
// CSV exports

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
}

inline void write_profiles_csv(const std::filesystem::path& file, const std::vector<NeuronProfile>& profiles) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw Error("cannot write " + file.string());
    out << "neuron,top_irrep,top_irrep_share,entropy,best_left_subgroup,left_score,best_right_subgroup,right_score,"
           "label\n";
    for (const auto& p : profiles) {
        out << p.neuron << ',' << csv_field(p.dead ? "" : p.top_irrep.to_string()) << ','
            << format_double(p.top_irrep_share) << ',' << format_double(p.fourier_entropy) << ','
            << csv_field(p.best_left_name) << ',' << (p.best_left ? format_double(p.best_left->score) : "") << ','
            << csv_field(p.best_right_name) << ',' << (p.best_right ? format_double(p.best_right->score) : "")
            << ',' << csv_field(p.label) << '\n';
    }
}

inline void write_distribution_csv(const std::filesystem::path& file, const std::vector<NeuronProfile>& profiles) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw Error("cannot write " + file.string());
    out << "label,neuron_fraction\n";
    for (const auto& [label, frac] : circuit_distribution(profiles))
        out << csv_field(label) << ',' << format_double(frac) << '\n';
}

inline void write_correlation_csv(const std::filesystem::path& file, const UnembedCorrelation& c,
                                  const std::vector<NeuronProfile>& profiles) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw Error("cannot write " + file.string());
    out << "neuron,label,constant";
    for (std::size_t k : c.order) out << ",n" << k;
    out << '\n';
    for (std::size_t a = 0; a < c.order.size(); ++a) {
        out << c.order[a] << ',' << csv_field(profiles[c.order[a]].label) << ',' << int(c.constant[a]);
        for (std::size_t b = 0; b < c.order.size(); ++b)
            out << ',' << format_double(c.correlation(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)));
        out << '\n';
    }
}

} // namespace cosetlab
