#pragma once

// The one-hidden-layer group multiplication network:
//   logits(i, j) = U relu(L E_l[:, i] + R E_r[:, j])
// with one-hot inputs indexed by element rank and no biases, plus full-batch
// AdamW training on the cross-entropy of the product's rank.

#include "cosetlab/fourier.hpp"
#include "cosetlab/parallel.hpp"
#include "cosetlab/permutation.hpp"
#include "cosetlab/rng.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace cosetlab {

/// Largest n the network layer accepts: the product table of S_6 has 518,400 pairs.
inline constexpr int kMaxModelDegree = 6;

struct Pair {
    Rank left = 0;
    Rank right = 0;
    friend bool operator==(const Pair&, const Pair&) = default;
};

struct ModelParams {
    int n = 0;
    int d = 0;
    int w = 0;
    Matrix e_l; // d x |G|
    Matrix e_r; // d x |G|
    Matrix l;   // w x d
    Matrix r;   // w x d
    Matrix u;   // |G| x w

    std::size_t group_order() const { return factorial(n); }

    std::size_t parameter_count() const {
        const std::size_t g = group_order();
        return 2 * d * g + 2 * w * d + g * w;
    }

    static ModelParams zeros(int n, int d, int w) {
        if (n < 2 || n > kMaxModelDegree)
            throw CapacityError("model: n must be in 2.." + std::to_string(kMaxModelDegree));
        if (d < 1 || w < 1) throw RangeError("model: d and w must be positive");
        ModelParams p;
        p.n = n;
        p.d = d;
        p.w = w;
        const auto g = static_cast<Eigen::Index>(factorial(n));
        p.e_l = Matrix::Zero(d, g);
        p.e_r = Matrix::Zero(d, g);
        p.l = Matrix::Zero(w, d);
        p.r = Matrix::Zero(w, d);
        p.u = Matrix::Zero(g, w);
        return p;
    }

    void check_shapes() const {
        const auto g = static_cast<Eigen::Index>(group_order());
        if (e_l.rows() != d || e_l.cols() != g || e_r.rows() != d || e_r.cols() != g || l.rows() != w ||
            l.cols() != d || r.rows() != w || r.cols() != d || u.rows() != g || u.cols() != w)
            throw DimensionError("model parameters do not match (n, d, w)");
    }

    template <class Fn>
    void for_each_matrix(Fn&& fn) {
        fn("e_l", e_l);
        fn("e_r", e_r);
        fn("l", l);
        fn("r", r);
        fn("u", u);
    }
    template <class Fn>
    void for_each_matrix(Fn&& fn) const {
        fn("e_l", e_l);
        fn("e_r", e_r);
        fn("l", l);
        fn("r", r);
        fn("u", u);
    }
};

/// Gaussian entries with standard deviation 1/sqrt(fan_in), drawn row-major,
/// matrix by matrix in the order e_l, e_r, l, r, u.
inline ModelParams init_params(int n, int d, int w, std::uint64_t seed) {
    auto p = ModelParams::zeros(n, d, w);
    Rng rng(seed);
    const double g = static_cast<double>(p.group_order());
    auto fill = [&](Matrix& m, double fan_in) {
        const double scale = 1.0 / std::sqrt(fan_in);
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = scale * rng.normal();
    };
    fill(p.e_l, g);
    fill(p.e_r, g);
    fill(p.l, d);
    fill(p.r, d);
    fill(p.u, w);
    return p;
}

/// Every (left, right) pair, left-major.
inline std::vector<Pair> all_pairs(int n) {
    const auto g = static_cast<Rank>(factorial(n));
    std::vector<Pair> out;
    out.reserve(static_cast<std::size_t>(g) * g);
    for (Rank i = 0; i < g; ++i)
        for (Rank j = 0; j < g; ++j) out.push_back({i, j});
    return out;
}

inline Rank product_rank(int n, const Pair& p) { return symmetric_group(n).multiply(p.left, p.right); }

struct ForwardResult {
    Eigen::VectorXd logits;
    Eigen::VectorXd pre;
    Eigen::VectorXd acts;
};

enum class Activation { relu, abs };

inline ForwardResult forward(const ModelParams& params, Rank i, Rank j, Activation act = Activation::relu) {
    const auto g = params.group_order();
    if (i >= g || j >= g) throw RangeError("forward: rank out of range");
    ForwardResult out;
    out.pre = params.l * params.e_l.col(i) + params.r * params.e_r.col(j);
    out.acts = act == Activation::relu ? Eigen::VectorXd(out.pre.cwiseMax(0.0)) : Eigen::VectorXd(out.pre.cwiseAbs());
    out.logits = params.u * out.acts;
    return out;
}

/// Hooks into a batched forward pass. Matrices are w x m for a chunk of m
/// pairs; `first` is the chunk's offset in the evaluated pair list.
struct ForwardHooks {
    Activation activation = Activation::relu;
    std::function<void(Matrix& pre, std::size_t first)> on_pre;
    std::function<void(Matrix& acts, std::size_t first)> on_acts;
};

inline constexpr std::size_t kPairChunk = 2048;

namespace detail {

struct HiddenTables {
    Matrix left;  // L E_l, w x |G|
    Matrix right; // R E_r, w x |G|
};

inline HiddenTables hidden_tables(const ModelParams& p) { return {p.l * p.e_l, p.r * p.e_r}; }

inline void chunk_pre(const HiddenTables& t, std::span<const Pair> pairs, std::size_t begin, std::size_t end,
                      Matrix& pre) {
    pre.resize(t.left.rows(), static_cast<Eigen::Index>(end - begin));
    for (std::size_t k = begin; k < end; ++k)
        pre.col(static_cast<Eigen::Index>(k - begin)) = t.left.col(pairs[k].left) + t.right.col(pairs[k].right);
}

inline void activate(const Matrix& pre, Matrix& acts, Activation a) {
    acts = a == Activation::relu ? Matrix(pre.cwiseMax(0.0)) : Matrix(pre.cwiseAbs());
}

/// First index of the maximum.
inline Eigen::Index argmax(const Eigen::Ref<const Eigen::VectorXd>& v) {
    Eigen::Index best = 0;
    for (Eigen::Index k = 1; k < v.size(); ++k)
        if (v(k) > v(best)) best = k;
    return best;
}

/// Cross-entropy of one logit column against the target row.
inline double cross_entropy(const Eigen::Ref<const Eigen::VectorXd>& logits, Eigen::Index target) {
    const double m = logits.maxCoeff();
    return m + std::log((logits.array() - m).exp().sum()) - logits(target);
}

} // namespace detail

struct EvalResult {
    double accuracy = 0.0;
    double loss = 0.0;
    std::size_t count = 0;
};

/// Accuracy (argmax, first index on ties) and mean cross-entropy.
inline EvalResult evaluate(const ModelParams& params, std::span<const Pair> pairs, const ForwardHooks& hooks = {}) {
    if (pairs.empty()) throw RangeError("evaluate: empty pair list");
    params.check_shapes();
    const auto tables = detail::hidden_tables(params);
    const auto& G = symmetric_group(params.n);
    const std::size_t chunks = chunk_count(pairs.size(), kPairChunk);
    std::vector<double> loss(chunks, 0.0);
    std::vector<std::size_t> correct(chunks, 0);
    for_each_chunk(pairs.size(), kPairChunk, [&](std::size_t c, std::size_t begin, std::size_t end) {
        Matrix pre, acts;
        detail::chunk_pre(tables, pairs, begin, end, pre);
        if (hooks.on_pre) hooks.on_pre(pre, begin);
        detail::activate(pre, acts, hooks.activation);
        if (hooks.on_acts) hooks.on_acts(acts, begin);
        const Matrix logits = params.u * acts;
        for (std::size_t k = begin; k < end; ++k) {
            const auto col = static_cast<Eigen::Index>(k - begin);
            const auto target = static_cast<Eigen::Index>(G.multiply(pairs[k].left, pairs[k].right));
            correct[c] += detail::argmax(logits.col(col)) == target;
            loss[c] += detail::cross_entropy(logits.col(col), target);
        }
    });
    EvalResult out;
    out.count = pairs.size();
    std::size_t hits = 0;
    for (std::size_t c = 0; c < chunks; ++c) {
        hits += correct[c];
        out.loss += loss[c];
    }
    out.accuracy = static_cast<double>(hits) / static_cast<double>(pairs.size());
    out.loss /= static_cast<double>(pairs.size());
    return out;
}

/// Gradients of the mean cross-entropy, same shapes as the parameters.
struct Gradients {
    Matrix e_l, e_r, l, r, u;
};

inline double loss_and_gradients(const ModelParams& params, std::span<const Pair> pairs, Gradients& grads) {
    if (pairs.empty()) throw RangeError("loss_and_gradients: empty pair list");
    params.check_shapes();
    const auto tables = detail::hidden_tables(params);
    const auto& G = symmetric_group(params.n);
    const auto g = static_cast<Eigen::Index>(params.group_order());
    const std::size_t chunks = chunk_count(pairs.size(), kPairChunk);
    struct Partial {
        double loss = 0.0;
        Matrix du, da, db;
    };
    std::vector<Partial> parts(chunks);
    const double inv_n = 1.0 / static_cast<double>(pairs.size());
    for_each_chunk(pairs.size(), kPairChunk, [&](std::size_t c, std::size_t begin, std::size_t end) {
        auto& part = parts[c];
        Matrix pre, acts;
        detail::chunk_pre(tables, pairs, begin, end, pre);
        detail::activate(pre, acts, Activation::relu);
        Matrix dlogits = params.u * acts;
        for (std::size_t k = begin; k < end; ++k) {
            const auto col = static_cast<Eigen::Index>(k - begin);
            const auto target = static_cast<Eigen::Index>(G.multiply(pairs[k].left, pairs[k].right));
            auto z = dlogits.col(col);
            const double m = z.maxCoeff();
            z.array() = (z.array() - m).exp();
            const double s = z.sum();
            part.loss += std::log(s) - std::log(z(target));
            z /= s;
            z(target) -= 1.0;
        }
        dlogits *= inv_n;
        part.du.noalias() = dlogits * acts.transpose();
        Matrix dpre = params.u.transpose() * dlogits;
        dpre.array() *= (pre.array() > 0.0).cast<double>();
        part.da = Matrix::Zero(params.w, g);
        part.db = Matrix::Zero(params.w, g);
        for (std::size_t k = begin; k < end; ++k) {
            const auto col = static_cast<Eigen::Index>(k - begin);
            part.da.col(pairs[k].left) += dpre.col(col);
            part.db.col(pairs[k].right) += dpre.col(col);
        }
    });
    double loss = 0.0;
    Matrix da = Matrix::Zero(params.w, g), db = Matrix::Zero(params.w, g);
    grads.u = Matrix::Zero(g, params.w);
    for (const auto& part : parts) {
        loss += part.loss;
        grads.u += part.du;
        da += part.da;
        db += part.db;
    }
    grads.l.noalias() = da * params.e_l.transpose();
    grads.r.noalias() = db * params.e_r.transpose();
    grads.e_l.noalias() = params.l.transpose() * da;
    grads.e_r.noalias() = params.r.transpose() * db;
    return loss * inv_n;
}

struct TrainConfig {
    int n = 4;
    int d = 64;
    int w = 128;
    std::uint64_t seed = 0;
    long epochs = 20000;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.98;
    double epsilon = 1e-8;
    double weight_decay = 1.0;
    double train_fraction = 0.5;
    long log_every = 100;
    bool log_entropy = true;
    /// Stop this many epochs after train and test accuracy first reach 1; -1 never stops early.
    long stop_after_perfect = -1;

    void validate() const {
        if (n < 2 || n > kMaxModelDegree)
            throw CapacityError("train: n must be in 2.." + std::to_string(kMaxModelDegree));
        if (d < 1 || w < 1) throw ConfigError("train: d and w must be positive");
        if (epochs < 0) throw ConfigError("train: epochs must be non-negative");
        if (!(learning_rate > 0.0)) throw ConfigError("train: learning_rate must be positive");
        if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0)) throw ConfigError("train: betas must lie in [0, 1)");
        if (!(epsilon > 0.0)) throw ConfigError("train: epsilon must be positive");
        if (!(weight_decay >= 0.0)) throw ConfigError("train: weight_decay must be non-negative");
        if (!(train_fraction > 0.0 && train_fraction <= 1.0)) throw ConfigError("train: train_fraction must lie in (0, 1]");
        if (log_every < 1) throw ConfigError("train: log_every must be positive");
    }
};

struct HistoryRecord {
    long epoch = 0;
    double train_loss = 0.0;
    double test_loss = std::numeric_limits<double>::quiet_NaN();
    double train_acc = 0.0;
    double test_acc = std::numeric_limits<double>::quiet_NaN();
    double entropy_e_l = std::numeric_limits<double>::quiet_NaN();
    double entropy_e_r = std::numeric_limits<double>::quiet_NaN();
    double entropy_u = std::numeric_limits<double>::quiet_NaN();
};

struct TrainHistory {
    std::vector<HistoryRecord> records;
};

struct DataSplit {
    std::vector<Pair> train;
    std::vector<Pair> test;
};

inline std::uint64_t split_seed(std::uint64_t seed) { return mix64(seed ^ 0x5eedc0de5eedc0deull); }

/// Seeded shuffle of all pairs; the first round(fraction * |G|^2) train.
inline DataSplit split_pairs(int n, double fraction, std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction <= 1.0)) throw ConfigError("split: train_fraction must lie in (0, 1]");
    auto pairs = all_pairs(n);
    Rng rng(split_seed(seed));
    rng.shuffle(std::span<Pair>(pairs));
    auto cut = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(pairs.size())));
    cut = std::clamp<std::size_t>(cut, 1, pairs.size());
    DataSplit s;
    s.train.assign(pairs.begin(), pairs.begin() + static_cast<std::ptrdiff_t>(cut));
    s.test.assign(pairs.begin() + static_cast<std::ptrdiff_t>(cut), pairs.end());
    return s;
}

/// Mean Fourier entropy over the rows of a matrix whose rows are functions on
/// S_n; rows with zero power are skipped. NaN if every row is zero.
inline double mean_row_entropy(int n, const Matrix& rows) {
    double sum = 0.0;
    int count = 0;
    for (Eigen::Index k = 0; k < rows.rows(); ++k) {
        GroupFunction f(n, std::vector<double>(rows.row(k).begin(), rows.row(k).end()));
        bool zero = true;
        for (double v : f.values) zero = zero && v == 0.0;
        if (zero) continue;
        sum += fourier_entropy(f);
        ++count;
    }
    return count ? sum / count : std::numeric_limits<double>::quiet_NaN();
}

struct TrainResult {
    ModelParams params;
    TrainHistory history;
    DataSplit split;
    long epochs_run = 0;
};

namespace detail {

struct AdamState {
    Gradients m, v;
    long step = 0;
};

inline void adamw_step(ModelParams& p, const Gradients& g, AdamState& s, const TrainConfig& c) {
    ++s.step;
    const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(s.step));
    const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(s.step));
    auto update = [&](Matrix& w, const Matrix& grad, Matrix& m, Matrix& v) {
        if (m.size() == 0) {
            m = Matrix::Zero(w.rows(), w.cols());
            v = Matrix::Zero(w.rows(), w.cols());
        }
        w *= 1.0 - c.learning_rate * c.weight_decay;
        m = c.beta1 * m + (1.0 - c.beta1) * grad;
        v = c.beta2 * v + (1.0 - c.beta2) * grad.cwiseProduct(grad);
        w.array() -= c.learning_rate * (m.array() / bc1) / ((v.array() / bc2).sqrt() + c.epsilon);
    };
    update(p.e_l, g.e_l, s.m.e_l, s.v.e_l);
    update(p.e_r, g.e_r, s.m.e_r, s.v.e_r);
    update(p.l, g.l, s.m.l, s.v.l);
    update(p.r, g.r, s.m.r, s.v.r);
    update(p.u, g.u, s.m.u, s.v.u);
}

} // namespace detail

/// Full-batch AdamW with decoupled weight decay; one epoch is one update on
/// the whole training split. Throws DivergenceError on a non-finite loss.
inline TrainResult train(const TrainConfig& config, const std::function<void(const HistoryRecord&)>& on_log = {}) {
    config.validate();
    TrainResult out;
    out.params = init_params(config.n, config.d, config.w, config.seed);
    out.split = split_pairs(config.n, config.train_fraction, config.seed);
    detail::AdamState state;
    Gradients grads;
    long perfect_since = -1;

    auto log = [&](long epoch, double train_loss) {
        HistoryRecord rec;
        rec.epoch = epoch;
        const auto tr = evaluate(out.params, out.split.train);
        rec.train_loss = train_loss;
        rec.train_acc = tr.accuracy;
        if (!out.split.test.empty()) {
            const auto te = evaluate(out.params, out.split.test);
            rec.test_loss = te.loss;
            rec.test_acc = te.accuracy;
        }
        if (config.log_entropy) {
            rec.entropy_e_l = mean_row_entropy(config.n, out.params.e_l);
            rec.entropy_e_r = mean_row_entropy(config.n, out.params.e_r);
            rec.entropy_u = mean_row_entropy(config.n, out.params.u.transpose());
        }
        out.history.records.push_back(rec);
        if (on_log) on_log(rec);
        return rec;
    };

    for (long epoch = 0; epoch < config.epochs; ++epoch) {
        const double loss = loss_and_gradients(out.params, out.split.train, grads);
        if (!std::isfinite(loss))
            throw DivergenceError("train: loss became " + std::to_string(loss) + " at epoch " + std::to_string(epoch));
        if (epoch % config.log_every == 0) {
            const auto rec = log(epoch, loss);
            const bool perfect = rec.train_acc == 1.0 && (out.split.test.empty() || rec.test_acc == 1.0);
            if (perfect && perfect_since < 0) perfect_since = epoch;
            if (!perfect) perfect_since = -1;
        }
        if (config.stop_after_perfect >= 0 && perfect_since >= 0 && epoch - perfect_since >= config.stop_after_perfect)
            break;
        detail::adamw_step(out.params, grads, state, config);
        out.epochs_run = epoch + 1;
    }
    if (out.history.records.empty() || out.history.records.back().epoch != out.epochs_run) {
        const double final_loss = evaluate(out.params, out.split.train).loss;
        if (!std::isfinite(final_loss)) throw DivergenceError("train: final loss is not finite");
        log(out.epochs_run, final_loss);
    }
    return out;
}

} // namespace cosetlab
