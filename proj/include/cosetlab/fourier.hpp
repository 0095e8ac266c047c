#pragma once

// Group Fourier transform over S_n: f^(rho) = sum_g f(g) rho(g), its inverse
// f(g) = 1/|G| sum_rho d_rho tr[f^(rho) rho(g^-1)], a fast transform that
// recurses along S_1 < S_2 < ... < S_n, and the spectral summaries built on
// top (projection basis, per-irrep power, contributions, entropy).

#include "cosetlab/representation.hpp"
#include "cosetlab/subgroup.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

namespace cosetlab {

/// A real function on S_n, indexed by element rank.
struct GroupFunction {
    int n = 0;
    std::vector<double> values;

    GroupFunction() = default;
    GroupFunction(int n_, std::vector<double> v) : n(n_), values(std::move(v)) {
        if (values.size() != factorial(n)) throw DimensionError("GroupFunction: length must be n!");
    }
    static GroupFunction zeros(int n) { return GroupFunction(n, std::vector<double>(factorial(n), 0.0)); }

    double operator[](Rank r) const { return values[r]; }
    double& operator[](Rank r) { return values[r]; }
};

struct FourierCoefficients {
    int n = 0;
    std::vector<Partition> partitions; // partitions(n) order
    std::vector<Matrix> coeffs;        // one d_lambda x d_lambda block each

    const Matrix& at(const Partition& lambda) const {
        for (std::size_t i = 0; i < partitions.size(); ++i)
            if (partitions[i] == lambda) return coeffs[i];
        throw IncompleteSpectrumError("no coefficient for partition " + lambda.to_string());
    }
};

/// Scalar multiply-add counts, for comparing the two transforms.
struct TransformStats {
    std::uint64_t multiply_adds = 0;
    double seconds = 0.0;
};

/// Direct summation over all group elements.
inline FourierCoefficients fourier_transform(const GroupFunction& f, TransformStats* stats = nullptr) {
    const auto start = std::chrono::steady_clock::now();
    const auto& table = representation_table(f.n);
    const auto& irs = irreps(f.n);
    FourierCoefficients out;
    out.n = f.n;
    std::uint64_t ops = 0;
    for (std::size_t l = 0; l < irs.size(); ++l) {
        const int d = irs[l].dim();
        Matrix acc = Matrix::Zero(d, d);
        for (Rank g = 0; g < f.values.size(); ++g) {
            if (f.values[g] != 0.0) acc.noalias() += f.values[g] * table.at(l, g);
            ops += static_cast<std::uint64_t>(d) * d;
        }
        out.partitions.push_back(irs[l].partition());
        out.coeffs.push_back(std::move(acc));
    }
    if (stats) {
        stats->multiply_adds = ops;
        stats->seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    return out;
}

namespace detail {

/// For each i in 1..n, the ranks in S_n of c_i * h for h in S_{n-1} (fixing n),
/// listed in S_{n-1} rank order, where c_i = s_i s_{i+1} ... s_{n-1} is the
/// cycle with n in position i. The left cosets c_i S_{n-1} partition S_n.
struct CosetIndex {
    std::vector<std::vector<Rank>> ranks; // [i-1][rank in S_{n-1}]
};

inline const CosetIndex& coset_index(int n) {
    static std::mutex mutex;
    static std::map<int, std::unique_ptr<CosetIndex>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[n];
    if (!slot) {
        auto idx = std::make_unique<CosetIndex>();
        const auto sub_order = factorial(n - 1);
        for (int i = 1; i <= n; ++i) {
            Permutation c(n);
            for (int k = n - 1; k >= i; --k) c = compose(Permutation::adjacent(n, k - 1), c);
            std::vector<Rank> row(sub_order);
            for (std::uint64_t r = 0; r < sub_order; ++r) {
                const auto h = unrank(n - 1, r).one_line();
                std::vector<int> line(h);
                line.push_back(n);
                row[r] = rank(compose(c, Permutation::from_one_line(line)));
            }
            idx->ranks.push_back(std::move(row));
        }
        slot = std::move(idx);
    }
    return *slot;
}

inline std::vector<Matrix> fast_transform(int n, std::span<const double> f, std::uint64_t& ops) {
    if (n == 1) return {Matrix::Constant(1, 1, f[0])};
    const auto& idx = coset_index(n);
    const auto& irs = irreps(n);
    const auto& sub_irs = irreps(n - 1);

    std::vector<std::vector<Matrix>> sub(n);
    std::vector<double> restricted(factorial(n - 1));
    for (int i = 1; i <= n; ++i) {
        const auto& ranks = idx.ranks[i - 1];
        for (std::size_t r = 0; r < ranks.size(); ++r) restricted[r] = f[ranks[r]];
        sub[i - 1] = fast_transform(n - 1, restricted, ops);
    }

    std::vector<Matrix> out;
    out.reserve(irs.size());
    Matrix block, tmp;
    for (const auto& irr : irs) {
        const int d = irr.dim();
        Matrix acc = Matrix::Zero(d, d);
        for (int i = 1; i <= n; ++i) {
            // f^_lambda restricted to S_{n-1} is block diagonal in this basis.
            block.setZero(d, d);
            for (const auto& b : irr.branches()) {
                std::size_t m = 0;
                while (!(sub_irs[m].partition() == b.mu)) ++m;
                block.block(b.offset, b.offset, b.size, b.size) = sub[i - 1][m];
            }
            // rho(c_i) = rho(s_i) ... rho(s_{n-1}); apply right-most first.
            for (int k = n - 1; k >= i; --k) {
                irr.sparse_generator(k - 1).apply_left(block, tmp);
                block.swap(tmp);
                ops += 2ull * static_cast<std::uint64_t>(d) * d;
            }
            acc += block;
            ops += static_cast<std::uint64_t>(d) * d;
        }
        out.push_back(std::move(acc));
    }
    return out;
}

} // namespace detail

/// Same contract as fourier_transform, computed by the subgroup-tower
/// recursion: f^(lambda) = sum_i rho(c_i) [ (+)_mu (f o c_i)^(mu) ].
inline FourierCoefficients fast_fourier_transform(const GroupFunction& f, TransformStats* stats = nullptr) {
    const auto start = std::chrono::steady_clock::now();
    if (f.values.size() != factorial(f.n)) throw DimensionError("fast_fourier_transform: length must be n!");
    std::uint64_t ops = 0;
    FourierCoefficients out;
    out.n = f.n;
    out.coeffs = detail::fast_transform(f.n, f.values, ops);
    out.partitions = partitions(f.n);
    if (stats) {
        stats->multiply_adds = ops;
        stats->seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    return out;
}

namespace detail {

inline void check_complete(const FourierCoefficients& F) {
    const auto& irs = irreps(F.n);
    if (F.coeffs.size() != irs.size() || F.partitions.size() != irs.size())
        throw IncompleteSpectrumError("spectrum has " + std::to_string(F.coeffs.size()) + " of " +
                                      std::to_string(irs.size()) + " irreps");
    for (std::size_t l = 0; l < irs.size(); ++l) {
        if (!(F.partitions[l] == irs[l].partition()))
            throw IncompleteSpectrumError("spectrum is missing " + irs[l].partition().to_string());
        if (F.coeffs[l].rows() != irs[l].dim() || F.coeffs[l].cols() != irs[l].dim())
            throw DimensionError("coefficient block for " + irs[l].partition().to_string() + " has the wrong shape");
    }
}

} // namespace detail

/// Row g, column lambda: (d_lambda / |G|) tr[f^(lambda) rho_lambda(g^-1)].
/// Row sums give back f; column lambda is the lambda-band of f.
inline Matrix projection_matrix(const FourierCoefficients& F) {
    detail::check_complete(F);
    const auto& table = representation_table(F.n);
    const auto& irs = irreps(F.n);
    const auto order = factorial(F.n);
    Matrix P(static_cast<Eigen::Index>(order), static_cast<Eigen::Index>(irs.size()));
    for (std::size_t l = 0; l < irs.size(); ++l) {
        const double scale = static_cast<double>(irs[l].dim()) / static_cast<double>(order);
        // rho(g^-1) = rho(g)^T, so tr[A rho(g^-1)] = <A, rho(g)>_F.
        for (Rank g = 0; g < order; ++g)
            P(g, static_cast<Eigen::Index>(l)) = scale * F.coeffs[l].cwiseProduct(table.at(l, g)).sum();
    }
    return P;
}

inline Matrix projection_matrix(const GroupFunction& f) { return projection_matrix(fourier_transform(f)); }

inline GroupFunction inverse_fourier(const FourierCoefficients& F) {
    const Matrix P = projection_matrix(F);
    GroupFunction f = GroupFunction::zeros(F.n);
    for (Eigen::Index g = 0; g < P.rows(); ++g) f.values[g] = P.row(g).sum();
    return f;
}

/// Per-partition spectral power: ||f^(lambda)||_F^2 raw, and its share of the
/// total with and without the Plancherel weight d_lambda.
struct SpectrumEntry {
    Partition partition;
    int dim = 0;
    double frobenius_power = 0.0;
    double weighted_share = 0.0;
    double unweighted_share = 0.0;
};

/// Shares are taken over the partitions selected by `include_trivial`.
inline std::vector<SpectrumEntry> spectrum(const FourierCoefficients& F, bool include_trivial = true) {
    detail::check_complete(F);
    std::vector<SpectrumEntry> out;
    double wsum = 0.0, usum = 0.0;
    for (std::size_t l = 0; l < F.coeffs.size(); ++l) {
        SpectrumEntry e;
        e.partition = F.partitions[l];
        e.dim = static_cast<int>(F.coeffs[l].rows());
        e.frobenius_power = F.coeffs[l].squaredNorm();
        const bool trivial = e.partition.rows() == 1;
        if (include_trivial || !trivial) {
            wsum += e.dim * e.frobenius_power;
            usum += e.frobenius_power;
        }
        out.push_back(e);
    }
    for (auto& e : out) {
        const bool counted = include_trivial || e.partition.rows() != 1;
        e.weighted_share = counted && wsum > 0 ? e.dim * e.frobenius_power / wsum : 0.0;
        e.unweighted_share = counted && usum > 0 ? e.frobenius_power / usum : 0.0;
    }
    return out;
}

struct IrrepShare {
    Partition partition;
    double share = 0.0;
};

/// Share of each non-trivial irrep in the spectral power of f, with the
/// Plancherel weight: d_lambda ||f^(lambda)||^2 / sum over non-trivial delta.
/// The trivial irrep is excluded, which is the same as centering f first.
inline std::vector<IrrepShare> irrep_contribution(const FourierCoefficients& F) {
    const auto spec = spectrum(F, /*include_trivial=*/false);
    double total = 0.0, all = 0.0;
    for (const auto& e : spec) {
        all += e.dim * e.frobenius_power;
        if (e.partition.rows() != 1) total += e.dim * e.frobenius_power;
    }
    if (!(total > 1e-20 * all)) throw DegenerateInputError("irrep_contribution: f is constant");
    std::vector<IrrepShare> out;
    for (const auto& e : spec)
        if (e.partition.rows() != 1) out.push_back({e.partition, e.weighted_share});
    return out;
}

inline std::vector<IrrepShare> irrep_contribution(const GroupFunction& f) {
    return irrep_contribution(fourier_transform(f));
}

/// 1 - |H|/|G| on H, -|H|/|G| elsewhere.
inline GroupFunction centered_indicator(const Subgroup& H) {
    const auto order = factorial(H.n);
    if (H.order() == order) throw DegenerateInputError("centered_indicator: H = G has a zero centered indicator");
    const double frac = static_cast<double>(H.order()) / static_cast<double>(order);
    GroupFunction f(H.n, std::vector<double>(order, -frac));
    for (Rank r : H.elements) f.values[r] = 1.0 - frac;
    return f;
}

/// Natural-log Shannon entropy of p_lambda ∝ d_lambda ||f^(lambda)||_F^2 over
/// all irreps (trivial included). At most ln(#partitions).
inline double fourier_entropy(const FourierCoefficients& F) {
    const auto spec = spectrum(F, /*include_trivial=*/true);
    double total = 0.0;
    for (const auto& e : spec) total += e.dim * e.frobenius_power;
    if (!(total > 0.0)) throw DegenerateInputError("fourier_entropy: zero spectral power");
    double h = 0.0;
    for (const auto& e : spec) {
        const double p = e.weighted_share;
        if (p > 0.0) h -= p * std::log(p);
    }
    return h;
}

inline double fourier_entropy(const GroupFunction& f) { return fourier_entropy(fourier_transform(f)); }

/// Multiplicity of the trivial representation of H in rho_lambda restricted
/// to H: (1/|H|) sum_{h in H} chi_lambda(h).
inline int trivial_multiplicity(const Partition& lambda, const Subgroup& H) {
    const auto& table = representation_table(H.n);
    const auto& irs = irreps(H.n);
    std::size_t l = 0;
    while (!(irs[l].partition() == lambda)) ++l;
    double sum = 0.0;
    for (Rank h : H.elements) sum += table.at(l, h).trace();
    return static_cast<int>(std::lround(sum / static_cast<double>(H.order())));
}

/// Partitions lambda whose restriction to H contains the trivial irrep; a
/// function constant on the cosets of H has f^ supported on exactly these.
inline std::vector<Partition> coset_fourier_support(const Subgroup& H) {
    std::vector<Partition> out;
    for (const auto& irr : irreps(H.n))
        if (trivial_multiplicity(irr.partition(), H) > 0) out.push_back(irr.partition());
    return out;
}

} // namespace cosetlab
