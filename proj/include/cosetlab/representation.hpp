#pragma once

// Irreducible representations of S_n in Young's orthogonal form.
//
// Standard tableaux of shape lambda are listed in last-letter order: grouped
// by the row holding n (top row first), each group ordered recursively as the
// tableaux of the shape with n removed. Under this order the restriction of
// rho_lambda to S_{n-1} (permutations fixing n) is block diagonal, one block
// rho_mu per removable corner, which is what the fast transform relies on.

#include "cosetlab/permutation.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <string>
#include <vector>

namespace cosetlab {

using Matrix = Eigen::MatrixXd;

struct Partition {
    std::vector<int> parts; // non-increasing, positive

    int size() const { return std::accumulate(parts.begin(), parts.end(), 0); }
    int rows() const { return static_cast<int>(parts.size()); }

    bool is_valid() const {
        if (parts.empty()) return false;
        for (std::size_t i = 0; i < parts.size(); ++i) {
            if (parts[i] < 1) return false;
            if (i && parts[i] > parts[i - 1]) return false;
        }
        return true;
    }

    /// "(2^2,1)" with repeated parts folded into exponents.
    std::string to_string() const {
        std::string s = "(";
        for (std::size_t i = 0; i < parts.size();) {
            std::size_t j = i;
            while (j < parts.size() && parts[j] == parts[i]) ++j;
            if (i) s += ',';
            s += std::to_string(parts[i]);
            if (j - i > 1) s += '^' + std::to_string(j - i);
            i = j;
        }
        return s + ")";
    }

    friend bool operator==(const Partition&, const Partition&) = default;
    friend auto operator<=>(const Partition& a, const Partition& b) { return a.parts <=> b.parts; }
};

/// Parses "(2,2,1)", "(2^2,1)", "2 2 1" or "221" (single-digit parts).
inline Partition parse_partition(const std::string& text) {
    Partition p;
    std::string t;
    for (char c : text)
        if (c != '(' && c != ')') t += c;
    std::vector<std::string> tokens;
    std::string cur;
    for (char c : t) {
        if (c == ',' || c == ' ') {
            if (!cur.empty()) tokens.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) tokens.push_back(cur);
    if (tokens.size() == 1 && tokens[0].find('^') == std::string::npos && tokens[0].size() > 1) {
        std::vector<std::string> digits;
        for (char c : tokens[0]) digits.emplace_back(1, c);
        tokens = digits;
    }
    for (const auto& tok : tokens) {
        const auto caret = tok.find('^');
        try {
            const int part = std::stoi(tok.substr(0, caret));
            const int reps = caret == std::string::npos ? 1 : std::stoi(tok.substr(caret + 1));
            for (int r = 0; r < reps; ++r) p.parts.push_back(part);
        } catch (const std::exception&) {
            throw ConfigError("cannot parse partition '" + text + "'");
        }
    }
    if (!p.is_valid()) throw ConfigError("'" + text + "' is not a partition");
    return p;
}

/// All partitions of n in descending lexicographic order: (n) first, (1^n) last.
inline std::vector<Partition> partitions(int n) {
    if (n < 1) throw RangeError("partitions: n must be positive");
    std::vector<Partition> out;
    std::vector<int> cur;
    auto rec = [&](auto&& self, int remaining, int max_part) -> void {
        if (remaining == 0) {
            out.push_back({cur});
            return;
        }
        for (int k = std::min(remaining, max_part); k >= 1; --k) {
            cur.push_back(k);
            self(self, remaining - k, k);
            cur.pop_back();
        }
    };
    rec(rec, n, n);
    return out;
}

/// Hook-length formula.
inline std::uint64_t degree(const Partition& lambda) {
    const int n = lambda.size();
    std::vector<int> conj(lambda.parts.empty() ? 0 : lambda.parts[0], 0);
    for (int r : lambda.parts)
        for (int c = 0; c < r; ++c) ++conj[c];
    std::uint64_t num = factorial(n);
    std::uint64_t den = 1;
    for (int i = 0; i < lambda.rows(); ++i)
        for (int j = 0; j < lambda.parts[i]; ++j) den *= static_cast<std::uint64_t>(lambda.parts[i] - j - 1 + conj[j] - i);
    return num / den;
}

/// A standard tableau stored as the (row, column) of each letter 1..n.
struct Tableau {
    std::vector<int> row; // row[k] for letter k+1
    std::vector<int> col;

    int content(int letter0) const { return col[letter0] - row[letter0]; }
};

/// Standard tableaux of shape lambda in last-letter order.
inline std::vector<Tableau> standard_tableaux(const Partition& lambda) {
    const int n = lambda.size();
    if (n == 1) return {Tableau{{0}, {0}}};
    std::vector<Tableau> out;
    for (int r = 0; r < lambda.rows(); ++r) {
        const bool corner = r + 1 == lambda.rows() || lambda.parts[r + 1] < lambda.parts[r];
        if (!corner) continue;
        Partition mu = lambda;
        if (--mu.parts[r] == 0) mu.parts.pop_back();
        for (auto t : standard_tableaux(mu)) {
            t.row.push_back(r);
            t.col.push_back(lambda.parts[r] - 1);
            out.push_back(std::move(t));
        }
    }
    return out;
}

/// rho(s_k) for the adjacent transposition s_k in sparse form: row t of the
/// matrix is diag[t] e_t + off[t] e_partner[t] (partner = -1 when absent).
struct SparseGenerator {
    std::vector<double> diag;
    std::vector<int> partner;
    std::vector<double> off;

    /// out = rho(s_k) * m
    void apply_left(const Matrix& m, Matrix& out) const {
        const auto d = static_cast<Eigen::Index>(diag.size());
        out.resize(d, m.cols());
        for (Eigen::Index t = 0; t < d; ++t) {
            if (partner[t] >= 0)
                out.row(t) = diag[t] * m.row(t) + off[t] * m.row(partner[t]);
            else
                out.row(t) = diag[t] * m.row(t);
        }
    }

    /// out = m * rho(s_k)   (the matrix is symmetric)
    void apply_right(const Matrix& m, Matrix& out) const {
        const auto d = static_cast<Eigen::Index>(diag.size());
        out.resize(m.rows(), d);
        for (Eigen::Index t = 0; t < d; ++t) {
            if (partner[t] >= 0)
                out.col(t) = diag[t] * m.col(t) + off[t] * m.col(partner[t]);
            else
                out.col(t) = diag[t] * m.col(t);
        }
    }
};

struct BranchBlock {
    Partition mu;   // lambda with one corner removed
    int offset = 0; // first row/column of the block
    int size = 0;
};

/// An irreducible representation in Young's orthogonal form.
class Irrep {
public:
    explicit Irrep(Partition lambda) : lambda_(std::move(lambda)) {
        if (!lambda_.is_valid()) throw RangeError("irrep: invalid partition");
        n_ = lambda_.size();
        tableaux_ = standard_tableaux(lambda_);
        const int d = static_cast<int>(tableaux_.size());

        std::map<std::vector<int>, int> index;
        for (int t = 0; t < d; ++t) index[tableaux_[t].row] = t;

        for (int k = 0; k + 1 < n_; ++k) {
            SparseGenerator g{std::vector<double>(d), std::vector<int>(d, -1), std::vector<double>(d, 0.0)};
            Matrix dense = Matrix::Zero(d, d);
            for (int t = 0; t < d; ++t) {
                const auto& T = tableaux_[t];
                const double axial = T.content(k + 1) - T.content(k);
                g.diag[t] = 1.0 / axial;
                dense(t, t) = g.diag[t];
                if (T.row[k] != T.row[k + 1] && T.col[k] != T.col[k + 1]) {
                    auto swapped = T.row;
                    std::swap(swapped[k], swapped[k + 1]);
                    g.partner[t] = index.at(swapped);
                    g.off[t] = std::sqrt(1.0 - 1.0 / (axial * axial));
                    dense(t, g.partner[t]) = g.off[t];
                }
            }
            sparse_.push_back(std::move(g));
            dense_.push_back(std::move(dense));
        }

        if (n_ > 1) {
            int offset = 0;
            for (int r = 0; r < lambda_.rows(); ++r) {
                const bool corner = r + 1 == lambda_.rows() || lambda_.parts[r + 1] < lambda_.parts[r];
                if (!corner) continue;
                Partition mu = lambda_;
                if (--mu.parts[r] == 0) mu.parts.pop_back();
                const int size = static_cast<int>(degree(mu));
                branches_.push_back({mu, offset, size});
                offset += size;
            }
        }
    }

    const Partition& partition() const { return lambda_; }
    int n() const { return n_; }
    int dim() const { return static_cast<int>(tableaux_.size()); }
    const std::vector<Tableau>& tableaux() const { return tableaux_; }

    /// Dense rho(s_k), k = 0..n-2 (s_k swaps letters k+1, k+2).
    const Matrix& generator(int k) const { return dense_.at(k); }
    const SparseGenerator& sparse_generator(int k) const { return sparse_.at(k); }
    const std::vector<BranchBlock>& branches() const { return branches_; }

private:
    Partition lambda_;
    int n_ = 0;
    std::vector<Tableau> tableaux_;
    std::vector<Matrix> dense_;
    std::vector<SparseGenerator> sparse_;
    std::vector<BranchBlock> branches_;
};

/// Adjacent-transposition word for p: p = s_{w[0]} s_{w[1]} ... s_{w[m-1]}
/// under compose, found by bubble-sorting the one-line image.
inline std::vector<int> adjacent_word(const Permutation& p) {
    std::vector<int> line = p.one_line();
    std::vector<int> word;
    const int n = p.degree();
    for (int pass = 0; pass < n; ++pass) {
        bool swapped = false;
        for (int k = 0; k + 1 < n; ++k) {
            if (line[k] > line[k + 1]) {
                std::swap(line[k], line[k + 1]);
                word.push_back(k);
                swapped = true;
            }
        }
        if (!swapped) break;
    }
    return word;
}

inline Matrix rho(const Irrep& irr, const Permutation& p) {
    if (p.degree() != irr.n()) throw DimensionError("rho: permutation degree differs from irrep");
    Matrix m = Matrix::Identity(irr.dim(), irr.dim());
    Matrix tmp;
    for (int k : adjacent_word(p)) {
        irr.sparse_generator(k).apply_right(m, tmp);
        m.swap(tmp);
    }
    return m;
}

/// Irreps of S_n, one per partition, in partitions(n) order. Cached.
inline const std::vector<Irrep>& irreps(int n) {
    static std::mutex mutex;
    static std::map<int, std::unique_ptr<std::vector<Irrep>>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[n];
    if (!slot) {
        auto v = std::make_unique<std::vector<Irrep>>();
        for (auto& lambda : partitions(n)) v->emplace_back(lambda);
        slot = std::move(v);
    }
    return *slot;
}

inline Irrep irrep(const Partition& lambda) { return Irrep(lambda); }

inline const Irrep& cached_irrep(const Partition& lambda) {
    for (const auto& irr : irreps(lambda.size()))
        if (irr.partition() == lambda) return irr;
    throw RangeError("cached_irrep: unknown partition");
}

inline double character(const Partition& lambda, const Permutation& p) {
    if (lambda.size() != p.degree()) throw DimensionError("character: partition size differs from degree");
    return rho(cached_irrep(lambda), p).trace();
}

inline constexpr int kMaxTableDegree = 6;

/// rho_lambda(g) for every irrep and every group element, built breadth first
/// from the generators. Memory is sum_lambda d^2 * n! doubles, so n <= 6.
class RepresentationTable {
public:
    explicit RepresentationTable(int n) : n_(n) {
        if (n < 1 || n > kMaxTableDegree)
            throw CapacityError("representation table guard is n <= " + std::to_string(kMaxTableDegree));
        const auto& G = symmetric_group(n);
        const auto& irs = irreps(n);
        mats_.resize(irs.size());
        std::vector<char> done(G.order(), 0);
        for (std::size_t l = 0; l < irs.size(); ++l) mats_[l].resize(G.order());
        std::vector<Rank> frontier{0};
        for (std::size_t l = 0; l < irs.size(); ++l) mats_[l][0] = Matrix::Identity(irs[l].dim(), irs[l].dim());
        done[0] = 1;
        std::vector<Rank> gens;
        for (int k = 0; k + 1 < n; ++k) gens.push_back(rank(Permutation::adjacent(n, k)));
        while (!frontier.empty()) {
            std::vector<Rank> next;
            for (Rank a : frontier) {
                for (int k = 0; k + 1 < n; ++k) {
                    const Rank b = G.multiply(gens[k], a); // s_k a
                    if (done[b]) continue;
                    done[b] = 1;
                    for (std::size_t l = 0; l < irs.size(); ++l)
                        irs[l].sparse_generator(k).apply_left(mats_[l][a], mats_[l][b]);
                    next.push_back(b);
                }
            }
            frontier.swap(next);
        }
    }

    int n() const { return n_; }
    const Matrix& at(std::size_t irrep_index, Rank g) const { return mats_[irrep_index][g]; }

private:
    int n_;
    std::vector<std::vector<Matrix>> mats_;
};

inline const RepresentationTable& representation_table(int n) {
    static std::mutex mutex;
    static std::map<int, std::unique_ptr<RepresentationTable>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<RepresentationTable>(n);
    return *slot;
}

} // namespace cosetlab
