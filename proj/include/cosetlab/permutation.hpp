#pragma once

// Permutations of {1..n} in one-line notation, Lehmer ranking, and the
// enumerated symmetric group with a lazily built Cayley table.
//
// Conventions:
//  * A Permutation stores its one-line images 0-based: image(i) is the
//    (0-based) value at (0-based) position i. Everything that crosses the
//    API as "one-line notation" (from_one_line, one_line, to_string) is
//    1-based, as written in the literature: (4 3 2 1) reverses four letters.
//  * Permutations act on arrangements by position, and compose(p, q) is the
//    arrangement obtained by applying q first, then p:
//    compose(p, q).image(i) = q.image(p.image(i)). So compose((4 3 2 1),
//    (3 2 1 4)) = (4 1 2 3).
//  * rank/unrank is the lexicographic order of one-line images, and is the
//    canonical element index everywhere (one-hot inputs, tables, files).

#include "cosetlab/error.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace cosetlab {

using Rank = std::uint32_t;

inline constexpr int kMaxDegree = 16;
inline constexpr int kMaxEnumerateDegree = 8;
inline constexpr int kMaxCayleyDegree = 7;

constexpr std::uint64_t factorial(int n) {
    std::uint64_t f = 1;
    for (int k = 2; k <= n; ++k) f *= static_cast<std::uint64_t>(k);
    return f;
}

class Permutation {
public:
    Permutation() = default;

    /// Identity on n letters.
    explicit Permutation(int n) : n_(check_degree(n)) {
        for (int i = 0; i < n_; ++i) image_[i] = static_cast<std::uint8_t>(i);
    }

    static Permutation identity(int n) { return Permutation(n); }

    /// From 1-based one-line notation, e.g. {4, 3, 2, 1}.
    static Permutation from_one_line(std::span<const int> values) {
        Permutation p(static_cast<int>(values.size()));
        std::array<bool, kMaxDegree> seen{};
        for (int i = 0; i < p.n_; ++i) {
            const int v = values[i];
            if (v < 1 || v > p.n_ || seen[v - 1])
                throw RangeError("one-line notation is not a bijection on {1.." + std::to_string(p.n_) + "}");
            seen[v - 1] = true;
            p.image_[i] = static_cast<std::uint8_t>(v - 1);
        }
        return p;
    }
    static Permutation from_one_line(std::initializer_list<int> values) {
        return from_one_line(std::span<const int>(values.begin(), values.size()));
    }

    /// Adjacent transposition s_k swapping letters k and k+1 (0-based k).
    static Permutation adjacent(int n, int k) {
        Permutation p(n);
        if (k < 0 || k + 1 >= n) throw RangeError("adjacent transposition index out of range");
        std::swap(p.image_[k], p.image_[k + 1]);
        return p;
    }

    int degree() const { return n_; }

    /// 0-based image of 0-based position i.
    /// 0-based image of 0-based position i.
    int operator[](int i) const { return image_[i]; }

    /// 1-based one-line notation.
    std::vector<int> one_line() const {
        std::vector<int> out(n_);
        for (int i = 0; i < n_; ++i) out[i] = image_[i] + 1;
        return out;
    }

    /// "(4 1 2 3)"
    std::string to_string() const {
        std::string s = "(";
        for (int i = 0; i < n_; ++i) {
            if (i) s += ' ';
            s += std::to_string(image_[i] + 1);
        }
        return s + ")";
    }

    bool is_identity() const {
        for (int i = 0; i < n_; ++i)
            if (image_[i] != i) return false;
        return true;
    }

    int fixed_points() const {
        int c = 0;
        for (int i = 0; i < n_; ++i) c += image_[i] == i;
        return c;
    }

    /// Cycle lengths, sorted non-increasing (fixed points included as 1s).
    std::vector<int> cycle_type() const {
        std::vector<int> lengths;
        std::array<bool, kMaxDegree> seen{};
        for (int i = 0; i < n_; ++i) {
            if (seen[i]) continue;
            int len = 0;
            for (int j = i; !seen[j]; j = image_[j]) {
                seen[j] = true;
                ++len;
            }
            lengths.push_back(len);
        }
        std::sort(lengths.rbegin(), lengths.rend());
        return lengths;
    }

    /// Order of the element (lcm of cycle lengths).
    int order() const {
        int l = 1;
        for (int c : cycle_type()) l = std::lcm(l, c);
        return l;
    }

    /// Cycle notation with fixed points omitted, "(1 2 3)(4 5)"; "()" for e.
    std::string to_cycle_string() const {
        std::string s;
        std::array<bool, kMaxDegree> seen{};
        for (int i = 0; i < n_; ++i) {
            if (seen[i] || image_[i] == i) continue;
            s += '(';
            bool first = true;
            for (int j = i; !seen[j]; j = image_[j]) {
                seen[j] = true;
                if (!first) s += ' ';
                s += std::to_string(j + 1);
                first = false;
            }
            s += ')';
        }
        return s.empty() ? "()" : s;
    }

    friend bool operator==(const Permutation& a, const Permutation& b) {
        if (a.n_ != b.n_) return false;
        return std::equal(a.image_.begin(), a.image_.begin() + a.n_, b.image_.begin());
    }

private:
    static int check_degree(int n) {
        if (n < 1 || n > kMaxDegree)
            throw RangeError("degree " + std::to_string(n) + " outside [1, " + std::to_string(kMaxDegree) + "]");
        return n;
    }

    friend Permutation compose(const Permutation&, const Permutation&);
    friend Permutation inverse(const Permutation&);

    int n_ = 0;
    std::array<std::uint8_t, kMaxDegree> image_{};
};

/// q applied first, then p (positional action): result.image(i) = q.image(p.image(i)).
inline Permutation compose(const Permutation& p, const Permutation& q) {
    if (p.n_ != q.n_)
        throw DimensionError("compose: degrees " + std::to_string(p.n_) + " and " + std::to_string(q.n_) + " differ");
    Permutation r = p;
    for (int i = 0; i < p.n_; ++i) r.image_[i] = q.image_[p.image_[i]];
    return r;
}

inline Permutation operator*(const Permutation& p, const Permutation& q) { return compose(p, q); }

inline Permutation inverse(const Permutation& p) {
    Permutation r = p;
    for (int i = 0; i < p.n_; ++i) r.image_[p.image_[i]] = static_cast<std::uint8_t>(i);
    return r;
}

/// g x g^-1
inline Permutation conjugate(const Permutation& g, const Permutation& x) {
    return compose(compose(g, x), inverse(g));
}

/// +1 for even permutations, -1 for odd ones (parity of n - #cycles).
inline int sign(const Permutation& p) {
    const int cycles = static_cast<int>(p.cycle_type().size());
    return ((p.degree() - cycles) % 2 == 0) ? 1 : -1;
}

/// Lexicographic rank via the Lehmer code.
inline Rank rank(const Permutation& p) {
    const int n = p.degree();
    if (n > 12) throw CapacityError("rank: n! does not fit a 32-bit rank for n > 12");
    std::uint64_t r = 0;
    for (int i = 0; i < n; ++i) {
        int smaller = 0;
        for (int j = i + 1; j < n; ++j) smaller += p[j] < p[i];
        r += static_cast<std::uint64_t>(smaller) * factorial(n - 1 - i);
    }
    return static_cast<Rank>(r);
}

inline Permutation unrank(int n, std::uint64_t k) {
    if (n < 1 || n > kMaxDegree) throw RangeError("unrank: bad degree");
    if (k >= factorial(n))
        throw RangeError("unrank: rank " + std::to_string(k) + " not below " + std::to_string(factorial(n)));
    std::vector<int> pool(n);
    for (int i = 0; i < n; ++i) pool[i] = i + 1;
    std::vector<int> line(n);
    for (int i = 0; i < n; ++i) {
        const std::uint64_t f = factorial(n - 1 - i);
        const auto d = static_cast<std::size_t>(k / f);
        k %= f;
        line[i] = pool[d];
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(d));
    }
    return Permutation::from_one_line(line);
}

/// Parses cycle notation over n letters: "(1 2 3)(4 5)", "(1,2)", "()" or "e".
inline Permutation parse_cycles(int n, std::string_view text) {
    Permutation p(n);
    std::vector<int> line = p.one_line();
    std::vector<int> current;
    bool open = false;
    auto flush = [&] {
        for (std::size_t i = 0; i < current.size(); ++i) {
            for (std::size_t j = i + 1; j < current.size(); ++j)
                if (current[i] == current[j]) throw ConfigError("repeated letter in cycle");
        }
        // "(a b)(c d)" is the product compose((a b), (c d)).
        if (current.size() > 1) {
            std::vector<int> cyc(n);
            for (int i = 0; i < n; ++i) cyc[i] = i + 1;
            for (std::size_t i = 0; i < current.size(); ++i)
                cyc[current[i] - 1] = current[(i + 1) % current.size()];
            std::vector<int> composed(n);
            for (int i = 0; i < n; ++i) composed[i] = cyc[line[i] - 1];
            line = composed;
        }
        current.clear();
    };
    std::size_t i = 0;
    const auto trimmed_empty = [&] {
        for (char c : text)
            if (!std::isspace(static_cast<unsigned char>(c))) return false;
        return true;
    };
    if (trimmed_empty() || text == "e") return p;
    while (i < text.size()) {
        const char c = text[i];
        if (c == '(') {
            if (open) throw ConfigError("nested '(' in cycle notation");
            open = true;
            ++i;
        } else if (c == ')') {
            if (!open) throw ConfigError("unbalanced ')' in cycle notation");
            open = false;
            flush();
            ++i;
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            if (!open) throw ConfigError("letter outside parentheses in cycle notation");
            int v = 0;
            while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) v = v * 10 + (text[i++] - '0');
            if (v < 1 || v > n) throw ConfigError("letter " + std::to_string(v) + " outside 1.." + std::to_string(n));
            current.push_back(v);
        } else if (std::isspace(static_cast<unsigned char>(c)) || c == ',') {
            ++i;
        } else {
            throw ConfigError(std::string("unexpected character '") + c + "' in cycle notation");
        }
    }
    if (open) throw ConfigError("unterminated cycle");
    return Permutation::from_one_line(line);
}

/// All n! elements of S_n in rank order, with lazily built multiplication
/// and inverse tables. Obtain instances through symmetric_group(n).
class SymmetricGroup {
public:
    explicit SymmetricGroup(int n) : n_(n) {
        if (n < 1 || n > kMaxEnumerateDegree)
            throw CapacityError("S_" + std::to_string(n) + " exceeds the enumeration guard (n <= " +
                                std::to_string(kMaxEnumerateDegree) + ")");
        const auto order = factorial(n);
        elements_.reserve(order);
        for (std::uint64_t k = 0; k < order; ++k) elements_.push_back(unrank(n, k));
    }

    SymmetricGroup(const SymmetricGroup&) = delete;
    SymmetricGroup& operator=(const SymmetricGroup&) = delete;

    int degree() const { return n_; }
    std::size_t order() const { return elements_.size(); }
    const std::vector<Permutation>& elements() const { return elements_; }
    const Permutation& element(Rank r) const { return elements_.at(r); }

    /// Rank of element(a) * element(b).
    Rank multiply(Rank a, Rank b) const {
        if (n_ <= kMaxCayleyDegree) return cayley_table()[static_cast<std::size_t>(a) * order() + b];
        return rank(compose(elements_[a], elements_[b]));
    }

    Rank inverse_of(Rank a) const {
        std::call_once(inverse_once_, [this] {
            inverses_.resize(order());
            for (std::size_t k = 0; k < order(); ++k) inverses_[k] = rank(inverse(elements_[k]));
        });
        return inverses_[a];
    }

    /// order x order, row-major: table[a * order + b] = rank(a b).
    const std::vector<Rank>& cayley_table() const {
        if (n_ > kMaxCayleyDegree) throw CapacityError("Cayley table guard exceeded");
        std::call_once(cayley_once_, [this] {
            const std::size_t g = order();
            cayley_.resize(g * g);
            for (std::size_t a = 0; a < g; ++a)
                for (std::size_t b = 0; b < g; ++b) cayley_[a * g + b] = rank(compose(elements_[a], elements_[b]));
        });
        return cayley_;
    }

private:
    int n_;
    std::vector<Permutation> elements_;
    mutable std::once_flag cayley_once_;
    mutable std::vector<Rank> cayley_;
    mutable std::once_flag inverse_once_;
    mutable std::vector<Rank> inverses_;
};

/// Process-wide cache of enumerated groups.
inline const SymmetricGroup& symmetric_group(int n) {
    static std::mutex mutex;
    static std::map<int, std::unique_ptr<SymmetricGroup>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<SymmetricGroup>(n);
    return *slot;
}

inline const SymmetricGroup& enumerate(int n) { return symmetric_group(n); }

} // namespace cosetlab
