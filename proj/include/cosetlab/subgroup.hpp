#pragma once

// Subgroups of S_n as sorted sets of element ranks: generation by closure,
// (double) coset decompositions, conjugation, normality, the full subgroup
// census, coset pairings of conjugate subgroups, and the coset-concentration
// score C_H(f).

#include "cosetlab/permutation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace cosetlab {

enum class Side { left, right };

inline const char* to_string(Side s) { return s == Side::left ? "left" : "right"; }

struct Subgroup {
    int n = 0;
    std::vector<Rank> elements;          // sorted ranks in S_n
    std::vector<Permutation> generators; // may be empty for {e}
    std::string label;                   // isomorphism type when known ("F20", "S4", ...)

    std::size_t order() const { return elements.size(); }

    bool contains(Rank r) const { return std::binary_search(elements.begin(), elements.end(), r); }

    bool contains(const Permutation& p) const { return p.degree() == n && contains(rank(p)); }

    std::string generator_string() const {
        if (generators.empty()) return "<>";
        std::string s = "<";
        for (std::size_t i = 0; i < generators.size(); ++i) {
            if (i) s += ", ";
            s += generators[i].to_cycle_string();
        }
        return s + ">";
    }

    friend bool operator==(const Subgroup& a, const Subgroup& b) { return a.n == b.n && a.elements == b.elements; }
};

namespace detail {

inline std::vector<Rank> close_under(const SymmetricGroup& G, std::vector<char>& member, std::vector<Rank> seed,
                                     const std::vector<Rank>& gens) {
    std::vector<Rank> out;
    std::vector<Rank> frontier;
    auto push = [&](Rank r) {
        if (!member[r]) {
            member[r] = 1;
            out.push_back(r);
            frontier.push_back(r);
        }
    };
    push(0);
    for (Rank r : seed) push(r);
    while (!frontier.empty()) {
        const Rank a = frontier.back();
        frontier.pop_back();
        for (Rank g : gens) push(G.multiply(a, g));
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace detail

/// Isomorphism-type label for subgroups of S_n, n <= 5; empty beyond.
inline std::string iso_label(const Subgroup& H) {
    if (H.n > 5) return {};
    const auto& G = symmetric_group(H.n);
    int max_order = 1;
    for (Rank r : H.elements) max_order = std::max(max_order, G.element(r).order());
    switch (H.order()) {
    case 1: return "C1";
    case 2: return "C2";
    case 3: return "C3";
    case 4: return max_order == 4 ? "C4" : "C2xC2";
    case 5: return "C5";
    case 6: return max_order == 6 ? "C6" : "S3";
    case 8: return "D8";
    case 10: return "D10";
    case 12: return max_order == 6 ? "S3xS2" : "A4";
    case 20: return "F20";
    case 24: return "S4";
    case 60: return "A5";
    case 120: return "S5";
    default: return {};
    }
}

/// Closure of the generators under composition; {e} for an empty list.
inline Subgroup generate(int n, std::span<const Permutation> gens) {
    const auto& G = symmetric_group(n);
    std::vector<Rank> gen_ranks;
    for (const auto& g : gens) {
        if (g.degree() != n) throw DimensionError("generate: generator degree differs from n");
        gen_ranks.push_back(rank(g));
    }
    std::vector<char> member(G.order(), 0);
    Subgroup H;
    H.n = n;
    H.elements = detail::close_under(G, member, gen_ranks, gen_ranks);
    H.generators.assign(gens.begin(), gens.end());
    H.label = iso_label(H);
    return H;
}

inline Subgroup generate(int n, std::initializer_list<Permutation> gens) {
    return generate(n, std::span<const Permutation>(gens.begin(), gens.size()));
}

/// Generators given in cycle notation, e.g. {"(1 2 3 4 5)", "(2 3 5 4)"}.
inline Subgroup generate_from_cycles(int n, const std::vector<std::string>& cycles) {
    std::vector<Permutation> gens;
    for (const auto& c : cycles) gens.push_back(parse_cycles(n, c));
    return generate(n, gens);
}

inline Subgroup trivial_subgroup(int n) { return generate(n, std::span<const Permutation>{}); }

inline Subgroup whole_group(int n) {
    std::vector<Permutation> gens;
    for (int k = 0; k + 1 < n; ++k) gens.push_back(Permutation::adjacent(n, k));
    return generate(n, gens);
}

/// A_n, generated by the 3-cycles (1 2 k).
inline Subgroup alternating_group(int n) {
    std::vector<Permutation> gens;
    for (int k = 3; k <= n; ++k) gens.push_back(parse_cycles(n, "(1 2 " + std::to_string(k) + ")"));
    return generate(n, gens);
}

/// H_i = { s in S_n : s(i) = i }, i 1-based.
inline Subgroup point_stabilizer(int n, int i) {
    if (i < 1 || i > n) throw RangeError("point_stabilizer: letter out of range");
    std::vector<int> rest;
    for (int k = 1; k <= n; ++k)
        if (k != i) rest.push_back(k);
    std::vector<Permutation> gens;
    for (std::size_t k = 0; k + 1 < rest.size(); ++k)
        gens.push_back(parse_cycles(n, "(" + std::to_string(rest[k]) + " " + std::to_string(rest[k + 1]) + ")"));
    return generate(n, gens);
}

struct CosetDecomposition {
    enum class Kind { left, right, double_coset };

    Kind kind = Kind::left;
    Subgroup subgroup;                 // H (left factor for double cosets)
    std::optional<Subgroup> second;    // L for H g L
    std::vector<std::vector<Rank>> blocks;
    std::vector<Rank> representatives; // minimal rank in each block
    std::vector<std::size_t> block_of; // element rank -> block index

    std::size_t size() const { return blocks.size(); }
};

namespace detail {

template <class BlockOf>
CosetDecomposition partition_by(std::size_t order, BlockOf&& block_from) {
    CosetDecomposition d;
    constexpr auto unassigned = std::numeric_limits<std::size_t>::max();
    d.block_of.assign(order, unassigned);
    for (Rank g = 0; g < order; ++g) {
        if (d.block_of[g] != unassigned) continue;
        std::vector<Rank> block = block_from(g);
        std::sort(block.begin(), block.end());
        block.erase(std::unique(block.begin(), block.end()), block.end());
        for (Rank r : block) d.block_of[r] = d.blocks.size();
        d.representatives.push_back(g);
        d.blocks.push_back(std::move(block));
    }
    return d;
}

} // namespace detail

/// Left cosets gH or right cosets Hg; blocks are ordered by their minimal rank.
inline CosetDecomposition cosets(const Subgroup& H, Side side) {
    const auto& G = symmetric_group(H.n);
    auto d = detail::partition_by(G.order(), [&](Rank g) {
        std::vector<Rank> block;
        block.reserve(H.order());
        for (Rank h : H.elements) block.push_back(side == Side::left ? G.multiply(g, h) : G.multiply(h, g));
        return block;
    });
    d.kind = side == Side::left ? CosetDecomposition::Kind::left : CosetDecomposition::Kind::right;
    d.subgroup = H;
    return d;
}

/// (H, L)-double cosets H g L.
inline CosetDecomposition double_cosets(const Subgroup& H, const Subgroup& L) {
    if (H.n != L.n) throw DimensionError("double_cosets: subgroups live in different S_n");
    const auto& G = symmetric_group(H.n);
    auto d = detail::partition_by(G.order(), [&](Rank g) {
        std::vector<Rank> block;
        block.reserve(H.order() * L.order());
        for (Rank h : H.elements) {
            const Rank hg = G.multiply(h, g);
            for (Rank l : L.elements) block.push_back(G.multiply(hg, l));
        }
        return block;
    });
    d.kind = CosetDecomposition::Kind::double_coset;
    d.subgroup = H;
    d.second = L;
    return d;
}

/// g H g^-1
inline Subgroup conjugate_subgroup(const Permutation& g, const Subgroup& H) {
    if (g.degree() != H.n) throw DimensionError("conjugate_subgroup: degree mismatch");
    const auto& G = symmetric_group(H.n);
    Subgroup K;
    K.n = H.n;
    K.elements.reserve(H.order());
    for (Rank h : H.elements) K.elements.push_back(rank(conjugate(g, G.element(h))));
    std::sort(K.elements.begin(), K.elements.end());
    for (const auto& x : H.generators) K.generators.push_back(conjugate(g, x));
    K.label = H.label;
    return K;
}

/// True iff g H g^-1 = H for all g; checking the adjacent transpositions suffices.
inline bool is_normal(const Subgroup& H) {
    for (int k = 0; k + 1 < H.n; ++k) {
        const auto s = Permutation::adjacent(H.n, k);
        const auto& G = symmetric_group(H.n);
        for (Rank h : H.elements)
            if (!H.contains(conjugate(s, G.element(h)))) return false;
    }
    return true;
}

/// Guard for the exhaustive census.
inline constexpr int kCensusDefaultMaxDegree = 5;
inline constexpr int kCensusMaxDegree = 6;

/// Every subgroup of S_n, found by breadth-first closure from {e}: each known
/// subgroup is extended by each element outside it, closed, and deduplicated.
/// Sorted by (order, element list). n = 6 requires allow_large.
inline std::vector<Subgroup> all_subgroups(int n, bool allow_large = false) {
    const int guard = allow_large ? kCensusMaxDegree : kCensusDefaultMaxDegree;
    if (n < 1 || n > guard)
        throw CapacityError("subgroup census for S_" + std::to_string(n) + " exceeds the guard (n <= " +
                            std::to_string(guard) + (allow_large ? ")" : "; S_6 needs the large flag)"));
    const auto& G = symmetric_group(n);
    const std::size_t order = G.order();

    struct Found {
        std::vector<Rank> elements;
        std::vector<Rank> gens;
    };
    std::vector<Found> found;
    std::set<std::vector<Rank>> seen;
    found.push_back({{0}, {}});
    seen.insert({0});

    std::vector<char> member(order);
    std::vector<char> covered(order);
    for (std::size_t next = 0; next < found.size(); ++next) {
        const Found current = found[next];
        std::fill(covered.begin(), covered.end(), 0);
        for (Rank h : current.elements) covered[h] = 1;
        for (Rank g = 0; g < order; ++g) {
            if (covered[g]) continue;
            // <H, g> = <H, g h> for h in H: one candidate per left coset gH.
            for (Rank h : current.elements) covered[G.multiply(g, h)] = 1;
            std::vector<Rank> gens = current.gens;
            gens.push_back(g);
            std::fill(member.begin(), member.end(), 0);
            auto elements = detail::close_under(G, member, current.elements, gens);
            if (seen.insert(elements).second) found.push_back({std::move(elements), std::move(gens)});
        }
    }

    std::sort(found.begin(), found.end(), [](const Found& a, const Found& b) {
        if (a.elements.size() != b.elements.size()) return a.elements.size() < b.elements.size();
        return a.elements < b.elements;
    });
    std::vector<Subgroup> out;
    out.reserve(found.size());
    for (auto& f : found) {
        Subgroup H;
        H.n = n;
        H.elements = std::move(f.elements);
        for (Rank g : f.gens) H.generators.push_back(G.element(g));
        H.label = iso_label(H);
        out.push_back(std::move(H));
    }
    return out;
}

/// One matched (right coset of Hi, left coset of Hj) pair.
struct CosetPair {
    std::size_t right_block; // index into right cosets of Hi
    Rank right_rep;
    std::size_t left_block;  // index into left cosets of Hj
    Rank left_rep;
    std::size_t target_block; // index into the (Hi, Hj) double cosets
};

struct CosetPairing {
    Subgroup left_subgroup;  // Hi, acting on the left factor through right cosets Hi x
    Subgroup right_subgroup; // Hj, acting on the right factor through left cosets y Hj
    CosetDecomposition right_cosets; // of Hi
    CosetDecomposition left_cosets;  // of Hj
    CosetDecomposition double_cosets; // (Hi, Hj)
    std::size_t target_block = 0;     // the double coset every matched product lands in
    std::vector<CosetPair> pairs;     // one per right coset of Hi, in block order
    std::vector<std::size_t> partner; // right block of Hi -> paired left block of Hj
};

/// For conjugate Hi, Hj that each split G into exactly two double cosets with
/// themselves: every right coset Hi x has exactly one left coset y Hj with
/// Hi x y Hj inside the shared coset Hi g = g Hj (g^-1 Hi g = Hj; g = e when
/// Hi = Hj). Throws StructureError when the preconditions fail.
inline CosetPairing paired_cosets(const Subgroup& Hi, const Subgroup& Hj) {
    if (Hi.n != Hj.n) throw DimensionError("paired_cosets: subgroups live in different S_n");
    if (Hi.order() != Hj.order()) throw StructureError("paired_cosets: subgroups are not conjugate (orders differ)");
    const auto& G = symmetric_group(Hi.n);

    for (const Subgroup* H : {&Hi, &Hj}) {
        const auto self = double_cosets(*H, *H);
        if (self.size() != 2)
            throw StructureError("paired_cosets: subgroup of order " + std::to_string(H->order()) + " has " +
                                 std::to_string(self.size()) + " double cosets with itself (need exactly 2)");
    }

    // Smallest g with g^-1 Hi g = Hj.
    std::optional<Rank> link;
    for (Rank g = 0; g < G.order() && !link; ++g) {
        if (conjugate_subgroup(G.element(G.inverse_of(g)), Hi).elements == Hj.elements) link = g;
    }
    if (!link) throw StructureError("paired_cosets: subgroups are not conjugate");

    CosetPairing out;
    out.left_subgroup = Hi;
    out.right_subgroup = Hj;
    out.right_cosets = cosets(Hi, Side::right);
    out.left_cosets = cosets(Hj, Side::left);
    out.double_cosets = double_cosets(Hi, Hj);
    if (out.double_cosets.size() != 2)
        throw StructureError("paired_cosets: (Hi, Hj) has " + std::to_string(out.double_cosets.size()) +
                             " double cosets (need exactly 2)");
    out.target_block = out.double_cosets.block_of[*link];
    if (out.double_cosets.blocks[out.target_block].size() != Hj.order())
        throw StructureError("paired_cosets: shared coset is not a single coset");

    for (std::size_t k = 0; k < out.right_cosets.size(); ++k) {
        const Rank x = out.right_cosets.representatives[k];
        const Rank y = G.multiply(G.inverse_of(x), *link); // x y = g
        const std::size_t lb = out.left_cosets.block_of[y];
        out.pairs.push_back({k, x, lb, out.left_cosets.representatives[lb], out.target_block});
        out.partner.push_back(lb);
    }
    return out;
}

/// Exhaustive check: every product of a matched pair lands in the target
/// double coset, and every product of an unmatched pair lands outside it.
inline bool verify_pairing(const CosetPairing& p) {
    const auto& G = symmetric_group(p.left_subgroup.n);
    const auto& target = p.double_cosets.blocks[p.target_block];
    std::vector<char> in_target(G.order(), 0);
    for (Rank r : target) in_target[r] = 1;
    for (std::size_t rb = 0; rb < p.right_cosets.size(); ++rb) {
        for (std::size_t lb = 0; lb < p.left_cosets.size(); ++lb) {
            const bool matched = p.partner[rb] == lb;
            for (Rank a : p.right_cosets.blocks[rb])
                for (Rank b : p.left_cosets.blocks[lb])
                    if (static_cast<bool>(in_target[G.multiply(a, b)]) != matched) return false;
        }
    }
    return true;
}

/// C_H(f): size-weighted within-block population variance over total
/// population variance. 0 when f is constant on every block, 1 for H = G.
inline double coset_concentration(std::span<const double> f, const CosetDecomposition& blocks) {
    if (f.size() != blocks.block_of.size()) throw DimensionError("coset_concentration: function length != |G|");
    const double total = static_cast<double>(f.size());
    const double mean = std::accumulate(f.begin(), f.end(), 0.0) / total;
    double var = 0.0;
    for (double v : f) var += (v - mean) * (v - mean);
    var /= total;
    if (!(var > 0.0)) throw DegenerateInputError("coset_concentration: f has zero variance");

    double within = 0.0;
    for (const auto& block : blocks.blocks) {
        double bm = 0.0;
        for (Rank r : block) bm += f[r];
        bm /= static_cast<double>(block.size());
        double ss = 0.0;
        for (Rank r : block) ss += (f[r] - bm) * (f[r] - bm);
        within += ss; // (|B| / |G|) * (ss / |B|)
    }
    return within / total / var;
}

inline double coset_concentration(std::span<const double> f, const Subgroup& H, Side side) {
    return coset_concentration(f, cosets(H, side));
}

/// Subgroups with their left and right coset decompositions precomputed, for
/// repeated concentration scans.
class SubgroupCatalog {
public:
    SubgroupCatalog() = default;

    explicit SubgroupCatalog(std::vector<Subgroup> subgroups) : subgroups_(std::move(subgroups)) {
        for (const auto& H : subgroups_) {
            left_.push_back(cosets(H, Side::left));
            right_.push_back(cosets(H, Side::right));
        }
    }

    /// Census of S_n minus {e} and S_n itself.
    static SubgroupCatalog proper_nontrivial(int n, bool allow_large = false) {
        auto all = all_subgroups(n, allow_large);
        const auto order = factorial(n);
        std::vector<Subgroup> kept;
        for (auto& H : all)
            if (H.order() != 1 && H.order() != order) kept.push_back(std::move(H));
        return SubgroupCatalog(std::move(kept));
    }

    std::size_t size() const { return subgroups_.size(); }
    bool empty() const { return subgroups_.empty(); }
    const Subgroup& operator[](std::size_t i) const { return subgroups_[i]; }
    const std::vector<Subgroup>& subgroups() const { return subgroups_; }
    const CosetDecomposition& decomposition(std::size_t i, Side side) const {
        return side == Side::left ? left_[i] : right_[i];
    }

private:
    std::vector<Subgroup> subgroups_;
    std::vector<CosetDecomposition> left_;
    std::vector<CosetDecomposition> right_;
};

struct SubgroupMatch {
    std::size_t index = 0; // into the catalog
    Side side = Side::left;
    double score = 1.0;
};

/// argmin over (H, side) of C_H(f). Scores within tie_tolerance of the best
/// are ties: the larger subgroup wins, then the lexicographically smaller
/// element list, then the left side.
inline SubgroupMatch best_subgroup(std::span<const double> f, const SubgroupCatalog& catalog,
                                   std::optional<Side> only_side = std::nullopt, double tie_tolerance = 1e-9) {
    if (catalog.empty()) throw StructureError("best_subgroup: empty catalog");
    struct Scored {
        std::size_t index;
        Side side;
        double score;
    };
    std::vector<Scored> scored;
    for (std::size_t i = 0; i < catalog.size(); ++i) {
        for (Side s : {Side::left, Side::right}) {
            if (only_side && *only_side != s) continue;
            scored.push_back({i, s, coset_concentration(f, catalog.decomposition(i, s))});
        }
    }
    double best = std::numeric_limits<double>::infinity();
    for (const auto& s : scored) best = std::min(best, s.score);
    const Scored* winner = nullptr;
    for (const auto& s : scored) {
        if (s.score > best + tie_tolerance) continue;
        if (!winner) {
            winner = &s;
            continue;
        }
        const auto& a = catalog[s.index];
        const auto& b = catalog[winner->index];
        if (a.order() != b.order()) {
            if (a.order() > b.order()) winner = &s;
        } else if (a.elements != b.elements) {
            if (a.elements < b.elements) winner = &s;
        }
        // same subgroup: keep the earlier (left) side
    }
    return {winner->index, winner->side, winner->score};
}

/// F(s) = number of subgroups in the family that contain s, for every s in S_n
/// (rank order).
inline std::vector<int> membership_counts(int n, std::span<const Subgroup> family) {
    std::vector<int> F(factorial(n), 0);
    for (const auto& H : family) {
        if (H.n != n) throw DimensionError("membership_counts: subgroup from a different S_n");
        for (Rank r : H.elements) ++F[r];
    }
    return F;
}

inline int membership_count(const Permutation& sigma, std::span<const Subgroup> family) {
    int c = 0;
    for (const auto& H : family) c += H.contains(sigma);
    return c;
}

} // namespace cosetlab
