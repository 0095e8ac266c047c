#include "cosetlab/permutation.hpp"
#include "cosetlab/rng.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace cosetlab;

namespace {

Permutation random_permutation(int n, Rng& rng) { return unrank(n, rng.below(factorial(n))); }

} // namespace

TEST(Permutation, ComposeReadsRightToLeft) {
    const auto sigma = Permutation::from_one_line({4, 3, 2, 1});
    const auto tau = Permutation::from_one_line({3, 2, 1, 4});
    EXPECT_EQ(compose(sigma, tau), Permutation::from_one_line({4, 1, 2, 3}));
    EXPECT_EQ(compose(Permutation::from_one_line({2, 1, 3}), Permutation::from_one_line({3, 2, 1})),
              Permutation::from_one_line({2, 3, 1}));
}

TEST(Permutation, ComposeWithIdentity) {
    Rng rng(7);
    for (int t = 0; t < 50; ++t) {
        const auto p = random_permutation(6, rng);
        EXPECT_EQ(compose(Permutation::identity(6), p), p);
        EXPECT_EQ(compose(p, Permutation::identity(6)), p);
    }
}

TEST(Permutation, ComposeRejectsMismatchedDegrees) {
    EXPECT_THROW(compose(Permutation(3), Permutation(4)), DimensionError);
    EXPECT_THROW(conjugate(Permutation(3), Permutation(4)), DimensionError);
}

TEST(Permutation, FromOneLineRejectsNonBijections) {
    EXPECT_THROW(Permutation::from_one_line({1, 1, 2}), RangeError);
    EXPECT_THROW(Permutation::from_one_line({1, 4, 2}), RangeError);
}

TEST(Permutation, Inverse) {
    EXPECT_EQ(inverse(Permutation::identity(5)), Permutation::identity(5));
    EXPECT_EQ(inverse(Permutation::from_one_line({2, 3, 1})), Permutation::from_one_line({3, 1, 2}));
    for (const auto& t : {Permutation::from_one_line({2, 1, 3, 4}), Permutation::from_one_line({4, 2, 3, 1}),
                          Permutation::from_one_line({1, 5, 3, 4, 2})})
        EXPECT_EQ(inverse(t), t);
    Rng rng(1);
    for (int i = 0; i < 100; ++i) {
        const auto p = random_permutation(7, rng);
        EXPECT_TRUE(compose(p, inverse(p)).is_identity());
        EXPECT_TRUE(compose(inverse(p), p).is_identity());
    }
}

TEST(Permutation, Sign) {
    EXPECT_EQ(sign(Permutation::identity(5)), 1);
    EXPECT_EQ(sign(Permutation::from_one_line({2, 1, 3, 4, 5})), -1);
    EXPECT_EQ(sign(Permutation::from_one_line({2, 3, 1})), 1);
}

TEST(Permutation, SignIsAHomomorphismOnS4) {
    const auto& G = symmetric_group(4);
    int cases = 0;
    for (const auto& a : G.elements())
        for (const auto& b : G.elements()) {
            ASSERT_EQ(sign(compose(a, b)), sign(a) * sign(b));
            ++cases;
        }
    EXPECT_EQ(cases, 576);
}

TEST(Permutation, SignCountsInversions) {
    // independent route: parity of the inversion count
    for (const auto& p : symmetric_group(5).elements()) {
        int inv = 0;
        for (int i = 0; i < 5; ++i)
            for (int j = i + 1; j < 5; ++j) inv += p[i] > p[j];
        EXPECT_EQ(sign(p), inv % 2 == 0 ? 1 : -1);
    }
}

TEST(Permutation, RankUnrank) {
    EXPECT_EQ(rank(Permutation::identity(4)), 0u);
    EXPECT_EQ(unrank(3, 5), Permutation::from_one_line({3, 2, 1}));
    EXPECT_THROW(unrank(3, 6), RangeError);
    // exhaustive over S_4: rank is a bijection onto 0..23 and respects the lexicographic order
    std::set<Rank> seen;
    std::vector<int> line{1, 2, 3, 4};
    Rank expected = 0;
    do {
        const auto p = Permutation::from_one_line(line);
        EXPECT_EQ(rank(p), expected);
        EXPECT_EQ(unrank(4, expected), p);
        seen.insert(rank(p));
        ++expected;
    } while (std::next_permutation(line.begin(), line.end()));
    EXPECT_EQ(seen.size(), 24u);
}

TEST(Permutation, Conjugate) {
    Rng rng(3);
    for (int t = 0; t < 100; ++t) {
        const auto g = random_permutation(5, rng);
        const auto x = random_permutation(5, rng);
        EXPECT_EQ(conjugate(Permutation::identity(5), x), x);
        EXPECT_TRUE(conjugate(g, Permutation::identity(5)).is_identity());
        EXPECT_EQ(sign(conjugate(g, x)), sign(x));
        EXPECT_EQ(conjugate(g, x).cycle_type(), x.cycle_type());
    }
}

TEST(Permutation, Associativity) {
    Rng rng(11);
    for (int t = 0; t < 200; ++t) {
        const auto a = random_permutation(6, rng);
        const auto b = random_permutation(6, rng);
        const auto c = random_permutation(6, rng);
        EXPECT_EQ(compose(compose(a, b), c), compose(a, compose(b, c)));
    }
}

TEST(Permutation, CycleNotation) {
    EXPECT_EQ(parse_cycles(4, "(1 4)"), Permutation::from_one_line({4, 2, 3, 1}));
    EXPECT_EQ(parse_cycles(5, "(1 2 3)(4 5)"), Permutation::from_one_line({2, 3, 1, 5, 4}));
    EXPECT_EQ(parse_cycles(3, "()"), Permutation::identity(3));
    EXPECT_EQ(parse_cycles(3, "e"), Permutation::identity(3));
    // products of cycles act right to left
    EXPECT_EQ(parse_cycles(3, "(1 2)(2 3)"), compose(parse_cycles(3, "(1 2)"), parse_cycles(3, "(2 3)")));
    EXPECT_EQ(parse_cycles(5, "(2 3 5 4)").to_cycle_string(), "(2 3 5 4)");
    EXPECT_THROW(parse_cycles(3, "(1 4)"), ConfigError);
    EXPECT_THROW(parse_cycles(3, "(1 2"), ConfigError);
    EXPECT_THROW(parse_cycles(3, "(1 1)"), ConfigError);
}

TEST(SymmetricGroup, Enumerate) {
    EXPECT_EQ(enumerate(3).order(), 6u);
    EXPECT_EQ(enumerate(5).order(), 120u);
    EXPECT_THROW(enumerate(9), CapacityError);
    const auto& G = enumerate(4);
    for (Rank k = 0; k < G.order(); ++k) EXPECT_EQ(rank(G.element(k)), k);
}

TEST(SymmetricGroup, CayleyTableIsALatinSquare) {
    const auto& G = symmetric_group(4);
    const auto& table = G.cayley_table();
    const std::size_t g = G.order();
    for (std::size_t a = 0; a < g; ++a) {
        std::set<Rank> row, col;
        for (std::size_t b = 0; b < g; ++b) {
            row.insert(table[a * g + b]);
            col.insert(table[b * g + a]);
        }
        EXPECT_EQ(row.size(), g);
        EXPECT_EQ(col.size(), g);
        EXPECT_EQ(table[a], a); // identity row
        EXPECT_EQ(table[a * g], a); // identity column
    }
    for (Rank a = 0; a < g; ++a) EXPECT_EQ(G.multiply(a, G.inverse_of(a)), 0u);
}
