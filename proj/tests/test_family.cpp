#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "resolvix/family.hpp"

using namespace resolvix;
using namespace resolvix::family;

namespace {

Sub random_sub(std::mt19937_64& rng, std::size_t m) {
    Sub s;
    for (std::size_t i = 0; i < m; ++i)
        if (rng() % 2) s.push_back(i);
    return s;
}

}  // namespace

TEST(Fills, AgreesWithOracle) {
    std::mt19937_64 rng(21);
    for (int it = 0; it < 400; ++it) {
        auto F = oracle::random_family(rng, 2 + rng() % 7, 1 + rng() % 12, 0.5);
        Sub A = random_sub(rng, F.size()), B = random_sub(rng, F.size());
        EXPECT_EQ(fills_ok(F, A, B), oracle::fills(F, A, B)) << write_family(F);
        auto tgt = union_of(F, B);
        EXPECT_EQ(fills_set_ok(F, A, tgt), oracle::fills_extent(F, A, tgt));
    }
}

TEST(Fills, CertificateCoversTarget) {
    std::mt19937_64 rng(2);
    for (int it = 0; it < 200; ++it) {
        auto F = oracle::random_family(rng, 2 + rng() % 7, 1 + rng() % 10, 0.5);
        auto r = fills(F, F.all(), F.all());
        if (!r.ok()) {
            EXPECT_FALSE(oracle::fills(F, F.all(), {*r.failure->target}));
            continue;
        }
        for (auto& c : r.certificates) {
            Mask got = c.via_frontier;
            for (auto w : c.witnesses) {
                EXPECT_TRUE(proper_subset(F[w].ext, F[*c.target].ext));
                got |= F[w].ext.in;
            }
            EXPECT_EQ(got & F[*c.target].ext.in, F[*c.target].ext.in);
        }
    }
}

TEST(Fills, StrictModeIgnoresFrontier) {
    SetFamily F("f", {"a", "b"});
    F.add("u", 0b11);
    F.add("v", 0b01, true);
    EXPECT_TRUE(fills_ok(F, {}, {1}));
    EXPECT_FALSE(fills_ok(F, {}, {1}, FillMode::Strict));
    EXPECT_FALSE(fills_ok(F, {1}, {0}));
}

TEST(ExtendFill, ReplayRecertifies) {
    std::mt19937_64 rng(31);
    int replays = 0;
    while (replays < 150) {
        auto F = oracle::random_family(rng, 2 + rng() % 5, 2 + rng() % 6, 0.7);
        auto goods = oracle::all_good_pairs(F);
        for (int k = 0; k < 5; ++k) {
            const auto& p = goods[rng() % goods.size()];
            const auto& q = goods[rng() % goods.size()];
            auto out = extend_fill(F, p, q);
            ++replays;
            EXPECT_TRUE(sub_disjoint(out.left, out.right));
            EXPECT_TRUE(oracle::fills(F, out.left, out.right));
            EXPECT_TRUE(oracle::fills(F, out.right, out.left));
            if (!q.right.empty()) EXPECT_TRUE(oracle::fills_extent(F, out.left, union_of(F, q.right)));
            if (!q.left.empty()) EXPECT_TRUE(oracle::fills_extent(F, out.right, union_of(F, q.left)));
        }
    }
}

TEST(ExtendFill, LemmaCoverMatches) {
    std::mt19937_64 rng(41);
    for (int it = 0; it < 100; ++it) {
        auto F = oracle::random_family(rng, 2 + rng() % 5, 2 + rng() % 6, 0.7);
        auto goods = oracle::all_good_pairs(F);
        const auto& p = goods[rng() % goods.size()];
        const auto& q = goods[rng() % goods.size()];
        for (auto U : q.right) {
            auto astar = lemma_cover(F, p.left, p.right, q.left, U);
            ASSERT_TRUE(astar.has_value());
            auto extended = sub_union(p.left, sub_minus(q.left, p.right));
            for (auto a : *astar) EXPECT_TRUE(sub_contains(extended, a));
            EXPECT_TRUE(oracle::fills(F, *astar, {U}));
        }
    }
}

TEST(WeaklyIncreasing, SubfamilyMatchesDefinition) {
    std::mt19937_64 rng(5);
    for (int it = 0; it < 200; ++it) {
        auto F = oracle::random_family(rng, 2 + rng() % 7, 1 + rng() % 12, 0.0);
        Sub order = F.all();
        std::shuffle(order.begin(), order.end(), rng);
        auto kept = weakly_increasing_subfamily(F, order);
        EXPECT_TRUE(is_weakly_increasing(F, kept));
        // every dropped member sits inside an earlier member of the order, so the union is unchanged
        EXPECT_EQ(union_in(F, kept), union_in(F, order));
        for (std::size_t i = 0; i < order.size(); ++i) {
            bool inside_earlier = false;
            for (std::size_t j = 0; j < i; ++j)
                if (oracle::is_sub(F[order[i]].ext.in, F[order[j]].ext.in)) inside_earlier = true;
            EXPECT_EQ(sub_contains(kept, order[i]), !inside_earlier);
        }
    }
}

TEST(WeakFill, ClosureOfDiscreteTopology) {
    SetFamily F("w", {"a", "b", "c", "d"});
    F.add("U", 0b1111);
    F.add("V", 0b0011);
    F.add("W", 0b1100);
    auto cl = closure_from_opens(F.window(), {0b0001, 0b0010, 0b0100, 0b1000});
    EXPECT_TRUE(weakly_fills(F, {1, 2}, {0}, cl).ok());
    EXPECT_FALSE(weakly_fills(F, {1}, {0}, cl).ok());
}

TEST(Dyadic, Shape) {
    auto F = dyadic_family(3, 3, true);
    EXPECT_EQ(F.size(), 15u);
    EXPECT_TRUE(fills_ok(F, F.all(), F.all()));
    auto G = dyadic_family(3, 2, false);
    EXPECT_FALSE(fills_ok(G, G.all(), G.all()));
    EXPECT_THROW(dyadic_family(2, 3, true), Error);
}

TEST(FamilyIO, RoundTrip) {
    std::mt19937_64 rng(6);
    for (int it = 0; it < 50; ++it) {
        auto F = oracle::random_family(rng, 1 + rng() % 8, 1 + rng() % 10, 0.5);
        auto text = write_family(F);
        auto back = parse_family(text);
        EXPECT_EQ(back, F);
        EXPECT_EQ(write_family(back), text);
    }
}

TEST(FamilyIO, OffWindowPoints) {
    auto F = parse_family("family t\nground a b\nset U: a b z9\nset V frontier: a\n");
    EXPECT_EQ(F.beyond().size(), 1u);
    EXPECT_NE(F[0].ext.out, 0u);
    EXPECT_TRUE(F[1].frontier);
    EXPECT_EQ(parse_family(write_family(F)), F);
}

TEST(FamilyIO, Errors) {
    EXPECT_THROW(parse_family("ground a\n"), Error);
    EXPECT_THROW(parse_family("family f\nground a\nset U a\n"), Error);
    EXPECT_THROW(parse_family("family f\nground a\nset U: a\nset U: a\n"), Error);
    EXPECT_THROW(parse_family("family f\nground a\nset U bogus: a\n"), Error);
    EXPECT_THROW(parse_family("family f\nground a\nset U:\n"), Error);
    try {
        parse_family("family f\nground a\nset U:\n");
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ParseError);
    }
}
