#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "resolvix/forcing.hpp"
#include "resolvix/generic.hpp"
#include "scenarios.hpp"

using namespace resolvix;
using namespace resolvix::forcing;

namespace {

// The only increasing bijection between two supports pairs them off in sorted order; check it carries p onto q.
bool same_type_by_search(const Condition& p, const Condition& q) {
    auto sp = supp(p), sq = supp(q);
    if (sp.size() != sq.size()) return false;
    std::map<int, int> rho;
    for (auto a = sp.begin(), b = sq.begin(); a != sp.end(); ++a, ++b) rho[*a] = *b;
    return normalized(map_columns(p, [&](int a) { return rho.at(a); })) == normalized(q);
}

Condition small_condition(std::mt19937_64& rng) {
    Condition p;
    p = extend_add_point(p, GridElem{1, static_cast<int>(rng() % 2)}, 10);
    if (rng() % 2) {
        auto a = *p.tree(10).begin();
        p = extend_uplus(p, a, GridElem{2 + static_cast<int>(rng() % 2), a.n + 1 + static_cast<int>(rng() % 2)}, 10);
    }
    if (rng() % 2) p = extend_add_point(p, GridElem{4, static_cast<int>(rng() % 3)}, 20);
    if (p.I.count(20) && rng() % 2) p = extend_define_f(p, 10, 20);
    return p;
}

}  // namespace

TEST(Validate, DetectsEachClause) {
    Condition p;
    p.A = {{1, 1}, {2, 0}};
    p.lt = {{{1, 1}, {2, 0}}};
    EXPECT_EQ(validate(p)[0].clause, "P1");
    Condition q;
    q.A = {{1, 1}};
    q.I = {15};
    q.T[15] = {{1, 1}};
    EXPECT_EQ(validate(q)[0].clause, "P1");
    Condition r;
    r.A = {{1, 1}};
    r.I = {10};
    r.T[10] = {{12, 1}};
    EXPECT_EQ(validate(r)[0].clause, "P2");
    Condition s = extend_add_point(Condition{}, {1, 1}, 10);
    s.f[{10, 20}] = 0;
    EXPECT_EQ(validate(s)[0].clause, "P3");
}

TEST(Validate, P4aCommonUpperBound) {
    Condition p;
    p.A = {{1, 0}, {2, 0}, {3, 5}};
    p.lt = {{{1, 0}, {3, 5}}, {{2, 0}, {3, 5}}};
    p.I = {10};
    p.T[10] = {{1, 0}, {2, 0}};
    auto v = validate(p);
    ASSERT_FALSE(v.empty());
    EXPECT_EQ(v[0].clause, "P4a");
}

TEST(Extensions, ValidAndBelow) {
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        auto errs = scenario::forcing_scenario(seed);
        EXPECT_TRUE(errs.empty()) << seed << ": " << errs.front();
    }
}

TEST(Extensions, Errors) {
    auto p = extend_add_point(Condition{}, {1, 1}, 10);
    EXPECT_THROW(extend_add_point(p, {1, 1}, 10), Error);
    EXPECT_THROW(extend_add_point(p, {2, 1}, 15), Error);
    EXPECT_THROW(extend_add_point(p, {12, 1}, 10), Error);
    EXPECT_THROW(extend_uplus(p, {1, 1}, {2, 0}, 10), Error);
    EXPECT_THROW(extend_define_f(p, 10, 10), Error);
    auto g = extend_define_g(p, {1, 1}, 10);
    EXPECT_THROW(extend_define_g(g, {1, 1}, 10), Error);
}

TEST(Leq, PartialOrderOnRuns) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto sched = twin_schedule(seed);
        auto log = generic_run(sched, 1000, seed);
        // the last entry is the amalgam, which only extends each twin side on its own
        const std::vector<Condition> e(log.entries.begin(), log.entries.end() - 1);
        for (std::size_t i = 0; i < e.size(); ++i) {
            EXPECT_FALSE(leq(e[i], e[i]).has_value());
            for (std::size_t j = 0; j < i; ++j) {
                // later entries are stronger; the converse fails unless equal
                EXPECT_FALSE(leq(e[i], e[j]).has_value()) << seed << " " << i << " " << j;
                if (!(normalized(e[i]) == normalized(e[j]))) {
                    EXPECT_TRUE(leq(e[j], e[i]).has_value());
                }
            }
        }
    }
}

TEST(IsoType, MatchesExplicitSearch) {
    std::mt19937_64 rng(19);
    std::vector<Condition> pool;
    for (int i = 0; i < 40; ++i) {
        auto p = small_condition(rng);
        pool.push_back(p);
        // an increasing relabeling of the same structure
        const auto sp = supp(p);
        std::vector<int> cols(sp.begin(), sp.end());
        std::map<int, int> rho;
        int next = 0;
        for (int c : cols) {
            next += 1 + static_cast<int>(rng() % 3);
            rho[c] = c == 10 || c == 20 ? c * 3 : next;
        }
        bool ok = true;
        for (auto [c, img] : rho)
            for (auto [d, img2] : rho)
                if (c < d && img >= img2) ok = false;
        if (ok) pool.push_back(map_columns(p, [&](int a) { return rho.at(a); }));
    }
    for (std::size_t i = 0; i < pool.size(); ++i)
        for (std::size_t j = 0; j < pool.size(); ++j) {
            if (supp(pool[i]).size() > 6) continue;
            EXPECT_EQ(iso_type(pool[i]) == iso_type(pool[j]), same_type_by_search(pool[i], pool[j])) << i << " " << j;
        }
}

TEST(Twins, OplusIsCommonLowerBound) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        auto [pa, pb] = twin_pair(seed);
        EXPECT_FALSE(twin_failure(pa, pb).has_value());
        EXPECT_EQ(iso_type(pa), iso_type(pb));
        auto r = oplus(pa, pb);
        EXPECT_TRUE(valid(r));
        EXPECT_FALSE(leq(r, pa).has_value());
        EXPECT_FALSE(leq(r, pb).has_value());
    }
}

TEST(Twins, FailuresNamed) {
    auto [pa, pb] = twin_pair(4);
    auto c = extend_add_point(pb, {27, 0}, 50);
    EXPECT_TRUE(twin_failure(pa, c).has_value());
    EXPECT_THROW(oplus(pa, c), Error);
}

TEST(Amalgam, RestrictionKeys) {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        auto [pa, pb] = twin_pair(seed);
        auto color = seeded_coloring(seed);
        auto qa = recipe_quadruple(pa, pa.tree(30), 0, color);
        auto qb = recipe_quadruple(pb, pb.tree(40), 0, color);
        ASSERT_TRUE(qa && qb);
        GridElem t{26, std::max(qa->y.n, qb->w.n) + 1};
        auto am = amalgamate_r(pa, pb, *qa, *qb, 30, 40, t);
        EXPECT_TRUE(am.key1 && am.key2 && am.identity1 && am.identity2);
        EXPECT_TRUE(is_i_maximal(pa, pa.tree(30), qa->x, qa->y, 0, color) || qa->low_empty);
        EXPECT_THROW(amalgamate_r(pa, pb, *qa, *qb, 30, 40, qa->y), Error);
    }
}

TEST(Restrict, IdentityOnOwnSupport) {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        auto [pa, pb] = twin_pair(seed);
        EXPECT_EQ(normalized(restrict(pa, supp(pa))), normalized(pa));
        auto r = oplus(pa, pb);
        EXPECT_EQ(normalized(restrict(r, supp(pa))), normalized(pa));
        EXPECT_EQ(normalized(restrict(r, supp(pb))), normalized(pb));
    }
}

TEST(ConditionIO, RoundTrip) {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        auto [pa, pb] = twin_pair(seed);
        for (auto& p : {pa, pb, oplus(pa, pb)}) {
            auto text = write_condition(p, "x");
            auto back = parse_condition(text);
            EXPECT_EQ(back, normalized(p));
            EXPECT_EQ(write_condition(back, "x"), text);
        }
    }
}

TEST(ConditionIO, Errors) {
    EXPECT_THROW(parse_condition(""), Error);
    EXPECT_THROW(parse_condition("A: (1,2\n"), Error);
    EXPECT_THROW(parse_condition("A: (1,2)\nLE: (1,2)<(3,4)\n"), Error);
    EXPECT_THROW(parse_condition("Q: 1\n"), Error);
    EXPECT_THROW(parse_condition("F: 10,20=3\n"), Error);
}
