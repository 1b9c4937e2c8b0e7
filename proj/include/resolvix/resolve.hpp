#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "resolvix/family.hpp"

namespace resolvix::family {

// ---------------------------------------------------------------- local pairs and the greedy merge

// Members contained in U, smallest total extent first (so proper subsets precede supersets).
inline Sub members_below(const SetFamily& F, const Extent& U) {
    Sub s;
    for (std::size_t i = 0; i < F.size(); ++i)
        if (subset(F[i].ext, U)) s.push_back(i);
    std::stable_sort(s.begin(), s.end(), [&](auto a, auto b) {
        return popcount(F[a].ext.in) + popcount(F[a].ext.out) < popcount(F[b].ext.in) + popcount(F[b].ext.out);
    });
    return s;
}

// Backtracking search for a good pair drawn from members below U with both unions equal to U.
inline std::optional<GoodPair> find_local_pair(const SetFamily& F, std::size_t U) {
    const Extent ue = F[U].ext;
    const Mask tails = F.tail_cover(ue);
    Sub S = members_below(F, ue);
    std::vector<Mask> rest(S.size() + 1, 0);
    for (std::size_t i = S.size(); i-- > 0;) rest[i] = rest[i + 1] | F[S[i]].ext.in;
    Sub side[2];
    Mask got[2] = {0, 0};
    std::optional<GoodPair> found;
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (found) return;
        for (int s = 0; s < 2; ++s)
            if (!subset(ue.in & ~tails, got[s] | rest[i])) return;
        if (i == S.size()) {
            Sub l = side[0], r = side[1];
            std::sort(l.begin(), l.end());
            std::sort(r.begin(), r.end());
            found = GoodPair{l, r};
            return;
        }
        std::size_t v = S[i];
        for (int k = 0; k < 2; ++k) {
            const int s = static_cast<int>((i + static_cast<std::size_t>(k)) % 2);  // alternate the preferred side
            // fillers of v are strictly smaller, hence already placed
            if (!fills_set_ok(F, side[1 - s], F[v].ext)) continue;
            side[s].push_back(v);
            Mask keep = got[s];
            got[s] |= F[v].ext.in;
            rec(i + 1);
            got[s] = keep;
            side[s].pop_back();
            if (found) return;
        }
        rec(i + 1);
    };
    rec(0);
    return found;
}

inline std::map<std::size_t, GoodPair> find_local_pairs(const SetFamily& F) {
    std::map<std::size_t, GoodPair> out;
    for (std::size_t u = 0; u < F.size(); ++u)
        if (auto p = find_local_pair(F, u)) out.emplace(u, *p);
    return out;
}

struct GreedyResolution {
    std::vector<int> side;  // per member
    GoodPair merged;        // the merged good pair before untouched members are assigned
    Sub touched;
    std::vector<FillCertificate> certificates[2];
};

inline GreedyResolution resolve_good_pair_greedy(const SetFamily& F, const std::map<std::size_t, GoodPair>& local) {
    GreedyResolution res;
    GoodPair acc;
    for (std::size_t u = 0; u < F.size(); ++u) {
        auto it = local.find(u);
        if (it == local.end()) fail(ErrorKind::Unresolvable, "no local good pair for " + F[u].name);
        const GoodPair& lp = it->second;
        const Mask need = F[u].ext.in & ~F.tail_cover(F[u].ext);
        if (!is_good_pair(F, lp) || !subset(need, union_in(F, lp.left)) || !subset(need, union_in(F, lp.right)))
            fail(ErrorKind::Unresolvable, "local pair for " + F[u].name + " is not a good pair covering it");
        acc = extend_fill(F, acc, lp);
    }
    res.merged = acc;
    res.touched = sub_union(acc.left, acc.right);
    res.side.assign(F.size(), 0);
    for (auto r : acc.right) res.side[r] = 1;
    Sub sides[2];
    for (std::size_t i = 0; i < F.size(); ++i) sides[res.side[i]].push_back(i);
    for (int s = 0; s < 2; ++s) {
        auto r = fills(F, sides[s], F.all());
        if (!r.ok()) fail(ErrorKind::Unresolvable, "merged side does not fill " + F[*r.failure->target].name);
        res.certificates[s] = r.certificates;
    }
    return res;
}

// ---------------------------------------------------------------- the staged filler

// Largest subfamily of members below W that fills itself; W must survive.
inline std::optional<Sub> self_filling_witness(const SetFamily& F, const Sub& universe, std::size_t W) {
    Sub C;
    for (auto v : universe)
        if (subset(F[v].ext, F[W].ext)) C.push_back(v);
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t i = 0; i < C.size(); ++i)
            if (!fills_set_ok(F, C, F[C[i]].ext)) {
                C.erase(C.begin() + static_cast<long>(i));
                changed = true;
                break;
            }
    }
    if (!sub_contains(C, W)) return std::nullopt;
    return C;
}

// B(W,A): weakly increasing members of C∖A below W covering W.
inline Sub b_of(const SetFamily& F, std::size_t W, const Sub& A, const Sub& universe) {
    auto C = self_filling_witness(F, universe, W);
    if (!C) fail(ErrorKind::NoCertificate, F[W].name + " has no self-filling witness family");
    Sub V;
    for (auto v : *C)
        if (!sub_contains(A, v) && proper_subset(F[v].ext, F[W].ext)) V.push_back(v);
    Sub out = weakly_increasing_subfamily(F, V);
    Mask need = F[W].ext.in & ~F.tail_cover(F[W].ext);
    if (!subset(need, union_in(F, out))) fail(ErrorKind::NoCertificate, "cover of " + F[W].name + " avoiding A is incomplete");
    return out;
}

// Blocks of `width` consecutive naturals, block b assigned to the first Cantor coordinate of b.
inline std::size_t schedule_class(std::size_t j, std::size_t width) {
    std::size_t b = j / width, w = 0;
    while ((w + 1) * (w + 2) / 2 <= b) ++w;
    std::size_t n = b - w * (w + 1) / 2;
    return w - n;
}

struct StagedStep {
    std::size_t stage = 0;
    std::size_t from_class = 0;
    std::size_t target = 0;
    Sub added[2];
};

struct StagedResult {
    GoodPair pair;
    std::vector<StagedStep> steps;
    Sub pending;
};

inline StagedResult staged_filler(const SetFamily& F, std::size_t U, const GoodPair& seeds, std::size_t depth,
                                  std::size_t width = 4) {
    if (width == 0) fail(ErrorKind::InvalidArgument, "block width must be positive");
    if (!sub_disjoint(seeds.left, seeds.right)) fail(ErrorKind::PreconditionFailed, "seeds overlap");
    StagedResult res;
    res.pair = seeds;
    if (depth == 0) return res;
    const Sub universe = F.all();
    for (auto v : universe)
        if (!self_filling_witness(F, universe, v))
            fail(ErrorKind::PreconditionFailed, F[v].name + " has no finite fill certificate inside the family");
    std::vector<Sub> snapshot;  // range of f_m, fixed at stage m
    for (std::size_t m = 0; m < depth; ++m) {
        Sub range{U};
        for (auto v : sub_union(res.pair.left, res.pair.right))
            if (v != U) range.push_back(v);
        snapshot.push_back(range);
        std::size_t l = schedule_class(m, width);
        if (l >= m) continue;
        std::size_t pos = 0;  // position of m inside D_l minus {0..l}
        for (std::size_t j = l + 1; j < m; ++j)
            if (schedule_class(j, width) == l) ++pos;
        const Sub& dom = snapshot[l];
        std::size_t V = dom[pos % dom.size()];
        StagedStep st{m, l, V, {}};
        Sub add0 = sub_minus(b_of(F, V, res.pair.right, universe), res.pair.left);
        res.pair.left = sub_union(res.pair.left, add0);
        Sub add1 = sub_minus(b_of(F, V, res.pair.left, universe), res.pair.right);
        res.pair.right = sub_union(res.pair.right, add1);
        st.added[0] = add0;
        st.added[1] = add1;
        res.steps.push_back(std::move(st));
    }
    for (int s = 0; s < 2; ++s) {
        const Sub& mine = s == 0 ? res.pair.left : res.pair.right;
        const Sub& other = s == 0 ? res.pair.right : res.pair.left;
        for (auto v : mine)
            if (!fills_set_ok(F, other, F[v].ext) && !sub_contains(res.pending, v)) res.pending.push_back(v);
    }
    if (!fills_set_ok(F, res.pair.left, F[U].ext) || !fills_set_ok(F, res.pair.right, F[U].ext))
        if (!sub_contains(res.pending, U)) res.pending.push_back(U);
    std::sort(res.pending.begin(), res.pending.end());
    if (!res.pending.empty()) {
        std::string names;
        for (auto v : res.pending) names += " " + F[v].name;
        fail(ErrorKind::ScheduleExhausted, "pending:" + names);
    }
    return res;
}

// ---------------------------------------------------------------- sigma-disjoint levels

struct SigmaResult {
    std::vector<int> side;
    std::vector<Sub> level_side[2];  // B_{i,n}
};

inline SigmaResult resolve_sigma_disjoint(const SetFamily& F, const std::vector<std::vector<Extent>>& levels) {
    SigmaResult res;
    for (auto& lev : levels)
        for (std::size_t a = 0; a < lev.size(); ++a)
            for (std::size_t b = a + 1; b < lev.size(); ++b)
                if ((lev[a].in & lev[b].in) || (lev[a].out & lev[b].out))
                    fail(ErrorKind::PreconditionFailed, "level members are not pairwise disjoint");
    Sub used;
    for (std::size_t n = 0; n < levels.size(); ++n) {
        for (int i = 0; i < 2; ++i) {
            Sub level_i;
            for (std::size_t e = 0; e < levels[n].size(); ++e) {
                const Extent& E = levels[n][e];
                Sub cand;
                for (std::size_t v = 0; v < F.size(); ++v)
                    if (!sub_contains(used, v) && proper_subset(F[v].ext, E)) cand.push_back(v);
                Sub ue = weakly_increasing_subfamily(F, cand);
                Mask need = E.in & ~F.tail_cover(E);
                if (!subset(need, union_in(F, ue)))
                    fail(ErrorKind::ScheduleExhausted, "level " + std::to_string(n) + " member " + std::to_string(e) +
                                                           " has no cover for side " + std::to_string(i));
                level_i = sub_union(level_i, ue);
            }
            used = sub_union(used, level_i);
            res.level_side[i].push_back(level_i);
        }
    }
    res.side.assign(F.size(), 0);
    for (auto& s : res.level_side[1])
        for (auto v : s) res.side[v] = 1;
    return res;
}

// ---------------------------------------------------------------- finite unions

// A family given by a membership predicate on window masks (window of at most 20 points).
struct MaskFamily {
    std::size_t points = 0;
    std::function<bool(Mask)> member;
    Mask window() const { return (Mask{1} << points) - 1; }
};

// All nonempty unions of dyadic intervals down to single cells: every nonempty subset.
inline MaskFamily dyadic_union_closed(unsigned bits) {
    return MaskFamily{std::size_t{1} << bits, [](Mask m) { return m != 0; }};
}

struct FinUnionCert {
    Mask target = 0;
    std::size_t point = 0;
    std::size_t level = 0;  // n' with U_{n'} ⊆ V' and y_{n'} ∉ V'
    Mask W = 0;
    Mask filler = 0;
};

struct FinUnionResult {
    std::vector<Mask> side[2];
    // Members of side[i] whose threshold sits too close to the end of the chain: their fillers
    // lie past the window, so they play the frontier role and carry no certificate.
    std::vector<Mask> truncated[2];
    std::vector<FinUnionCert> certificates;
};

// Least n with chain[n] ⊆ V, or chain.size() if none.
inline std::size_t threshold_index(const std::vector<Mask>& chain, Mask V) {
    for (std::size_t n = 0; n < chain.size(); ++n)
        if (subset(chain[n], V)) return n;
    return chain.size();
}

inline FinUnionResult resolve_finite_union_closed(const MaskFamily& B, Mask U, const std::vector<Mask>& chain,
                                                  const std::vector<std::size_t>& ys) {
    if (B.points > 20) fail(ErrorKind::InvalidArgument, "finite-union window limited to 20 points");
    if (chain.size() < 4) fail(ErrorKind::ChainTooShort, "need U_0..U_3 at least");
    if (ys.size() + 1 != chain.size()) fail(ErrorKind::InvalidArgument, "need one point y_n per chain step");
    if (!subset(chain[0], U)) fail(ErrorKind::PreconditionFailed, "U_0 not inside U");
    for (std::size_t n = 0; n < chain.size(); ++n) {
        if (!B.member(chain[n])) fail(ErrorKind::PreconditionFailed, "chain element " + std::to_string(n) + " not in B");
        if (n > 0) {
            if (!subset(chain[n], chain[n - 1]) || chain[n] == chain[n - 1])
                fail(ErrorKind::PreconditionFailed, "chain not strictly decreasing at " + std::to_string(n));
            Mask y = Mask{1} << ys[n - 1];
            if (!(chain[n - 1] & y) || (chain[n] & y))
                fail(ErrorKind::PreconditionFailed, "y_" + std::to_string(n) + " not in U_{n-1} minus U_n");
        }
    }
    std::vector<Mask> mem;
    for (Mask v = U;; v = (v - 1) & U) {
        if (v && B.member(v)) mem.push_back(v);
        if (v == 0) break;
    }
    std::sort(mem.begin(), mem.end());
    // union-closure and the T1 surrogate, sampled on the first members
    std::size_t cap = std::min<std::size_t>(mem.size(), 256);
    for (std::size_t a = 0; a < cap; ++a)
        for (std::size_t b = a + 1; b < cap; ++b)
            if (!B.member(mem[a] | mem[b])) fail(ErrorKind::NotUnionClosed, "union of two sampled members is missing");
    for (std::size_t x = 0; x < B.points; ++x)
        for (std::size_t y = 0; y < B.points; ++y) {
            if (x == y || !(U >> x & 1)) continue;
            bool ok = false;
            for (auto v : mem)
                if ((v >> x & 1) && !(v >> y & 1)) {
                    ok = true;
                    break;
                }
            if (!ok) fail(ErrorKind::PreconditionFailed, "no member separates point " + std::to_string(x) + " from " + std::to_string(y));
        }
    const std::size_t L = chain.size();
    FinUnionResult res;
    for (auto v : mem) {
        std::size_t n0 = threshold_index(chain, v);
        if (n0 < 2 || n0 >= L) continue;
        int i = static_cast<int>(n0 % 2);
        // certificates need some n' > n0 of the opposite parity with room for a second choice
        res.side[i].push_back(v);
        if (n0 + 3 > L - 1) res.truncated[i].push_back(v);
    }
    // V' = U_{n'} ∪ W per the proof, W found by exhaustive search over members
    for (int i = 0; i < 2; ++i)
        for (auto v : res.side[i]) {
            std::size_t n0 = threshold_index(chain, v);
            if (n0 + 3 > L - 1) continue;
            for (std::size_t z = 0; z < B.points; ++z) {
                if (!(v >> z & 1)) continue;
                bool done = false;
                for (std::size_t np = n0 + 1; np < L && !done; ++np) {
                    if (np % 2 == static_cast<std::size_t>(i) || np < 2) continue;
                    std::size_t y = ys[np - 1];
                    if (y == z || !subset(chain[np - 1], v)) continue;
                    Mask room = v & ~(Mask{1} << y);
                    for (auto w : mem)
                        if ((w >> z & 1) && subset(w, room)) {
                            res.certificates.push_back({v, z, np, w, chain[np] | w});
                            done = true;
                            break;
                        }
                }
                if (!done) fail(ErrorKind::NoCertificate, "no filler for a member at point " + std::to_string(z));
            }
        }
    return res;
}

// ---------------------------------------------------------------- the Cohen-style greedy

struct CohenRequirement {
    std::size_t point = 0, member = 0;
    int color = 0;
};

struct CohenResult {
    GoodPair pair;
    std::vector<int> coloring;  // -1 for members the greedy never touched
    std::size_t requirements = 0;
    std::size_t met_by_frontier = 0;
};

inline CohenResult cohen_good_pair(const SetFamily& F, std::uint64_t seed) {
    struct Req {
        CohenRequirement r;
        Sub cands;
    };
    std::vector<Req> reqs;
    CohenResult res;
    for (std::size_t v = 0; v < F.size(); ++v) {
        Mask tails = F.tail_cover(F[v].ext);
        for (std::size_t x = 0; x < 64; ++x) {
            if (!(F[v].ext.in >> x & 1)) continue;
            for (int i = 0; i < 2; ++i) {
                ++res.requirements;
                if (tails >> x & 1) {
                    ++res.met_by_frontier;
                    continue;
                }
                Req q{{x, v, i}, {}};
                for (std::size_t w = 0; w < F.size(); ++w)
                    if ((F[w].ext.in >> x & 1) && proper_subset(F[w].ext, F[v].ext)) q.cands.push_back(w);
                reqs.push_back(std::move(q));
            }
        }
    }
    std::stable_sort(reqs.begin(), reqs.end(), [](const Req& a, const Req& b) { return a.cands.size() < b.cands.size(); });
    res.coloring.assign(F.size(), -1);
    for (auto& q : reqs) {
        bool met = false;
        Sub free;
        for (auto w : q.cands) {
            if (res.coloring[w] == q.r.color) met = true;
            if (res.coloring[w] < 0) free.push_back(w);
        }
        if (met) continue;
        if (free.empty())
            fail(ErrorKind::RequirementUnmeetable, "point " + F.ground()[q.r.point] + " in " + F[q.r.member].name +
                                                       " color " + std::to_string(q.r.color));
        std::uint64_t h = mix64(seed ^ mix64(q.r.point * 1315423911ULL + q.r.member * 2654435761ULL + q.r.color));
        res.coloring[free[h % free.size()]] = q.r.color;
    }
    // every member is filled on both sides already, so untouched members may go either way
    for (std::size_t v = 0; v < F.size(); ++v) {
        int c = res.coloring[v] >= 0 ? res.coloring[v] : static_cast<int>(mix64(seed ^ (v * 0x9e3779b9ULL + 17)) & 1);
        (c == 1 ? res.pair.right : res.pair.left).push_back(v);
    }
    if (!is_good_pair(F, res.pair)) fail(ErrorKind::ValidationFailed, "greedy coloring is not a good pair");
    return res;
}

// ---------------------------------------------------------------- thinning

inline Sub extract_negligible(const SetFamily& F, std::size_t target_size) {
    const Sub all = F.all();
    if (!fills_ok(F, all, all)) fail(ErrorKind::NotFilling, "family does not fill itself at window scale");
    Sub U;
    for (std::size_t v = 0; v < F.size() && U.size() < target_size; ++v) {
        bool inc = true;
        for (auto u : U)
            if (subset(F[v].ext, F[u].ext)) inc = false;
        if (!inc) continue;
        Sub trial = U;
        trial.push_back(v);
        if (fills_ok(F, sub_minus(all, trial), all)) U = trial;
    }
    if (U.size() < target_size)
        fail(ErrorKind::TooSmall, "largest greedy weakly increasing negligible family has " + std::to_string(U.size()));
    return U;
}

struct LValue {
    std::size_t value = 0;
    Sub witnesses;
};

// Minimum number of proper subsets covering U's window points (branch and bound).
inline LValue L_value(const SetFamily& F, std::size_t U) {
    const Extent ue = F[U].ext;
    Sub cand;
    for (std::size_t v = 0; v < F.size(); ++v)
        if (proper_subset(F[v].ext, ue) && F[v].ext.in) cand.push_back(v);
    if (!subset(ue.in, union_in(F, cand))) fail(ErrorKind::NoCertificate, F[U].name + " has no fill certificate");
    LValue best{cand.size() + 1, {}};
    Sub cur;
    std::function<void(Mask)> rec = [&](Mask covered) {
        if (cur.size() >= best.value) return;
        Mask left = ue.in & ~covered;
        if (!left) {
            best.value = cur.size();
            best.witnesses = cur;
            return;
        }
        std::size_t x = static_cast<std::size_t>(std::countr_zero(left));
        for (auto v : cand)
            if (F[v].ext.in >> x & 1) {
                cur.push_back(v);
                rec(covered | F[v].ext.in);
                cur.pop_back();
            }
    };
    rec(0);
    std::sort(best.witnesses.begin(), best.witnesses.end());
    return best;
}

// ---------------------------------------------------------------- separation and splitting

inline std::vector<Sub> weak_separation_partition(const SetFamily& F, const std::vector<std::size_t>& assign) {
    const std::size_t n = F.ground().size();
    if (assign.size() != n) fail(ErrorKind::InvalidArgument, "assignment must cover every window point");
    for (std::size_t x = 0; x < n; ++x)
        if (!(F[assign[x]].ext.in >> x & 1))
            fail(ErrorKind::PreconditionFailed, "point " + F.ground()[x] + " not in its assigned set");
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = x + 1; y < n; ++y)
            if ((F[assign[x]].ext.in >> y & 1) && (F[assign[y]].ext.in >> x & 1))
                fail(ErrorKind::NotWeaklySeparated, F.ground()[x] + " " + F.ground()[y]);
    std::vector<Sub> out(n);
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t u = 0; u < F.size(); ++u)
            if ((F[u].ext.in >> x & 1) && subset(F[u].ext, F[assign[x]].ext)) out[x].push_back(u);
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = x + 1; y < n; ++y)
            if (!sub_disjoint(out[x], out[y]))
                fail(ErrorKind::ValidationFailed, "families of " + F.ground()[x] + " and " + F.ground()[y] + " overlap");
    return out;
}

inline std::pair<Sub, Sub> split_cover_and_base(const SetFamily& F) {
    const Sub all = F.all();
    if (!subset(F.window(), union_in(F, all))) fail(ErrorKind::PreconditionFailed, "family does not cover the window");
    if (!fills_ok(F, all, all)) fail(ErrorKind::NotFilling, "family does not fill itself at window scale");
    Sub cover = weakly_increasing_subfamily(F, all);
    Sub base = sub_minus(all, cover);
    auto r = fills(F, base, all);
    if (!r.ok()) fail(ErrorKind::NotFilling, "remainder does not fill " + F[*r.failure->target].name);
    return {cover, base};
}

}  // namespace resolvix::family
