#pragma once

#include <algorithm>
#include <bit>
#include <functional>
#include <iterator>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "resolvix/forcing.hpp"

namespace resolvix::forcing {

// ---------------------------------------------------------------- schedules

enum class SpecKind { AddPoint, AddRoot, Uplus, DefineF, DefineG, G5 };

struct DenseSpec {
    SpecKind kind = SpecKind::AddPoint;
    std::optional<GridElem> x, y;  // explicit points where the kind takes them
    int a = 0, b = 0;              // indices (gamma / alpha,beta) or zeta for add-root
};

inline std::string to_string(const DenseSpec& s) {
    switch (s.kind) {
        case SpecKind::AddPoint: return "add-point " + str(*s.x) + " " + std::to_string(s.a);
        case SpecKind::AddRoot: return "add-root " + std::to_string(s.a) + " " + std::to_string(s.b);
        case SpecKind::Uplus:
            return "uplus " + std::to_string(s.a) + (s.x ? " " + str(*s.x) + " " + str(*s.y) : std::string());
        case SpecKind::DefineF: return "define-f " + std::to_string(s.a) + " " + std::to_string(s.b);
        case SpecKind::DefineG: return "define-g " + str(*s.x) + " " + std::to_string(s.a);
        case SpecKind::G5: return "g5 " + std::to_string(s.a) + " " + std::to_string(s.b);
    }
    return "";
}

struct Schedule {
    std::string name = "s";
    std::vector<DenseSpec> specs;
    friend bool operator==(const Schedule&, const Schedule&) = default;
};

inline bool operator==(const DenseSpec& l, const DenseSpec& r) {
    return l.kind == r.kind && l.x == r.x && l.y == r.y && l.a == r.a && l.b == r.b;
}

inline Schedule parse_schedule(std::string_view src) {
    Schedule s;
    bool header = false;
    for (auto& [ln, line] : text::logical_lines(src)) {
        auto tok = text::split_ws(line);
        std::string where = "line " + std::to_string(ln) + ": ";
        auto elem = [&](const std::string& t) {
            auto e = grid::parse_elem(t);
            if (!e) fail(ErrorKind::ParseError, where + "bad grid element '" + t + "'");
            return *e;
        };
        auto num = [&](const std::string& t) { return static_cast<int>(text::parse_int(t, ln)); };
        auto need = [&](std::size_t lo, std::size_t hi) {
            if (tok.size() < lo || tok.size() > hi) fail(ErrorKind::ParseError, where + "wrong arity for " + tok[0]);
        };
        if (tok[0] == "schedule") {
            need(2, 2);
            s.name = tok[1];
            header = true;
            continue;
        }
        DenseSpec d;
        if (tok[0] == "add-point") {
            need(3, 3);
            d.kind = SpecKind::AddPoint;
            d.x = elem(tok[1]);
            d.a = num(tok[2]);
        } else if (tok[0] == "add-root") {
            need(2, 3);
            d.kind = SpecKind::AddRoot;
            d.a = num(tok[1]);
            d.b = tok.size() == 3 ? num(tok[2]) : 0;
        } else if (tok[0] == "uplus") {
            if (tok.size() != 2 && tok.size() != 4) fail(ErrorKind::ParseError, where + "uplus takes an index and optionally two points");
            d.kind = SpecKind::Uplus;
            d.a = num(tok[1]);
            if (tok.size() == 4) {
                d.x = elem(tok[2]);
                d.y = elem(tok[3]);
            }
        } else if (tok[0] == "define-f") {
            need(3, 3);
            d.kind = SpecKind::DefineF;
            d.a = num(tok[1]);
            d.b = num(tok[2]);
        } else if (tok[0] == "define-g") {
            need(3, 3);
            d.kind = SpecKind::DefineG;
            d.x = elem(tok[1]);
            d.a = num(tok[2]);
        } else if (tok[0] == "g5") {
            need(3, 3);
            d.kind = SpecKind::G5;
            d.a = num(tok[1]);
            d.b = num(tok[2]);
        } else {
            fail(ErrorKind::ParseError, where + "unknown spec '" + tok[0] + "'");
        }
        s.specs.push_back(d);
    }
    if (!header) fail(ErrorKind::ParseError, "missing 'schedule <name>' header");
    return s;
}

inline std::string write_schedule(const Schedule& s) {
    std::ostringstream os;
    os << "schedule " << s.name << "\n";
    for (auto& d : s.specs) os << to_string(d) << "\n";
    return os.str();
}

// ---------------------------------------------------------------- the runner

inline ColorFn seeded_coloring(std::uint64_t seed) {
    return [seed](const GridElem& x) {
        return static_cast<int>(mix64(seed ^ (static_cast<std::uint64_t>(x.alpha) * 1000003ULL + static_cast<std::uint64_t>(x.n))) & 1);
    };
}

struct G5Record {
    int alpha = 0, beta = 0;
    Quad qa, qb;
    GridElem t;
};

struct BranchingNote {
    int alpha = 0;
    GridElem node;
    std::size_t children = 0;
};

struct GenericLog {
    std::vector<Condition> entries;  // entries[0] is the empty condition
    std::vector<std::string> met;
    std::vector<G5Record> g5;
    Condition fragment;              // member-wise unions of the entries
    std::vector<BranchingNote> thin_nodes;  // nodes short of the branching surrogate
};

inline int fresh_level_in(const Condition& p, int column, int above) {
    int m = above + 1;
    while (p.A.count({column, m})) ++m;
    return m;
}

inline Condition member_union(const std::vector<Condition>& cs) {
    Condition u;
    for (auto& c : cs) {
        u.A.insert(c.A.begin(), c.A.end());
        u.lt.insert(c.lt.begin(), c.lt.end());
        u.I.insert(c.I.begin(), c.I.end());
        for (auto& [a, t] : c.T) u.T[a].insert(t.begin(), t.end());
        for (auto& [k, v] : c.f) u.f[k] = v;
        for (auto& [k, v] : c.g) u.g[k] = v;
    }
    return normalized(u);
}

inline std::vector<BranchingNote> thin_nodes(const Condition& p, std::size_t branching) {
    std::vector<BranchingNote> out;
    for (int a : p.I)
        for (auto& x : p.tree(a)) {
            int lv = tree_level(p, a, x);
            std::size_t kids = 0;
            for (auto& y : p.tree(a))
                if (p.less(x, y) && tree_level(p, a, y) == lv + 1) ++kids;
            if (kids < branching) out.push_back({a, x, kids});
        }
    return out;
}

// Applies one spec; `step` and `seed` drive the only free choices.
inline Condition apply_spec(const Condition& p, const DenseSpec& d, std::size_t step, std::uint64_t seed,
                            ValidateOptions opt, GenericLog* log = nullptr) {
    switch (d.kind) {
        case SpecKind::AddPoint: return extend_add_point(p, *d.x, d.a, opt);
        case SpecKind::AddRoot: {
            int col = std::max(d.b, 0);
            if (col >= d.a) fail(ErrorKind::BadIndex, "no column between zeta and the index");
            return extend_add_point(p, GridElem{col, fresh_level_in(p, col, -1)}, d.a, opt);
        }
        case SpecKind::Uplus: {
            if (d.x) return extend_uplus(p, *d.x, *d.y, d.a, opt);
            const auto& tr = p.tree(d.a);
            if (tr.empty()) fail(ErrorKind::PreconditionFailed, "T_" + std::to_string(d.a) + " is empty");
            std::vector<GridElem> v(tr.begin(), tr.end());
            GridElem a = v[mix64(seed ^ (step * 0x2545F491ULL)) % v.size()];
            int col = a.alpha + 1;
            if (col >= d.a) fail(ErrorKind::PreconditionFailed, "no room above " + str(a) + " inside the index");
            return extend_uplus(p, a, GridElem{col, fresh_level_in(p, col, a.n)}, d.a, opt);
        }
        case SpecKind::DefineF: return extend_define_f(p, d.a, d.b, opt);
        case SpecKind::DefineG: return extend_define_g(p, *d.x, d.a, opt);
        case SpecKind::G5: {
            const int alpha = d.a, beta = d.b;
            if (!p.I.count(alpha) || !p.I.count(beta) || alpha == beta)
                fail(ErrorKind::PreconditionFailed, "g5 needs two indices of I");
            std::set<int> side_cols;
            for (auto& x : p.tree(alpha)) side_cols.insert(x.alpha);
            for (auto& x : p.tree(beta)) side_cols.insert(x.alpha);
            side_cols.insert(alpha);
            side_cols.insert(beta);
            std::set<int> sa, sb;
            for (int c : supp(p))
                if (!side_cols.count(c)) {
                    sa.insert(c);
                    sb.insert(c);
                }
            sa.insert(alpha);
            sb.insert(beta);
            for (auto& x : p.tree(alpha)) sa.insert(x.alpha);
            for (auto& x : p.tree(beta)) sb.insert(x.alpha);
            Condition pa = restrict(p, sa), pb = restrict(p, sb);
            auto color = seeded_coloring(seed);
            auto qa = recipe_quadruple(pa, pa.tree(alpha), 0, color);
            auto qb = recipe_quadruple(pb, pb.tree(beta), 0, color);
            if (!qa || !qb) fail(ErrorKind::PreconditionFailed, "g5 needs nonempty trees");
            const auto s = supp(p);
            int col = std::max(qa->y.alpha, qb->w.alpha) + 1;
            while (s.count(col)) ++col;
            GridElem t{col, std::max(qa->y.n, qb->w.n) + 1};
            auto am = amalgamate_r(pa, pb, *qa, *qb, alpha, beta, t, opt);
            // The amalgam joins cones the two sides kept apart, so it only extends each side on its own.
            for (const Condition* side : {&pa, &pb})
                if (auto v = leq(am.r, *side))
                    fail(ErrorKind::ValidationFailed, "amalgam is not below a side: " + v->clause + " " + v->detail);
            if (log) log->g5.push_back({alpha, beta, *qa, *qb, t});
            return am.r;
        }
    }
    return p;
}

inline GenericLog generic_run(const Schedule& sched, std::size_t budget, std::uint64_t seed, std::size_t branching = 2,
                              ValidateOptions opt = {}) {
    GenericLog log;
    log.entries.push_back(Condition{});
    for (std::size_t i = 0; i < sched.specs.size(); ++i) {
        if (i >= budget) {
            std::string pending;
            for (std::size_t j = i; j < sched.specs.size(); ++j) pending += (j > i ? "; " : "") + to_string(sched.specs[j]);
            fail(ErrorKind::BudgetExhausted, "pending: " + pending);
        }
        Condition next = apply_spec(log.entries.back(), sched.specs[i], i, seed, opt, &log);
        log.entries.push_back(std::move(next));
        log.met.push_back(to_string(sched.specs[i]));
    }
    log.fragment = member_union(log.entries);
    log.thin_nodes = thin_nodes(log.fragment, branching);
    return log;
}

// ---------------------------------------------------------------- scenario generators

// A side condition: kernel tree under index 10 (columns 1..5) and a tree under `alpha` in columns lo..lo+4.
inline Condition random_side(std::mt19937_64& rng, int lo, int alpha, std::size_t kernel_points, std::size_t tree_points,
                             bool with_g) {
    Condition p;
    auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
    if (kernel_points > 0) {
        p = extend_add_point(p, GridElem{1, static_cast<int>(pick(3))}, 10);
        for (std::size_t i = 1; i < kernel_points; ++i) {
            std::vector<GridElem> v(p.tree(10).begin(), p.tree(10).end());
            GridElem a = v[pick(v.size())];
            if (a.alpha + 1 > 5) continue;
            p = extend_uplus(p, a, GridElem{a.alpha + 1, fresh_level_in(p, a.alpha + 1, a.n)}, 10);
        }
    }
    p = extend_add_point(p, GridElem{lo, static_cast<int>(pick(3))}, alpha);
    for (std::size_t i = 1; i < tree_points; ++i) {
        std::vector<GridElem> v(p.tree(alpha).begin(), p.tree(alpha).end());
        GridElem a = v[pick(v.size())];
        if (a.alpha + 1 > lo + 4) continue;
        p = extend_uplus(p, a, GridElem{a.alpha + 1, fresh_level_in(p, a.alpha + 1, a.n + static_cast<int>(pick(2)))}, alpha);
    }
    if (with_g) {
        std::vector<GridElem> v(p.A.begin(), p.A.end());
        p = extend_define_g(p, v[pick(v.size())], alpha);
        if (p.I.count(10)) p = extend_define_f(p, 10, alpha);
    }
    return p;
}

// Twin pair: side at columns 11..15 under 30, mirrored to 21..25 under 40 with the kernel fixed.
inline std::pair<Condition, Condition> twin_pair(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Condition pa = random_side(rng, 11, 30, rng() % 3, 2 + rng() % 6, rng() % 2);
    Condition pb = map_columns(pa, [](int c) { return c <= 10 ? c : (c == 30 ? 40 : c + 10); });
    return {pa, pb};
}

// A schedule whose run builds the twin pair explicitly and ends with an amalgamation.
inline Schedule twin_schedule(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Schedule s;
    s.name = "twins" + std::to_string(seed);
    std::vector<DenseSpec> side;
    Condition p;
    auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
    auto push = [&](DenseSpec d) {
        p = apply_spec(p, d, 0, 0, {});
        side.push_back(d);
    };
    std::size_t kernel = pick(3);
    if (kernel) {
        s.specs.push_back({SpecKind::AddPoint, GridElem{1, 0}, std::nullopt, 10, 0});
        p = apply_spec(p, s.specs.back(), 0, 0, {});
        for (std::size_t i = 1; i < kernel; ++i) {
            DenseSpec d{SpecKind::Uplus, GridElem{1, 0}, GridElem{2, static_cast<int>(i)}, 10, 0};
            s.specs.push_back(d);
            p = apply_spec(p, d, 0, 0, {});
        }
    }
    push({SpecKind::AddPoint, GridElem{11, static_cast<int>(pick(3))}, std::nullopt, 30, 0});
    std::size_t pts = 2 + pick(6);
    for (std::size_t i = 1; i < pts; ++i) {
        std::vector<GridElem> v(p.tree(30).begin(), p.tree(30).end());
        GridElem a = v[pick(v.size())];
        if (a.alpha + 1 > 15) continue;
        push({SpecKind::Uplus, a, GridElem{a.alpha + 1, fresh_level_in(p, a.alpha + 1, a.n + static_cast<int>(pick(2)))}, 30, 0});
    }
    if (pick(2)) {
        std::vector<GridElem> v(p.tree(30).begin(), p.tree(30).end());
        push({SpecKind::DefineG, v[pick(v.size())], std::nullopt, 30, 0});
    }
    if (kernel && pick(2)) push({SpecKind::DefineF, std::nullopt, std::nullopt, 10, 30});
    auto mirror_elem = [](const GridElem& e) { return GridElem{e.alpha <= 10 ? e.alpha : e.alpha + 10, e.n}; };
    auto mirror_idx = [](int a) { return a == 30 ? 40 : a; };
    std::vector<DenseSpec> mirrored;
    for (auto d : side) {
        if (d.x) d.x = mirror_elem(*d.x);
        if (d.y) d.y = mirror_elem(*d.y);
        d.a = mirror_idx(d.a);
        d.b = mirror_idx(d.b);
        mirrored.push_back(d);
    }
    s.specs.insert(s.specs.end(), side.begin(), side.end());
    s.specs.insert(s.specs.end(), mirrored.begin(), mirrored.end());
    s.specs.push_back({SpecKind::G5, std::nullopt, std::nullopt, 30, 40});
    return s;
}

// ---------------------------------------------------------------- nice delta systems

struct DeltaSystem {
    std::vector<std::size_t> members;  // indices into the samples
    std::set<int> kernel;
    bool degenerate = false;  // every difference is empty
};

inline bool nice_pair(const std::set<int>& A, const std::set<int>& B, const std::set<int>& K) {
    std::set<int> inter;
    std::set_intersection(A.begin(), A.end(), B.begin(), B.end(), std::inserter(inter, inter.end()));
    if (inter != K) return false;
    std::set<int> da, db;
    std::set_difference(A.begin(), A.end(), K.begin(), K.end(), std::inserter(da, da.end()));
    std::set_difference(B.begin(), B.end(), K.begin(), K.end(), std::inserter(db, db.end()));
    if (!K.empty()) {
        int top = *K.rbegin();
        if ((!da.empty() && *da.begin() <= top) || (!db.empty() && *db.begin() <= top)) return false;
    }
    if (da.empty() || db.empty()) return true;
    return *da.rbegin() < *db.begin() || *db.rbegin() < *da.begin();
}

// Largest subfamily of supports forming a nice delta system (ties: lexicographically least).
inline std::optional<DeltaSystem> nice_delta_system(const std::vector<std::set<int>>& supports) {
    const std::size_t n = supports.size();
    if (n < 2) return std::nullopt;
    if (n > 62) fail(ErrorKind::InvalidArgument, "at most 62 samples");
    std::set<std::set<int>> kernels;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            std::set<int> k;
            std::set_intersection(supports[i].begin(), supports[i].end(), supports[j].begin(), supports[j].end(),
                                  std::inserter(k, k.end()));
            kernels.insert(k);
        }
    std::optional<DeltaSystem> best;
    for (auto& K : kernels) {
        std::vector<std::uint64_t> adj(n, 0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (nice_pair(supports[i], supports[j], K)) {
                    adj[i] |= 1ULL << j;
                    adj[j] |= 1ULL << i;
                }
        std::uint64_t best_mask = 0;
        std::function<void(std::uint64_t, std::uint64_t)> grow = [&](std::uint64_t cur, std::uint64_t cand) {
            if (std::popcount(cur) + std::popcount(cand) < std::popcount(best_mask)) return;
            if (!cand) {
                auto lex_less = [&](std::uint64_t a, std::uint64_t b) {
                    // lexicographic on the sorted member lists
                    while (a && b) {
                        int x = std::countr_zero(a), y = std::countr_zero(b);
                        if (x != y) return x < y;
                        a &= a - 1;
                        b &= b - 1;
                    }
                    return !a && b;
                };
                if (std::popcount(cur) > std::popcount(best_mask) ||
                    (std::popcount(cur) == std::popcount(best_mask) && lex_less(cur, best_mask)))
                    best_mask = cur;
                return;
            }
            int v = std::countr_zero(cand);
            grow(cur | (1ULL << v), cand & adj[v]);
            grow(cur, cand & ~(1ULL << v));
        };
        std::uint64_t all = n == 64 ? ~0ULL : ((1ULL << n) - 1);
        grow(0, all);
        if (std::popcount(best_mask) < 2) continue;
        DeltaSystem d;
        d.kernel = K;
        for (std::size_t i = 0; i < n; ++i)
            if (best_mask >> i & 1) d.members.push_back(i);
        d.degenerate = true;
        for (auto i : d.members)
            if (supports[i] != K) d.degenerate = false;
        bool better = !best || d.members.size() > best->members.size() ||
                      (d.members.size() == best->members.size() && d.members < best->members);
        if (better) best = d;
    }
    return best;
}

inline std::optional<DeltaSystem> nice_delta_system(const std::vector<Condition>& samples) {
    std::vector<std::set<int>> s;
    for (auto& c : samples) s.push_back(supp(c));
    return nice_delta_system(s);
}

}  // namespace resolvix::forcing
