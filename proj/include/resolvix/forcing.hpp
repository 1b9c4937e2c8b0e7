#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "resolvix/grid.hpp"

namespace resolvix::forcing {

using grid::GridElem;
using grid::grid_le;
using ElemSet = std::set<GridElem>;
using Pair = std::pair<GridElem, GridElem>;

inline bool grid_lt(const GridElem& a, const GridElem& b) { return a.alpha < b.alpha && a.n < b.n; }
inline std::string str(const GridElem& e) { return grid::to_string(e); }

// A finite condition: points, a strict order on them, tree indices with their trees, and the f/g level maps.
struct Condition {
    ElemSet A;
    std::set<Pair> lt;  // strict, transitively closed
    std::set<int> I;
    std::map<int, ElemSet> T;  // one entry per index in I
    std::map<std::pair<int, int>, int> f;  // keys ordered (lo, hi)
    std::map<std::pair<GridElem, int>, int> g;

    bool le(const GridElem& x, const GridElem& y) const { return x == y || lt.count({x, y}) != 0; }
    bool less(const GridElem& x, const GridElem& y) const { return lt.count({x, y}) != 0; }
    ElemSet up(const GridElem& x) const {
        ElemSet u;
        for (auto& y : A)
            if (le(x, y)) u.insert(y);
        return u;
    }
    const ElemSet& tree(int alpha) const {
        static const ElemSet empty;
        auto it = T.find(alpha);
        return it == T.end() ? empty : it->second;
    }
    std::optional<int> fval(int a, int b) const {
        auto it = f.find({std::min(a, b), std::max(a, b)});
        if (it == f.end()) return std::nullopt;
        return it->second;
    }
    friend bool operator==(const Condition&, const Condition&) = default;
};

inline bool meets(const ElemSet& a, const ElemSet& b) {
    for (auto& x : a)
        if (b.count(x)) return true;
    return false;
}

inline void close_order(Condition& p) {
    for (bool changed = true; changed;) {
        changed = false;
        std::vector<Pair> add;
        for (auto& [a, b] : p.lt)
            for (auto it = p.lt.lower_bound({b, GridElem{-1, -1}}); it != p.lt.end() && it->first == b; ++it)
                if (!p.lt.count({a, it->second})) add.emplace_back(a, it->second);
        for (auto& e : add) changed |= p.lt.insert(e).second;
    }
}

// Strict predecessors of x within T_alpha; the tree level is their count.
inline int tree_level(const Condition& p, int alpha, const GridElem& x) {
    int k = 0;
    for (auto& y : p.tree(alpha))
        if (p.less(y, x)) ++k;
    return k;
}
inline ElemSet tree_level_set(const Condition& p, int alpha, int n) {
    ElemSet out;
    for (auto& x : p.tree(alpha))
        if (tree_level(p, alpha, x) == n) out.insert(x);
    return out;
}
inline ElemSet tree_below_level(const Condition& p, int alpha, int n) {
    ElemSet out;
    for (auto& x : p.tree(alpha))
        if (tree_level(p, alpha, x) < n) out.insert(x);
    return out;
}
inline int tree_height(const Condition& p, int alpha) {
    int h = 0;
    for (auto& x : p.tree(alpha)) h = std::max(h, tree_level(p, alpha, x) + 1);
    return h;
}
inline ElemSet up_of_set(const Condition& p, const ElemSet& S) {
    ElemSet out;
    for (auto& x : S)
        for (auto& y : p.up(x)) out.insert(y);
    return out;
}

inline std::set<int> supp(const Condition& p) {
    std::set<int> s(p.I.begin(), p.I.end());
    for (auto& x : p.A) s.insert(x.alpha);
    return s;
}

// ---------------------------------------------------------------- validation

struct Violation {
    std::string clause;
    std::string detail;
};

struct ValidateOptions {
    int block = 10;  // indices must be positive multiples
};

inline bool is_limit(int alpha, int block) { return alpha > 0 && alpha % block == 0; }

inline std::vector<Violation> validate(const Condition& p, ValidateOptions opt = {}) {
    std::vector<Violation> out;
    auto bad = [&](const char* c, std::string d) { out.push_back({c, std::move(d)}); };
    // (P1)
    for (auto& [a, b] : p.lt) {
        if (!p.A.count(a) || !p.A.count(b)) bad("P1", "relation " + str(a) + "<" + str(b) + " leaves A");
        if (a == b) bad("P1", "reflexive pair at " + str(a));
        if (!grid_lt(a, b)) bad("P1", str(a) + "<" + str(b) + " is not inside the grid order");
        if (p.lt.count({b, a})) bad("P1", "antisymmetry fails for " + str(a) + "," + str(b));
    }
    for (auto& [a, b] : p.lt)
        for (auto& [c, d] : p.lt)
            if (b == c && !p.lt.count({a, d})) bad("P1", "not transitive at " + str(a) + "<" + str(b) + "<" + str(d));
    for (int a : p.I)
        if (!is_limit(a, opt.block)) bad("P1", "index " + std::to_string(a) + " is not a limit index");
    // (P2)
    for (auto& [a, t] : p.T) {
        if (!p.I.count(a)) bad("P2", "tree for index " + std::to_string(a) + " outside I");
        for (auto& x : t) {
            if (!p.A.count(x)) bad("P2", "tree element " + str(x) + " not in A");
            if (x.alpha >= a) bad("P2", "tree element " + str(x) + " not below index " + std::to_string(a));
            for (auto& y : t)
                for (auto& z : t)
                    if (y < z && p.less(y, x) && p.less(z, x) && !p.le(y, z) && !p.le(z, y))
                        bad("P2", "predecessors of " + str(x) + " in T_" + std::to_string(a) + " are not a chain");
        }
    }
    // (P3)
    for (auto& [k, v] : p.f) {
        if (k.first >= k.second || !p.I.count(k.first) || !p.I.count(k.second))
            bad("P3", "f defined off pairs of I at {" + std::to_string(k.first) + "," + std::to_string(k.second) + "}");
        if (v < 0) bad("P3", "negative f value");
    }
    for (auto& [k, v] : p.g) {
        if (!p.A.count(k.first) || !p.I.count(k.second))
            bad("P3", "g defined off A x I at (" + str(k.first) + "," + std::to_string(k.second) + ")");
        if (v < 0) bad("P3", "negative g value");
    }
    // (P4)(a)
    for (auto& [a, t] : p.T)
        for (auto& x : t)
            for (auto& y : t)
                if (x < y && !p.le(x, y) && !p.le(y, x) && meets(p.up(x), p.up(y)))
                    bad("P4a", str(x) + " and " + str(y) + " in T_" + std::to_string(a) + " are incomparable with a common upper bound");
    // (P4)(b), both directions
    for (auto& [k, n] : p.f) {
        auto [a, b] = k;
        ElemSet ua = up_of_set(p, tree_level_set(p, a, n)), ub = up_of_set(p, tree_level_set(p, b, n));
        std::string at = "{" + std::to_string(a) + "," + std::to_string(b) + "} level " + std::to_string(n);
        if (meets(ua, ub)) bad("P4b", "cones of the level sets meet at " + at);
        if (meets(ua, tree_below_level(p, b, n))) bad("P4b", "cone of T_" + std::to_string(a) + " meets lower levels of T_" + std::to_string(b) + " at " + at);
        if (meets(ub, tree_below_level(p, a, n))) bad("P4b", "cone of T_" + std::to_string(b) + " meets lower levels of T_" + std::to_string(a) + " at " + at);
    }
    // (P5)
    for (auto& [k, m] : p.g) {
        auto ux = p.up(k.first);
        for (auto& y : tree_level_set(p, k.second, m)) {
            auto uy = p.up(y);
            bool sub = std::includes(ux.begin(), ux.end(), uy.begin(), uy.end());
            if (!sub && meets(ux, uy))
                bad("P5", "cone of " + str(y) + " neither inside nor disjoint from cone of " + str(k.first));
        }
    }
    return out;
}

inline bool valid(const Condition& p, ValidateOptions opt = {}) { return validate(p, opt).empty(); }

// ---------------------------------------------------------------- extension order

// p <= q: p is the stronger condition. Returns the first failing clause.
inline std::optional<Violation> leq(const Condition& p, const Condition& q) {
    for (auto& x : q.A)
        if (!p.A.count(x)) return Violation{"O1", str(x) + " missing from the stronger condition"};
    for (auto& x : q.A)
        for (auto& y : q.A)
            if (q.less(x, y) != p.less(x, y)) return Violation{"O1", "order differs on " + str(x) + "," + str(y)};
    for (int a : q.I) {
        if (!p.I.count(a)) return Violation{"O2", "index " + std::to_string(a) + " missing"};
        for (auto& x : q.A)
            if (q.tree(a).count(x) != p.tree(a).count(x))
                return Violation{"O2", "T_" + std::to_string(a) + " differs at " + str(x)};
    }
    for (auto& x : p.A) {
        if (q.A.count(x)) continue;
        for (auto& y : p.up(x))
            if (q.A.count(y)) return Violation{"O3", "new " + str(x) + " lies below old " + str(y)};
    }
    for (auto& [k, v] : q.f) {
        auto it = p.f.find(k);
        if (it == p.f.end() || it->second != v) return Violation{"O4", "f not extended"};
    }
    for (auto& [k, v] : q.g) {
        auto it = p.g.find(k);
        if (it == p.g.end() || it->second != v) return Violation{"O4", "g not extended"};
    }
    for (auto& x : q.A)
        for (auto& y : q.A)
            if (x < y && !meets(q.up(x), q.up(y)) && meets(p.up(x), p.up(y)))
                return Violation{"O5", "cones of " + str(x) + " and " + str(y) + " became joined"};
    return std::nullopt;
}

// ---------------------------------------------------------------- restriction, shifting, types

inline Condition restrict(const Condition& p, const std::set<int>& cols) {
    Condition r;
    for (auto& x : p.A)
        if (cols.count(x.alpha)) r.A.insert(x);
    for (auto& [a, b] : p.lt)
        if (r.A.count(a) && r.A.count(b)) r.lt.insert({a, b});
    for (int a : p.I)
        if (cols.count(a)) {
            r.I.insert(a);
            auto& t = r.T[a];
            for (auto& x : p.tree(a))
                if (r.A.count(x)) t.insert(x);
        }
    for (auto& [k, v] : p.f)
        if (r.I.count(k.first) && r.I.count(k.second)) r.f[k] = v;
    for (auto& [k, v] : p.g)
        if (r.A.count(k.first) && r.I.count(k.second)) r.g[k] = v;
    return r;
}

inline Condition map_columns(const Condition& p, const std::function<int(int)>& rho) {
    Condition r;
    auto m = [&](const GridElem& x) { return GridElem{rho(x.alpha), x.n}; };
    for (auto& x : p.A) r.A.insert(m(x));
    for (auto& [a, b] : p.lt) r.lt.insert({m(a), m(b)});
    for (int a : p.I) r.I.insert(rho(a));
    for (auto& [a, t] : p.T) {
        auto& rt = r.T[rho(a)];
        for (auto& x : t) rt.insert(m(x));
    }
    for (auto& [k, v] : p.f) {
        int a = rho(k.first), b = rho(k.second);
        r.f[{std::min(a, b), std::max(a, b)}] = v;
    }
    for (auto& [k, v] : p.g) r.g[{m(k.first), rho(k.second)}] = v;
    return r;
}

inline Condition shift(const Condition& p, int offset) {
    return map_columns(p, [offset](int a) { return a + offset; });
}

// Canonical text of the structure after collapsing the support to 0..k-1 in order.
inline std::string iso_type(const Condition& p) {
    auto s = supp(p);
    std::map<int, int> rank;
    int i = 0;
    for (int a : s) rank[a] = i++;
    Condition c = map_columns(p, [&](int a) { return rank.at(a); });
    std::ostringstream os;
    os << "k" << s.size() << "|A";
    for (auto& x : c.A) os << str(x);
    os << "|L";
    for (auto& [a, b] : c.lt) os << str(a) << str(b);
    os << "|I";
    for (int a : c.I) os << a << ",";
    os << "|T";
    for (int a : c.I) {
        os << a << ":";
        for (auto& x : c.tree(a)) os << str(x);
        os << ";";
    }
    os << "|F";
    for (auto& [k, v] : c.f) os << k.first << "," << k.second << "=" << v << ";";
    os << "|G";
    for (auto& [k, v] : c.g) os << str(k.first) << k.second << "=" << v << ";";
    return os.str();
}

// First failing twin clause, or nullopt when p and q are twins.
inline std::optional<std::string> twin_failure(const Condition& p, const Condition& q) {
    auto sp = supp(p), sq = supp(q);
    if (sp.size() != sq.size()) return "T1: supports differ in size";
    std::set<int> inter, diff;
    for (int a : sp) (sq.count(a) ? inter : diff).insert(a);
    for (int a : sq)
        if (!sp.count(a)) diff.insert(a);
    if (!inter.empty() && !diff.empty() && *inter.rbegin() >= *diff.begin()) return "T1: kernel not below the differences";
    std::map<int, int> rho;
    for (auto ip = sp.begin(), iq = sq.begin(); ip != sp.end(); ++ip, ++iq) rho[*ip] = *iq;
    Condition img = map_columns(p, [&](int a) { return rho.at(a); });
    if (img.A != q.A) return "T2: points do not correspond";
    if (img.lt != q.lt) return "T3: orders do not correspond";
    if (img.I != q.I) return "T4: indices do not correspond";
    for (int a : q.I)
        if (img.tree(a) != q.tree(a)) return "T5: tree " + std::to_string(a) + " does not correspond";
    if (img.f != q.f) return "T6: f does not correspond";
    if (img.g != q.g) return "T7: g does not correspond";
    return std::nullopt;
}

inline Condition normalized(Condition p) {
    for (int a : p.I) p.T[a];
    return p;
}

inline Condition oplus(const Condition& p, const Condition& q) {
    if (auto why = twin_failure(p, q)) fail(ErrorKind::NotTwins, *why);
    Condition r = p;
    r.A.insert(q.A.begin(), q.A.end());
    r.lt.insert(q.lt.begin(), q.lt.end());
    r.I.insert(q.I.begin(), q.I.end());
    for (auto& [a, t] : q.T) r.T[a].insert(t.begin(), t.end());
    for (auto& [k, v] : q.f) {
        auto [it, fresh] = r.f.emplace(k, v);
        if (!fresh && it->second != v) fail(ErrorKind::ValidationFailed, "f values clash on the kernel");
    }
    for (auto& [k, v] : q.g) {
        auto [it, fresh] = r.g.emplace(k, v);
        if (!fresh && it->second != v) fail(ErrorKind::ValidationFailed, "g values clash on the kernel");
    }
    close_order(r);
    r = normalized(r);
    return r;
}

// ---------------------------------------------------------------- extensions

inline void require_valid(const Condition& r, const char* op, ValidateOptions opt) {
    auto v = validate(r, opt);
    if (!v.empty()) fail(ErrorKind::ValidationFailed, std::string(op) + ": " + v[0].clause + " " + v[0].detail);
}

inline Condition extend_add_point(const Condition& p, const GridElem& y, int gamma, ValidateOptions opt = {}) {
    if (p.A.count(y)) fail(ErrorKind::AlreadyPresent, str(y) + " already in A");
    if (!is_limit(gamma, opt.block)) fail(ErrorKind::BadIndex, std::to_string(gamma) + " is not a limit index");
    if (y.alpha >= gamma) fail(ErrorKind::BadIndex, str(y) + " is not below index " + std::to_string(gamma));
    Condition q = p;
    q.A.insert(y);
    q.I.insert(gamma);
    q.T[gamma].insert(y);
    require_valid(q, "add-point", opt);
    return q;
}

// Adds b above a inside T_gamma, closing the order.
inline Condition extend_uplus(const Condition& p, const GridElem& a, const GridElem& b, int gamma, ValidateOptions opt = {}) {
    if (!p.I.count(gamma) || !p.tree(gamma).count(a))
        fail(ErrorKind::PreconditionFailed, str(a) + " is not in T_" + std::to_string(gamma));
    if (p.A.count(b)) fail(ErrorKind::AlreadyPresent, str(b) + " already in A");
    if (!grid_lt(a, b)) fail(ErrorKind::PreconditionFailed, str(a) + " is not strictly below " + str(b) + " in the grid order");
    if (b.alpha >= gamma) fail(ErrorKind::BadIndex, str(b) + " is not below index " + std::to_string(gamma));
    Condition q = p;
    q.A.insert(b);
    q.lt.insert({a, b});
    close_order(q);
    q.T[gamma].insert(b);
    require_valid(q, "uplus", opt);
    return q;
}

// Least level empty in every tree of the condition.
inline int empty_level_all(const Condition& p) {
    int m = 0;
    for (int a : p.I) m = std::max(m, tree_height(p, a));
    return m;
}

inline Condition extend_define_f(const Condition& p, int alpha, int beta, ValidateOptions opt = {}) {
    if (alpha == beta || !p.I.count(alpha) || !p.I.count(beta))
        fail(ErrorKind::PreconditionFailed, "f needs two distinct indices of I");
    if (p.fval(alpha, beta)) fail(ErrorKind::AlreadyDefined, "f already defined on the pair");
    Condition q = p;
    q.f[{std::min(alpha, beta), std::max(alpha, beta)}] = empty_level_all(p);
    require_valid(q, "define-f", opt);
    return q;
}

inline Condition extend_define_g(const Condition& p, const GridElem& x, int alpha, ValidateOptions opt = {}) {
    if (!p.A.count(x) || !p.I.count(alpha)) fail(ErrorKind::PreconditionFailed, "g needs x in A and an index of I");
    if (p.g.count({x, alpha})) fail(ErrorKind::AlreadyDefined, "g already defined at the pair");
    Condition q = p;
    q.g[{x, alpha}] = tree_height(p, alpha);
    require_valid(q, "define-g", opt);
    return q;
}

// ---------------------------------------------------------------- intervals and the quadruple recipe

inline ElemSet interval(const Condition& p, const GridElem& lo, const GridElem& hi) {
    ElemSet out;
    for (auto& r : p.A)
        if (p.le(lo, r) && p.le(r, hi)) out.insert(r);
    return out;
}

struct Quad {
    GridElem x, y, z, w;
    bool low_empty = false;   // no color-0 element above s in the tree
    bool high_empty = false;  // no color-1 element above y in the tree
};

using ColorFn = std::function<int(const GridElem&)>;

// Top of the homogeneous intervals [x,.] in `tree`: highest level, then least element.
inline GridElem maximal_extension(const Condition& p, const ElemSet& tree, const GridElem& x, int i, const ColorFn& color) {
    std::optional<GridElem> best;
    int best_level = -1;
    for (auto& y : tree) {
        if (!p.le(x, y)) continue;
        bool ok = true;
        for (auto& r : interval(p, x, y))
            if (color(r) != i) ok = false;
        if (!ok) continue;
        int lv = 0;
        for (auto& u : tree)
            if (p.less(u, y)) ++lv;
        if (lv > best_level) {
            best = y;
            best_level = lv;
        }
    }
    return *best;
}

inline bool is_i_maximal(const Condition& p, const ElemSet& tree, const GridElem& x, const GridElem& y, int i,
                         const ColorFn& color) {
    for (auto& r : interval(p, x, y))
        if (color(r) != i) return false;
    for (auto& z : tree) {
        if (!p.less(y, z)) continue;
        bool all = true;
        for (auto& r : interval(p, x, z))
            if (color(r) != i) all = false;
        if (all) return false;
    }
    return true;
}

// The increasing quadruple built from the first tree element with column >= zeta.
inline std::optional<Quad> recipe_quadruple(const Condition& p, const ElemSet& tree, int zeta, const ColorFn& color) {
    std::optional<GridElem> s;
    for (auto& u : tree)
        if (u.alpha >= zeta) {
            s = u;
            break;
        }
    if (!s) return std::nullopt;
    auto first_in = [&](const GridElem& base, int i) -> std::optional<GridElem> {
        for (auto& u : tree)
            if (color(u) == i && p.le(base, u)) return u;
        return std::nullopt;
    };
    Quad q;
    if (auto x = first_in(*s, 0)) {
        q.x = *x;
        q.y = maximal_extension(p, tree, *x, 0, color);
    } else {
        q.x = q.y = *s;
        q.low_empty = true;
    }
    if (auto z = first_in(q.y, 1)) {
        q.z = *z;
        q.w = maximal_extension(p, tree, *z, 1, color);
    } else {
        q.z = q.w = q.y;
        q.high_empty = true;
    }
    return q;
}

// [lo,t] == [lo,top] plus t
inline bool minimal_extension_identity(const Condition& p, const GridElem& lo, const GridElem& top, const GridElem& t) {
    if (!p.less(top, t)) return false;
    auto lhs = interval(p, lo, t);
    auto rhs = interval(p, lo, top);
    rhs.insert(t);
    return lhs == rhs;
}

// ---------------------------------------------------------------- amalgamation

struct Amalgam {
    Condition r;
    bool key1 = false, key2 = false;
    bool identity1 = false, identity2 = false;
};

// Joins twin conditions and places t above y (in T_alpha) and above w (in T_beta).
inline Amalgam amalgamate_r(const Condition& pa, const Condition& pb, const Quad& qa, const Quad& qb, int alpha,
                            int beta, const GridElem& t, ValidateOptions opt = {}) {
    if (alpha == beta) fail(ErrorKind::PreconditionFailed, "the two tree indices must differ");
    if (!pa.I.count(alpha) || !pb.I.count(beta)) fail(ErrorKind::PreconditionFailed, "tree index missing from its side");
    auto inc = [](const Condition& p, const ElemSet& tr, const Quad& q) {
        for (auto& e : {q.x, q.y, q.z, q.w})
            if (!tr.count(e)) return false;
        return p.le(q.x, q.y) && p.le(q.y, q.z) && p.le(q.z, q.w);
    };
    if (!inc(pa, pa.tree(alpha), qa)) fail(ErrorKind::PreconditionFailed, "first quadruple is not increasing in its tree");
    if (!inc(pb, pb.tree(beta), qb)) fail(ErrorKind::PreconditionFailed, "second quadruple is not increasing in its tree");
    Condition q = oplus(pa, pb);
    if (q.A.count(t)) fail(ErrorKind::AlreadyPresent, str(t) + " is not fresh");
    if (supp(q).count(t.alpha)) fail(ErrorKind::PreconditionFailed, "column of t is already in the support");
    if (!grid_lt(qa.y, t)) fail(ErrorKind::PreconditionFailed, "t is not above " + str(qa.y) + " in the grid order");
    if (!grid_lt(qb.w, t)) fail(ErrorKind::PreconditionFailed, "t is not above " + str(qb.w) + " in the grid order");
    if (t.alpha >= alpha || t.alpha >= beta) fail(ErrorKind::BadIndex, "t must lie below both tree indices");
    Amalgam out;
    Condition& r = out.r;
    r = q;
    r.A.insert(t);
    r.lt.insert({qa.y, t});
    r.lt.insert({qb.w, t});
    close_order(r);
    r.T[alpha].insert(t);
    r.T[beta].insert(t);
    require_valid(r, "amalgamate", opt);
    auto sa = supp(pa), sb = supp(pb);
    sa.insert(t.alpha);
    sb.insert(t.alpha);
    out.key1 = restrict(r, sa) == normalized(extend_uplus(pa, qa.y, t, alpha, opt));
    out.key2 = restrict(r, sb) == normalized(extend_uplus(pb, qb.w, t, beta, opt));
    if (!out.key1) fail(ErrorKind::ValidationFailed, "restriction to the first side is not the one-point extension");
    if (!out.key2) fail(ErrorKind::ValidationFailed, "restriction to the second side is not the one-point extension");
    if (auto v = leq(r, pa)) fail(ErrorKind::ValidationFailed, "not below the first side: " + v->clause + " " + v->detail);
    if (auto v = leq(r, pb)) fail(ErrorKind::ValidationFailed, "not below the second side: " + v->clause + " " + v->detail);
    out.identity1 = minimal_extension_identity(r, qa.x, qa.y, t);
    out.identity2 = minimal_extension_identity(r, qb.z, qb.w, t);
    if (!out.identity1 || !out.identity2) fail(ErrorKind::ValidationFailed, "interval identities fail at t");
    return out;
}

// ---------------------------------------------------------------- text format

inline Condition parse_condition(std::string_view src) {
    Condition p;
    std::string section;
    int tree_index = -1;
    bool any = false;
    auto where = [](int ln) { return "line " + std::to_string(ln) + ": "; };
    auto elem = [&](std::string_view s, int ln) {
        auto e = grid::parse_elem(s);
        if (!e) fail(ErrorKind::ParseError, where(ln) + "bad grid element '" + std::string(s) + "'");
        return *e;
    };
    std::vector<std::pair<Pair, int>> rels;
    for (auto& [ln, line] : text::logical_lines(src)) {
        std::string_view rest = line;
        if (line.rfind("condition", 0) == 0) continue;
        auto colon = line.find(':');
        if (colon != std::string::npos && line.find('(') > colon && line.find('{') > colon) {
            auto head = text::split_ws(line.substr(0, colon));
            if (head.empty()) fail(ErrorKind::ParseError, where(ln) + "empty section header");
            section = head[0];
            if (section == "T") {
                if (head.size() != 2) fail(ErrorKind::ParseError, where(ln) + "tree header needs an index");
                tree_index = static_cast<int>(text::parse_int(head[1], ln));
                p.T[tree_index];
            } else if (head.size() != 1 || (section != "A" && section != "LE" && section != "I" && section != "F" && section != "G")) {
                fail(ErrorKind::ParseError, where(ln) + "unknown section '" + std::string(line.substr(0, colon)) + "'");
            }
            rest = std::string_view(line).substr(colon + 1);
            any = true;
        }
        if (section.empty()) fail(ErrorKind::ParseError, where(ln) + "content before the first section");
        for (auto& tok : text::split_ws(rest)) {
            if (section == "A") {
                p.A.insert(elem(tok, ln));
            } else if (section == "LE") {
                auto lt = tok.find(")<(");
                if (lt == std::string::npos) fail(ErrorKind::ParseError, where(ln) + "order pairs look like (a,n)<(b,m)");
                rels.push_back({{elem(tok.substr(0, lt + 1), ln), elem(tok.substr(lt + 2), ln)}, ln});
            } else if (section == "I") {
                p.I.insert(static_cast<int>(text::parse_int(tok, ln)));
            } else if (section == "T") {
                p.T[tree_index].insert(elem(tok, ln));
            } else if (section == "F") {
                auto eq = tok.find("}=");
                auto comma = tok.find(',');
                if (tok.front() != '{' || eq == std::string::npos || comma == std::string::npos || comma > eq)
                    fail(ErrorKind::ParseError, where(ln) + "f entries look like {a,b}=m");
                int a = static_cast<int>(text::parse_int(std::string_view(tok).substr(1, comma - 1), ln));
                int b = static_cast<int>(text::parse_int(std::string_view(tok).substr(comma + 1, eq - comma - 1), ln));
                p.f[{std::min(a, b), std::max(a, b)}] = static_cast<int>(text::parse_int(std::string_view(tok).substr(eq + 2), ln));
            } else if (section == "G") {
                auto close = tok.find("),");
                auto eq = tok.rfind(")=");
                if (tok.size() < 2 || tok.front() != '(' || close == std::string::npos || eq == std::string::npos || eq <= close)
                    fail(ErrorKind::ParseError, where(ln) + "g entries look like ((a,n),alpha)=m");
                GridElem x = elem(std::string_view(tok).substr(1, close), ln);
                int a = static_cast<int>(text::parse_int(std::string_view(tok).substr(close + 2, eq - close - 2), ln));
                p.g[{x, a}] = static_cast<int>(text::parse_int(std::string_view(tok).substr(eq + 2), ln));
            }
        }
    }
    if (!any) fail(ErrorKind::ParseError, "no sections found");
    for (auto& [pr, ln] : rels) {
        if (!p.A.count(pr.first) || !p.A.count(pr.second))
            fail(ErrorKind::ParseError, where(ln) + "order pair mentions a point outside A");
        p.lt.insert(pr);
    }
    close_order(p);
    return normalized(p);
}

inline std::string write_condition(const Condition& p, const std::string& name = "c") {
    std::ostringstream os;
    os << "condition " << name << "\nA:";
    for (auto& x : p.A) os << " " << str(x);
    os << "\nLE:";
    for (auto& [a, b] : p.lt) {
        bool cover = true;
        for (auto& c : p.A)
            if (p.less(a, c) && p.less(c, b)) cover = false;
        if (cover) os << " " << str(a) << "<" << str(b);
    }
    os << "\nI:";
    for (int a : p.I) os << " " << a;
    os << "\n";
    for (int a : p.I) {
        os << "T " << a << ":";
        for (auto& x : p.tree(a)) os << " " << str(x);
        os << "\n";
    }
    os << "F:";
    for (auto& [k, v] : p.f) os << " {" << k.first << "," << k.second << "}=" << v;
    os << "\nG:";
    for (auto& [k, v] : p.g) os << " (" << str(k.first) << "," << k.second << ")=" << v;
    os << "\n";
    return os.str();
}

}  // namespace resolvix::forcing
