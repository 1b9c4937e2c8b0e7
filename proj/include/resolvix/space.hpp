#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "resolvix/family.hpp"
#include "resolvix/forcing.hpp"

namespace resolvix::space {

using forcing::Condition;
using forcing::ElemSet;
using forcing::GridElem;

enum class Determination { In, Out, Unknown };

inline const char* to_string(Determination d) {
    switch (d) {
        case Determination::In: return "in";
        case Determination::Out: return "out";
        case Determination::Unknown: return "unknown";
    }
    return "?";
}

struct Branch {
    int alpha = 0;
    std::vector<GridElem> stem;  // stem[k] sits at tree level k
    bool maximal = false;        // cover chain ending in a leaf of the window tree
};

inline std::vector<GridElem> tree_children(const Condition& p, int alpha, const GridElem& x) {
    const int lv = forcing::tree_level(p, alpha, x);
    std::vector<GridElem> out;
    for (auto& y : p.tree(alpha))
        if (p.less(x, y) && forcing::tree_level(p, alpha, y) == lv + 1) out.push_back(y);
    return out;
}

inline bool is_cover_chain(const Condition& p, const std::vector<GridElem>& s) {
    for (std::size_t i = 0; i + 1 < s.size(); ++i)
        if (!p.less(s[i], s[i + 1]) || forcing::interval(p, s[i], s[i + 1]).size() != 2) return false;
    return true;
}

// Root-to-leaf paths of every window tree.
inline std::vector<Branch> branches(const Condition& p, std::size_t cap = 4096) {
    std::vector<Branch> out;
    for (int a : p.I) {
        std::vector<GridElem> cur;
        std::function<void(const GridElem&)> walk = [&](const GridElem& x) {
            if (out.size() >= cap) return;
            cur.push_back(x);
            auto kids = tree_children(p, a, x);
            if (kids.empty()) out.push_back({a, cur, is_cover_chain(p, cur)});
            for (auto& k : kids) walk(k);
            cur.pop_back();
        };
        for (auto& x : p.tree(a))
            if (forcing::tree_level(p, a, x) == 0) walk(x);
    }
    return out;
}

inline bool cones_disjoint(const Condition& p, const GridElem& x, const GridElem& y) {
    return !forcing::meets(p.up(x), p.up(y));
}

inline Determination member(const Condition& p, const Branch& b, const GridElem& x) {
    for (auto& y : b.stem)
        if (p.le(x, y)) return Determination::In;
    if (!b.maximal) return Determination::Unknown;
    for (auto& y : b.stem)
        if (cones_disjoint(p, x, y)) return Determination::Out;
    return Determination::Unknown;
}

inline std::vector<Determination> vset(const Condition& p, const std::vector<Branch>& bs, const GridElem& x) {
    if (!p.A.count(x)) fail(ErrorKind::PreconditionFailed, forcing::str(x) + " is not a point of the fragment");
    std::vector<Determination> out;
    for (auto& b : bs) out.push_back(member(p, b, x));
    return out;
}

enum class Status { Ok, Unknown, Violation };

inline const char* to_string(Status s) {
    switch (s) {
        case Status::Ok: return "ok";
        case Status::Unknown: return "unknown";
        case Status::Violation: return "violation";
    }
    return "?";
}

struct G1Result {
    Status status = Status::Unknown;
    std::optional<std::size_t> branch;  // separating branch, or the branch breaking containment
};

inline G1Result check_g1(const Condition& p, const std::vector<Branch>& bs, const GridElem& u, const GridElem& v) {
    auto Vu = vset(p, bs, u), Vv = vset(p, bs, v);
    if (p.le(u, v)) {
        for (std::size_t i = 0; i < bs.size(); ++i)
            if (Vv[i] == Determination::In && Vu[i] == Determination::Out) return {Status::Violation, i};
        return {Status::Ok, std::nullopt};
    }
    for (std::size_t i = 0; i < bs.size(); ++i)
        if (Vv[i] == Determination::In && Vu[i] == Determination::Out) return {Status::Ok, i};
    return {Status::Unknown, std::nullopt};
}

struct PairWitness {
    Status status = Status::Unknown;
    std::optional<GridElem> x, y;
    std::string note;
};

inline PairWitness check_hausdorff(const Condition& p, const Branch& b, const Branch& c) {
    PairWitness w;
    std::size_t from = 0;
    if (b.alpha == c.alpha) {
        while (from < b.stem.size() && from < c.stem.size() && b.stem[from] == c.stem[from]) ++from;
        if (from == b.stem.size() || from == c.stem.size()) {
            w.note = "one stem extends the other inside the window";
            return w;
        }
    } else {
        auto m = p.fval(b.alpha, c.alpha);
        if (!m) {
            w.note = "f undefined on the index pair";
            return w;
        }
        if (static_cast<std::size_t>(*m) >= b.stem.size() || static_cast<std::size_t>(*m) >= c.stem.size()) {
            w.note = "stems end before level " + std::to_string(*m);
            return w;
        }
        from = static_cast<std::size_t>(*m);
        if (!cones_disjoint(p, b.stem[from], c.stem[from])) {
            w.status = Status::Violation;
            w.x = b.stem[from];
            w.y = c.stem[from];
            w.note = "cones meet at the f level";
            return w;
        }
    }
    for (std::size_t k = from; k < b.stem.size() && k < c.stem.size(); ++k)
        if (cones_disjoint(p, b.stem[k], c.stem[k])) {
            w.status = Status::Ok;
            w.x = b.stem[k];
            w.y = c.stem[k];
            return w;
        }
    w.note = "no disjoint pair inside the window";
    return w;
}

inline PairWitness check_clopen(const Condition& p, const Branch& b, const GridElem& x) {
    if (member(p, b, x) != Determination::Out)
        fail(ErrorKind::PreconditionFailed, "branch is not determined outside V(" + forcing::str(x) + ")");
    auto it = p.g.find({x, b.alpha});
    if (it == p.g.end()) fail(ErrorKind::GUndefined, "g(" + forcing::str(x) + "," + std::to_string(b.alpha) + ") undefined");
    PairWitness w;
    w.x = x;
    const auto lv = static_cast<std::size_t>(it->second);
    if (lv >= b.stem.size()) {
        w.note = "stem shorter than the g level";
        return w;
    }
    w.y = b.stem[lv];
    w.status = cones_disjoint(p, x, *w.y) ? Status::Ok : Status::Violation;
    return w;
}

// ---------------------------------------------------------------- the partition game

using PartFn = std::function<int(const GridElem&)>;

struct GameHit {
    int alpha = 0, beta = 0;
    forcing::Quad qa, qb;
    GridElem t;
    int contradicted = 0;  // the color whose maximal interval t extends
};

struct GameReport {
    std::vector<GameHit> hits;
    std::vector<std::string> degenerate;  // notes for collapsed quadruples
    std::size_t pairs_examined = 0;
    bool found() const { return !hits.empty(); }
};

inline ElemSet unshared(const Condition& p, int alpha) {
    ElemSet out;
    for (auto& x : p.tree(alpha)) {
        int c = 0;
        for (int b : p.I)
            if (p.tree(b).count(x)) ++c;
        if (c == 1) out.insert(x);
    }
    return out;
}

inline GameReport irresolvability_game(const Condition& p, const PartFn& part) {
    GameReport rep;
    std::map<int, std::optional<forcing::Quad>> quads;
    for (int a : p.I) {
        quads[a] = forcing::recipe_quadruple(p, unshared(p, a), 0, part);
        if (quads[a] && (quads[a]->low_empty || quads[a]->high_empty)) {
            int empty = quads[a]->low_empty ? 0 : 1;
            rep.degenerate.push_back("tree " + std::to_string(a) + ": side " + std::to_string(empty) + " empty above the seed");
        }
    }
    for (int a : p.I)
        for (int b : p.I) {
            if (a == b || !quads[a] || !quads[b]) continue;
            ++rep.pairs_examined;
            const auto& qa = *quads[a];
            const auto& qb = *quads[b];
            for (auto& t : p.tree(a)) {
                if (!p.tree(b).count(t)) continue;
                if (forcing::minimal_extension_identity(p, qa.x, qa.y, t) &&
                    forcing::minimal_extension_identity(p, qb.z, qb.w, t))
                    rep.hits.push_back({a, b, qa, qb, t, part(t)});
            }
        }
    return rep;
}

// ---------------------------------------------------------------- neighborhood bases along a branch

enum class Side { Zero, One, Both, Neither, Unknown };

inline const char* to_string(Side s) {
    switch (s) {
        case Side::Zero: return "0";
        case Side::One: return "1";
        case Side::Both: return "both";
        case Side::Neither: return "neither";
        case Side::Unknown: return "unknown";
    }
    return "?";
}

// Which classes still hold a descending run of neighborhoods of the branch point, down to the
// resolution the stem provides.
inline Side neighborhood_base_dichotomy(const Condition& p, const Branch& b, const PartFn& part, std::size_t min_depth = 1) {
    if (b.stem.size() < min_depth + 1) return Side::Unknown;
    bool ok[2] = {true, true};
    for (std::size_t k = 0; k + 1 < b.stem.size(); ++k) {
        bool has[2] = {false, false};
        for (auto& u : p.A) {
            if (!p.le(b.stem[k], u)) continue;
            bool on = false;
            for (auto& y : b.stem)
                if (p.le(u, y)) on = true;
            if (on) has[part(u)] = true;
        }
        ok[0] = ok[0] && has[0];
        ok[1] = ok[1] && has[1];
    }
    if (ok[0] && ok[1]) return Side::Both;
    if (ok[0]) return Side::Zero;
    if (ok[1]) return Side::One;
    return Side::Neither;
}

// ---------------------------------------------------------------- Kolmogorov quotient

struct QuotientCore {
    std::vector<int> point_class;  // -1 for points outside every member trace window
    std::size_t classes = 0;
    std::vector<family::Mask> members;  // quotient members over class indices
};

// Points are identified when they lie in exactly the same members.
inline QuotientCore quotient_masks(std::size_t points, const std::vector<family::Mask>& members) {
    QuotientCore q;
    std::map<std::vector<bool>, int> ids;
    for (std::size_t x = 0; x < points; ++x) {
        std::vector<bool> trace;
        for (auto m : members) trace.push_back(m >> x & 1);
        auto [it, fresh] = ids.emplace(trace, static_cast<int>(ids.size()));
        (void)fresh;
        q.point_class.push_back(it->second);
    }
    q.classes = ids.size();
    if (q.classes > 64) fail(ErrorKind::InvalidArgument, "quotient exceeds 64 classes");
    for (auto m : members) {
        family::Mask qm = 0;
        for (std::size_t x = 0; x < points; ++x)
            if (m >> x & 1) qm |= family::Mask{1} << q.point_class[x];
        q.members.push_back(qm);
    }
    return q;
}

struct QuotientCheck {
    bool ok = true;
    int property = 0;  // first failing property, 0 when fine
    std::string detail;
};

inline QuotientCheck check_quotient(std::size_t points, const std::vector<family::Mask>& members, const QuotientCore& q) {
    for (std::size_t x = 0; x < points; ++x)
        for (std::size_t u = 0; u < members.size(); ++u)
            if (((q.members[u] >> q.point_class[x]) & 1) != ((members[u] >> x) & 1))
                return {false, 1, "point " + std::to_string(x) + " member " + std::to_string(u)};
    for (std::size_t u = 0; u < members.size(); ++u)
        for (std::size_t v = 0; v < members.size(); ++v) {
            if ((q.members[u] == q.members[v]) != (members[u] == members[v]))
                return {false, 2, "members " + std::to_string(u) + "," + std::to_string(v)};
            if (family::subset(q.members[u], q.members[v]) != family::subset(members[u], members[v]))
                return {false, 3, "members " + std::to_string(u) + "," + std::to_string(v)};
        }
    // T0: distinct classes are told apart by some member
    for (std::size_t a = 0; a < q.classes; ++a)
        for (std::size_t b = a + 1; b < q.classes; ++b) {
            bool split = false;
            for (auto m : q.members)
                if (((m >> a) & 1) != ((m >> b) & 1)) split = true;
            if (!split) return {false, 4, "classes " + std::to_string(a) + "," + std::to_string(b) + " not separated"};
        }
    return {};
}

struct Quotient {
    family::SetFamily family;
    std::vector<int> point_class;
    QuotientCheck check;
};

inline Quotient kolmogorov_quotient(const family::SetFamily& F) {
    std::vector<family::Mask> ms;
    for (auto& m : F.members()) ms.push_back(m.ext.in);
    auto core = quotient_masks(F.ground().size(), ms);
    std::vector<std::string> names(core.classes);
    for (std::size_t x = 0; x < F.ground().size(); ++x) {
        auto& n = names[static_cast<std::size_t>(core.point_class[x])];
        n += (n.empty() ? "" : "+") + F.ground()[x];
    }
    family::SetFamily Q(F.name() + "-quotient", names);
    for (std::size_t i = 0; i < F.size(); ++i)
        Q.add(family::NamedSet{F[i].name, family::Extent{core.members[i], 0}, F[i].frontier, F[i].allow_empty});
    return {Q, core.point_class, check_quotient(F.ground().size(), ms, core)};
}

}  // namespace resolvix::space
