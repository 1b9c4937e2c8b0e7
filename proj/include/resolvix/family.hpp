#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "resolvix/common.hpp"

namespace resolvix::family {

using Mask = std::uint64_t;

inline int popcount(Mask m) { return std::popcount(m); }
inline bool subset(Mask a, Mask b) { return (a & ~b) == 0; }

// Window points live in `in`; points outside the ground window live in `out`. Proper-subset
// status is decided on the full extent, coverage is only demanded on `in`.
struct Extent {
    Mask in = 0;
    Mask out = 0;
    bool empty() const { return in == 0 && out == 0; }
    friend bool operator==(const Extent&, const Extent&) = default;
    friend Extent operator|(Extent a, Extent b) { return {a.in | b.in, a.out | b.out}; }
};
inline bool subset(const Extent& a, const Extent& b) { return subset(a.in, b.in) && subset(a.out, b.out); }
inline bool proper_subset(const Extent& a, const Extent& b) { return subset(a, b) && !(a == b); }

struct NamedSet {
    std::string name;
    Extent ext;
    // The set's own proper-subset continuation lies past the truncation: its points count as
    // covered for every target containing it, on both sides of any split.
    bool frontier = false;
    bool allow_empty = false;
};

using Sub = std::vector<std::size_t>;

class SetFamily {
  public:
    SetFamily() = default;
    SetFamily(std::string name, std::vector<std::string> ground) : name_(std::move(name)), ground_(std::move(ground)) {
        if (ground_.size() > 64) fail(ErrorKind::InvalidArgument, "ground window limited to 64 points");
    }

    std::size_t add(NamedSet s) {
        if (s.ext.empty() && !s.allow_empty) fail(ErrorKind::InvalidArgument, "empty member '" + s.name + "' not flagged");
        if (find(s.name)) fail(ErrorKind::InvalidArgument, "duplicate member name '" + s.name + "'");
        if (s.ext.in & ~window()) fail(ErrorKind::InvalidArgument, "member '" + s.name + "' leaves the window");
        members_.push_back(std::move(s));
        return members_.size() - 1;
    }
    std::size_t add(std::string name, Mask in, bool frontier = false) {
        return add(NamedSet{std::move(name), Extent{in, 0}, frontier, false});
    }

    // Registers an off-window point label and returns its bit index.
    std::size_t beyond_point(const std::string& label) {
        for (std::size_t i = 0; i < beyond_.size(); ++i)
            if (beyond_[i] == label) return i;
        if (beyond_.size() >= 64) fail(ErrorKind::InvalidArgument, "too many off-window points");
        beyond_.push_back(label);
        return beyond_.size() - 1;
    }

    const std::string& name() const { return name_; }
    const std::vector<std::string>& ground() const { return ground_; }
    const std::vector<std::string>& beyond() const { return beyond_; }
    std::size_t size() const { return members_.size(); }
    const NamedSet& operator[](std::size_t i) const { return members_[i]; }
    const std::vector<NamedSet>& members() const { return members_; }
    Mask window() const { return ground_.size() == 64 ? ~Mask{0} : ((Mask{1} << ground_.size()) - 1); }

    std::optional<std::size_t> find(std::string_view nm) const {
        for (std::size_t i = 0; i < members_.size(); ++i)
            if (members_[i].name == nm) return i;
        return std::nullopt;
    }
    std::optional<std::size_t> point(std::string_view label) const {
        for (std::size_t i = 0; i < ground_.size(); ++i)
            if (ground_[i] == label) return i;
        return std::nullopt;
    }

    Sub all() const {
        Sub s(members_.size());
        for (std::size_t i = 0; i < s.size(); ++i) s[i] = i;
        return s;
    }

    // Points of `target` reached by frontier members contained in it.
    Mask tail_cover(const Extent& target) const {
        Mask m = 0;
        for (auto& s : members_)
            if (s.frontier && subset(s.ext, target)) m |= s.ext.in;
        return m;
    }

    friend bool operator==(const SetFamily& a, const SetFamily& b) {
        if (a.name_ != b.name_ || a.ground_ != b.ground_ || a.members_.size() != b.members_.size()) return false;
        for (std::size_t i = 0; i < a.members_.size(); ++i) {
            auto &x = a.members_[i], &y = b.members_[i];
            if (x.name != y.name || x.ext.in != y.ext.in || x.frontier != y.frontier) return false;
            // off-window points compare by label, their bit order may differ
            if (a.labels_out(x.ext.out) != b.labels_out(y.ext.out)) return false;
        }
        return true;
    }

    std::vector<std::string> labels_out(Mask m) const {
        std::vector<std::string> v;
        for (std::size_t i = 0; i < beyond_.size(); ++i)
            if (m >> i & 1) v.push_back(beyond_[i]);
        std::sort(v.begin(), v.end());
        return v;
    }

  private:
    std::string name_;
    std::vector<std::string> ground_;
    std::vector<std::string> beyond_;
    std::vector<NamedSet> members_;
};

inline Extent union_of(const SetFamily& F, const Sub& s) {
    Extent e;
    for (auto i : s) e = e | F[i].ext;
    return e;
}
inline Mask union_in(const SetFamily& F, const Sub& s) { return union_of(F, s).in; }

inline Sub sub_minus(const Sub& a, const Sub& b) {
    Sub out;
    for (auto x : a)
        if (std::find(b.begin(), b.end(), x) == b.end()) out.push_back(x);
    return out;
}
inline Sub sub_union(Sub a, const Sub& b) {
    for (auto x : b)
        if (std::find(a.begin(), a.end(), x) == a.end()) a.push_back(x);
    std::sort(a.begin(), a.end());
    return a;
}
inline bool sub_disjoint(const Sub& a, const Sub& b) {
    for (auto x : a)
        if (std::find(b.begin(), b.end(), x) != b.end()) return false;
    return true;
}
inline bool sub_contains(const Sub& a, std::size_t x) { return std::find(a.begin(), a.end(), x) != a.end(); }

// ---------------------------------------------------------------- fills

enum class FillMode { Tails, Strict };

struct FillCertificate {
    std::optional<std::size_t> target;  // member index; empty for an arbitrary target set
    Sub witnesses;
    Mask coverage = 0;
    Mask via_frontier = 0;  // points covered only by frontier members
};

struct FillFailure {
    std::optional<std::size_t> target;
    std::size_t point = 0;
};

struct FillResult {
    std::vector<FillCertificate> certificates;
    std::optional<FillFailure> failure;
    bool ok() const { return !failure; }
};

// Covers target by members of A that are proper subsets of it, lowest index first per point.
inline std::variant<FillCertificate, FillFailure> fill_target(const SetFamily& F, const Sub& A, const Extent& target,
                                                              std::optional<std::size_t> tid,
                                                              FillMode mode = FillMode::Tails) {
    FillCertificate cert;
    cert.target = tid;
    cert.coverage = target.in;
    Mask tails = mode == FillMode::Tails ? F.tail_cover(target) : 0;
    Sub sorted = A;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t x = 0; x < 64; ++x) {
        if (!(target.in >> x & 1)) continue;
        bool hit = false;
        for (auto v : sorted) {
            if ((F[v].ext.in >> x & 1) && proper_subset(F[v].ext, target)) {
                if (!sub_contains(cert.witnesses, v)) cert.witnesses.push_back(v);
                hit = true;
                break;
            }
        }
        if (hit) continue;
        if (tails >> x & 1) {
            cert.via_frontier |= Mask{1} << x;
            continue;
        }
        return FillFailure{tid, x};
    }
    std::sort(cert.witnesses.begin(), cert.witnesses.end());
    return cert;
}

inline FillResult fills(const SetFamily& F, const Sub& A, const Sub& B, FillMode mode = FillMode::Tails) {
    FillResult r;
    for (auto u : B) {
        auto res = fill_target(F, A, F[u].ext, u, mode);
        if (auto* f = std::get_if<FillFailure>(&res)) {
            r.failure = *f;
            return r;
        }
        r.certificates.push_back(std::get<FillCertificate>(res));
    }
    return r;
}

inline bool fills_ok(const SetFamily& F, const Sub& A, const Sub& B, FillMode mode = FillMode::Tails) {
    return fills(F, A, B, mode).ok();
}
inline bool fills_set_ok(const SetFamily& F, const Sub& A, const Extent& target, FillMode mode = FillMode::Tails) {
    return std::holds_alternative<FillCertificate>(fill_target(F, A, target, std::nullopt, mode));
}

// ---------------------------------------------------------------- weakly fills

using Closure = std::function<Mask(Mask)>;

// Closure in the finite topology generated by `opens` (complement of the union of opens missing S).
inline Closure closure_from_opens(Mask window, std::vector<Mask> opens) {
    return [window, opens = std::move(opens)](Mask s) {
        Mask interior_of_complement = 0;
        for (auto o : opens)
            if ((o & s) == 0) interior_of_complement |= o;
        return window & ~interior_of_complement;
    };
}

struct WeakFillWitness {
    std::size_t U = 0, V = 0;
    Sub W;
};

struct WeakFillResult {
    std::vector<WeakFillWitness> witnesses;
    std::optional<std::pair<std::size_t, std::size_t>> failure;
    bool ok() const { return !failure; }
};

inline WeakFillResult weakly_fills(const SetFamily& F, const Sub& A, const Sub& B, const Closure& cl) {
    // extensive and monotone on the members and their pairwise unions
    Sub all = sub_union(A, B);
    for (auto i : all) {
        Mask s = F[i].ext.in;
        if (!subset(s, cl(s))) fail(ErrorKind::PreconditionFailed, "closure not extensive on " + F[i].name);
        for (auto j : all) {
            Mask t = F[j].ext.in;
            if (subset(s, t) && !subset(cl(s), cl(t)))
                fail(ErrorKind::PreconditionFailed, "closure not monotone on " + F[i].name + ", " + F[j].name);
        }
    }
    WeakFillResult r;
    for (auto u : B)
        for (auto v : B) {
            Mask cu = cl(F[u].ext.in);
            if (!subset(cu, F[v].ext.in)) continue;
            WeakFillWitness w{u, v, {}};
            Mask got = 0;
            for (auto a : A)
                if (subset(F[a].ext.in, F[v].ext.in) && (F[a].ext.in & cu)) {
                    w.W.push_back(a);
                    got |= F[a].ext.in;
                }
            if (!subset(cu, got)) {
                r.failure = std::make_pair(u, v);
                return r;
            }
            std::sort(w.W.begin(), w.W.end());
            r.witnesses.push_back(std::move(w));
        }
    return r;
}

// ---------------------------------------------------------------- good pairs

struct GoodPair {
    Sub left, right;
};

inline bool is_good_pair(const SetFamily& F, const GoodPair& g, FillMode mode = FillMode::Tails) {
    return sub_disjoint(g.left, g.right) && fills_ok(F, g.left, g.right, mode) && fills_ok(F, g.right, g.left, mode);
}

// (A ∪ (A'∖B), B ∪ (B'∖A)), re-certified as a good pair whose sides fill ∪B' and ∪A'.
inline GoodPair extend_fill(const SetFamily& F, const GoodPair& p, const GoodPair& q) {
    GoodPair out{sub_union(p.left, sub_minus(q.left, p.right)), sub_union(p.right, sub_minus(q.right, p.left))};
    if (!sub_disjoint(out.left, out.right)) fail(ErrorKind::NotFilling, "extended sides overlap");
    auto check = [&](const Sub& A, const Sub& B, const char* what) {
        auto r = fills(F, A, B);
        if (!r.ok())
            fail(ErrorKind::NotFilling, std::string(what) + ": member " + F[*r.failure->target].name + " point " +
                                            F.ground()[r.failure->point]);
    };
    check(out.left, out.right, "left does not fill right");
    check(out.right, out.left, "right does not fill left");
    if (!q.right.empty() && !fills_set_ok(F, out.left, union_of(F, q.right)))
        fail(ErrorKind::NotFilling, "left does not fill the union of B'");
    if (!q.left.empty() && !fills_set_ok(F, out.right, union_of(F, q.left)))
        fail(ErrorKind::NotFilling, "right does not fill the union of A'");
    return out;
}

// The explicit family from the proof of the extension lemma: for U in B', replace the members of
// A+ that lie in B by their own covers from A. Returns A* (empty optional when a cover is missing).
inline std::optional<Sub> lemma_cover(const SetFamily& F, const Sub& A, const Sub& B, const Sub& Aprime, std::size_t U) {
    const Extent& ue = F[U].ext;
    Sub aplus;
    for (auto v : Aprime)
        if (proper_subset(F[v].ext, ue)) aplus.push_back(v);
    Sub astar;
    for (auto v : aplus) {
        if (!sub_contains(B, v)) {
            astar.push_back(v);
            continue;
        }
        Sub ab;
        for (auto a : A)
            if (proper_subset(F[a].ext, F[v].ext)) ab.push_back(a);
        Mask need = F[v].ext.in & ~F.tail_cover(F[v].ext);
        if (!subset(need, union_in(F, ab))) return std::nullopt;
        astar = sub_union(astar, ab);
    }
    std::sort(astar.begin(), astar.end());
    Mask need = ue.in & ~F.tail_cover(ue);
    if (!subset(need, union_in(F, astar))) return std::nullopt;
    return astar;
}

// ---------------------------------------------------------------- weakly increasing subfamilies

// Keeps B when B∖A' ≠ ∅ for every A' before it in `order` (all earlier members, kept or not).
inline Sub weakly_increasing_subfamily(const SetFamily& F, const Sub& order) {
    Sub out;
    for (std::size_t i = 0; i < order.size(); ++i) {
        bool keep = true;
        for (std::size_t j = 0; j < i && keep; ++j)
            if (subset(F[order[i]].ext, F[order[j]].ext)) keep = false;
        if (keep) out.push_back(order[i]);
    }
    return out;
}

inline bool is_weakly_increasing(const SetFamily& F, const Sub& order) {
    for (std::size_t i = 0; i < order.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (subset(F[order[i]].ext, F[order[j]].ext)) return false;
    return true;
}

// ---------------------------------------------------------------- builders

// Dyadic intervals [a/2^k,(a+1)/2^k) for k <= depth over 2^bits window cells, top level first.
inline SetFamily dyadic_family(unsigned bits, unsigned depth, bool deepest_frontier) {
    if (depth > bits) fail(ErrorKind::InvalidArgument, "depth beyond window resolution");
    std::vector<std::string> ground;
    for (unsigned j = 0; j < (1u << bits); ++j) ground.push_back("p" + std::to_string(j));
    SetFamily F("dyadic" + std::to_string(1u << bits), ground);
    for (unsigned k = 0; k <= depth; ++k) {
        unsigned width = 1u << (bits - k);
        for (unsigned a = 0; a < (1u << k); ++a) {
            Mask m = ((width == 64 ? ~Mask{0} : ((Mask{1} << width) - 1))) << (a * width);
            F.add("I" + std::to_string(k) + "." + std::to_string(a), m, deepest_frontier && k == depth);
        }
    }
    return F;
}

// ---------------------------------------------------------------- text format

inline SetFamily parse_family(std::string_view src) {
    std::optional<SetFamily> F;
    std::string name;
    for (auto& [ln, line] : text::logical_lines(src)) {
        const std::string where = "line " + std::to_string(ln) + ": ";
        auto tok = text::split_ws(line);
        if (tok[0] == "family") {
            if (tok.size() != 2 || !name.empty()) fail(ErrorKind::ParseError, where + "bad family header");
            name = tok[1];
        } else if (tok[0] == "ground") {
            if (name.empty() || F) fail(ErrorKind::ParseError, where + "ground must follow the header once");
            F.emplace(name, std::vector<std::string>(tok.begin() + 1, tok.end()));
        } else if (tok[0] == "set") {
            if (!F) fail(ErrorKind::ParseError, where + "set before ground");
            auto colon = line.find(':');
            if (colon == std::string::npos) fail(ErrorKind::ParseError, where + "set needs ':'");
            auto head = text::split_ws(std::string_view(line).substr(3, colon - 3));
            if (head.empty()) fail(ErrorKind::ParseError, where + "set needs a name");
            NamedSet s;
            s.name = head[0];
            for (std::size_t i = 1; i < head.size(); ++i) {
                if (head[i] == "frontier") s.frontier = true;
                else if (head[i] == "empty") s.allow_empty = true;
                else fail(ErrorKind::ParseError, where + "unknown set attribute '" + head[i] + "'");
            }
            for (auto& p : text::split_ws(std::string_view(line).substr(colon + 1))) {
                if (auto i = F->point(p)) s.ext.in |= Mask{1} << *i;
                else s.ext.out |= Mask{1} << F->beyond_point(p);
            }
            try {
                F->add(std::move(s));
            } catch (const Error& e) {
                fail(ErrorKind::ParseError, where + e.what());
            }
        } else {
            fail(ErrorKind::ParseError, where + "unknown directive '" + tok[0] + "'");
        }
    }
    if (!F) fail(ErrorKind::ParseError, "family file needs 'family' and 'ground' lines");
    return *F;
}

inline std::string write_family(const SetFamily& F) {
    std::ostringstream os;
    os << "family " << F.name() << "\nground";
    for (auto& g : F.ground()) os << " " << g;
    os << "\n";
    for (auto& s : F.members()) {
        os << "set " << s.name;
        if (s.frontier) os << " frontier";
        if (s.allow_empty) os << " empty";
        os << ":";
        for (std::size_t i = 0; i < F.ground().size(); ++i)
            if (s.ext.in >> i & 1) os << " " << F.ground()[i];
        for (auto& l : F.labels_out(s.ext.out)) os << " " << l;
        os << "\n";
    }
    return os.str();
}

inline std::string mask_names(const SetFamily& F, Mask m) {
    std::string s;
    for (std::size_t i = 0; i < F.ground().size(); ++i)
        if (m >> i & 1) {
            if (!s.empty()) s += ' ';
            s += F.ground()[i];
        }
    return s;
}

}  // namespace resolvix::family
