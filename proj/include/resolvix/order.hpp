#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "resolvix/common.hpp"

namespace resolvix::order {

// Row-bitset order matrix on indices 0..n-1. le(i,i) always holds.
class FinitePoset {
  public:
    FinitePoset() = default;

    // Builds the reflexive-transitive closure of `pairs` (a <= b). Throws ParseError on a cycle.
    static FinitePoset from_pairs(std::vector<std::string> names,
                                  const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
        FinitePoset p;
        p.names_ = std::move(names);
        p.n_ = p.names_.size();
        p.words_ = (p.n_ + 63) / 64;
        p.bits_.assign(p.n_ * p.words_, 0);
        for (std::size_t i = 0; i < p.n_; ++i) p.set(i, i);
        for (auto [a, b] : pairs) {
            if (a >= p.n_ || b >= p.n_) fail(ErrorKind::InvalidArgument, "relation index out of range");
            p.set(a, b);
        }
        p.close();
        for (std::size_t i = 0; i < p.n_; ++i)
            for (std::size_t j = i + 1; j < p.n_; ++j)
                if (p.le(i, j) && p.le(j, i))
                    fail(ErrorKind::ParseError, "antisymmetry violated between '" + p.names_[i] + "' and '" +
                                                    p.names_[j] + "'");
        return p;
    }

    // Builds from a decidable relation; le must already be a partial order.
    static FinitePoset from_oracle(std::vector<std::string> names,
                                   const std::function<bool(std::size_t, std::size_t)>& le) {
        std::vector<std::pair<std::size_t, std::size_t>> pairs;
        for (std::size_t i = 0; i < names.size(); ++i)
            for (std::size_t j = 0; j < names.size(); ++j)
                if (i != j && le(i, j)) pairs.emplace_back(i, j);
        return from_pairs(std::move(names), pairs);
    }

    std::size_t size() const { return n_; }
    bool le(std::size_t a, std::size_t b) const { return (bits_[a * words_ + b / 64] >> (b % 64)) & 1ULL; }
    bool lt(std::size_t a, std::size_t b) const { return a != b && le(a, b); }
    bool comparable(std::size_t a, std::size_t b) const { return le(a, b) || le(b, a); }
    const std::string& name(std::size_t i) const { return names_[i]; }
    const std::vector<std::string>& names() const { return names_; }

    std::optional<std::size_t> find(std::string_view nm) const {
        for (std::size_t i = 0; i < n_; ++i)
            if (names_[i] == nm) return i;
        return std::nullopt;
    }

    std::vector<std::size_t> up(std::size_t a) const {
        std::vector<std::size_t> out;
        for (std::size_t b = 0; b < n_; ++b)
            if (le(a, b)) out.push_back(b);
        return out;
    }
    std::vector<std::size_t> down(std::size_t b) const {
        std::vector<std::size_t> out;
        for (std::size_t a = 0; a < n_; ++a)
            if (le(a, b)) out.push_back(a);
        return out;
    }
    // Immediate successors (b covers a).
    std::vector<std::size_t> covers(std::size_t a) const {
        std::vector<std::size_t> out;
        for (std::size_t b = 0; b < n_; ++b) {
            if (!lt(a, b)) continue;
            bool imm = true;
            for (std::size_t c = 0; c < n_ && imm; ++c)
                if (lt(a, c) && lt(c, b)) imm = false;
            if (imm) out.push_back(b);
        }
        return out;
    }
    bool is_minimal(std::size_t a) const {
        for (std::size_t b = 0; b < n_; ++b)
            if (lt(b, a)) return false;
        return true;
    }
    bool is_maximal(std::size_t a) const {
        for (std::size_t b = 0; b < n_; ++b)
            if (lt(a, b)) return false;
        return true;
    }

    // Strict pairs (a < b) in index order; used by writers and comparisons.
    std::vector<std::pair<std::size_t, std::size_t>> strict_pairs() const {
        std::vector<std::pair<std::size_t, std::size_t>> out;
        for (std::size_t a = 0; a < n_; ++a)
            for (std::size_t b = 0; b < n_; ++b)
                if (lt(a, b)) out.emplace_back(a, b);
        return out;
    }

    // A linear extension: indices sorted by down-set size, ties by index.
    std::vector<std::size_t> linear_extension() const {
        std::vector<std::size_t> cnt(n_, 0), ord(n_);
        for (std::size_t b = 0; b < n_; ++b)
            for (std::size_t a = 0; a < n_; ++a)
                if (le(a, b)) ++cnt[b];
        std::iota(ord.begin(), ord.end(), 0);
        std::stable_sort(ord.begin(), ord.end(), [&](auto x, auto y) { return cnt[x] < cnt[y]; });
        return ord;
    }

    friend bool operator==(const FinitePoset& a, const FinitePoset& b) {
        return a.names_ == b.names_ && a.bits_ == b.bits_;
    }

  private:
    void set(std::size_t a, std::size_t b) { bits_[a * words_ + b / 64] |= (1ULL << (b % 64)); }
    void close() {
        for (std::size_t k = 0; k < n_; ++k)
            for (std::size_t i = 0; i < n_; ++i)
                if (le(i, k))
                    for (std::size_t w = 0; w < words_; ++w) bits_[i * words_ + w] |= bits_[k * words_ + w];
    }

    std::vector<std::string> names_;
    std::size_t n_ = 0, words_ = 0;
    std::vector<std::uint64_t> bits_;
};

// ---------------------------------------------------------------- well-foundedness

struct WellFoundedReport {
    bool ok = true;
    std::vector<std::size_t> cycle;    // a directed cycle when !ok
    std::vector<std::size_t> minimal;  // elements with no strict predecessor when ok
};

// Raw relation (a < b pairs, not necessarily closed). A finite relation has no infinite
// descending chain unless it has a cycle, so this is Kahn's algorithm plus a cycle witness.
inline WellFoundedReport is_well_founded(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& lt_pairs,
                                         std::size_t window) {
    n = std::min(n, window);
    std::vector<std::vector<std::size_t>> succ(n);
    std::vector<std::size_t> indeg(n, 0);
    for (auto [a, b] : lt_pairs) {
        if (a >= n || b >= n) continue;
        succ[a].push_back(b);
        ++indeg[b];
    }
    WellFoundedReport rep;
    for (std::size_t i = 0; i < n; ++i)
        if (indeg[i] == 0) rep.minimal.push_back(i);
    std::vector<std::size_t> deg = indeg, queue = rep.minimal;
    std::size_t seen = 0;
    while (seen < queue.size()) {
        std::size_t v = queue[seen++];
        for (auto w : succ[v])
            if (--deg[w] == 0) queue.push_back(w);
    }
    if (seen == n) return rep;
    rep.ok = false;
    rep.minimal.clear();
    // Walk predecessors among the unprocessed vertices until one repeats.
    std::vector<std::vector<std::size_t>> pred(n);
    for (std::size_t a = 0; a < n; ++a)
        for (auto b : succ[a])
            if (deg[a] > 0 && deg[b] > 0) pred[b].push_back(a);
    std::size_t v = 0;
    while (deg[v] == 0) ++v;
    std::vector<int> pos(n, -1);
    std::vector<std::size_t> path;
    while (pos[v] < 0) {
        pos[v] = static_cast<int>(path.size());
        path.push_back(v);
        v = pred[v].front();
    }
    rep.cycle.assign(path.begin() + pos[v], path.end());
    std::reverse(rep.cycle.begin(), rep.cycle.end());
    return rep;
}

// ---------------------------------------------------------------- lazy posets

using Id = std::uint64_t;

// Infinite (or finite) poset enumerated by index. Predecessors of an element always have
// enumeration index <= down_bound(x), so a window certifies an interval once it covers that bound.
class LazyPoset {
  public:
    virtual ~LazyPoset() = default;
    virtual std::string kind() const = 0;
    virtual std::optional<std::size_t> finite_size() const { return std::nullopt; }
    virtual Id at(std::size_t index) const = 0;
    virtual std::size_t index_of(Id x) const = 0;
    virtual bool le(Id a, Id b) const = 0;
    virtual std::optional<Id> succ(Id a) const = 0;
    virtual std::size_t down_bound(Id x) const = 0;
    virtual std::string name(Id x) const = 0;
    bool lt(Id a, Id b) const { return a != b && le(a, b); }
};

class ChainPoset final : public LazyPoset {
  public:
    std::string kind() const override { return "chain"; }
    Id at(std::size_t i) const override { return i; }
    std::size_t index_of(Id x) const override { return x; }
    bool le(Id a, Id b) const override { return a <= b; }
    std::optional<Id> succ(Id a) const override { return a + 1; }
    std::size_t down_bound(Id x) const override { return x; }
    std::string name(Id x) const override { return std::to_string(x); }
};

// 2^{<omega} as heap indices: root 1, children 2v and 2v+1, enumerated breadth-first.
class Tree2Poset final : public LazyPoset {
  public:
    std::string kind() const override { return "tree2"; }
    Id at(std::size_t i) const override { return i + 1; }
    std::size_t index_of(Id x) const override { return x - 1; }
    bool le(Id a, Id b) const override {
        while (b > a) b >>= 1;
        return a == b;
    }
    std::optional<Id> succ(Id a) const override { return 2 * a; }
    std::size_t down_bound(Id x) const override { return x - 1; }
    std::string name(Id x) const override {
        if (x == 1) return "e";
        std::string s;
        while (x > 1) {
            s.push_back((x & 1) ? '1' : '0');
            x >>= 1;
        }
        std::reverse(s.begin(), s.end());
        return s;
    }
};

// omega x omega under (a,n) <| (b,m) iff equal or (a<b and n<m); Cantor diagonal enumeration.
class GridPoset final : public LazyPoset {
  public:
    static std::pair<Id, Id> unpair(Id z) {
        Id w = 0;
        while ((w + 1) * (w + 2) / 2 <= z) ++w;
        Id n = z - w * (w + 1) / 2;
        return {w - n, n};
    }
    static Id pair(Id a, Id n) { return (a + n) * (a + n + 1) / 2 + n; }

    std::string kind() const override { return "grid"; }
    Id at(std::size_t i) const override { return i; }
    std::size_t index_of(Id x) const override { return x; }
    bool le(Id x, Id y) const override {
        if (x == y) return true;
        auto [a, n] = unpair(x);
        auto [b, m] = unpair(y);
        return a < b && n < m;
    }
    std::optional<Id> succ(Id x) const override {
        auto [a, n] = unpair(x);
        return pair(a + 1, n + 1);
    }
    std::size_t down_bound(Id x) const override { return x; }
    std::string name(Id x) const override {
        auto [a, n] = unpair(x);
        return "(" + std::to_string(a) + "," + std::to_string(n) + ")";
    }
};

// A finite poset viewed lazily; succ returns the lowest-index strict upper bound if any.
class FiniteLazy final : public LazyPoset {
  public:
    explicit FiniteLazy(FinitePoset p, std::string kind = "finite") : p_(std::move(p)), kind_(std::move(kind)) {}
    std::string kind() const override { return kind_; }
    std::optional<std::size_t> finite_size() const override { return p_.size(); }
    Id at(std::size_t i) const override {
        if (i >= p_.size()) fail(ErrorKind::WindowExceeded, "enumeration past the end of a finite poset");
        return i;
    }
    std::size_t index_of(Id x) const override { return x; }
    bool le(Id a, Id b) const override { return p_.le(a, b); }
    std::optional<Id> succ(Id a) const override {
        for (std::size_t b = 0; b < p_.size(); ++b)
            if (p_.lt(a, b)) return b;
        return std::nullopt;
    }
    std::size_t down_bound(Id x) const override {
        std::size_t m = x;
        for (std::size_t a = 0; a < p_.size(); ++a)
            if (p_.le(a, x)) m = std::max(m, a);
        return m;
    }
    std::string name(Id x) const override { return p_.name(x); }
    const FinitePoset& poset() const { return p_; }

  private:
    FinitePoset p_;
    std::string kind_;
};

// First `n` enumerated elements as a finite poset; index i is enumeration index i.
inline FinitePoset materialize(const LazyPoset& L, std::size_t n) {
    if (auto fs = L.finite_size()) n = std::min(n, *fs);
    std::vector<std::string> names;
    std::vector<Id> ids;
    for (std::size_t i = 0; i < n; ++i) {
        ids.push_back(L.at(i));
        names.push_back(L.name(ids.back()));
    }
    return FinitePoset::from_oracle(std::move(names), [&](std::size_t a, std::size_t b) { return L.le(ids[a], ids[b]); });
}

// ---------------------------------------------------------------- intervals and ranks

struct Interval {
    std::size_t lo = 0, hi = 0;
    std::vector<std::size_t> members;
};

inline Interval interval(const FinitePoset& P, std::size_t p, std::size_t q) {
    if (!P.le(p, q)) fail(ErrorKind::NotComparable, P.name(p) + " is not below " + P.name(q));
    Interval I{p, q, {}};
    for (std::size_t r = 0; r < P.size(); ++r)
        if (P.le(p, r) && P.le(r, q)) I.members.push_back(r);
    return I;
}

// Lazy version: the interval is certified once every predecessor of q is enumerated.
inline std::vector<Id> interval(const LazyPoset& L, Id p, Id q, std::size_t window) {
    if (L.index_of(p) >= window || L.index_of(q) >= window)
        fail(ErrorKind::WindowExceeded, "endpoint outside the enumerated window");
    if (!L.le(p, q)) fail(ErrorKind::NotComparable, L.name(p) + " is not below " + L.name(q));
    if (L.down_bound(q) >= window) fail(ErrorKind::WindowExceeded, "predecessors of " + L.name(q) + " leave the window");
    std::vector<Id> out;
    for (std::size_t i = 0; i <= L.down_bound(q); ++i) {
        Id r = L.at(i);
        if (L.le(p, r) && L.le(r, q)) out.push_back(r);
    }
    return out;
}

struct RankTable {
    std::size_t base = 0;
    std::map<std::size_t, std::size_t> ranks;
    bool contains(std::size_t t) const { return ranks.count(t) != 0; }
};

// R = {q >= base : [base,q] has no chain with more than `window` elements}; rk by recursion.
inline RankTable rank(const FinitePoset& P, std::size_t base, std::size_t window) {
    RankTable rt;
    rt.base = base;
    std::vector<long> rk(P.size(), -1);
    for (std::size_t t : P.linear_extension()) {
        if (!P.le(base, t)) continue;
        long r = 0;
        for (std::size_t s = 0; s < P.size(); ++s)
            if (rk[s] >= 0 && P.lt(s, t)) r = std::max(r, rk[s] + 1);
        // r + 1 is the longest chain in [base,t]
        if (static_cast<std::size_t>(r + 1) > window) continue;
        rk[t] = r;
        rt.ranks[t] = static_cast<std::size_t>(r);
    }
    return rt;
}

inline RankTable rank(const LazyPoset& L, Id base, std::size_t window) {
    if (L.index_of(base) >= window) fail(ErrorKind::WindowExceeded, "base outside the window");
    auto P = materialize(L, window);
    return rank(P, L.index_of(base), window);
}

// ---------------------------------------------------------------- Stone partition

struct StonePartition {
    std::vector<std::pair<Id, int>> colored;  // in coloring order
    std::size_t processed = 0;
    std::unordered_map<Id, int> color;
};

inline StonePartition stone_partition(const LazyPoset& L, std::size_t steps, std::uint64_t seed) {
    if (L.finite_size()) fail(ErrorKind::MaximalElement, "finite posets always have maximal elements");
    StonePartition out;
    auto paint = [&](Id x, int c) {
        out.color.emplace(x, c);
        out.colored.emplace_back(x, c);
    };
    auto has_above = [&](Id p, int c) {
        for (auto& [q, cq] : out.colored)
            if (cq == c && L.le(p, q)) return true;
        return false;
    };
    for (std::size_t i = 0; i < steps; ++i) {
        Id p = L.at(i);
        if (!out.color.count(p)) paint(p, static_cast<int>((i + seed) & 1));
        for (int c = 0; c < 2; ++c) {
            if (has_above(p, c)) continue;
            Id q = p;
            for (;;) {
                auto nx = L.succ(q);
                if (!nx || !L.lt(q, *nx)) fail(ErrorKind::MaximalElement, "no strict successor of " + L.name(q));
                q = *nx;
                if (!out.color.count(q)) {
                    paint(q, c);
                    break;
                }
            }
        }
        out.processed = i + 1;
    }
    return out;
}

// Every processed element has an upper bound of each color among the colored elements.
inline std::optional<Id> stone_violation(const LazyPoset& L, const StonePartition& sp) {
    for (std::size_t i = 0; i < sp.processed; ++i) {
        Id p = L.at(i);
        bool seen[2] = {false, false};
        for (auto& [q, c] : sp.colored)
            if (L.le(p, q)) seen[c] = true;
        if (!seen[0] || !seen[1]) return p;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------- antichains

// Minimum antichain cover of S (Mirsky: level by longest chain ending at the element).
inline std::vector<std::vector<std::size_t>> antichain_cover(const FinitePoset& P, const std::vector<std::size_t>& S) {
    std::vector<long> h(P.size(), -1);
    std::vector<char> in(P.size(), 0);
    for (auto s : S) in[s] = 1;
    std::vector<std::vector<std::size_t>> levels;
    for (std::size_t t : P.linear_extension()) {
        if (!in[t]) continue;
        long r = 0;
        for (auto s : S)
            if (h[s] >= 0 && P.lt(s, t)) r = std::max(r, h[s] + 1);
        h[t] = r;
        if (levels.size() <= static_cast<std::size_t>(r)) levels.resize(r + 1);
        levels[r].push_back(t);
    }
    for (auto& l : levels) std::sort(l.begin(), l.end());
    return levels;
}

inline bool is_antichain(const FinitePoset& P, const std::vector<std::size_t>& S) {
    for (std::size_t i = 0; i < S.size(); ++i)
        for (std::size_t j = i + 1; j < S.size(); ++j)
            if (P.comparable(S[i], S[j])) return false;
    return true;
}

struct HitterResult {
    RankTable ranks;
    std::vector<std::size_t> Q;
    std::vector<std::size_t> B;
    std::map<std::size_t, std::size_t> lower;  // q -> q^-
    std::size_t cover_count = 0;               // antichains needed to cover A
};

inline HitterResult antichain_hitter(const FinitePoset& P, std::size_t p, const std::vector<std::size_t>& A,
                                     std::size_t window) {
    if (p >= P.size()) fail(ErrorKind::WindowExceeded, "p outside the window");
    HitterResult res;
    res.cover_count = antichain_cover(P, A).size();
    res.ranks = rank(P, p, window);
    std::vector<char> inA(P.size(), 0);
    for (auto a : A) inA[a] = 1;
    std::vector<char> inB(P.size(), 0);
    for (auto& [q, r] : res.ranks.ranks) {
        if (inA[q]) continue;
        res.Q.push_back(q);
        std::optional<std::size_t> best;
        for (auto& [s, rs] : res.ranks.ranks)
            if (!inA[s] && P.le(s, q) && (!best || rs < res.ranks.ranks.at(*best))) best = s;
        res.lower[q] = *best;
        inB[*best] = 1;
    }
    for (std::size_t i = 0; i < P.size(); ++i)
        if (inB[i]) res.B.push_back(i);
    return res;
}

// ---------------------------------------------------------------- canonical form

// Lexicographically least adjacency string over relabelings that respect a degree invariant.
inline std::string canonical_form(const FinitePoset& P) {
    const std::size_t n = P.size();
    std::vector<std::pair<std::size_t, std::size_t>> key(n);
    for (std::size_t i = 0; i < n; ++i) key[i] = {P.down(i).size(), P.up(i).size()};
    std::vector<std::size_t> ord(n);
    std::iota(ord.begin(), ord.end(), 0);
    std::sort(ord.begin(), ord.end(), [&](auto a, auto b) { return key[a] < key[b] || (key[a] == key[b] && a < b); });
    std::vector<std::pair<std::size_t, std::size_t>> cells;  // [begin,end) runs with equal key
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && key[ord[j]] == key[ord[i]]) ++j;
        cells.emplace_back(i, j);
        i = j;
    }
    std::string best;
    std::string cur(n * n, '0');
    std::function<void(std::size_t)> rec = [&](std::size_t c) {
        if (c == cells.size()) {
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) cur[i * n + j] = P.le(ord[i], ord[j]) ? '1' : '0';
            if (best.empty() || cur < best) best = cur;
            return;
        }
        auto [b, e] = cells[c];
        std::sort(ord.begin() + b, ord.begin() + e);
        do {
            rec(c + 1);
        } while (std::next_permutation(ord.begin() + b, ord.begin() + e));
    };
    rec(0);
    return std::to_string(n) + ":" + best;
}

}  // namespace resolvix::order
