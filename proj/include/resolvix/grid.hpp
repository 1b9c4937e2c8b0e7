#pragma once

#include <algorithm>
#include <compare>
#include <deque>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "resolvix/interval_partition.hpp"
#include "resolvix/order.hpp"

namespace resolvix::grid {

struct GridElem {
    int alpha = 0;
    int n = 0;
    auto operator<=>(const GridElem&) const = default;
};

inline std::string to_string(const GridElem& e) {
    return "(" + std::to_string(e.alpha) + "," + std::to_string(e.n) + ")";
}

inline std::optional<GridElem> parse_elem(std::string_view s) {
    s = text::trim(s);
    if (s.size() < 5 || s.front() != '(' || s.back() != ')') return std::nullopt;
    auto comma = s.find(',');
    if (comma == std::string_view::npos) return std::nullopt;
    try {
        GridElem e{static_cast<int>(text::parse_int(s.substr(1, comma - 1), 0)),
                   static_cast<int>(text::parse_int(s.substr(comma + 1, s.size() - comma - 2), 0))};
        if (e.alpha < 0 || e.n < 0) return std::nullopt;
        return e;
    } catch (const Error&) {
        return std::nullopt;
    }
}

// The grid order: equal, or strictly smaller in both coordinates.
inline bool grid_le(const GridElem& a, const GridElem& b) { return a == b || (a.alpha < b.alpha && a.n < b.n); }

// ---------------------------------------------------------------- colorings

struct Coloring {
    std::size_t bound = 0;
    std::vector<std::vector<int>> col;  // col[zeta][xi] for xi < zeta
    int operator()(int xi, int zeta) const {
        if (xi < 0 || zeta <= xi || static_cast<std::size_t>(zeta) >= bound)
            fail(ErrorKind::InvalidArgument, "coloring queried outside xi < zeta < bound");
        return col[zeta][xi];
    }
};

enum class ColoringKind { Identity, Seeded };

inline Coloring make_coloring(ColoringKind kind, std::size_t bound, std::uint64_t seed) {
    Coloring c;
    c.bound = bound;
    c.col.resize(bound);
    for (std::size_t z = 0; z < bound; ++z) {
        c.col[z].resize(z);
        std::iota(c.col[z].begin(), c.col[z].end(), 0);
        if (kind == ColoringKind::Seeded) {
            std::mt19937_64 rng(mix64(seed ^ (z * 0x9e37ULL)));
            std::shuffle(c.col[z].begin(), c.col[z].end(), rng);
        }
    }
    return c;
}

inline bool columns_injective(const Coloring& c) {
    for (auto& column : c.col) {
        std::set<int> seen(column.begin(), column.end());
        if (seen.size() != column.size()) return false;
    }
    return true;
}

// First pair of blocks a < b (in the given order) with every cross value above N.
inline std::optional<std::pair<std::size_t, std::size_t>> check_unbound_fact(const Coloring& c,
                                                                             const std::vector<std::vector<int>>& blocks,
                                                                             int N) {
    for (std::size_t i = 0; i < blocks.size(); ++i)
        for (std::size_t j = 0; j < blocks.size(); ++j) {
            if (i == j || blocks[i].empty() || blocks[j].empty()) continue;
            if (*std::max_element(blocks[i].begin(), blocks[i].end()) >= *std::min_element(blocks[j].begin(), blocks[j].end()))
                continue;
            bool all = true;
            for (int xi : blocks[i])
                for (int z : blocks[j])
                    if (c(xi, z) <= N) all = false;
            if (all) return std::make_pair(i, j);
        }
    return std::nullopt;
}

// ---------------------------------------------------------------- the builder

struct BuildConfig {
    std::size_t stages = 5;
    int block = 8;   // columns per stage; limit indices are positive multiples
    int graft = 3;   // depth of the binary tree placed above each join
    ColoringKind coloring = ColoringKind::Identity;
    std::uint64_t seed = 0;
};

struct StageRecord {
    int alpha = 0;
    std::size_t y = 0, w = 0, t = 0;
    int k = 0;
    std::vector<int> gamma;
    std::vector<std::size_t> grafted;
};

class Builder {
  public:
    explicit Builder(BuildConfig cfg) : cfg_(cfg) {
        if (cfg_.block < 2) fail(ErrorKind::InvalidArgument, "block must be at least 2");
        if (cfg_.graft < 0 || cfg_.graft >= cfg_.block) fail(ErrorKind::InvalidArgument, "graft depth must be below the block width");
        c_ = make_coloring(cfg_.coloring, static_cast<std::size_t>(cfg_.block) * (cfg_.stages + 1), cfg_.seed);
        std::size_t root = add({0, 0}, {});
        graft_above(root, 0);
        enqueue_new(0);
        for (std::size_t s = 1; s <= cfg_.stages; ++s) build_stage(static_cast<int>(s) * cfg_.block);
    }

    const BuildConfig& config() const { return cfg_; }
    const Coloring& coloring() const { return c_; }
    std::size_t size() const { return elems_.size(); }
    const GridElem& elem(std::size_t i) const { return elems_[i]; }
    const std::vector<GridElem>& elems() const { return elems_; }
    const std::vector<StageRecord>& stages() const { return records_; }
    // strict predecessors, sorted
    const std::vector<std::size_t>& down(std::size_t i) const { return down_[i]; }
    bool lt(std::size_t a, std::size_t b) const { return std::binary_search(down_[b].begin(), down_[b].end(), a); }
    bool le(std::size_t a, std::size_t b) const { return a == b || lt(a, b); }
    std::optional<std::size_t> find(const GridElem& e) const {
        auto it = index_.find(e);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }
    int region_of(int alpha) const { return alpha / cfg_.block; }

    order::FinitePoset poset() const {
        std::vector<std::string> names;
        for (auto& e : elems_) names.push_back(to_string(e));
        std::vector<std::pair<std::size_t, std::size_t>> pairs;
        for (std::size_t b = 0; b < size(); ++b)
            for (auto a : down_[b]) pairs.emplace_back(a, b);
        return order::FinitePoset::from_pairs(std::move(names), pairs);
    }

  private:
    std::size_t add(GridElem e, std::vector<std::size_t> below) {
        if (index_.count(e)) fail(ErrorKind::ValidationFailed, "duplicate grid element " + to_string(e));
        std::sort(below.begin(), below.end());
        below.erase(std::unique(below.begin(), below.end()), below.end());
        std::size_t id = elems_.size();
        elems_.push_back(e);
        down_.push_back(std::move(below));
        index_[e] = id;
        used_[e.alpha].insert(e.n);
        return id;
    }

    int fresh_level(int column, int above) {
        int m = above + 1;
        while (used_[column].count(m)) ++m;
        return m;
    }

    // Binary tree of depth `graft` above `at`, child columns stepping by one inside the region.
    void graft_above(std::size_t at, std::size_t stage_index) {
        std::vector<std::size_t> frontier{at};
        for (int d = 0; d < cfg_.graft; ++d) {
            std::vector<std::size_t> next;
            for (auto par : frontier)
                for (int b = 0; b < 2; ++b) {
                    GridElem pe = elems_[par];
                    int z = pe.alpha + 1;
                    std::vector<std::size_t> below = down_[par];
                    below.push_back(par);
                    int need = 0;
                    for (auto a : below) need = std::max({need, elems_[a].n, c_(elems_[a].alpha, z)});
                    int lvl = fresh_level(z, need);
                    next.push_back(add({z, lvl}, below));
                }
            frontier = next;
        }
        if (stage_index < records_.size())
            for (std::size_t i = 0; i < size(); ++i)
                if (i != at && lt(at, i)) records_[stage_index].grafted.push_back(i);
    }

    void enqueue_new(std::size_t first_new) {
        std::vector<std::pair<std::size_t, std::size_t>> batch;
        for (std::size_t b = first_new; b < size(); ++b)
            for (std::size_t a = 0; a < b; ++a) batch.emplace_back(a, b);
        if (cfg_.seed != 0) {
            std::mt19937_64 rng(mix64(cfg_.seed ^ first_new));
            std::shuffle(batch.begin(), batch.end(), rng);
        }
        for (auto& p : batch) queue_.push_back(p);
    }

    void build_stage(int alpha) {
        if (queue_.empty()) fail(ErrorKind::WindowExceeded, "pair schedule is empty");
        auto [y, w] = queue_.front();
        queue_.pop_front();
        StageRecord rec;
        rec.alpha = alpha;
        rec.y = y;
        rec.w = w;
        std::vector<std::size_t> below = down_[y];
        below.insert(below.end(), down_[w].begin(), down_[w].end());
        below.push_back(y);
        below.push_back(w);
        std::set<int> gamma;
        for (auto s : below) gamma.insert(elems_[s].alpha);
        int k = std::max(elems_[y].n, elems_[w].n);
        for (int nu : gamma) k = std::max(k, c_(nu, alpha));
        ++k;
        rec.k = k;
        rec.gamma.assign(gamma.begin(), gamma.end());
        std::size_t first_new = size();
        rec.t = add({alpha, k}, below);
        records_.push_back(rec);
        graft_above(rec.t, records_.size() - 1);
        enqueue_new(first_new);
    }

    BuildConfig cfg_;
    Coloring c_;
    std::vector<GridElem> elems_;
    std::vector<std::vector<std::size_t>> down_;
    std::map<GridElem, std::size_t> index_;
    std::map<int, std::set<int>> used_;
    std::deque<std::pair<std::size_t, std::size_t>> queue_;
    std::vector<StageRecord> records_;
};

// ---------------------------------------------------------------- invariant checks

struct InvariantReport {
    bool ok = true;
    std::string detail;
};

// Grid order with the coloring bound, transitivity, predecessor scans agreeing, the join cone identity and the k formula.
inline InvariantReport check_builder(const Builder& B) {
    const std::size_t n = B.size();
    const auto& c = B.coloring();
    for (std::size_t b = 0; b < n; ++b)
        for (auto a : B.down(b)) {
            auto ea = B.elem(a), eb = B.elem(b);
            if (!(ea.alpha < eb.alpha) || !(std::max(ea.n, c(ea.alpha, eb.alpha)) < eb.n))
                return {false, "grid order or coloring bound fails for " + to_string(ea) + " < " + to_string(eb)};
            for (auto z : B.down(a))
                if (!B.lt(z, b)) return {false, "order not transitive at " + to_string(eb)};
        }
    // backward scan: collect predecessors of b from every element's successor list
    std::vector<std::vector<std::size_t>> up(n);
    for (std::size_t b = 0; b < n; ++b)
        for (auto a : B.down(b)) up[a].push_back(b);
    std::vector<std::vector<std::size_t>> back(n);
    for (std::size_t a = 0; a < n; ++a)
        for (auto b : up[a]) back[b].push_back(a);
    for (std::size_t b = 0; b < n; ++b) {
        std::sort(back[b].begin(), back[b].end());
        if (back[b] != B.down(b)) return {false, "predecessor scans disagree at " + to_string(B.elem(b))};
    }
    for (auto& r : B.stages()) {
        for (std::size_t t = 0; t < n; ++t) {
            if (t == r.t) continue;
            bool below = B.lt(t, r.t);
            bool expect = B.le(t, r.y) || B.le(t, r.w);
            if (below != expect) return {false, "join cone identity fails at stage " + std::to_string(r.alpha)};
        }
        int k = std::max(B.elem(r.y).n, B.elem(r.w).n);
        for (std::size_t s = 0; s < n; ++s)
            if (B.le(s, r.y) || B.le(s, r.w)) k = std::max(k, c(B.elem(s).alpha, r.alpha));
        if (k + 1 != r.k || B.elem(r.t).n != r.k) return {false, "k formula mismatch at stage " + std::to_string(r.alpha)};
    }
    return {};
}

// ---------------------------------------------------------------- branches

struct Branch {
    std::vector<std::size_t> stem;
    bool maximal = false;
};

inline std::vector<std::size_t> covers_of(const Builder& B, std::size_t a) {
    std::vector<std::size_t> out;
    for (std::size_t b = 0; b < B.size(); ++b) {
        if (!B.lt(a, b)) continue;
        bool imm = true;
        for (auto c : B.down(b))
            if (B.lt(a, c)) {
                imm = false;
                break;
            }
        if (imm) out.push_back(b);
    }
    return out;
}

// A stem above q that never enters the up-set of p.
inline std::optional<Branch> branch_separation_witness(const Builder& B, std::size_t p, std::size_t q) {
    if (B.le(p, q)) fail(ErrorKind::Comparable, to_string(B.elem(p)) + " is below " + to_string(B.elem(q)));
    Branch br{{q}, false};
    if (covers_of(B, q).empty()) fail(ErrorKind::WindowExceeded, to_string(B.elem(q)) + " is maximal in the window");
    for (;;) {
        auto cov = covers_of(B, br.stem.back());
        if (cov.empty()) return br;
        std::optional<std::size_t> next;
        for (auto c : cov)
            if (!B.le(p, c)) {
                next = c;
                break;
            }
        if (!next) return std::nullopt;
        br.stem.push_back(*next);
    }
}

inline bool is_cover_chain(const Builder& B, const std::vector<std::size_t>& s) {
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        auto cov = covers_of(B, s[i]);
        if (std::find(cov.begin(), cov.end(), s[i + 1]) == cov.end()) return false;
    }
    return true;
}

struct MaximalExtension {
    Branch branch;
    std::size_t n0 = 0;
};

// Refines a stem into a cover chain starting at a minimal element.
inline MaximalExtension extend_to_maximal_chain(const Builder& B, const Branch& y) {
    if (y.stem.empty()) fail(ErrorKind::InvalidArgument, "empty stem");
    for (std::size_t i = 0; i + 1 < y.stem.size(); ++i)
        if (!B.lt(y.stem[i], y.stem[i + 1])) fail(ErrorKind::InvalidArgument, "stem is not strictly increasing");
    auto fill_between = [&](std::size_t a, std::size_t b, std::vector<std::size_t>& out) {
        std::size_t cur = a;
        while (cur != b) {
            for (auto c : covers_of(B, cur))
                if (B.le(c, b)) {
                    cur = c;
                    break;
                }
            out.push_back(cur);
        }
    };
    std::size_t start = y.stem[0];
    for (auto d : B.down(start))
        if (B.down(d).empty()) {
            start = d;
            break;
        }
    MaximalExtension res;
    res.branch.stem.push_back(start);
    if (start != y.stem[0]) fill_between(start, y.stem[0], res.branch.stem);
    res.n0 = res.branch.stem.size() - 1;
    for (std::size_t i = 0; i + 1 < y.stem.size(); ++i) fill_between(y.stem[i], y.stem[i + 1], res.branch.stem);
    res.branch.maximal = true;
    return res;
}

// The end segment of the refinement stays inside the union of the stem's initial intervals.
inline bool check_maximal_extension(const Builder& B, const Branch& y, const MaximalExtension& ext) {
    const auto& s = ext.branch.stem;
    if (!B.down(s[0]).empty() || !is_cover_chain(B, s)) return false;
    auto in_stem_union = [&](std::size_t r) {
        for (auto top : y.stem)
            if (B.le(y.stem[0], r) && B.le(r, top)) return true;
        return false;
    };
    for (std::size_t n = ext.n0; n < s.size(); ++n)
        for (std::size_t r = 0; r < B.size(); ++r)
            if (B.le(s[ext.n0], r) && B.le(r, s[n]) && !in_stem_union(r)) return false;
    return true;
}

// Every window maximal chain: cover chains from minimal to maximal elements.
inline std::vector<Branch> window_branches(const Builder& B, std::size_t cap = 4096) {
    std::vector<Branch> out;
    std::vector<std::size_t> cur;
    std::function<void(std::size_t)> rec = [&](std::size_t a) {
        if (out.size() >= cap) return;
        cur.push_back(a);
        auto cov = covers_of(B, a);
        if (cov.empty()) out.push_back({cur, true});
        for (auto c : cov) rec(c);
        cur.pop_back();
    };
    for (std::size_t a = 0; a < B.size(); ++a)
        if (B.down(a).empty()) rec(a);
    return out;
}

// ---------------------------------------------------------------- the quadruple game

struct Quadruple {
    int region = 0;
    std::size_t x = 0, y = 0, z = 0, w = 0;
    bool degenerate_low = false, degenerate_high = false;
};

struct GameWitness {
    std::size_t a = 0, b = 0;  // indices into quads
    std::size_t t = 0;
    int color = 0;             // color of t; the matching maximality is contradicted
};

struct GameReport {
    std::vector<Quadruple> quads;
    std::vector<GameWitness> witnesses;
};

inline std::vector<std::size_t> interval_of(const Builder& B, std::size_t lo, std::size_t hi) {
    std::vector<std::size_t> out;
    for (std::size_t r = 0; r < B.size(); ++r)
        if (B.le(lo, r) && B.le(r, hi)) out.push_back(r);
    return out;
}

inline GameReport quadruple_game(const Builder& B, const order::Coloring& col) {
    if (col.size() != B.size()) fail(ErrorKind::InvalidArgument, "coloring does not cover the built poset");
    auto P = B.poset();
    GameReport rep;
    auto first_above = [&](std::size_t s, int i) -> std::optional<std::size_t> {
        for (std::size_t u = 0; u < B.size(); ++u)
            if (col[u] == i && B.le(s, u) && B.region_of(B.elem(u).alpha) == B.region_of(B.elem(s).alpha)) return u;
        return std::nullopt;
    };
    for (std::size_t s = 0; s <= B.config().stages; ++s) {
        std::optional<std::size_t> root;
        for (std::size_t u = 0; u < B.size() && !root; ++u)
            if (B.region_of(B.elem(u).alpha) == static_cast<int>(s)) root = u;
        if (!root) continue;
        Quadruple q;
        q.region = static_cast<int>(s);
        if (auto x = first_above(*root, 0)) {
            q.x = *x;
            q.y = order::i_maximal_extension(P, col, *x)->hi;
        } else {
            q.x = q.y = *root;
            q.degenerate_low = true;
        }
        if (auto z = first_above(q.y, 1)) {
            q.z = *z;
            q.w = order::i_maximal_extension(P, col, *z)->hi;
        } else {
            q.z = q.w = q.y;
            q.degenerate_high = true;
        }
        rep.quads.push_back(q);
    }
    for (std::size_t a = 0; a < rep.quads.size(); ++a)
        for (std::size_t b = a + 1; b < rep.quads.size(); ++b) {
            const auto &qa = rep.quads[a], &qb = rep.quads[b];
            for (auto& r : B.stages()) {
                std::size_t t = r.t;
                if (!B.lt(qa.y, t) || !B.lt(qb.w, t)) continue;
                auto i1 = interval_of(B, qa.x, t), e1 = interval_of(B, qa.x, qa.y);
                auto i2 = interval_of(B, qb.z, t), e2 = interval_of(B, qb.z, qb.w);
                e1.push_back(t);
                e2.push_back(t);
                std::sort(e1.begin(), e1.end());
                std::sort(e2.begin(), e2.end());
                if (i1 == e1 && i2 == e2) rep.witnesses.push_back({a, b, t, col[t]});
            }
        }
    return rep;
}

}  // namespace resolvix::grid
