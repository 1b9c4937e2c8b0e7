#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "resolvix/order.hpp"

namespace resolvix::order {

// A 2-coloring of a finite poset, indexed like the poset.
using Coloring = std::vector<int>;

inline void check_coloring(const FinitePoset& P, const Coloring& col) {
    if (col.size() != P.size()) fail(ErrorKind::InvalidArgument, "coloring does not cover the poset");
    for (int c : col)
        if (c != 0 && c != 1) fail(ErrorKind::InvalidArgument, "colors must be 0 or 1");
}

inline bool interval_in_class(const FinitePoset& P, const Coloring& col, std::size_t lo, std::size_t hi, int i) {
    for (std::size_t r = 0; r < P.size(); ++r)
        if (P.le(lo, r) && P.le(r, hi) && col[r] != i) return false;
    return true;
}

struct ChainWitness {
    int color = 0;
    std::vector<std::size_t> chain;
};

struct ChainSearch {
    std::optional<ChainWitness> witness;
    std::size_t examined = 0;  // partial chains visited
};

// Strictly increasing p_0 < ... < p_{k-1} with every [p_0,p_j] inside one class.
inline ChainSearch find_homogeneous_chain(const FinitePoset& P, const Coloring& col, std::size_t k) {
    check_coloring(P, col);
    ChainSearch res;
    if (k == 0) {
        res.witness = ChainWitness{0, {}};
        return res;
    }
    std::vector<std::size_t> cur;
    std::function<bool(std::size_t, int)> rec = [&](std::size_t p0, int i) {
        ++res.examined;
        if (cur.size() == k) return true;
        std::size_t last = cur.back();
        for (std::size_t q = 0; q < P.size(); ++q) {
            if (!P.lt(last, q) || !interval_in_class(P, col, p0, q, i)) continue;
            cur.push_back(q);
            if (rec(p0, i)) return true;
            cur.pop_back();
        }
        return false;
    };
    for (std::size_t p0 = 0; p0 < P.size(); ++p0) {
        cur = {p0};
        if (rec(p0, col[p0])) {
            res.witness = ChainWitness{col[p0], cur};
            return res;
        }
    }
    return res;
}

struct IMaximal {
    int color = 0;
    std::size_t lo = 0, hi = 0;
    bool window_bounded = false;  // hi has no strict successor at all, so maximality is only window-deep
};

// Some t >= s with [s,t] inside the class of s and no homogeneous strict extension.
inline std::optional<IMaximal> i_maximal_extension(const FinitePoset& P, const Coloring& col, std::size_t s,
                                                   bool require_certified = false) {
    check_coloring(P, col);
    const int i = col[s];
    std::vector<std::size_t> H;
    for (std::size_t t = 0; t < P.size(); ++t)
        if (P.le(s, t) && interval_in_class(P, col, s, t, i)) H.push_back(t);
    std::optional<std::size_t> best;
    std::size_t best_rank = 0;
    auto rt = rank(P, s, P.size());
    for (auto t : H) {
        bool top = true;
        for (auto u : H)
            if (P.lt(t, u)) top = false;
        if (!top) continue;
        std::size_t r = rt.ranks.at(t);
        bool certified = !P.is_maximal(t);
        if (require_certified && !certified) continue;
        if (!best || r > best_rank) {
            best = t;
            best_rank = r;
        }
    }
    if (!best) return std::nullopt;
    return IMaximal{i, s, *best, P.is_maximal(*best)};
}

// ---------------------------------------------------------------- the avoiding partition

struct AvoidingStep {
    std::size_t stage = 0;
    std::optional<std::size_t> point;  // p_n colored at (ii)
    std::vector<std::size_t> for_interval[2];
    std::vector<std::size_t> hitters[2];
};

struct AvoidingPartition {
    Coloring color;
    std::size_t threshold = 3;
    std::vector<std::pair<std::size_t, std::size_t>> intervals;  // I_n as (lo, hi)
    std::vector<AvoidingStep> steps;
    std::size_t antichains_added[2] = {0, 0};
};

inline std::size_t longest_chain_in(const FinitePoset& P, std::size_t lo, std::size_t hi) {
    auto rt = rank(P, lo, P.size());
    auto it = rt.ranks.find(hi);
    return it == rt.ranks.end() ? 0 : it->second + 1;
}

// Intervals holding a chain of at least `threshold` elements, ordered by (lo, hi).
inline std::vector<std::pair<std::size_t, std::size_t>> long_intervals(const FinitePoset& P, std::size_t threshold) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t a = 0; a < P.size(); ++a) {
        auto rt = rank(P, a, P.size());
        for (auto& [b, r] : rt.ranks)
            if (r + 1 >= threshold) out.emplace_back(a, b);
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline AvoidingPartition build_avoiding_partition(const FinitePoset& P, std::uint64_t seed, std::size_t threshold = 3) {
    if (threshold < 2) fail(ErrorKind::InvalidArgument, "threshold must be at least 2");
    AvoidingPartition res;
    res.threshold = threshold;
    res.intervals = long_intervals(P, threshold);
    std::vector<int> col(P.size(), -1);
    // A finite window has only a few free points per long interval, so the both-colors requirement is met for every
    // interval before the point colorings and hitters start consuming them; colors never change later.
    for (std::size_t n = 0; n < res.intervals.size(); ++n) {
        AvoidingStep st;
        st.stage = n;
        auto [lo, hi] = res.intervals[n];
        for (int i = 0; i < 2; ++i) {
            bool present = false;
            std::vector<std::size_t> free;
            for (std::size_t r = 0; r < P.size(); ++r) {
                if (!P.le(lo, r) || !P.le(r, hi)) continue;
                if (col[r] == i) present = true;
                if (col[r] < 0) free.push_back(r);
            }
            if (present) continue;
            if (free.empty())
                fail(ErrorKind::InductionStuck, "stage " + std::to_string(n) + ": interval [" + P.name(lo) + "," +
                                                    P.name(hi) + "] has no uncolored element for color " +
                                                    std::to_string(i));
            std::size_t pick = free[mix64(seed ^ (n * 2 + i + 0x51ed)) % free.size()];
            col[pick] = i;
            st.for_interval[i].push_back(pick);
            ++res.antichains_added[i];
        }
        res.steps.push_back(std::move(st));
    }
    for (std::size_t n = 0; n < P.size(); ++n) {
        AvoidingStep st;
        st.stage = res.intervals.size() + n;
        if (col[n] < 0) {
            int c = static_cast<int>(mix64(seed ^ n) & 1);
            col[n] = c;
            st.point = n;
            ++res.antichains_added[c];
        }
        for (int i = 0; i < 2; ++i) {
            std::vector<std::size_t> A;
            for (std::size_t r = 0; r < P.size(); ++r)
                if (col[r] >= 0) A.push_back(r);
            auto h = antichain_hitter(P, n, A, threshold - 1);
            for (auto b : h.B) col[b] = i;
            st.hitters[i] = h.B;
            if (!h.B.empty()) ++res.antichains_added[i];
        }
        res.steps.push_back(std::move(st));
    }
    res.color.assign(col.begin(), col.end());
    return res;
}

struct AvoidingCheck {
    bool ok = true;
    std::string detail;
};

inline AvoidingCheck check_avoiding_partition(const FinitePoset& P, const AvoidingPartition& ap) {
    for (auto [lo, hi] : ap.intervals) {
        bool seen[2] = {false, false};
        for (std::size_t r = 0; r < P.size(); ++r)
            if (P.le(lo, r) && P.le(r, hi)) seen[ap.color[r]] = true;
        if (!seen[0] || !seen[1]) return {false, "interval [" + P.name(lo) + "," + P.name(hi) + "] is monochromatic"};
    }
    if (auto w = find_homogeneous_chain(P, ap.color, ap.threshold).witness)
        return {false, "homogeneous chain from " + P.name(w->chain.front())};
    for (int i = 0; i < 2; ++i) {
        std::vector<std::size_t> cls;
        for (std::size_t r = 0; r < P.size(); ++r)
            if (ap.color[r] == i) cls.push_back(r);
        if (antichain_cover(P, cls).size() > ap.antichains_added[i])
            return {false, "class " + std::to_string(i) + " needs more antichains than were added"};
    }
    return {};
}

}  // namespace resolvix::order
