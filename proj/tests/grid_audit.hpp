#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "resolvix/grid.hpp"

namespace grid_audit {

using resolvix::grid::Builder;

// Independent of check_builder: strict order inside the grid order, the coloring bound, cone identity, k formula.
inline std::string audit(const Builder& B) {
    const auto& c = B.coloring();
    const std::size_t n = B.size();
    for (std::size_t a = 0; a < n; ++a) {
        if (B.lt(a, a)) return "reflexive";
        for (std::size_t b = 0; b < n; ++b) {
            if (!B.lt(a, b)) continue;
            if (B.lt(b, a)) return "antisymmetry";
            auto ea = B.elem(a), eb = B.elem(b);
            if (!(ea.alpha < eb.alpha && ea.n < eb.n)) return "outside grid order";
            if (!(c(ea.alpha, eb.alpha) < eb.n)) return "coloring bound";
            for (std::size_t d = 0; d < n; ++d)
                if (B.lt(b, d) && !B.lt(a, d)) return "transitivity";
        }
    }
    for (auto& r : B.stages()) {
        std::set<int> gamma;
        int k = std::max(B.elem(r.y).n, B.elem(r.w).n);
        for (std::size_t s = 0; s < n; ++s)
            if (B.le(s, r.y) || B.le(s, r.w)) gamma.insert(B.elem(s).alpha);
        for (int nu : gamma) k = std::max(k, c(nu, r.alpha));
        if (k + 1 != r.k || B.elem(r.t).n != k + 1 || B.elem(r.t).alpha != r.alpha) return "k formula";
        if (std::vector<int>(gamma.begin(), gamma.end()) != r.gamma) return "gamma";
        for (std::size_t s = 0; s < n; ++s)
            if (s != r.t && B.lt(s, r.t) != (B.le(s, r.y) || B.le(s, r.w))) return "cone identity";
    }
    return "";
}

}  // namespace grid_audit
