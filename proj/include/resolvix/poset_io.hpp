#pragma once

#include <map>
#include <memory>
#include <sstream>
#include <string>

#include "resolvix/order.hpp"

namespace resolvix::order {

struct NamedPoset {
    std::string name;
    FinitePoset poset;
};

inline NamedPoset parse_poset(std::string_view src) {
    NamedPoset out;
    std::vector<std::string> names;
    std::map<std::string, std::size_t, std::less<>> index;
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    bool header = false;
    for (auto& [ln, line] : text::logical_lines(src)) {
        auto tok = text::split_ws(line);
        const std::string where = "line " + std::to_string(ln) + ": ";
        if (tok[0] == "poset") {
            if (header || tok.size() != 2) fail(ErrorKind::ParseError, where + "bad poset header");
            out.name = tok[1];
            header = true;
        } else if (!header) {
            fail(ErrorKind::ParseError, where + "missing 'poset <name>' header");
        } else if (tok[0] == "elem") {
            if (tok.size() != 2) fail(ErrorKind::ParseError, where + "elem takes one id");
            if (index.count(tok[1])) fail(ErrorKind::ParseError, where + "duplicate elem " + tok[1]);
            index[tok[1]] = names.size();
            names.push_back(tok[1]);
        } else if (tok[0] == "le") {
            if (tok.size() != 3) fail(ErrorKind::ParseError, where + "le takes two ids");
            auto a = index.find(tok[1]), b = index.find(tok[2]);
            if (a == index.end() || b == index.end()) fail(ErrorKind::ParseError, where + "unknown elem in le");
            pairs.emplace_back(a->second, b->second);
        } else {
            fail(ErrorKind::ParseError, where + "unknown directive '" + tok[0] + "'");
        }
    }
    if (!header) fail(ErrorKind::ParseError, "empty poset file");
    out.poset = FinitePoset::from_pairs(std::move(names), pairs);
    return out;
}

// Writes the covering relation only; the reader restores the closure.
inline std::string write_poset(const std::string& name, const FinitePoset& P) {
    std::ostringstream os;
    os << "poset " << name << "\n";
    for (std::size_t i = 0; i < P.size(); ++i) os << "elem " << P.name(i) << "\n";
    for (std::size_t a = 0; a < P.size(); ++a)
        for (auto b : P.covers(a)) os << "le " << P.name(a) << " " << P.name(b) << "\n";
    return os.str();
}

}  // namespace resolvix::order
