#pragma once

#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace resolvix {

inline constexpr const char* kVersion = "0.3.1";

enum class ErrorKind {
    ParseError,
    InvalidArgument,
    NotComparable,
    WindowExceeded,
    MaximalElement,
    NotFilling,
    Unresolvable,
    ScheduleExhausted,
    NoCertificate,
    ChainTooShort,
    NotUnionClosed,
    RequirementUnmeetable,
    TooSmall,
    NotWeaklySeparated,
    InductionStuck,
    Comparable,
    NotTwins,
    AlreadyPresent,
    BadIndex,
    AlreadyDefined,
    PreconditionFailed,
    ValidationFailed,
    BudgetExhausted,
    GUndefined,
};

inline const char* to_string(ErrorKind k) {
    switch (k) {
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::NotComparable: return "NotComparable";
        case ErrorKind::WindowExceeded: return "WindowExceeded";
        case ErrorKind::MaximalElement: return "MaximalElement";
        case ErrorKind::NotFilling: return "NotFilling";
        case ErrorKind::Unresolvable: return "Unresolvable";
        case ErrorKind::ScheduleExhausted: return "ScheduleExhausted";
        case ErrorKind::NoCertificate: return "NoCertificate";
        case ErrorKind::ChainTooShort: return "ChainTooShort";
        case ErrorKind::NotUnionClosed: return "NotUnionClosed";
        case ErrorKind::RequirementUnmeetable: return "RequirementUnmeetable";
        case ErrorKind::TooSmall: return "TooSmall";
        case ErrorKind::NotWeaklySeparated: return "NotWeaklySeparated";
        case ErrorKind::InductionStuck: return "InductionStuck";
        case ErrorKind::Comparable: return "Comparable";
        case ErrorKind::NotTwins: return "NotTwins";
        case ErrorKind::AlreadyPresent: return "AlreadyPresent";
        case ErrorKind::BadIndex: return "BadIndex";
        case ErrorKind::AlreadyDefined: return "AlreadyDefined";
        case ErrorKind::PreconditionFailed: return "PreconditionFailed";
        case ErrorKind::ValidationFailed: return "ValidationFailed";
        case ErrorKind::BudgetExhausted: return "BudgetExhausted";
        case ErrorKind::GUndefined: return "GUndefined";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

  private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

// Deterministic 64-bit mixer, used to derive per-item choices from a seed.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

namespace text {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string> split_ws(std::string_view s) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
        if (j > i) out.emplace_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

// Splits into lines, dropping comments (#...) and blank lines; keeps 1-based line numbers.
inline std::vector<std::pair<int, std::string>> logical_lines(std::string_view src) {
    std::vector<std::pair<int, std::string>> out;
    int lineno = 0;
    std::size_t pos = 0;
    while (pos <= src.size()) {
        std::size_t nl = src.find('\n', pos);
        if (nl == std::string_view::npos) nl = src.size();
        ++lineno;
        std::string_view line = src.substr(pos, nl - pos);
        if (auto h = line.find('#'); h != std::string_view::npos) line = line.substr(0, h);
        line = trim(line);
        if (!line.empty()) out.emplace_back(lineno, std::string(line));
        if (nl == src.size()) break;
        pos = nl + 1;
    }
    return out;
}

inline long long parse_int(std::string_view s, int lineno) {
    s = trim(s);
    if (s.empty()) fail(ErrorKind::ParseError, "line " + std::to_string(lineno) + ": expected integer");
    std::size_t i = 0;
    bool neg = false;
    if (s[0] == '-') { neg = true; i = 1; }
    if (i >= s.size()) fail(ErrorKind::ParseError, "line " + std::to_string(lineno) + ": bad integer '" + std::string(s) + "'");
    long long v = 0;
    for (; i < s.size(); ++i) {
        if (s[i] < '0' || s[i] > '9')
            fail(ErrorKind::ParseError, "line " + std::to_string(lineno) + ": bad integer '" + std::string(s) + "'");
        v = v * 10 + (s[i] - '0');
    }
    return neg ? -v : v;
}

}  // namespace text
}  // namespace resolvix
