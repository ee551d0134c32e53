#pragma once
// Canonical text handling shared by every module: names, predicates and
// triplet renderings are compared in lowercase-trimmed form.

#include <cctype>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace sgp {

inline std::string trim(std::string_view s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

inline std::string to_lower(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

// Canonical form: surrounding whitespace stripped, lowercase.
inline std::string canonical(std::string_view s) { return to_lower(trim(s)); }

// Lowercase alphanumeric token runs; everything else is a separator.
inline std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string tok;
    for (char c : text) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            tok += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        } else if (!tok.empty()) {
            tokens.push_back(std::move(tok));
            tok.clear();
        }
    }
    if (!tok.empty()) tokens.push_back(std::move(tok));
    return tokens;
}

inline constexpr uint64_t kFnvOffset = 1469598103934665603ULL;
inline constexpr uint64_t kFnvPrime = 1099511628211ULL;

inline uint64_t fnv1a64(std::string_view s, uint64_t h = kFnvOffset) {
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= kFnvPrime;
    }
    return h;
}

inline std::string hex64(uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<size_t>(i)] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

}  // namespace sgp
