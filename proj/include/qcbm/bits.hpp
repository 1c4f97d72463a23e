#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <string_view>

#include "qcbm/error.hpp"

namespace qcbm {

// A measured bitstring stored as its basis index: qubit q is bit q
// (qubit 0 is the least significant bit).
using Bitstring = std::uint64_t;

inline constexpr int kMaxBits = 64;

inline int bit_at(Bitstring x, int q) { return static_cast<int>((x >> q) & 1u); }

inline int hamming_distance(Bitstring x, Bitstring y) { return std::popcount(x ^ y); }

// Text form, most significant qubit first: qubit n-1 is the leftmost character.
inline std::string to_string(Bitstring x, int n_bits) {
    std::string s(static_cast<std::size_t>(n_bits), '0');
    for (int q = 0; q < n_bits; ++q) {
        if (bit_at(x, q)) s[static_cast<std::size_t>(n_bits - 1 - q)] = '1';
    }
    return s;
}

inline Bitstring parse_bitstring(std::string_view s) {
    if (s.empty() || s.size() > static_cast<std::size_t>(kMaxBits)) {
        throw ValidationError("bitstring length must be in [1, 64]");
    }
    Bitstring x = 0;
    const int n = static_cast<int>(s.size());
    for (int i = 0; i < n; ++i) {
        const char c = s[static_cast<std::size_t>(i)];
        if (c != '0' && c != '1') throw ValidationError("bitstring contains non-binary character");
        if (c == '1') x |= Bitstring{1} << (n - 1 - i);
    }
    return x;
}

}  // namespace qcbm
