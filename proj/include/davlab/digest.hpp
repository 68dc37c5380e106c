#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace davlab {

// FNV-1a 64-bit over raw bytes; used to fingerprint certificates and CLI
// artifacts.  Not cryptographic, just a stable cross-platform checksum.
inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string format_digest(std::uint64_t h) {
    static const char* hex = "0123456789abcdef";
    std::string out = "fnv1a64:";
    for (int i = 15; i >= 0; --i) out += hex[(h >> (4 * i)) & 0xF];
    return out;
}

} // namespace davlab
