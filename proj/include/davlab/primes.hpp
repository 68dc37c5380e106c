#pragma once

#include <cstdint>
#include <vector>

namespace davlab {

// Deterministic primality by trial division; adequate for the moduli this
// library targets (n comfortably below 2^32).
constexpr bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    if (n % 2 == 0) return n == 2;
    if (n % 3 == 0) return n == 3;
    for (std::uint64_t d = 5; d * d <= n; d += 6) {
        if (n % d == 0 || n % (d + 2) == 0) return false;
    }
    return true;
}

// All primes p with lo <= p <= hi, ascending.
inline std::vector<std::uint32_t> primes_in_range(std::uint32_t lo, std::uint32_t hi) {
    std::vector<std::uint32_t> out;
    for (std::uint64_t p = lo < 2 ? 2 : lo; p <= hi; ++p) {
        if (is_prime(p)) out.push_back(static_cast<std::uint32_t>(p));
    }
    return out;
}

// Smallest prime >= n.
inline std::uint32_t next_prime(std::uint32_t n) {
    std::uint64_t p = n < 2 ? 2 : n;
    while (!is_prime(p)) ++p;
    return static_cast<std::uint32_t>(p);
}

} // namespace davlab
