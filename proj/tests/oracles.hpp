#pragma once

/*
 * Naive reference implementations used to cross-check the library.  They are
 * deliberately independent of the production algorithms: weighted sums are
 * enumerated subsequence-by-subsequence instead of via the closure recurrence,
 * and bad-set membership re-solves the defining inequality by brute force.
 */

#include <cstdint>
#include <set>
#include <vector>

#include "davlab/construction.hpp"

namespace oracles {

// All A-weighted sums of nonempty subsequences, by direct enumeration of the
// (1 + |A|)^len choices (skip an element or weight it by some a in A).
inline std::set<std::uint32_t> naive_weighted_sums(const std::vector<std::uint32_t>& seq,
                                                   const std::vector<std::uint32_t>& weights,
                                                   std::uint32_t n) {
    std::set<std::uint32_t> sums;
    auto rec = [&](auto&& self, std::size_t idx, bool started, std::uint32_t sum) -> void {
        if (idx == seq.size()) {
            if (started) sums.insert(sum);
            return;
        }
        self(self, idx + 1, started, sum);
        for (std::uint32_t a : weights) {
            const std::uint32_t term =
                static_cast<std::uint32_t>(static_cast<std::uint64_t>(a) * seq[idx] % n);
            self(self, idx + 1, true, (sum + term) % n);
        }
    };
    rec(rec, 0, false, 0);
    return sums;
}

inline bool naive_zero_sum_free(const std::vector<std::uint32_t>& seq,
                                const std::vector<std::uint32_t>& weights, std::uint32_t n) {
    return naive_weighted_sums(seq, weights, n).count(0) == 0;
}

// D_A(Z_n) by scanning sequence lengths: the least len such that no sequence
// of that length is zero-sum-free.  Sequences are enumerated nondecreasing
// (order never matters for the zero-sum property).
inline std::uint32_t naive_davenport(const std::vector<std::uint32_t>& weights, std::uint32_t n) {
    for (std::uint32_t len = 1; len <= n + 1; ++len) {
        bool some_free = false;
        std::vector<std::uint32_t> seq(len, 0);
        auto rec = [&](auto&& self, std::size_t idx, std::uint32_t min_v) -> bool {
            if (idx == len) return naive_zero_sum_free(seq, weights, n);
            for (std::uint32_t v = min_v; v < n; ++v) {
                seq[idx] = v;
                if (self(self, idx + 1, v)) return true;
            }
            return false;
        };
        some_free = rec(rec, 0, 0);
        if (!some_free) return len;
    }
    return n + 2; // unreachable: closure growth forces termination by len = n
}

// Bad-set membership straight from the definition: does some weight box
// assignment (a_j in [1, H], a_i in [-H, H]) drive t . a into [-2L, 2L]?
inline bool naive_bad_membership(std::uint32_t p, std::uint32_t radius, std::uint32_t half,
                                 const std::vector<std::uint32_t>& t) {
    const auto d = t.size();
    const std::int64_t big = 2LL * radius;
    std::set<std::uint32_t> bset;
    for (std::int64_t b = -big; b <= big; ++b)
        bset.insert(static_cast<std::uint32_t>(((b % p) + p) % p));

    for (std::size_t j = 0; j < d; ++j) {
        std::vector<std::int64_t> a(d, 0);
        auto rec = [&](auto&& self, std::size_t idx) -> bool {
            if (idx == d) {
                std::uint64_t sum = 0;
                for (std::size_t i = 0; i < d; ++i) {
                    const std::uint64_t ai =
                        static_cast<std::uint64_t>(((a[i] % p) + p) % p);
                    sum = (sum + ai * t[i]) % p;
                }
                return bset.count(static_cast<std::uint32_t>(sum)) != 0;
            }
            if (idx == j) {
                for (std::int64_t v = 1; v <= half; ++v) {
                    a[idx] = v;
                    if (self(self, idx + 1)) return true;
                }
            } else {
                for (std::int64_t v = -static_cast<std::int64_t>(half); v <= half; ++v) {
                    a[idx] = v;
                    if (self(self, idx + 1)) return true;
                }
            }
            return false;
        };
        if (rec(rec, 0)) return true;
    }
    return false;
}

} // namespace oracles
