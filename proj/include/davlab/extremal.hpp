#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "davlab/davenport.hpp"
#include "davlab/zmod.hpp"

namespace davlab {

/*
 * The extremal function f(p, k) = min{ |A| : A subset of F_p^*, D_A(F_p) <= k },
 * computed exactly by exhaustive search over dilation orbits of weight sets.
 */

/*
 * Canonical representative of the dilation orbit {cA : c in F_p^*}: the
 * lexicographically least sorted member of the orbit.  It always contains 1
 * (dilating by the inverse of any element produces a set containing 1, and
 * any lex-least set must start at the minimum possible element).
 * Prime modulus required.
 */
std::vector<std::uint32_t> canonical_form(const WeightSet& a);

// True iff a.values() is the canonical representative of its orbit.
bool is_canonical(const WeightSet& a);

struct ExtremalResult {
    std::uint32_t p = 0;
    std::uint32_t k = 0;
    std::optional<std::uint32_t> value;      // nullopt: no A within size_cap works
    std::vector<std::uint32_t> witness;      // a minimum weight set (canonical form)
    std::uint32_t size_cap = 0;
    std::uint64_t orbits_tested = 0;
};

// Default search cap ceil(4 * (p ln p)^(1/k)), clamped to [1, p-1].
std::uint32_t default_size_cap(std::uint32_t p, std::uint32_t k);

/*
 * Exact f(p, k): for s = 1, 2, ..., size_cap enumerate all canonical orbit
 * representatives of size s (subsets of F_p^* containing 1, in colex order of
 * the remaining elements, filtered to orbit minima) and return the first size
 * admitting D_A <= k.  Candidate batches are tested in parallel and merged in
 * enumeration order, so the witness is deterministic for any thread count.
 */
ExtremalResult fd_exact(std::uint32_t p, std::uint32_t k, std::uint32_t size_cap = 0,
                        unsigned threads = 1);

/*
 * Independent oracle for k = 2 via the quotient characterization:
 * D_A(F_p) <= 2 iff every nonzero residue is a ratio a/a' of elements of A.
 */
ExtremalResult fd_quotient_oracle(std::uint32_t p, std::uint32_t size_cap = 0,
                                  unsigned threads = 1);

// Exact integer lower bound ceil(p^(1/k)) - 1 <= f(p, k).
std::uint32_t fd_lower_bound(std::uint32_t p, std::uint32_t k);

} // namespace davlab
