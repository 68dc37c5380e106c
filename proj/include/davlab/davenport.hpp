#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "davlab/zmod.hpp"

namespace davlab {

/*
 * A weight set A: a nonempty subset of Z_n \ {0}.  The weighted Davenport
 * constant D_A(Z_n) is the least D such that every sequence of D elements of
 * Z_n contains a nonempty subsequence (x_1, ..., x_t) admitting weights
 * a_i in A with a_1 x_1 + ... + a_t x_t = 0.
 */
class WeightSet {
public:
    WeightSet(const Modulus& m, const std::vector<std::uint32_t>& weights);
    WeightSet(const Modulus& m, ResidueSet weights);

    const Modulus& modulus() const { return set_.modulus(); }
    std::uint32_t n() const { return set_.n(); }
    const ResidueSet& set() const { return set_; }
    std::vector<std::uint32_t> values() const { return set_.members(); }
    std::uint32_t size() const { return set_.size(); }

private:
    void validate() const;
    ResidueSet set_;
};

// A sequence over Z_n (order is irrelevant to all quantities computed here;
// helpers keep a canonical sorted form available).
struct GroupSequence {
    Modulus modulus;
    std::vector<std::uint32_t> elements;

    GroupSequence(const Modulus& m, std::vector<std::uint32_t> elems);
    std::vector<std::uint32_t> sorted() const;
};

/*
 * Set of all A-weighted sums of nonempty subsequences of seq:
 *   Z = { sum a_i x_i : nonempty subsequence (x_i), a_i in A }.
 * Computed by the closure recurrence Z' = Z | A*x | (Z + A*x) per element.
 */
ResidueSet weighted_sum_closure(const GroupSequence& seq, const WeightSet& a);

// True iff 0 is not an A-weighted sum of any nonempty subsequence.
bool is_zero_sum_free(const GroupSequence& seq, const WeightSet& a);

struct DavenportResult {
    std::uint32_t value = 0;                 // D_A(Z_n) when !cap_exceeded
    bool cap_exceeded = false;               // search stopped at cap
    std::uint32_t cap = 0;
    std::vector<std::uint32_t> witness;      // longest zero-sum-free sequence found
    std::uint64_t nodes_explored = 0;        // closure evaluations during the search
};

/*
 * Exact D_A(Z_n) by depth-first search over nondecreasing sequences of
 * nonzero-closure candidates, pruning any branch whose closure hits 0.  For
 * prime n the search additionally fixes the first element to 1: dilating a
 * sequence by a unit dilates every weighted sum by the same unit, so every
 * dilation orbit of a zero-sum-free sequence has a representative starting
 * at 1.  cap bounds the search depth; the default cap n can never be reached
 * because the closure grows strictly until it contains 0.
 *
 * Deterministic for any thread count: first-level branches are explored
 * independently and merged in branch order.
 */
DavenportResult davenport_constant(const WeightSet& a, std::uint32_t cap = 0,
                                   unsigned threads = 1);

/*
 * True iff D_A(Z_n) <= k, i.e. no zero-sum-free sequence of length k exists.
 * On failure, witness (if non-null) receives the lexicographically least
 * canonical zero-sum-free sequence of length k.  nodes (if non-null) receives
 * the number of closure evaluations.
 */
bool satisfies_bound(const WeightSet& a, std::uint32_t k,
                     std::vector<std::uint32_t>* witness = nullptr,
                     std::uint64_t* nodes = nullptr, unsigned threads = 1);

} // namespace davlab
