#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "davlab/primes.hpp"

namespace davlab {

/*
 * A modulus n >= 2 together with its primality status and modular arithmetic
 * on canonical representatives in [0, n).  Cheap to copy; every set and
 * weight-set in the library carries one so mismatches are caught early.
 */
class Modulus {
public:
    explicit Modulus(std::uint32_t n);

    std::uint32_t n() const { return n_; }
    bool prime() const { return prime_; }

    // Canonical representative of v in [0, n), accepting negatives.
    std::uint32_t reduce(std::int64_t v) const {
        std::int64_t r = v % static_cast<std::int64_t>(n_);
        if (r < 0) r += n_;
        return static_cast<std::uint32_t>(r);
    }

    std::uint32_t add(std::uint32_t a, std::uint32_t b) const {
        std::uint64_t s = static_cast<std::uint64_t>(a) + b;
        if (s >= n_) s -= n_;
        return static_cast<std::uint32_t>(s);
    }
    std::uint32_t sub(std::uint32_t a, std::uint32_t b) const {
        return a >= b ? a - b : static_cast<std::uint32_t>(a + static_cast<std::uint64_t>(n_) - b);
    }
    std::uint32_t mul(std::uint32_t a, std::uint32_t b) const {
        return static_cast<std::uint32_t>(static_cast<std::uint64_t>(a) * b % n_);
    }
    std::uint32_t neg(std::uint32_t a) const { return a == 0 ? 0 : n_ - a; }
    std::uint32_t pow(std::uint32_t a, std::uint64_t e) const;

    // Multiplicative inverse; throws std::domain_error if gcd(a, n) != 1.
    std::uint32_t inv(std::uint32_t a) const;

    // Table of inverses inv[1..n-1] for prime n, computed in O(n).
    std::vector<std::uint32_t> inverse_table() const;

    bool operator==(const Modulus&) const = default;

private:
    std::uint32_t n_;
    bool prime_;
};

/*
 * A residue bound to its modulus.  Arithmetic between residues of different
 * moduli throws.  Use for API-level values (weights, dilation factors,
 * interval steps); hot loops inside the library work on raw uint32_t.
 */
class Residue {
public:
    Residue(const Modulus& m, std::int64_t v) : v_(m.reduce(v)), n_(m.n()) {}

    std::uint32_t value() const { return v_; }
    std::uint32_t modulus() const { return n_; }

    Residue operator+(const Residue& o) const;
    Residue operator-(const Residue& o) const;
    Residue operator*(const Residue& o) const;
    Residue operator-() const;
    bool operator==(const Residue&) const = default;

private:
    Residue(std::uint32_t v, std::uint32_t n, int) : v_(v), n_(n) {}
    static Residue raw(std::uint32_t v, std::uint32_t n) { return Residue(v, n, 0); }

    std::uint32_t v_;
    std::uint32_t n_;
};

/*
 * Dense subset of Z_n as a packed bit-vector with a maintained cardinality.
 * The workhorse of the library: sumsets are computed by OR-ing cyclic shifts
 * of the larger operand keyed on the members of the smaller one, which makes
 * a sumset cost O(min(|S|,|T|) * n/64) word operations.
 */
class ResidueSet {
public:
    explicit ResidueSet(const Modulus& m);

    static ResidueSet singleton(const Modulus& m, std::uint32_t v);
    static ResidueSet full(const Modulus& m);
    static ResidueSet from_values(const Modulus& m, const std::vector<std::uint32_t>& vs);

    const Modulus& modulus() const { return mod_; }
    std::uint32_t n() const { return mod_.n(); }

    bool contains(std::uint32_t v) const {
        return (words_[v >> 6] >> (v & 63)) & 1u;
    }
    void insert(std::uint32_t v) {
        std::uint64_t bit = 1ULL << (v & 63);
        std::uint64_t& w = words_[v >> 6];
        if (!(w & bit)) { w |= bit; ++count_; }
    }
    void erase(std::uint32_t v) {
        std::uint64_t bit = 1ULL << (v & 63);
        std::uint64_t& w = words_[v >> 6];
        if (w & bit) { w &= ~bit; --count_; }
    }

    std::uint32_t size() const { return count_; }
    bool empty() const { return count_ == 0; }

    std::vector<std::uint32_t> members() const;       // ascending
    void for_each(const std::function<void(std::uint32_t)>& fn) const;

    ResidueSet& operator|=(const ResidueSet& o);
    ResidueSet& operator&=(const ResidueSet& o);
    bool operator==(const ResidueSet& o) const;

    bool is_subset_of(const ResidueSet& o) const;

    // OR (other cyclically rotated by +shift) into this set.
    void or_rotated(const ResidueSet& other, std::uint32_t shift);

    const std::vector<std::uint64_t>& words() const { return words_; }

private:
    void recount();

    Modulus mod_;
    std::vector<std::uint64_t> words_;
    std::uint32_t count_;
};

// {c*s mod n : s in S}.  c = 0 collapses a nonempty set to {0}.
ResidueSet dilate(const ResidueSet& s, const Residue& c);
ResidueSet dilate(const ResidueSet& s, std::uint32_t c);

// {a + b : a in s1, b in s2}; empty if either operand is empty.
ResidueSet sumset(const ResidueSet& s1, const ResidueSet& s2);

// {-s : s in S}.
ResidueSet negate(const ResidueSet& s);

// S - S = {a - b : a, b in S}.
ResidueSet difference_set(const ResidueSet& s);

// {a * b^-1 : a in num, b in den, b != 0}.  Requires a prime modulus.
ResidueSet quotient_set(const ResidueSet& num, const ResidueSet& den);

// S \ {0}; returns a copy, and is idempotent.
ResidueSet remove_zero(const ResidueSet& s);

/*
 * Arithmetic-progression intervals t*[lo, hi] mod n.
 *
 *   full      -> t * [-radius, radius]   (2*radius + 1 nominal elements)
 *   half      -> t * [0, radius]         (radius + 1 nominal elements)
 *   positive  -> t * [1, radius]         (radius nominal elements)
 */
enum class IntervalKind { full, half, positive };

struct IntervalSpec {
    Residue step;               // t; must be nonzero
    std::uint32_t radius;       // L >= 1
    IntervalKind kind = IntervalKind::full;
};

struct MaterializedInterval {
    ResidueSet set;
    bool wrapped;               // true if residues collided mod n
};

MaterializedInterval materialize_interval(const Modulus& m, const IntervalSpec& spec);

/*
 * Symmetric core of a sum of full intervals.
 *
 * Input intervals X_i = t_i * [-L_i, L_i] (optionally preceded by the unit
 * interval I = 1 * [-L_1, L_1] when include_unit is set).  Each of the 2^r
 * sign patterns eps picks the half X_i^+ = t_i * [0, L_i] or the reflection
 * X_i^- = t_i * [-L_i, 0]; the core is the pattern sumset of maximum
 * cardinality, ties broken by the lexicographically first pattern with '+'
 * ordered before '-' and the first interval most significant.
 *
 * The result Y satisfies |Y| >= |X_1 + ... + X_r| / 2^r and Y - Y is
 * contained in the full interval sumset, which is what makes it usable as a
 * symmetric certificate block.
 */
struct SymmetricCore {
    ResidueSet core;
    std::uint32_t pattern;      // bit i set => '-' chosen for interval i (MSB-first order applied externally)
};

SymmetricCore extract_symmetric_core(const Modulus& m,
                                     const std::vector<IntervalSpec>& intervals,
                                     bool include_unit);

} // namespace davlab
