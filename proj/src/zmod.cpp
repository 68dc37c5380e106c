#include "davlab/zmod.hpp"

#include <bit>
#include <stdexcept>
#include <string>

namespace davlab {

/* ------------------------------------------------------------------------ */
/* Modulus                                                                   */
/* ------------------------------------------------------------------------ */

Modulus::Modulus(std::uint32_t n) : n_(n), prime_(is_prime(n)) {
    if (n < 2) throw std::invalid_argument("Modulus: n must be >= 2");
}

std::uint32_t Modulus::pow(std::uint32_t a, std::uint64_t e) const {
    std::uint64_t base = a % n_, acc = 1 % n_;
    while (e) {
        if (e & 1) acc = acc * base % n_;
        base = base * base % n_;
        e >>= 1;
    }
    return static_cast<std::uint32_t>(acc);
}

std::uint32_t Modulus::inv(std::uint32_t a) const {
    if (a == 0) throw std::domain_error("Modulus::inv: zero is not invertible");
    // Extended Euclid on (a, n); works for any unit, prime or not.
    std::int64_t r0 = a % n_, r1 = n_, s0 = 1, s1 = 0;
    while (r1 != 0) {
        std::int64_t q = r0 / r1;
        std::int64_t r2 = r0 - q * r1;
        std::int64_t s2 = s0 - q * s1;
        r0 = r1; r1 = r2;
        s0 = s1; s1 = s2;
    }
    if (r0 != 1)
        throw std::domain_error("Modulus::inv: " + std::to_string(a) +
                                " is not invertible mod " + std::to_string(n_));
    return reduce(s0);
}

std::vector<std::uint32_t> Modulus::inverse_table() const {
    if (!prime_) throw std::domain_error("Modulus::inverse_table: prime modulus required");
    std::vector<std::uint32_t> inv(n_, 0);
    if (n_ > 1) inv[1] = 1;
    for (std::uint32_t i = 2; i < n_; ++i) {
        // inv[i] = -(n/i) * inv[n mod i] mod n
        std::uint64_t t = static_cast<std::uint64_t>(n_ / i) * inv[n_ % i] % n_;
        inv[i] = static_cast<std::uint32_t>(n_ - t);
    }
    return inv;
}

/* ------------------------------------------------------------------------ */
/* Residue                                                                   */
/* ------------------------------------------------------------------------ */

namespace {
void check_same_modulus(std::uint32_t a, std::uint32_t b, const char* what) {
    if (a != b)
        throw std::invalid_argument(std::string(what) + ": modulus mismatch (" +
                                    std::to_string(a) + " vs " + std::to_string(b) + ")");
}
} // namespace

Residue Residue::operator+(const Residue& o) const {
    check_same_modulus(n_, o.n_, "Residue::operator+");
    std::uint64_t s = static_cast<std::uint64_t>(v_) + o.v_;
    if (s >= n_) s -= n_;
    return raw(static_cast<std::uint32_t>(s), n_);
}

Residue Residue::operator-(const Residue& o) const {
    check_same_modulus(n_, o.n_, "Residue::operator-");
    return raw(v_ >= o.v_ ? v_ - o.v_
                          : static_cast<std::uint32_t>(v_ + static_cast<std::uint64_t>(n_) - o.v_),
               n_);
}

Residue Residue::operator*(const Residue& o) const {
    check_same_modulus(n_, o.n_, "Residue::operator*");
    return raw(static_cast<std::uint32_t>(static_cast<std::uint64_t>(v_) * o.v_ % n_), n_);
}

Residue Residue::operator-() const {
    return raw(v_ == 0 ? 0 : n_ - v_, n_);
}

/* ------------------------------------------------------------------------ */
/* ResidueSet                                                                */
/* ------------------------------------------------------------------------ */

namespace {

inline std::size_t word_count(std::uint32_t n) { return (static_cast<std::size_t>(n) + 63) / 64; }

inline std::uint64_t tail_mask(std::uint32_t n) {
    std::uint32_t rem = n & 63;
    return rem == 0 ? ~0ULL : ((1ULL << rem) - 1);
}

// dst |= (src << k), truncated to n bits.  src and dst must be distinct.
void or_shifted_left(std::vector<std::uint64_t>& dst,
                     const std::vector<std::uint64_t>& src,
                     std::uint32_t k, std::uint32_t n) {
    const std::size_t W = dst.size();
    const std::size_t wo = k >> 6;
    const unsigned bo = k & 63;
    if (bo == 0) {
        for (std::size_t w = wo; w < W; ++w) dst[w] |= src[w - wo];
    } else {
        for (std::size_t w = wo; w < W; ++w) {
            std::uint64_t v = src[w - wo] << bo;
            if (w > wo) v |= src[w - wo - 1] >> (64 - bo);
            dst[w] |= v;
        }
    }
    dst.back() &= tail_mask(n);
}

// dst |= (src >> k).
void or_shifted_right(std::vector<std::uint64_t>& dst,
                      const std::vector<std::uint64_t>& src,
                      std::uint32_t k) {
    const std::size_t W = dst.size();
    const std::size_t wo = k >> 6;
    const unsigned bo = k & 63;
    if (bo == 0) {
        for (std::size_t w = 0; w + wo < W; ++w) dst[w] |= src[w + wo];
    } else {
        for (std::size_t w = 0; w + wo < W; ++w) {
            std::uint64_t v = src[w + wo] >> bo;
            if (w + wo + 1 < W) v |= src[w + wo + 1] << (64 - bo);
            dst[w] |= v;
        }
    }
}

} // namespace

ResidueSet::ResidueSet(const Modulus& m)
    : mod_(m), words_(word_count(m.n()), 0), count_(0) {}

ResidueSet ResidueSet::singleton(const Modulus& m, std::uint32_t v) {
    ResidueSet s(m);
    if (v >= m.n()) throw std::invalid_argument("ResidueSet::singleton: value out of range");
    s.insert(v);
    return s;
}

ResidueSet ResidueSet::full(const Modulus& m) {
    ResidueSet s(m);
    for (auto& w : s.words_) w = ~0ULL;
    s.words_.back() &= tail_mask(m.n());
    s.count_ = m.n();
    return s;
}

ResidueSet ResidueSet::from_values(const Modulus& m, const std::vector<std::uint32_t>& vs) {
    ResidueSet s(m);
    for (std::uint32_t v : vs) {
        if (v >= m.n()) throw std::invalid_argument("ResidueSet::from_values: value out of range");
        s.insert(v);
    }
    return s;
}

std::vector<std::uint32_t> ResidueSet::members() const {
    std::vector<std::uint32_t> out;
    out.reserve(count_);
    for (std::size_t wi = 0; wi < words_.size(); ++wi) {
        std::uint64_t w = words_[wi];
        while (w) {
            unsigned b = static_cast<unsigned>(std::countr_zero(w));
            out.push_back(static_cast<std::uint32_t>((wi << 6) + b));
            w &= w - 1;
        }
    }
    return out;
}

void ResidueSet::for_each(const std::function<void(std::uint32_t)>& fn) const {
    for (std::size_t wi = 0; wi < words_.size(); ++wi) {
        std::uint64_t w = words_[wi];
        while (w) {
            unsigned b = static_cast<unsigned>(std::countr_zero(w));
            fn(static_cast<std::uint32_t>((wi << 6) + b));
            w &= w - 1;
        }
    }
}

void ResidueSet::recount() {
    std::uint32_t c = 0;
    for (std::uint64_t w : words_) c += static_cast<std::uint32_t>(std::popcount(w));
    count_ = c;
}

ResidueSet& ResidueSet::operator|=(const ResidueSet& o) {
    check_same_modulus(n(), o.n(), "ResidueSet::operator|=");
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
    recount();
    return *this;
}

ResidueSet& ResidueSet::operator&=(const ResidueSet& o) {
    check_same_modulus(n(), o.n(), "ResidueSet::operator&=");
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
    recount();
    return *this;
}

bool ResidueSet::operator==(const ResidueSet& o) const {
    return n() == o.n() && words_ == o.words_;
}

bool ResidueSet::is_subset_of(const ResidueSet& o) const {
    check_same_modulus(n(), o.n(), "ResidueSet::is_subset_of");
    for (std::size_t i = 0; i < words_.size(); ++i)
        if (words_[i] & ~o.words_[i]) return false;
    return true;
}

void ResidueSet::or_rotated(const ResidueSet& other, std::uint32_t shift) {
    check_same_modulus(n(), other.n(), "ResidueSet::or_rotated");
    const std::uint32_t nn = n();
    shift %= nn;
    if (shift == 0) {
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
    } else {
        // bit i of other lands on bit (i + shift) mod n: the low n-shift bits
        // shift left, the top bits wrap around to the bottom.
        or_shifted_left(words_, other.words_, shift, nn);
        or_shifted_right(words_, other.words_, nn - shift);
    }
    recount();
}

/* ------------------------------------------------------------------------ */
/* Set operations                                                            */
/* ------------------------------------------------------------------------ */

ResidueSet dilate(const ResidueSet& s, std::uint32_t c) {
    const Modulus& m = s.modulus();
    c %= m.n();
    if (c == 1) return s;
    ResidueSet out(m);
    if (s.empty()) return out;
    if (c == 0) {
        out.insert(0);
        return out;
    }
    s.for_each([&](std::uint32_t v) { out.insert(m.mul(c, v)); });
    return out;
}

ResidueSet dilate(const ResidueSet& s, const Residue& c) {
    check_same_modulus(s.n(), c.modulus(), "dilate");
    return dilate(s, c.value());
}

ResidueSet sumset(const ResidueSet& s1, const ResidueSet& s2) {
    check_same_modulus(s1.n(), s2.n(), "sumset");
    ResidueSet out(s1.modulus());
    if (s1.empty() || s2.empty()) return out;
    // Key on the smaller operand: each member contributes one rotated OR of
    // the larger operand's bit-vector.
    const ResidueSet& small = s1.size() <= s2.size() ? s1 : s2;
    const ResidueSet& large = s1.size() <= s2.size() ? s2 : s1;
    small.for_each([&](std::uint32_t v) { out.or_rotated(large, v); });
    return out;
}

ResidueSet negate(const ResidueSet& s) {
    const Modulus& m = s.modulus();
    ResidueSet out(m);
    s.for_each([&](std::uint32_t v) { out.insert(m.neg(v)); });
    return out;
}

ResidueSet difference_set(const ResidueSet& s) {
    return sumset(s, negate(s));
}

ResidueSet quotient_set(const ResidueSet& num, const ResidueSet& den) {
    check_same_modulus(num.n(), den.n(), "quotient_set");
    const Modulus& m = num.modulus();
    if (!m.prime()) throw std::domain_error("quotient_set: prime modulus required");
    ResidueSet out(m);
    if (num.empty()) return out;
    const auto nums = num.members();
    den.for_each([&](std::uint32_t b) {
        if (b == 0) return;
        std::uint32_t ib = m.inv(b);
        for (std::uint32_t a : nums) out.insert(m.mul(a, ib));
    });
    return out;
}

ResidueSet remove_zero(const ResidueSet& s) {
    ResidueSet out = s;
    out.erase(0);
    return out;
}

/* ------------------------------------------------------------------------ */
/* Intervals and symmetric cores                                             */
/* ------------------------------------------------------------------------ */

MaterializedInterval materialize_interval(const Modulus& m, const IntervalSpec& spec) {
    if (spec.step.modulus() != m.n())
        throw std::invalid_argument("materialize_interval: step modulus mismatch");
    const std::uint32_t t = spec.step.value();
    if (t == 0) throw std::invalid_argument("materialize_interval: step must be nonzero");
    if (spec.radius == 0) throw std::invalid_argument("materialize_interval: radius must be >= 1");

    std::int64_t lo, hi;
    switch (spec.kind) {
        case IntervalKind::full:     lo = -static_cast<std::int64_t>(spec.radius); hi = spec.radius; break;
        case IntervalKind::half:     lo = 0; hi = spec.radius; break;
        case IntervalKind::positive: lo = 1; hi = spec.radius; break;
        default: throw std::invalid_argument("materialize_interval: bad kind");
    }

    ResidueSet set(m);
    std::uint32_t cur = m.mul(m.reduce(lo), t);
    for (std::int64_t j = lo; j <= hi; ++j) {
        set.insert(cur);
        cur = m.add(cur, t);
    }
    const std::uint64_t nominal = static_cast<std::uint64_t>(hi - lo + 1);
    return MaterializedInterval{set, set.size() < nominal};
}

SymmetricCore extract_symmetric_core(const Modulus& m,
                                     const std::vector<IntervalSpec>& intervals,
                                     bool include_unit) {
    if (intervals.empty())
        throw std::invalid_argument("extract_symmetric_core: need at least one interval");

    std::vector<IntervalSpec> specs;
    if (include_unit)
        specs.push_back(IntervalSpec{Residue(m, 1), intervals.front().radius, IntervalKind::full});
    specs.insert(specs.end(), intervals.begin(), intervals.end());

    const std::size_t r = specs.size();
    if (r > 20) throw std::invalid_argument("extract_symmetric_core: too many intervals");

    // Precompute both halves of every interval: X^+ = t*[0, L], X^- = -X^+.
    std::vector<ResidueSet> plus, minus;
    plus.reserve(r);
    minus.reserve(r);
    for (const auto& sp : specs) {
        if (sp.kind != IntervalKind::full)
            throw std::invalid_argument("extract_symmetric_core: intervals must be full");
        auto half = materialize_interval(m, IntervalSpec{sp.step, sp.radius, IntervalKind::half});
        plus.push_back(half.set);
        minus.push_back(negate(half.set));
    }

    // Scan the 2^r sign patterns; bit (r-1-i) of the mask selects the '-' half
    // for interval i, so ascending masks enumerate patterns lexicographically
    // with '+' before '-'.  First strict maximum wins.
    ResidueSet best(m);
    std::uint32_t best_pattern = 0;
    for (std::uint32_t mask = 0; mask < (1u << r); ++mask) {
        ResidueSet acc = ResidueSet::singleton(m, 0);
        for (std::size_t i = 0; i < r; ++i) {
            const bool neg = (mask >> (r - 1 - i)) & 1u;
            acc = sumset(acc, neg ? minus[i] : plus[i]);
        }
        if (acc.size() > best.size()) {
            best = acc;
            best_pattern = mask;
        }
    }
    return SymmetricCore{best, best_pattern};
}

} // namespace davlab
