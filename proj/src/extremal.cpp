#include "davlab/extremal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "davlab/parallel.hpp"
#include "davlab/primes.hpp"

namespace davlab {

/* ------------------------------------------------------------------------ */
/* Canonical orbit representatives                                           */
/* ------------------------------------------------------------------------ */

std::vector<std::uint32_t> canonical_form(const WeightSet& a) {
    const Modulus& m = a.modulus();
    if (!m.prime()) throw std::domain_error("canonical_form: prime modulus required");
    const auto values = a.values();

    // The orbit's lex-least sorted member must contain 1, and any member
    // containing 1 arises by dilating with the inverse of some element.
    std::vector<std::uint32_t> best;
    std::vector<std::uint32_t> cand(values.size());
    for (std::uint32_t v : values) {
        const std::uint32_t c = m.inv(v);
        for (std::size_t i = 0; i < values.size(); ++i) cand[i] = m.mul(c, values[i]);
        std::sort(cand.begin(), cand.end());
        if (best.empty() || cand < best) best = cand;
    }
    return best;
}

bool is_canonical(const WeightSet& a) {
    return a.values() == canonical_form(a);
}

/* ------------------------------------------------------------------------ */
/* Size helpers                                                              */
/* ------------------------------------------------------------------------ */

namespace {

// r^k with saturation, enough to compare against p.
std::uint64_t ipow_sat(std::uint64_t r, std::uint32_t k) {
    std::uint64_t acc = 1;
    for (std::uint32_t i = 0; i < k; ++i) {
        if (acc > (1ULL << 40)) return ~0ULL;
        acc *= r;
    }
    return acc;
}

} // namespace

std::uint32_t fd_lower_bound(std::uint32_t p, std::uint32_t k) {
    if (k == 0) throw std::invalid_argument("fd_lower_bound: k must be >= 1");
    std::uint32_t r = 1;
    while (ipow_sat(r, k) < p) ++r; // r = ceil(p^(1/k)), exactly
    return r - 1;
}

std::uint32_t default_size_cap(std::uint32_t p, std::uint32_t k) {
    const long double x = 4.0L * std::pow(static_cast<long double>(p) * std::log(static_cast<long double>(p)),
                                          1.0L / static_cast<long double>(k));
    std::uint64_t cap = static_cast<std::uint64_t>(std::ceil(x));
    if (cap < 1) cap = 1;
    if (cap > p - 1) cap = p - 1;
    return static_cast<std::uint32_t>(cap);
}

/* ------------------------------------------------------------------------ */
/* Orbit enumeration                                                         */
/* ------------------------------------------------------------------------ */

namespace {

/*
 * Enumerates subsets {1} + rest with rest drawn from [2, p-1] in colex order,
 * filtered to canonical orbit representatives, growing the size class until
 * the predicate accepts.  Batches are evaluated in parallel and merged in
 * enumeration order so the first accepted representative is deterministic.
 */
template <typename Pred>
ExtremalResult search_min_size(std::uint32_t p, std::uint32_t k, std::uint32_t size_cap,
                               unsigned threads, Pred&& accepts) {
    if (!is_prime(p)) throw std::invalid_argument("extremal search: p must be prime");
    if (k == 0) throw std::invalid_argument("extremal search: k must be >= 1");
    if (size_cap == 0) size_cap = default_size_cap(p, k);
    if (size_cap > p - 1) size_cap = p - 1;

    const Modulus m(p);
    ExtremalResult res;
    res.p = p;
    res.k = k;
    res.size_cap = size_cap;

    constexpr std::size_t kBatch = 512;
    std::vector<std::vector<std::uint32_t>> batch;
    std::vector<char> verdict;

    auto flush = [&](std::vector<std::uint32_t>* found) -> bool {
        if (batch.empty()) return false;
        verdict.assign(batch.size(), 0);
        parallel_chunks(0, batch.size(), threads, [&](unsigned, std::size_t lo, std::size_t hi) {
            for (std::size_t i = lo; i < hi; ++i)
                verdict[i] = accepts(m, batch[i]) ? 1 : 0;
        });
        res.orbits_tested += batch.size();
        for (std::size_t i = 0; i < batch.size(); ++i) {
            if (verdict[i]) {
                *found = batch[i];
                return true;
            }
        }
        batch.clear();
        return false;
    };

    for (std::uint32_t s = 1; s <= size_cap; ++s) {
        // rest = s-1 elements of [2, p-1], colex order
        const std::uint32_t r = s - 1;
        if (r > p - 2) break;
        std::vector<std::uint32_t> rest(r);
        for (std::uint32_t i = 0; i < r; ++i) rest[i] = 2 + i;

        bool more = true;
        while (more) {
            std::vector<std::uint32_t> a(1, 1);
            a.insert(a.end(), rest.begin(), rest.end());
            if (is_canonical(WeightSet(m, a))) batch.push_back(std::move(a));

            // colex successor of rest
            more = false;
            for (std::uint32_t i = 0; i < r; ++i) {
                const std::uint32_t limit = (i + 1 < r) ? rest[i + 1] : p;
                if (rest[i] + 1 < limit) {
                    ++rest[i];
                    for (std::uint32_t j = 0; j < i; ++j) rest[j] = 2 + j;
                    more = true;
                    break;
                }
            }

            if (batch.size() >= kBatch || !more) {
                std::vector<std::uint32_t> found;
                if (flush(&found)) {
                    res.value = s;
                    res.witness = found;
                    return res;
                }
            }
        }
    }
    return res; // value left empty: nothing within the cap
}

} // namespace

ExtremalResult fd_exact(std::uint32_t p, std::uint32_t k, std::uint32_t size_cap,
                        unsigned threads) {
    return search_min_size(p, k, size_cap, threads,
                           [k](const Modulus& m, const std::vector<std::uint32_t>& a) {
                               return satisfies_bound(WeightSet(m, a), k);
                           });
}

ExtremalResult fd_quotient_oracle(std::uint32_t p, std::uint32_t size_cap, unsigned threads) {
    return search_min_size(p, 2, size_cap, threads,
                           [](const Modulus& m, const std::vector<std::uint32_t>& a) {
                               const ResidueSet s = ResidueSet::from_values(m, a);
                               // A/A never contains 0, so covering F_p^* is a
                               // cardinality check.
                               return quotient_set(s, s).size() == m.n() - 1;
                           });
}

} // namespace davlab
