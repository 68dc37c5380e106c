#include "davlab/construction.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <boost/multiprecision/cpp_int.hpp>

#include "davlab/parallel.hpp"
#include "davlab/primes.hpp"
#include "davlab/rng.hpp"

namespace davlab {

using boost::multiprecision::cpp_int;

/* ------------------------------------------------------------------------ */
/* Rational                                                                  */
/* ------------------------------------------------------------------------ */

Rational Rational::parse(const std::string& text) {
    const auto dot = text.find('.');
    const std::string whole = dot == std::string::npos ? text : text.substr(0, dot);
    const std::string frac = dot == std::string::npos ? "" : text.substr(dot + 1);
    if (whole.empty() && frac.empty())
        throw ParamError("scale: expected a decimal number, got \"" + text + "\"");
    if (frac.size() > 12)
        throw ParamError("scale: at most 12 fractional digits supported");
    if (whole.size() + frac.size() > 18)
        throw ParamError("scale: too many digits");
    auto all_digits = [](const std::string& s) {
        return std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
    };
    if (!all_digits(whole) || !all_digits(frac) ||
        (dot != std::string::npos && text.find('.', dot + 1) != std::string::npos))
        throw ParamError("scale: malformed decimal \"" + text + "\"");

    std::uint64_t num = 0;
    for (char c : whole) num = num * 10 + static_cast<std::uint64_t>(c - '0');
    std::uint64_t den = 1;
    for (char c : frac) {
        num = num * 10 + static_cast<std::uint64_t>(c - '0');
        den *= 10;
    }
    if (num == 0) throw ParamError("scale: must be positive");
    const std::uint64_t g = std::gcd(num, den);
    return Rational{num / g, den / g};
}

std::string Rational::str() const {
    std::uint64_t q = num / den, r = num % den;
    std::string out = std::to_string(q);
    if (r == 0) return out;
    std::string frac;
    for (int i = 0; r != 0 && i < 64; ++i) {
        r *= 10;
        frac += static_cast<char>('0' + r / den);
        r %= den;
    }
    if (r != 0) throw std::logic_error("Rational::str: denominator is not decimal");
    while (!frac.empty() && frac.back() == '0') frac.pop_back();
    return out + "." + frac;
}

/* ------------------------------------------------------------------------ */
/* Parameters                                                                */
/* ------------------------------------------------------------------------ */

namespace {

// L = min l >= 1 with (l * den)^k >= num^k * p, i.e. the exact ceil(C * p^(1/k)).
std::uint32_t exact_radius(std::uint32_t p, std::uint32_t k, const Rational& c) {
    const cpp_int target = boost::multiprecision::pow(cpp_int(c.num), k) * p;
    const long double est = static_cast<long double>(c.num) / static_cast<long double>(c.den) *
                            std::pow(static_cast<long double>(p), 1.0L / k);
    std::uint64_t l = est > 3 ? static_cast<std::uint64_t>(est) - 2 : 1;
    while (boost::multiprecision::pow(cpp_int(l) * c.den, k) < target) ++l;
    while (l > 1 && boost::multiprecision::pow(cpp_int(l - 1) * c.den, k) >= target) --l;
    return static_cast<std::uint32_t>(l);
}

bool wrap_guard_ok(std::uint32_t p, std::uint32_t k, std::uint32_t radius) {
    return 8ULL * k * radius < p;
}

std::uint64_t sat_pow(std::uint64_t base, std::uint32_t e) {
    std::uint64_t acc = 1;
    for (std::uint32_t i = 0; i < e; ++i) {
        if (base != 0 && acc > ~0ULL / base) return ~0ULL;
        acc *= base;
    }
    return acc;
}

} // namespace

ConstructionParams make_params(std::uint32_t p, std::uint32_t k_total, const Rational& scale,
                               std::uint64_t seed, bool test_mode) {
    if (!is_prime(p) || p < 3) throw ParamError("p must be an odd prime");
    if (k_total < 2 || k_total > 40) throw ParamError("k_total must be in [2, 40]");
    {
        // The largest stage dimension is m for odd targets and m - 1 for even
        // ones; bad sets only support dimensions up to 8.
        const std::uint32_t top_dim = (k_total / 2) - ((k_total & 1) ? 0 : 1);
        if (top_dim > 8)
            throw ParamError("k_total = " + std::to_string(k_total) +
                             " needs a stage of tuple dimension " + std::to_string(top_dim) +
                             "; dimensions above 8 are not supported (max k_total: 18 even, 17 odd)");
    }
    if (scale.num == 0 || scale.den == 0) throw ParamError("scale: must be positive");
    if (!test_mode && scale.num <= 8 * scale.den)
        throw ParamError("scale C must exceed 8 (symmetric cores need (C/8)^m > 1); "
                         "pass test_mode for smaller demonstration values");

    const std::uint32_t radius = exact_radius(p, k_total, scale);
    if (!test_mode && !wrap_guard_ok(p, k_total, radius)) {
        // Report the smallest prime that clears the no-wrap guard for these
        // k_total and C.  L grows like p^(1/k), so the scan terminates.
        std::uint64_t q = p;
        for (;;) {
            q = next_prime(static_cast<std::uint32_t>(q) + 1);
            if (wrap_guard_ok(static_cast<std::uint32_t>(q), k_total,
                              exact_radius(static_cast<std::uint32_t>(q), k_total, scale)))
                break;
            if (q > (1ULL << 31)) throw ParamError("no admissible prime found");
        }
        throw ParamError("wrap guard failed: 8 * k_total * L = " +
                             std::to_string(8ULL * k_total * radius) + " >= p = " + std::to_string(p) +
                             "; smallest admissible prime for these settings is " + std::to_string(q),
                         q);
    }

    ConstructionParams params{Modulus(p), k_total, k_total / 2, (k_total & 1) != 0,
                              scale,      radius,  radius / 2,  seed,
                              test_mode,  {}};
    params.stage_dims.push_back(params.m - 1);
    if (params.odd) params.stage_dims.push_back(params.m);
    return params;
}

/* ------------------------------------------------------------------------ */
/* Bad sets                                                                  */
/* ------------------------------------------------------------------------ */

namespace {
constexpr std::uint64_t kExplicitBitCap = 1ULL << 30;
} // namespace

std::uint64_t BadSet::universe() const { return sat_pow(p_.n() - 1, dim_); }

std::uint64_t BadSet::size() const {
    if (!explicit_) throw std::logic_error("BadSet::size: oracle representation has no stored size");
    return count_;
}

std::uint64_t BadSet::component_size(std::uint32_t j) const {
    if (!explicit_) throw std::logic_error("BadSet::component_size: oracle representation");
    return component_sizes_.at(j);
}

bool BadSet::contains(const std::vector<std::uint32_t>& t) const {
    if (t.size() != dim_) throw std::invalid_argument("BadSet::contains: wrong tuple dimension");
    return contains_flat(t.data());
}

bool BadSet::contains_flat(const std::uint32_t* t) const {
    const std::uint32_t p = p_.n();
    for (std::uint32_t i = 0; i < dim_; ++i)
        if (t[i] == 0 || t[i] >= p)
            throw std::invalid_argument("BadSet::contains: tuple components must be in [1, p-1]");
    if (!explicit_) return oracle_contains(t);
    std::uint64_t idx = 0;
    for (std::uint32_t i = 0; i < dim_; ++i) idx = idx * (p - 1) + (t[i] - 1);
    return (bits_[idx >> 6] >> (idx & 63)) & 1u;
}

bool BadSet::oracle_contains(const std::uint32_t* t) const {
    // T_j = t_j * [1, H] + sum_{i != j} t_i * [-H, H]; bad iff T_j meets B = [-2L, 2L].
    if (half_ == 0) return false;
    for (std::uint32_t j = 0; j < dim_; ++j) {
        ResidueSet acc =
            materialize_interval(p_, IntervalSpec{Residue(p_, t[j]), half_, IntervalKind::positive}).set;
        for (std::uint32_t i = 0; i < dim_; ++i) {
            if (i == j) continue;
            acc = sumset(acc, materialize_interval(
                                  p_, IntervalSpec{Residue(p_, t[i]), half_, IntervalKind::full})
                                  .set);
        }
        bool hit = false;
        for (std::int64_t b = -2 * static_cast<std::int64_t>(radius_);
             b <= 2 * static_cast<std::int64_t>(radius_) && !hit; ++b)
            hit = acc.contains(p_.reduce(b));
        if (hit) return true;
    }
    return false;
}

std::vector<std::uint32_t> BadSet::tuples() const {
    if (!explicit_) throw std::logic_error("BadSet::tuples: oracle representation");
    const std::uint64_t p1 = p_.n() - 1;
    std::vector<std::uint32_t> out;
    out.reserve(static_cast<std::size_t>(count_) * dim_);
    for (std::size_t wi = 0; wi < bits_.size(); ++wi) {
        std::uint64_t w = bits_[wi];
        while (w) {
            const unsigned b = static_cast<unsigned>(std::countr_zero(w));
            std::uint64_t idx = (static_cast<std::uint64_t>(wi) << 6) + b;
            std::uint32_t comp[4];
            for (std::uint32_t i = dim_; i-- > 0;) {
                comp[i] = static_cast<std::uint32_t>(idx % p1) + 1;
                idx /= p1;
            }
            out.insert(out.end(), comp, comp + dim_);
            w &= w - 1;
        }
    }
    return out;
}

BadSet build_bad_set(const ConstructionParams& params, std::uint32_t dim) {
    if (dim < 1 || dim > 8) throw std::invalid_argument("build_bad_set: dim must be in [1, 8]");
    BadSet s;
    s.p_ = params.p;
    s.dim_ = dim;
    s.radius_ = params.interval_radius;
    s.half_ = params.half_radius;

    const std::uint32_t p = params.p.n();
    const std::uint32_t H = s.half_;
    const std::uint64_t uni = sat_pow(p - 1, dim);
    s.explicit_ = dim <= 2 && uni <= kExplicitBitCap;
    if (!s.explicit_) return s;

    s.bits_.assign(static_cast<std::size_t>((uni + 63) / 64), 0);
    s.component_sizes_.assign(dim, 0);
    if (H == 0) return s; // the weight boxes [1, H] are empty: nothing is bad

    const auto inv = params.p.inverse_table();
    const ResidueSet bset =
        materialize_interval(params.p, IntervalSpec{Residue(params.p, 1), 2 * s.radius_,
                                                    IntervalKind::full})
            .set;
    const auto bvals = bset.members();

    auto set_bit = [](std::vector<std::uint64_t>& bits, std::uint64_t idx, std::uint64_t& cnt) {
        std::uint64_t& w = bits[idx >> 6];
        const std::uint64_t bit = 1ULL << (idx & 63);
        if (!(w & bit)) {
            w |= bit;
            ++cnt;
        }
    };

    if (dim == 1) {
        // t in S iff t*a lands in B for some a in [1, H], i.e. t in B * a^-1.
        for (std::uint32_t a = 1; a <= H; ++a) {
            const std::uint32_t ia = inv[a];
            for (std::uint32_t b : bvals) {
                const std::uint32_t t = params.p.mul(b, ia);
                if (t != 0) set_bit(s.bits_, t - 1, s.count_);
            }
        }
        s.component_sizes_[0] = s.count_;
        return s;
    }

    // dim == 2: solve t_sp * a_sp + t_ot * a_ot = b for the special component,
    // sweeping the other one.  j is the special position.
    std::vector<std::uint64_t> cbits(s.bits_.size());
    for (std::uint32_t j = 0; j < 2; ++j) {
        std::fill(cbits.begin(), cbits.end(), 0);
        std::uint64_t ccount = 0;
        auto mark = [&](std::uint32_t t_sp, std::uint32_t t_ot) {
            const std::uint64_t idx = j == 0
                ? static_cast<std::uint64_t>(t_sp - 1) * (p - 1) + (t_ot - 1)
                : static_cast<std::uint64_t>(t_ot - 1) * (p - 1) + (t_sp - 1);
            set_bit(cbits, idx, ccount);
        };
        for (std::uint32_t a_sp = 1; a_sp <= H; ++a_sp) {
            const std::uint32_t isp = inv[a_sp];
            for (std::int64_t a_ot = -static_cast<std::int64_t>(H); a_ot <= H; ++a_ot) {
                const std::uint32_t ao = params.p.reduce(a_ot);
                for (std::uint32_t b : bvals) {
                    if (a_ot == 0) {
                        const std::uint32_t t_sp = params.p.mul(b, isp);
                        if (t_sp == 0) continue;
                        for (std::uint32_t t_ot = 1; t_ot < p; ++t_ot) mark(t_sp, t_ot);
                    } else {
                        for (std::uint32_t t_ot = 1; t_ot < p; ++t_ot) {
                            const std::uint32_t t_sp =
                                params.p.mul(params.p.sub(b, params.p.mul(t_ot, ao)), isp);
                            if (t_sp != 0) mark(t_sp, t_ot);
                        }
                    }
                }
            }
        }
        s.component_sizes_[j] = ccount;
        for (std::size_t i = 0; i < s.bits_.size(); ++i) s.bits_[i] |= cbits[i];
    }
    s.count_ = 0;
    for (std::uint64_t w : s.bits_) s.count_ += static_cast<std::uint64_t>(std::popcount(w));
    return s;
}

/* ------------------------------------------------------------------------ */
/* Goodness                                                                  */
/* ------------------------------------------------------------------------ */

std::uint64_t goodness_threshold(std::uint32_t radius, std::uint32_t dim) {
    const cpp_int num = boost::multiprecision::pow(cpp_int(radius), dim + 1);
    const cpp_int den = boost::multiprecision::pow(cpp_int(4), dim + 1);
    cpp_int t = (num + den - 1) / den;
    if (t > cpp_int(~0ULL)) return ~0ULL;
    return static_cast<std::uint64_t>(t);
}

bool is_good(const ConstructionParams& params, const std::vector<std::uint32_t>& alpha,
             const std::vector<std::uint32_t>& t, std::uint64_t* size_out) {
    if (alpha.size() != t.size())
        throw std::invalid_argument("is_good: alpha and t must have equal dimension");
    const Modulus& m = params.p;
    const std::uint32_t L = params.interval_radius;
    ResidueSet acc = materialize_interval(m, IntervalSpec{Residue(m, 1), L, IntervalKind::full}).set;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (alpha[i] == 0 || alpha[i] >= m.n() || t[i] == 0 || t[i] >= m.n())
            throw std::invalid_argument("is_good: tuple components must be in [1, p-1]");
        const std::uint32_t step = m.mul(alpha[i], t[i]);
        acc = sumset(acc, materialize_interval(m, IntervalSpec{Residue(m, step), L,
                                                              IntervalKind::full})
                              .set);
    }
    const std::uint64_t punctured = acc.size() - (acc.contains(0) ? 1 : 0);
    if (size_out) *size_out = punctured;
    return punctured >= goodness_threshold(L, static_cast<std::uint32_t>(t.size()));
}

/* ------------------------------------------------------------------------ */
/* Covers                                                                    */
/* ------------------------------------------------------------------------ */

std::string cover_mode_name(CoverMode mode) {
    switch (mode) {
        case CoverMode::automatic: return "automatic";
        case CoverMode::greedy: return "greedy";
        case CoverMode::paper: return "paper";
        case CoverMode::sampled: return "sampled";
    }
    return "?";
}

namespace {

bool has_repeat(const std::vector<std::uint32_t>& y) {
    for (std::size_t i = 0; i < y.size(); ++i)
        for (std::size_t j = i + 1; j < y.size(); ++j)
            if (y[i] == y[j]) return true;
    return false;
}

StageCover greedy_cover(const ConstructionParams& params, const BadSet& bad,
                        std::uint32_t stage_index, const CoverOptions& opts) {
    const std::uint32_t p = params.p.n();
    const std::uint32_t d = bad.dim();
    StageCover cover;
    cover.dim = d;
    cover.mode = "greedy";
    cover.bad_size_known = true;
    cover.bad_size = bad.size();

    std::vector<std::uint32_t> residual = bad.tuples(); // flat, stride d
    std::uint64_t rcount = bad.size();
    if (rcount == 0) return cover;

    const auto inv = params.p.inverse_table();
    const CounterRng rng(params.seed);
    std::vector<std::uint32_t> y(d), q(d);

    auto survivors = [&](const std::vector<std::uint32_t>& cand, std::vector<std::uint32_t>* keep)
        -> std::uint64_t {
        // count residual tuples r with r in cand*S, i.e. cand^-1 * r in S
        std::uint64_t cnt = 0;
        std::uint32_t ic[4];
        for (std::uint32_t c = 0; c < d; ++c) ic[c] = inv[cand[c]];
        for (std::size_t off = 0; off < residual.size(); off += d) {
            for (std::uint32_t c = 0; c < d; ++c) q[c] = params.p.mul(residual[off + c], ic[c]);
            if (bad.contains_flat(q.data())) {
                ++cnt;
                if (keep)
                    keep->insert(keep->end(), residual.begin() + off, residual.begin() + off + d);
            }
        }
        return cnt;
    };

    while (rcount > 0) {
        const std::uint64_t step = cover.ys.size();
        const std::uint64_t stream = cover_stream(stage_index, step);
        std::uint64_t ctr = 0;
        std::vector<std::uint32_t> best_y;
        std::uint64_t best_cnt = ~0ULL;
        bool accepted = false;

        for (std::uint64_t round = 0; round < opts.max_rounds;) {
            for (std::uint32_t c = 0; c < d; ++c)
                y[c] = 1 + static_cast<std::uint32_t>(rng.uniform(stream, ctr++, p - 1));
            if (d >= 2 && has_repeat(y)) {
                ++cover.redraws;
                if (ctr > 64 * opts.max_rounds * d)
                    throw CoverError("cover draw loop: cannot find distinct components", rcount);
                continue;
            }
            ++round;
            const std::uint64_t cnt = survivors(y, nullptr);
            if (2 * cnt <= rcount) {
                best_y = y;
                best_cnt = cnt;
                accepted = true;
                break;
            }
            if (cnt < best_cnt) {
                best_cnt = cnt;
                best_y = y;
            }
        }
        if (!accepted && best_cnt >= rcount)
            throw CoverError("greedy cover stalled after " + std::to_string(opts.max_rounds) +
                                 " rounds",
                             rcount);

        std::vector<std::uint32_t> keep;
        keep.reserve(static_cast<std::size_t>(best_cnt) * d);
        rcount = survivors(best_y, &keep);
        residual.swap(keep);

        std::vector<std::uint32_t> x(d);
        for (std::uint32_t c = 0; c < d; ++c) x[c] = inv[best_y[c]];
        cover.ys.push_back(best_y);
        cover.xs.push_back(std::move(x));
    }
    return cover;
}

/*
 * Faithful dimension-1 cover: restrict to "normal" y (those with
 * |S ∩ yS| <= 2 (3kC^k)^(2k-2), k = dim+1), start from the minimizing normal
 * y, then repeatedly eliminate the least residual element with the least
 * normal y avoiding it.
 */
StageCover paper_cover(const ConstructionParams& params, const BadSet& bad,
                       const CoverOptions& opts) {
    (void)opts;
    if (bad.dim() != 1 || !bad.explicit_rep())
        throw std::invalid_argument("paper cover mode needs an explicit dimension-1 bad set");
    const std::uint32_t p = params.p.n();
    StageCover cover;
    cover.dim = 1;
    cover.mode = "paper";
    cover.bad_size_known = true;
    cover.bad_size = bad.size();
    if (bad.size() == 0) {
        cover.normal_known = true;
        cover.normal_count = p - 1;
        return cover;
    }

    const auto inv = params.p.inverse_table();
    const auto flat = bad.tuples();

    std::vector<std::uint64_t> overlap(p, 0); // overlap[y] = |S ∩ yS|
    for (std::uint32_t y = 1; y < p; ++y) {
        const std::uint32_t iy = inv[y];
        std::uint64_t cnt = 0;
        for (std::uint32_t s : flat) {
            const std::uint32_t q = params.p.mul(s, iy);
            if (bad.contains_flat(&q)) ++cnt;
        }
        overlap[y] = cnt;
    }

    // Normality threshold 2 (3k C^k)^(2k-2) with k = dim + 1, compared exactly:
    // overlap * den^(k(2k-2)) <= 2 (3k)^(2k-2) num^(k(2k-2)).
    const std::uint32_t kk = 2;
    const unsigned expo = 2 * kk - 2;
    const cpp_int den_pow = boost::multiprecision::pow(cpp_int(params.scale.den), kk * expo);
    const cpp_int rhs = 2 * boost::multiprecision::pow(cpp_int(3 * kk), expo) *
                        boost::multiprecision::pow(cpp_int(params.scale.num), kk * expo);
    std::vector<char> normal(p, 0);
    std::uint64_t normal_count = 0;
    for (std::uint32_t y = 1; y < p; ++y) {
        if (cpp_int(overlap[y]) * den_pow <= rhs) {
            normal[y] = 1;
            ++normal_count;
        }
    }
    cover.normal_known = true;
    cover.normal_count = normal_count;
    if (2 * normal_count < static_cast<std::uint64_t>(p - 1))
        throw CoverError("paper cover: fewer than half of the dilations are normal", bad.size());

    std::uint32_t y1 = 0;
    for (std::uint32_t y = 1; y < p; ++y)
        if (normal[y] && (y1 == 0 || overlap[y] < overlap[y1])) y1 = y;

    auto filter = [&](std::vector<std::uint32_t>& r, std::uint32_t y) {
        const std::uint32_t iy = inv[y];
        std::vector<std::uint32_t> keep;
        keep.reserve(r.size());
        for (std::uint32_t s : r) {
            const std::uint32_t q = params.p.mul(s, iy);
            if (bad.contains_flat(&q)) keep.push_back(s);
        }
        r.swap(keep);
    };

    std::vector<std::uint32_t> residual = flat;
    filter(residual, y1);
    cover.ys.push_back({y1});
    cover.xs.push_back({inv[y1]});

    while (!residual.empty()) {
        const std::uint32_t a = residual.front();
        std::uint32_t picked = 0;
        for (std::uint32_t y = 1; y < p && picked == 0; ++y) {
            if (!normal[y]) continue;
            const std::uint32_t q = params.p.mul(a, inv[y]);
            if (!bad.contains_flat(&q)) picked = y;
        }
        if (picked == 0)
            throw CoverError("paper cover: no normal dilation avoids element " + std::to_string(a),
                             residual.size());
        filter(residual, picked);
        cover.ys.push_back({picked});
        cover.xs.push_back({inv[picked]});
    }
    return cover;
}

StageCover sampled_cover(const ConstructionParams& params, const BadSet& bad,
                         std::uint32_t stage_index, const CoverOptions& opts) {
    const std::uint32_t p = params.p.n();
    const std::uint32_t d = bad.dim();
    StageCover cover;
    cover.dim = d;
    cover.mode = "sampled";
    if (bad.explicit_rep()) {
        cover.bad_size_known = true;
        cover.bad_size = bad.size();
    }

    const auto inv = params.p.inverse_table();
    const CounterRng rng(params.seed);
    std::vector<std::uint32_t> t(d), q(d), u(d), y(d);

    auto in_current_intersection = [&](const std::vector<std::uint32_t>& cand) {
        if (!bad.contains(cand)) return false;
        for (const auto& x : cover.xs) {
            for (std::uint32_t c = 0; c < d; ++c) q[c] = params.p.mul(cand[c], x[c]);
            if (!bad.contains_flat(q.data())) return false;
        }
        return true;
    };

    for (std::uint64_t step = 0;; ++step) {
        if (step > opts.max_rounds)
            throw CoverError("sampled cover exceeded max rounds", 0);
        // survivor scan over a fresh seeded sample
        bool found = false;
        std::uint64_t survivors = 0;
        const std::uint64_t stream = sample_stream(stage_index, step);
        for (std::uint64_t i = 0; i < opts.samples; ++i) {
            for (std::uint32_t c = 0; c < d; ++c)
                t[c] = 1 + static_cast<std::uint32_t>(rng.uniform(stream, i * d + c, p - 1));
            if (in_current_intersection(t)) {
                ++survivors;
                if (!found) {
                    found = true;
                    break; // kill this one; later steps re-sample
                }
            }
        }
        if (!found) break;

        // pick y = t ∘ u^-1 for a random non-member u, so t falls out of yS
        const std::uint64_t kstream = cover_stream(stage_index, step);
        std::uint64_t ctr = 0;
        bool picked = false;
        while (!picked) {
            if (ctr > 64 * (opts.max_rounds + 1) * opts.samples)
                throw CoverError("sampled cover: cannot find a killing dilation", survivors);
            for (std::uint32_t c = 0; c < d; ++c)
                u[c] = 1 + static_cast<std::uint32_t>(rng.uniform(kstream, ctr++, p - 1));
            if (bad.contains(u)) continue;
            for (std::uint32_t c = 0; c < d; ++c) y[c] = params.p.mul(t[c], inv[u[c]]);
            if (d >= 2 && has_repeat(y)) {
                ++cover.redraws;
                continue;
            }
            picked = true;
        }
        std::vector<std::uint32_t> x(d);
        for (std::uint32_t c = 0; c < d; ++c) x[c] = inv[y[c]];
        cover.ys.push_back(y);
        cover.xs.push_back(std::move(x));
    }
    return cover;
}

} // namespace

StageCover find_cover(const ConstructionParams& params, const BadSet& bad,
                      std::uint32_t stage_index, const CoverOptions& opts) {
    const std::uint32_t d = bad.dim();
    if (d < 1) throw std::invalid_argument("find_cover: dimension-0 stages need no cover");
    if (d > params.p.n() - 1)
        throw CoverError("tuple dimension exceeds p - 1: no distinct-component dilations exist", 0);

    CoverMode mode = opts.mode;
    if (mode == CoverMode::automatic)
        mode = bad.explicit_rep() ? CoverMode::greedy : CoverMode::sampled;

    switch (mode) {
        case CoverMode::greedy:
            if (!bad.explicit_rep())
                throw std::invalid_argument("greedy cover mode needs an explicit bad set");
            return greedy_cover(params, bad, stage_index, opts);
        case CoverMode::paper:
            return paper_cover(params, bad, opts);
        case CoverMode::sampled:
            return sampled_cover(params, bad, stage_index, opts);
        default:
            throw std::invalid_argument("find_cover: bad mode");
    }
}

/* ------------------------------------------------------------------------ */
/* Assembly                                                                  */
/* ------------------------------------------------------------------------ */

AssembledWeights assemble_weight_set(const ConstructionParams& params,
                                     const std::vector<StageCover>& covers) {
    if (covers.size() != params.stage_dims.size())
        throw std::invalid_argument("assemble_weight_set: stage count mismatch");
    const Modulus& m = params.p;
    const std::uint32_t L = params.interval_radius;

    bool wrapped = false;
    auto unit = materialize_interval(m, IntervalSpec{Residue(m, 1), L, IntervalKind::full});
    wrapped |= unit.wrapped;
    ResidueSet acc = unit.set;

    std::uint64_t interval_count = 0;
    for (std::size_t r = 0; r < covers.size(); ++r) {
        const StageCover& cover = covers[r];
        if (cover.dim != params.stage_dims[r])
            throw std::invalid_argument("assemble_weight_set: stage dimension mismatch");
        if (cover.xs.size() != cover.ys.size())
            throw std::invalid_argument("assemble_weight_set: xs/ys length mismatch");
        for (const auto& x : cover.xs) {
            if (x.size() != cover.dim)
                throw std::invalid_argument("assemble_weight_set: tuple dimension mismatch");
            for (std::uint32_t step : x) {
                auto iv = materialize_interval(m, IntervalSpec{Residue(m, step), L,
                                                              IntervalKind::full});
                wrapped |= iv.wrapped;
                acc |= iv.set;
                ++interval_count;
            }
        }
    }

    AssembledWeights out{remove_zero(acc), wrapped, 2ULL * L * (1 + interval_count)};
    if (out.weights.size() > out.accounting_bound)
        throw std::logic_error("assemble_weight_set: accounting bound violated");
    return out;
}

/* ------------------------------------------------------------------------ */
/* Bound checks                                                              */
/* ------------------------------------------------------------------------ */

namespace {

// floor of the n-th root of x >= 0
cpp_int iroot(const cpp_int& x, unsigned n) {
    if (x <= 0) return 0;
    const unsigned bits = static_cast<unsigned>(boost::multiprecision::msb(x)) + 1;
    cpp_int lo = 0, hi = cpp_int(1) << (bits / n + 1);
    while (lo < hi) {
        const cpp_int mid = (lo + hi + 1) / 2;
        if (boost::multiprecision::pow(mid, n) <= x)
            lo = mid;
        else
            hi = mid - 1;
    }
    return lo;
}

std::string str_of(const cpp_int& v) { return v.str(); }

} // namespace

std::vector<BoundCheck> derive_bound_checks(const ConstructionParams& params,
                                            const std::vector<StageCover>& covers,
                                            std::uint32_t weight_count,
                                            std::uint64_t accounting_bound) {
    std::vector<BoundCheck> out;
    out.push_back(BoundCheck{"weight_count_accounting", std::to_string(weight_count),
                             std::to_string(accounting_bound), weight_count <= accounting_bound});

    // Per-stage cover sizes against 2k (3k C^k)^(2k-2) with k = dim + 1;
    // compared exactly, displayed as the floor of the rational bound.
    for (std::size_t r = 0; r < covers.size(); ++r) {
        const std::uint32_t kk = covers[r].dim + 1;
        if (kk < 2) continue;
        const unsigned expo = 2 * kk - 2;
        const cpp_int num_pow = boost::multiprecision::pow(cpp_int(params.scale.num),
                                                           static_cast<unsigned>(kk) * expo);
        const cpp_int den_pow = boost::multiprecision::pow(cpp_int(params.scale.den),
                                                           static_cast<unsigned>(kk) * expo);
        const cpp_int rhs_num =
            2 * kk * boost::multiprecision::pow(cpp_int(3 * kk), expo) * num_pow;
        const std::uint64_t n_r = covers[r].ys.size();
        out.push_back(BoundCheck{"cover_size_stage" + std::to_string(r), std::to_string(n_r),
                                 str_of(rhs_num / den_pow),
                                 cpp_int(n_r) * den_pow <= rhs_num});
    }

    const std::uint32_t k = params.k_total;
    const cpp_int asize(weight_count);
    if (!params.odd) {
        // |A| <= 27^(m^2) p^(1/2m), checked as |A|^(2m) <= 27^(2m m^2) p.
        const std::uint32_t m = params.m;
        const cpp_int rhs = boost::multiprecision::pow(cpp_int(27), 2 * m * m * m) * params.p.n();
        out.push_back(BoundCheck{"weight_count_even", std::to_string(weight_count),
                                 str_of(iroot(rhs, 2 * m)),
                                 boost::multiprecision::pow(asize, 2 * m) <= rhs});
    }
    // Headline |A| <= 4^(k^2) p^(1/k), checked as |A|^k <= 4^(k^3) p.
    const cpp_int rhs = boost::multiprecision::pow(cpp_int(4), k * k * k) * params.p.n();
    out.push_back(BoundCheck{"weight_count_headline", std::to_string(weight_count),
                             str_of(iroot(rhs, k)),
                             boost::multiprecision::pow(asize, k) <= rhs});
    return out;
}

/* ------------------------------------------------------------------------ */
/* Pipeline                                                                  */
/* ------------------------------------------------------------------------ */

Certificate construct_weight_set(std::uint32_t p, std::uint32_t k_total, const Rational& scale,
                                 std::uint64_t seed, const ConstructOptions& opts) {
    const ConstructionParams params = make_params(p, k_total, scale, seed, opts.test_mode);

    std::vector<StageCover> covers;
    for (std::size_t r = 0; r < params.stage_dims.size(); ++r) {
        const std::uint32_t d = params.stage_dims[r];
        if (d == 0) {
            StageCover trivial;
            trivial.dim = 0;
            trivial.mode = "none";
            covers.push_back(std::move(trivial));
            continue;
        }
        const BadSet bad = build_bad_set(params, d);
        covers.push_back(find_cover(params, bad, static_cast<std::uint32_t>(r), opts.cover));
    }

    const AssembledWeights assembled = assemble_weight_set(params, covers);
    const WeightSet weights(params.p, assembled.weights.members());

    const VerifyTier tier = opts.tier_set ? opts.tier : choose_tier(params);
    std::string why;
    if (!tier_admissible(params, tier, &why)) throw TierError(why);

    Certificate cert;
    cert.p = p;
    cert.k_total = k_total;
    cert.scale = scale;
    cert.interval_radius = params.interval_radius;
    cert.seed = seed;
    cert.test_mode = opts.test_mode;
    cert.stages = covers;
    cert.weights = assembled.weights.members();
    cert.wrapped = assembled.wrapped;
    cert.accounting_bound = assembled.accounting_bound;
    cert.bounds = derive_bound_checks(params, covers, weights.size(), assembled.accounting_bound);
    cert.verification = verify_weights(params, covers, weights, tier, opts.samples, opts.threads);
    cert.digest = certificate_digest(cert);
    return cert;
}

} // namespace davlab
