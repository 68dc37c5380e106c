#include "davlab/construction.hpp"

#include <algorithm>
#include <atomic>
#include <sstream>

#include <boost/multiprecision/cpp_int.hpp>

#include "davlab/parallel.hpp"
#include "davlab/rng.hpp"

namespace davlab {

using boost::multiprecision::cpp_int;

/* ------------------------------------------------------------------------ */
/* Tier policy                                                               */
/* ------------------------------------------------------------------------ */

namespace {

constexpr std::uint64_t kSmallPrimeCap = 60;        // exhaustive tiers
constexpr std::uint64_t kFullScanCap = 10'000'000;  // full goodness / pair scans

std::uint64_t sat_pow(std::uint64_t base, std::uint32_t e) {
    std::uint64_t acc = 1;
    for (std::uint32_t i = 0; i < e; ++i) {
        if (base != 0 && acc > ~0ULL / base) return ~0ULL;
        acc *= base;
    }
    return acc;
}

// Quotient-condition dimensions: numerator gets m (odd) or m-1 (even) dilation
// slots, the denominator always m-1.
void condition_dims(const ConstructionParams& params, std::uint32_t* d1, std::uint32_t* d2) {
    *d1 = params.odd ? params.m : params.m - 1;
    *d2 = params.m - 1;
}

} // namespace

std::string tier_name(VerifyTier tier) {
    switch (tier) {
        case VerifyTier::exact: return "exact";
        case VerifyTier::goodness_full: return "goodness-full";
        case VerifyTier::goodness_sampled: return "goodness-sampled";
        case VerifyTier::condition_exact: return "condition-exact";
    }
    return "?";
}

std::optional<VerifyTier> tier_from_name(const std::string& name) {
    if (name == "exact") return VerifyTier::exact;
    if (name == "goodness-full") return VerifyTier::goodness_full;
    if (name == "goodness-sampled") return VerifyTier::goodness_sampled;
    if (name == "condition-exact") return VerifyTier::condition_exact;
    return std::nullopt;
}

VerifyTier choose_tier(const ConstructionParams& params) {
    if (params.p.n() <= kSmallPrimeCap) return VerifyTier::exact;
    for (std::uint32_t d : params.stage_dims)
        if (sat_pow(params.p.n() - 1, d) > kFullScanCap) return VerifyTier::goodness_sampled;
    return VerifyTier::goodness_full;
}

bool tier_admissible(const ConstructionParams& params, VerifyTier tier, std::string* why) {
    const std::uint32_t p = params.p.n();
    auto reject = [&](const std::string& msg) {
        if (why) *why = msg;
        return false;
    };
    switch (tier) {
        case VerifyTier::exact:
            if (p > kSmallPrimeCap)
                return reject("exact tier needs p <= " + std::to_string(kSmallPrimeCap) +
                              ", got p = " + std::to_string(p));
            return true;
        case VerifyTier::condition_exact: {
            if (p > kSmallPrimeCap)
                return reject("condition-exact tier needs p <= " + std::to_string(kSmallPrimeCap) +
                              ", got p = " + std::to_string(p));
            std::uint32_t d1 = 0, d2 = 0;
            condition_dims(params, &d1, &d2);
            const std::uint64_t pairs = sat_pow(p - 1, d1 + d2);
            if (pairs > kFullScanCap)
                return reject("condition-exact tier scans (p-1)^" + std::to_string(d1 + d2) +
                              " = " + std::to_string(pairs) + " dilation pairs, above the 10^7 cap");
            return true;
        }
        case VerifyTier::goodness_full:
            for (std::uint32_t d : params.stage_dims) {
                const std::uint64_t space = sat_pow(p - 1, d);
                if (space > kFullScanCap)
                    return reject("goodness-full tier scans (p-1)^" + std::to_string(d) + " = " +
                                  std::to_string(space) + " tuples in one stage, above the 10^7 cap");
            }
            return true;
        case VerifyTier::goodness_sampled:
            return true;
    }
    return reject("unknown tier");
}

/* ------------------------------------------------------------------------ */
/* Goodness scan                                                             */
/* ------------------------------------------------------------------------ */

namespace {

void decode_tuple(std::uint64_t index, std::uint32_t dim, std::uint32_t p1,
                  std::uint32_t* out) {
    for (std::uint32_t i = dim; i-- > 0;) {
        out[i] = static_cast<std::uint32_t>(index % p1) + 1;
        index /= p1;
    }
}

struct StageScanResult {
    std::uint64_t min_core = ~0ULL;
    bool failed = false;
    std::uint64_t fail_index = ~0ULL;
    std::vector<std::uint32_t> fail_alpha;
    std::uint64_t checked = 0;
};

/*
 * One dilation tuple alpha against one stage: find a cover block whose
 * interval sum is good and extract its symmetric core.  An explicit bad set,
 * when available, predicts the witnessing block (alpha ∘ x outside S); the
 * verdict always comes from evaluating the goodness predicate directly.
 */
bool eval_alpha(const ConstructionParams& params,
                const std::vector<std::vector<std::uint32_t>>& blocks, const BadSet* accel,
                const std::uint32_t* alpha, std::uint32_t dim, std::uint64_t* core_out) {
    const Modulus& m = params.p;
    const std::uint32_t L = params.interval_radius;
    std::vector<std::uint32_t> av(alpha, alpha + dim);

    auto core_for = [&](const std::vector<std::uint32_t>& x) {
        std::vector<IntervalSpec> specs;
        specs.reserve(dim);
        for (std::uint32_t i = 0; i < dim; ++i)
            specs.push_back(IntervalSpec{Residue(m, m.mul(alpha[i], x[i])), L, IntervalKind::full});
        return static_cast<std::uint64_t>(
            extract_symmetric_core(m, specs, /*include_unit=*/true).core.size());
    };

    std::size_t predicted = blocks.size();
    if (accel) {
        std::vector<std::uint32_t> q(dim);
        for (std::size_t j = 0; j < blocks.size(); ++j) {
            for (std::uint32_t i = 0; i < dim; ++i) q[i] = m.mul(alpha[i], blocks[j][i]);
            if (!accel->contains_flat(q.data())) {
                predicted = j;
                break;
            }
        }
        if (predicted < blocks.size() && is_good(params, av, blocks[predicted])) {
            *core_out = core_for(blocks[predicted]);
            return true;
        }
    }
    for (std::size_t j = 0; j < blocks.size(); ++j) {
        if (accel && j == predicted) continue; // already evaluated
        if (is_good(params, av, blocks[j])) {
            *core_out = core_for(blocks[j]);
            return true;
        }
    }
    return false;
}

StageScanResult scan_stage_full(const ConstructionParams& params, const StageCover& cover,
                                std::uint32_t stage_dim, unsigned threads) {
    const std::uint32_t p1 = params.p.n() - 1;
    const std::uint64_t space = sat_pow(p1, stage_dim);

    std::vector<std::vector<std::uint32_t>> blocks = cover.xs;
    if (blocks.empty()) blocks.push_back(std::vector<std::uint32_t>(stage_dim, 1));

    std::optional<BadSet> accel;
    {
        BadSet probe = build_bad_set(params, stage_dim);
        if (probe.explicit_rep()) accel.emplace(std::move(probe));
    }

    const unsigned workers = std::max(1u, threads);
    std::vector<StageScanResult> partial(workers);
    parallel_chunks(0, static_cast<std::size_t>(space), workers,
                    [&](unsigned w, std::size_t lo, std::size_t hi) {
                        StageScanResult& local = partial[w];
                        std::uint32_t alpha[8];
                        for (std::size_t idx = lo; idx < hi; ++idx) {
                            decode_tuple(idx, stage_dim, p1, alpha);
                            std::uint64_t core = 0;
                            ++local.checked;
                            if (eval_alpha(params, blocks, accel ? &*accel : nullptr, alpha,
                                           stage_dim, &core)) {
                                local.min_core = std::min(local.min_core, core);
                            } else if (!local.failed) {
                                local.failed = true;
                                local.fail_index = idx;
                                local.fail_alpha.assign(alpha, alpha + stage_dim);
                            }
                        }
                    });

    StageScanResult merged;
    for (const auto& part : partial) {
        merged.checked += part.checked;
        merged.min_core = std::min(merged.min_core, part.min_core);
        if (part.failed && part.fail_index < merged.fail_index) {
            merged.failed = true;
            merged.fail_index = part.fail_index;
            merged.fail_alpha = part.fail_alpha;
        }
    }
    return merged;
}

StageScanResult scan_stage_sampled(const ConstructionParams& params, const StageCover& cover,
                                   std::uint32_t stage_index, std::uint32_t stage_dim,
                                   std::uint64_t samples, unsigned threads) {
    const std::uint32_t p1 = params.p.n() - 1;

    std::vector<std::vector<std::uint32_t>> blocks = cover.xs;
    if (blocks.empty()) blocks.push_back(std::vector<std::uint32_t>(stage_dim, 1));

    std::optional<BadSet> accel;
    {
        BadSet probe = build_bad_set(params, stage_dim);
        if (probe.explicit_rep()) accel.emplace(std::move(probe));
    }

    const CounterRng rng(params.seed);
    const std::uint64_t stream = verify_stream(stage_index, 0);

    const unsigned workers = std::max(1u, threads);
    std::vector<StageScanResult> partial(workers);
    parallel_chunks(0, static_cast<std::size_t>(samples), workers,
                    [&](unsigned w, std::size_t lo, std::size_t hi) {
                        StageScanResult& local = partial[w];
                        std::uint32_t alpha[8];
                        for (std::size_t i = lo; i < hi; ++i) {
                            for (std::uint32_t c = 0; c < stage_dim; ++c)
                                alpha[c] = 1 + static_cast<std::uint32_t>(rng.uniform(
                                                   stream, i * stage_dim + c, p1));
                            std::uint64_t core = 0;
                            ++local.checked;
                            if (eval_alpha(params, blocks, accel ? &*accel : nullptr, alpha,
                                           stage_dim, &core)) {
                                local.min_core = std::min(local.min_core, core);
                            } else if (!local.failed) {
                                local.failed = true;
                                local.fail_index = i;
                                local.fail_alpha.assign(alpha, alpha + stage_dim);
                            }
                        }
                    });

    StageScanResult merged;
    for (const auto& part : partial) {
        merged.checked += part.checked;
        merged.min_core = std::min(merged.min_core, part.min_core);
        if (part.failed && part.fail_index < merged.fail_index) {
            merged.failed = true;
            merged.fail_index = part.fail_index;
            merged.fail_alpha = part.fail_alpha;
        }
    }
    return merged;
}

VerificationReport verify_goodness(const ConstructionParams& params,
                                   const std::vector<StageCover>& covers,
                                   bool sampled, std::uint64_t samples, unsigned threads) {
    VerificationReport report;
    report.tier = sampled ? VerifyTier::goodness_sampled : VerifyTier::goodness_full;

    const std::uint32_t p1 = params.p.n() - 1;
    std::ostringstream detail;
    bool any_fail = false;

    for (std::size_t r = 0; r < params.stage_dims.size(); ++r) {
        const std::uint32_t d = params.stage_dims[r];
        if (d == 0) {
            // No dilation slots: the core of I itself feeds the quotient.
            const auto core = extract_symmetric_core(
                params.p,
                {IntervalSpec{Residue(params.p, 1), params.interval_radius, IntervalKind::full}},
                false);
            report.min_core_sizes.push_back(core.core.size());
            report.checked += 1;
            report.total += 1;
            continue;
        }
        const std::uint64_t space = sat_pow(p1, d);
        StageScanResult res = sampled
            ? scan_stage_sampled(params, covers.at(r), static_cast<std::uint32_t>(r), d,
                                 std::min<std::uint64_t>(samples, space), threads)
            : scan_stage_full(params, covers.at(r), d, threads);
        report.checked += res.checked;
        report.total += space;
        report.min_core_sizes.push_back(res.failed ? 0 : res.min_core);
        if (res.failed && !any_fail) {
            any_fail = true;
            report.failure_witness = res.fail_alpha;
            detail << "stage " << r << ": no cover block is good for dilation tuple (";
            for (std::size_t i = 0; i < res.fail_alpha.size(); ++i)
                detail << (i ? "," : "") << res.fail_alpha[i];
            detail << "); ";
        }
    }

    if (!any_fail) {
        // Numerator and denominator cores: the quotient needs their product
        // to exceed p.  Even k_total draws both from the single stage.
        cpp_int product = 1;
        if (report.min_core_sizes.size() == 1)
            product = cpp_int(report.min_core_sizes[0]) * report.min_core_sizes[0];
        else
            for (std::uint64_t c : report.min_core_sizes) product *= c;
        const bool core_ok = product > params.p.n();
        detail << "min cores ";
        for (std::size_t i = 0; i < report.min_core_sizes.size(); ++i)
            detail << (i ? "," : "[") << report.min_core_sizes[i];
        detail << "]; core product " << product.str() << (core_ok ? " > p" : " <= p");
        report.pass = core_ok;
    } else {
        report.pass = false;
    }
    report.detail = detail.str();
    return report;
}

/* ------------------------------------------------------------------------ */
/* Quotient condition scan                                                   */
/* ------------------------------------------------------------------------ */

VerificationReport verify_condition_exact(const ConstructionParams& params,
                                          const WeightSet& weights, unsigned threads) {
    VerificationReport report;
    report.tier = VerifyTier::condition_exact;

    std::uint32_t d1 = 0, d2 = 0;
    condition_dims(params, &d1, &d2);
    const std::uint32_t p = params.p.n();
    const std::uint32_t p1 = p - 1;
    const std::uint64_t space = sat_pow(p1, d1 + d2);
    report.total = space;

    struct Local {
        bool failed = false;
        std::uint64_t fail_index = ~0ULL;
        std::vector<std::uint32_t> witness;
        std::uint64_t checked = 0;
    };
    const unsigned workers = std::max(1u, threads);
    std::vector<Local> partial(workers);
    const ResidueSet& a = weights.set();

    parallel_chunks(0, static_cast<std::size_t>(space), workers,
                    [&](unsigned w, std::size_t lo, std::size_t hi) {
                        Local& local = partial[w];
                        std::uint32_t digits[16];
                        for (std::size_t idx = lo; idx < hi; ++idx) {
                            decode_tuple(idx, d1 + d2, p1, digits);
                            ResidueSet u = a;
                            for (std::uint32_t i = 0; i < d1; ++i)
                                u = sumset(u, dilate(a, digits[i]));
                            ResidueSet v = a;
                            for (std::uint32_t i = 0; i < d2; ++i)
                                v = sumset(v, dilate(a, digits[d1 + i]));
                            ++local.checked;
                            bool ok = u.contains(0) && v.contains(0);
                            if (!ok) {
                                const ResidueSet q = quotient_set(u, v);
                                ok = q.size() - (q.contains(0) ? 1 : 0) == p1;
                            }
                            if (!ok && !local.failed) {
                                local.failed = true;
                                local.fail_index = idx;
                                local.witness.assign(digits, digits + d1 + d2);
                            }
                        }
                    });

    Local merged;
    for (const auto& part : partial) {
        merged.checked += part.checked;
        if (part.failed && part.fail_index < merged.fail_index) {
            merged.failed = true;
            merged.fail_index = part.fail_index;
            merged.witness = part.witness;
        }
    }
    report.checked = merged.checked;
    report.pass = !merged.failed;
    if (merged.failed) {
        report.failure_witness = merged.witness;
        // find the least uncovered quotient for the witness pair
        ResidueSet u = a;
        for (std::uint32_t i = 0; i < d1; ++i) u = sumset(u, dilate(a, merged.witness[i]));
        ResidueSet v = a;
        for (std::uint32_t i = 0; i < d2; ++i) v = sumset(v, dilate(a, merged.witness[d1 + i]));
        const ResidueSet q = quotient_set(u, v);
        std::uint32_t missing = 0;
        for (std::uint32_t c = 1; c < p && missing == 0; ++c)
            if (!q.contains(c)) missing = c;
        std::ostringstream detail;
        detail << "quotient condition fails: c = " << missing
               << " is not a ratio of the dilated sumsets for the witness pair";
        report.detail = detail.str();
    } else {
        std::ostringstream detail;
        detail << "all " << space << " dilation pairs cover F_p^* (numerator slots " << d1
               << ", denominator slots " << d2 << ")";
        report.detail = detail.str();
    }
    return report;
}

} // namespace

/* ------------------------------------------------------------------------ */
/* Entry points                                                              */
/* ------------------------------------------------------------------------ */

VerificationReport verify_weights(const ConstructionParams& params,
                                  const std::vector<StageCover>& covers,
                                  const WeightSet& weights, VerifyTier tier,
                                  std::uint64_t samples, unsigned threads) {
    std::string why;
    if (!tier_admissible(params, tier, &why)) throw TierError(why);
    if (weights.n() != params.p.n())
        throw std::invalid_argument("verify_weights: weight set modulus mismatch");

    switch (tier) {
        case VerifyTier::exact: {
            VerificationReport report;
            report.tier = tier;
            std::vector<std::uint32_t> witness;
            std::uint64_t nodes = 0;
            report.pass = satisfies_bound(weights, params.k_total, &witness, &nodes, threads);
            report.checked = 1;
            report.total = 1;
            std::ostringstream detail;
            if (report.pass) {
                detail << "no zero-sum-free sequence of length " << params.k_total
                       << " exists; " << nodes << " closure evaluations";
            } else {
                report.failure_witness = witness;
                detail << "zero-sum-free sequence of length " << params.k_total
                       << " found; " << nodes << " closure evaluations";
            }
            report.detail = detail.str();
            return report;
        }
        case VerifyTier::goodness_full:
            return verify_goodness(params, covers, false, samples, threads);
        case VerifyTier::goodness_sampled:
            return verify_goodness(params, covers, true, samples, threads);
        case VerifyTier::condition_exact:
            return verify_condition_exact(params, weights, threads);
    }
    throw std::logic_error("verify_weights: unreachable");
}

/* ------------------------------------------------------------------------ */
/* Certificate re-verification                                               */
/* ------------------------------------------------------------------------ */

namespace {

std::optional<std::string> check_structure(const Certificate& cert,
                                           const ConstructionParams& params) {
    const std::uint32_t p = params.p.n();
    if (params.interval_radius != cert.interval_radius)
        return "interval radius mismatch: derived " + std::to_string(params.interval_radius) +
               ", stored " + std::to_string(cert.interval_radius);
    if (cert.stages.size() != params.stage_dims.size()) return "stage count mismatch";

    const auto inv = params.p.inverse_table();
    for (std::size_t r = 0; r < cert.stages.size(); ++r) {
        const StageCover& st = cert.stages[r];
        const std::string tag = "stage " + std::to_string(r);
        if (st.dim != params.stage_dims[r]) return tag + ": dimension mismatch";
        if (st.xs.size() != st.ys.size()) return tag + ": xs/ys length mismatch";
        for (std::size_t j = 0; j < st.ys.size(); ++j) {
            const auto& y = st.ys[j];
            const auto& x = st.xs[j];
            if (y.size() != st.dim || x.size() != st.dim) return tag + ": tuple dimension mismatch";
            for (std::size_t c = 0; c < y.size(); ++c) {
                if (y[c] == 0 || y[c] >= p || x[c] == 0 || x[c] >= p)
                    return tag + ": tuple component out of range";
                if (inv[y[c]] != x[c]) return tag + ": xs is not the componentwise inverse of ys";
                for (std::size_t c2 = c + 1; c2 < y.size(); ++c2)
                    if (y[c] == y[c2]) return tag + ": repeated tuple component";
            }
        }
        if (st.dim == 0) {
            if (!st.ys.empty()) return tag + ": dimension-0 stage must have an empty cover";
            continue;
        }

        // Cover validity against a freshly built bad set.
        const BadSet bad = build_bad_set(params, st.dim);
        if (bad.explicit_rep()) {
            if (st.bad_size_known && st.bad_size != bad.size())
                return tag + ": stored |S| = " + std::to_string(st.bad_size) +
                       ", rebuilt |S| = " + std::to_string(bad.size());
            const auto flat = bad.tuples();
            std::vector<std::uint32_t> q(st.dim);
            for (std::size_t off = 0; off < flat.size(); off += st.dim) {
                bool killed = false;
                for (const auto& x : st.xs) {
                    for (std::uint32_t c = 0; c < st.dim; ++c)
                        q[c] = params.p.mul(flat[off + c], x[c]);
                    if (!bad.contains_flat(q.data())) {
                        killed = true;
                        break;
                    }
                }
                if (!killed) return tag + ": cover leaves a residual bad tuple";
            }
        }
        // Oracle-backed stages carry no emptiness claim for the cover
        // intersection (the sampled search only kills observed survivors), so
        // the certificate's guarantee rests on the verification tier instead.
    }

    AssembledWeights assembled = assemble_weight_set(params, cert.stages);
    if (assembled.weights.members() != cert.weights)
        return "assembled weight set does not match the stored one";
    if (assembled.wrapped != cert.wrapped) return "wrapped flag mismatch";
    if (assembled.accounting_bound != cert.accounting_bound) return "accounting bound mismatch";

    const auto bounds = derive_bound_checks(params, cert.stages,
                                            static_cast<std::uint32_t>(cert.weights.size()),
                                            assembled.accounting_bound);
    if (bounds.size() != cert.bounds.size()) return "bound record count mismatch";
    for (std::size_t i = 0; i < bounds.size(); ++i)
        if (bounds[i].name != cert.bounds[i].name || bounds[i].lhs != cert.bounds[i].lhs ||
            bounds[i].rhs != cert.bounds[i].rhs || bounds[i].holds != cert.bounds[i].holds)
            return "bound record \"" + cert.bounds[i].name + "\" does not match recomputation";
    return std::nullopt;
}

} // namespace

VerificationReport verify_certificate(const Certificate& cert,
                                      std::optional<VerifyTier> tier_override,
                                      std::uint64_t samples, unsigned threads) {
    const VerifyTier tier = tier_override.value_or(cert.verification.tier);
    auto structural_fail = [&](const std::string& msg) {
        VerificationReport r;
        r.tier = tier;
        r.pass = false;
        r.detail = "certificate invalid: " + msg;
        return r;
    };

    if (certificate_digest(cert) != cert.digest) return structural_fail("digest mismatch");

    std::optional<ConstructionParams> params;
    try {
        params.emplace(make_params(cert.p, cert.k_total, cert.scale, cert.seed, cert.test_mode));
    } catch (const ParamError& e) {
        return structural_fail(std::string("parameters: ") + e.what());
    }

    // An inadmissible tier override is a usage error, not a statement about
    // the certificate; reject it before any structural work.
    {
        std::string why;
        if (!tier_admissible(*params, tier, &why)) throw TierError(why);
    }

    try {
        if (auto err = check_structure(cert, *params)) return structural_fail(*err);
    } catch (const std::invalid_argument& e) {
        return structural_fail(e.what());
    } catch (const std::logic_error& e) {
        return structural_fail(e.what());
    }

    const WeightSet weights(params->p, cert.weights);
    VerificationReport report = verify_weights(*params, cert.stages, weights, tier, samples,
                                               threads);

    if (tier == cert.verification.tier) {
        const VerificationReport& stored = cert.verification;
        const bool sampled_tier = tier == VerifyTier::goodness_sampled;
        bool match = report.pass == stored.pass;
        if (match && !sampled_tier)
            match = report.checked == stored.checked && report.total == stored.total &&
                    report.min_core_sizes == stored.min_core_sizes &&
                    report.failure_witness == stored.failure_witness;
        if (!match)
            return structural_fail("stored verification report does not match recomputation");
    }
    return report;
}

} // namespace davlab
