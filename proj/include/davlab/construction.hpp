#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "davlab/davenport.hpp"
#include "davlab/zmod.hpp"

namespace davlab {

/*
 * Randomized construction of weight sets A with D_A(F_p) <= k_total, built
 * from dilated intervals.  Writing k_total = 2m (or 2m+1), the pipeline per
 * stage of dimension d (d = m-1, plus d = m for odd k_total) is:
 *
 *   bad set   S in (F_p^*)^d of step tuples whose interval sum can be small;
 *   cover     y^(1), ..., y^(N) with S ∩ y^(1)S ∩ ... ∩ y^(N)S empty;
 *   assembly  A = (I ∪ ⋃_{j,i} X_{x_i^(j)})_* with x^(j) the componentwise
 *             inverse of y^(j), I = [-L, L] and X_t = t*[-L, L].
 *
 * The cover guarantees that for every dilation tuple alpha some block of A
 * produces a large interval sum, whose symmetric core feeds the quotient
 * argument F_p^* ⊆ (A + alpha_1 A + ...)/(A + beta_1 A + ...), which in turn
 * bounds the weighted Davenport constant.
 */

/* ------------------------------------------------------------------------ */
/* Errors                                                                    */
/* ------------------------------------------------------------------------ */

// Invalid or inadmissible construction parameters (CLI exit code 2).
struct ParamError : std::invalid_argument {
    explicit ParamError(const std::string& msg, std::optional<std::uint64_t> min_p = std::nullopt)
        : std::invalid_argument(msg), min_admissible_p(min_p) {}
    std::optional<std::uint64_t> min_admissible_p;
};

// Verification tier not admissible for the given parameters (CLI exit code 2).
struct TierError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Randomized cover search failed to empty the residual (CLI exit code 4).
struct CoverError : std::runtime_error {
    CoverError(const std::string& msg, std::uint64_t residual_size)
        : std::runtime_error(msg), residual(residual_size) {}
    std::uint64_t residual;
};

/* ------------------------------------------------------------------------ */
/* Parameters                                                                */
/* ------------------------------------------------------------------------ */

/*
 * Exact nonnegative rational parsed from a decimal string ("9", "1.5"),
 * at most 12 fractional digits.  Used for the scale constant C so that
 * L = ceil(C * p^(1/k_total)) and all derived bounds are float-free.
 */
struct Rational {
    std::uint64_t num = 9;
    std::uint64_t den = 1;

    static Rational parse(const std::string& text);
    std::string str() const;                  // canonical decimal form
    bool operator==(const Rational&) const = default;
};

struct ConstructionParams {
    Modulus p;
    std::uint32_t k_total;                    // target Davenport bound, >= 2
    std::uint32_t m;                          // k_total = 2m or 2m+1
    bool odd;
    Rational scale;                           // C; > 8 unless test_mode
    std::uint32_t interval_radius;            // L = ceil(C * p^(1/k_total)), exact
    std::uint32_t half_radius;                // H = floor(L/2); box radius for bad sets
    std::uint64_t seed;
    bool test_mode;
    std::vector<std::uint32_t> stage_dims;    // {m-1} for even, {m-1, m} for odd
};

/*
 * Validates and derives parameters.  In normal mode requires C > 8 and the
 * no-wrap guard 8 * k_total * L < p; a guard failure reports the smallest
 * admissible prime.  test_mode lifts both restrictions (intervals may wrap;
 * small demonstration primes become usable) and is recorded in certificates.
 */
ConstructionParams make_params(std::uint32_t p, std::uint32_t k_total, const Rational& scale,
                               std::uint64_t seed, bool test_mode = false);

/* ------------------------------------------------------------------------ */
/* Bad sets                                                                  */
/* ------------------------------------------------------------------------ */

/*
 * The stage-d bad set S = S_1 ∪ ... ∪ S_d in (F_p^*)^d, where t lies in S_j
 * iff t_1 a_1 + ... + t_d a_d lands in B = [-2L, 2L] for some choice of
 * a_j in [1, H] and a_i in [-H, H] (i != j).  Tuples outside S are exactly
 * the steps whose interval sum I + X_{t_1} + ... + X_{t_d} is provably large
 * (the goodness contrapositive).
 *
 * Dimensions 1 and 2 are materialized as bit-vectors over (p-1)^d indices;
 * higher dimensions fall back to a membership oracle.
 */
class BadSet {
public:
    std::uint32_t dim() const { return dim_; }
    bool explicit_rep() const { return explicit_; }
    std::uint64_t universe() const;                 // (p-1)^dim

    bool contains(const std::vector<std::uint32_t>& t) const;
    bool contains_flat(const std::uint32_t* t) const;   // dim() components

    // Explicit representations only:
    std::uint64_t size() const;
    std::uint64_t component_size(std::uint32_t j) const;   // |S_j|
    std::vector<std::uint32_t> tuples() const;             // flat, stride dim, ascending

    friend BadSet build_bad_set(const ConstructionParams& params, std::uint32_t dim);

private:
    BadSet() : p_(2) {}
    bool oracle_contains(const std::uint32_t* t) const;

    Modulus p_;
    std::uint32_t dim_ = 0;
    std::uint32_t radius_ = 0;                 // L
    std::uint32_t half_ = 0;                   // H
    bool explicit_ = false;
    std::vector<std::uint64_t> bits_;          // explicit union of the S_j
    std::uint64_t count_ = 0;
    std::vector<std::uint64_t> component_sizes_;
};

BadSet build_bad_set(const ConstructionParams& params, std::uint32_t dim);

/*
 * Goodness predicate: |(I + alpha_1 X_{t_1} + ... + alpha_d X_{t_d})_*| >=
 * ceil(L^(d+1) / 4^(d+1)).  alpha and t have the stage dimension; punctured
 * cardinality is returned through size_out when non-null.
 */
bool is_good(const ConstructionParams& params, const std::vector<std::uint32_t>& alpha,
             const std::vector<std::uint32_t>& t, std::uint64_t* size_out = nullptr);

// The goodness threshold ceil(L^(d+1) / 4^(d+1)) for a stage of dimension d.
std::uint64_t goodness_threshold(std::uint32_t radius, std::uint32_t dim);

/* ------------------------------------------------------------------------ */
/* Covers                                                                    */
/* ------------------------------------------------------------------------ */

enum class CoverMode { automatic, greedy, paper, sampled };

std::string cover_mode_name(CoverMode mode);

struct StageCover {
    std::uint32_t dim = 0;
    std::string mode;                                   // "greedy" | "paper" | "sampled"
    std::vector<std::vector<std::uint32_t>> ys;         // cover dilation tuples
    std::vector<std::vector<std::uint32_t>> xs;         // componentwise inverses of ys
    std::uint64_t redraws = 0;                          // tuples rejected for repeated components
    bool bad_size_known = false;
    std::uint64_t bad_size = 0;                         // |S| when explicit
    bool normal_known = false;                          // paper mode statistics
    std::uint64_t normal_count = 0;
};

struct CoverOptions {
    CoverMode mode = CoverMode::automatic;   // greedy for explicit sets, sampled for oracles
    std::uint64_t max_rounds = 64;           // candidate draws per cover step
    std::uint64_t samples = 4096;            // survivor sampling for oracle bad sets
};

/*
 * Finds y^(1), ..., y^(N) with S ∩ y^(1)S ∩ ... ∩ y^(N)S = ∅.
 *
 * greedy: draw candidates from the seeded counter RNG; accept one that at
 * least halves the residual, otherwise the best of max_rounds draws as long
 * as it makes progress.  paper (dim 1 only): restrict to y with
 * |S ∩ yS| <= 2(3kC^k)^(2k-2), start from the minimizer, then repeatedly
 * pick the least normal y avoiding the least residual element.  sampled:
 * oracle-backed variant that samples survivors and kills one per step.
 *
 * Tuples y must have pairwise distinct components; colliding draws are
 * redrawn and counted.  Throws CoverError when no progress is possible.
 */
StageCover find_cover(const ConstructionParams& params, const BadSet& bad,
                      std::uint32_t stage_index, const CoverOptions& opts);

/* ------------------------------------------------------------------------ */
/* Assembly and verification                                                 */
/* ------------------------------------------------------------------------ */

struct AssembledWeights {
    ResidueSet weights;
    bool wrapped;                        // some interval wrapped mod p (test_mode only)
    std::uint64_t accounting_bound;      // 2L * (1 + sum over stages of N_r * d_r)
};

AssembledWeights assemble_weight_set(const ConstructionParams& params,
                                     const std::vector<StageCover>& covers);

enum class VerifyTier { exact, goodness_full, goodness_sampled, condition_exact };

std::string tier_name(VerifyTier tier);
std::optional<VerifyTier> tier_from_name(const std::string& name);

// Policy: exact for p <= 60, else goodness-full while every stage tuple space
// (p-1)^d stays within 10^7, else goodness-sampled.
VerifyTier choose_tier(const ConstructionParams& params);

// Admissibility limits: exact and condition-exact require p <= 60;
// goodness-full requires (p-1)^d <= 10^7 for every stage dimension d.
bool tier_admissible(const ConstructionParams& params, VerifyTier tier, std::string* why = nullptr);

struct VerificationReport {
    VerifyTier tier = VerifyTier::exact;
    bool pass = false;
    std::uint64_t checked = 0;                    // coverage fraction checked/total
    std::uint64_t total = 0;
    std::string detail;
    std::vector<std::uint32_t> failure_witness;   // tier-specific; empty on pass
    std::vector<std::uint64_t> min_core_sizes;    // per stage (goodness tiers)
};

/*
 * Verifies that the assembled weights do what the certificate claims.
 *
 *   exact           D_A <= k_total by exhaustive zero-sum-free search.
 *   goodness-full   for every stage and every dilation tuple alpha, some
 *                   cover block is good; symmetric cores are extracted and
 *                   the stage-minimum core sizes must multiply above p.
 *   goodness-sampled  same check on `samples` seeded random tuples per stage.
 *   condition-exact for all (alpha, beta) the quotient condition
 *                   F_p^* ⊆ (A + Σ alpha_i A)/(A + Σ beta_j A) holds
 *                   (sufficient for D_A <= k_total; pass proves the bound).
 */
VerificationReport verify_weights(const ConstructionParams& params,
                                  const std::vector<StageCover>& covers,
                                  const WeightSet& weights, VerifyTier tier,
                                  std::uint64_t samples = 4096, unsigned threads = 1);

/* ------------------------------------------------------------------------ */
/* Certificates                                                              */
/* ------------------------------------------------------------------------ */

struct BoundCheck {
    std::string name;
    std::string lhs;       // decimal integers (may exceed 64 bits)
    std::string rhs;
    bool holds = false;
};

// The recorded size/cover bound checks (exact big-integer comparisons; lhs and
// rhs are decimal strings, rhs the floor of the rational bound).
std::vector<BoundCheck> derive_bound_checks(const ConstructionParams& params,
                                            const std::vector<StageCover>& covers,
                                            std::uint32_t weight_count,
                                            std::uint64_t accounting_bound);

inline constexpr const char* kCertificateSchema = "davenport-cert/1";

struct Certificate {
    std::uint32_t p = 0;
    std::uint32_t k_total = 0;
    Rational scale;
    std::uint32_t interval_radius = 0;
    std::uint64_t seed = 0;
    bool test_mode = false;
    std::vector<StageCover> stages;
    std::vector<std::uint32_t> weights;            // sorted ascending
    bool wrapped = false;
    std::uint64_t accounting_bound = 0;
    std::vector<BoundCheck> bounds;
    VerificationReport verification;
    std::string digest;                            // "fnv1a64:" + 16 hex digits
};

struct ConstructOptions {
    CoverOptions cover;
    VerifyTier tier = VerifyTier::exact;     // effective tier; see tier_set
    bool tier_set = false;                   // false: choose_tier policy
    std::uint64_t samples = 4096;            // verification sampling
    unsigned threads = 1;
    bool test_mode = false;
};

/*
 * End-to-end pipeline: params -> bad sets -> covers -> assembly -> bounds ->
 * verification -> digest.  Throws ParamError/TierError/CoverError; a failing
 * verification does not throw, it is recorded in the certificate.
 */
Certificate construct_weight_set(std::uint32_t p, std::uint32_t k_total, const Rational& scale,
                                 std::uint64_t seed, const ConstructOptions& opts = {});

/*
 * Re-derives everything a certificate claims: parameter consistency, xs/ys
 * inversions, cover validity against freshly built bad sets, weight assembly
 * equality, accounting bound, digest, and the verification tier (overridable).
 * Structural mismatches come back as pass = false with a detail message;
 * inadmissible tiers throw TierError.
 */
VerificationReport verify_certificate(const Certificate& cert,
                                      std::optional<VerifyTier> tier_override = std::nullopt,
                                      std::uint64_t samples = 4096, unsigned threads = 1);

/* ------------------------------------------------------------------------ */
/* Serialization (implemented in certificate_io.cpp)                         */
/* ------------------------------------------------------------------------ */

// Canonical JSON text: sorted keys, integers and strings only, no floats.
std::string certificate_to_json(const Certificate& cert);

// Parses and validates schema/shape; throws std::runtime_error on malformed
// input and ParamError on schema mismatch.
Certificate certificate_from_json(const std::string& text);

// FNV-1a 64-bit digest of the canonical JSON with the digest field removed,
// formatted as "fnv1a64:" + 16 lowercase hex digits.
std::string certificate_digest(const Certificate& cert);

void save_certificate(const Certificate& cert, const std::string& path);
Certificate load_certificate(const std::string& path);

} // namespace davlab
