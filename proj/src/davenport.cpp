#include "davlab/davenport.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "davlab/parallel.hpp"

namespace davlab {

/* ------------------------------------------------------------------------ */
/* WeightSet / GroupSequence                                                 */
/* ------------------------------------------------------------------------ */

WeightSet::WeightSet(const Modulus& m, const std::vector<std::uint32_t>& weights)
    : set_(ResidueSet::from_values(m, weights)) {
    validate();
}

WeightSet::WeightSet(const Modulus& m, ResidueSet weights) : set_(std::move(weights)) {
    if (set_.n() != m.n())
        throw std::invalid_argument("WeightSet: modulus mismatch");
    validate();
}

void WeightSet::validate() const {
    if (set_.empty()) throw std::invalid_argument("WeightSet: must be nonempty");
    if (set_.contains(0)) throw std::invalid_argument("WeightSet: 0 is not a valid weight");
}

GroupSequence::GroupSequence(const Modulus& m, std::vector<std::uint32_t> elems)
    : modulus(m), elements(std::move(elems)) {
    for (std::uint32_t x : elements) {
        if (x >= m.n())
            throw std::invalid_argument("GroupSequence: element " + std::to_string(x) +
                                        " out of range mod " + std::to_string(m.n()));
    }
}

std::vector<std::uint32_t> GroupSequence::sorted() const {
    auto s = elements;
    std::sort(s.begin(), s.end());
    return s;
}

/* ------------------------------------------------------------------------ */
/* Closure                                                                   */
/* ------------------------------------------------------------------------ */

namespace {

// Z' = Z | A*x | (Z + A*x), with A*x given both as a set and a member list.
ResidueSet closure_step(const ResidueSet& z, const ResidueSet& ax,
                        const std::vector<std::uint32_t>& ax_members) {
    ResidueSet out = z;
    out |= ax;
    for (std::uint32_t v : ax_members) out.or_rotated(z, v);
    return out;
}

} // namespace

ResidueSet weighted_sum_closure(const GroupSequence& seq, const WeightSet& a) {
    if (seq.modulus.n() != a.n())
        throw std::invalid_argument("weighted_sum_closure: modulus mismatch");
    ResidueSet z(a.modulus());
    for (std::uint32_t x : seq.elements) {
        ResidueSet ax = dilate(a.set(), x);
        z = closure_step(z, ax, ax.members());
    }
    return z;
}

bool is_zero_sum_free(const GroupSequence& seq, const WeightSet& a) {
    return !weighted_sum_closure(seq, a).contains(0);
}

/* ------------------------------------------------------------------------ */
/* Exact search                                                              */
/* ------------------------------------------------------------------------ */

namespace {

struct BranchOut {
    std::uint32_t best_len = 0;
    std::vector<std::uint32_t> best_seq;
    bool found_cap = false;
    std::vector<std::uint32_t> cap_seq;
    std::uint64_t nodes = 0;
};

/*
 * Shared read-only search context: the dilates A*x for every candidate
 * element, precomputed once.  Sequences are enumerated in nondecreasing
 * order (one representative per permutation class); elements are restricted
 * to [1, n) because any sequence containing 0 has the zero-sum a*0 = 0.
 */
class Engine {
public:
    Engine(const WeightSet& a, std::uint32_t cap)
        : mod_(a.modulus()), n_(a.n()), cap_(cap) {
        dil_.reserve(n_);
        dil_members_.reserve(n_);
        dil_.push_back(ResidueSet(mod_)); // index 0 unused
        dil_members_.emplace_back();
        for (std::uint32_t x = 1; x < n_; ++x) {
            dil_.push_back(dilate(a.set(), x));
            dil_members_.push_back(dil_.back().members());
        }
    }

    const ResidueSet& dil(std::uint32_t x) const { return dil_[x]; }

    ResidueSet extend(const ResidueSet& z, std::uint32_t x) const {
        return closure_step(z, dil_[x], dil_members_[x]);
    }

    // Depth-first extension from a live state; stops the branch as soon as a
    // sequence of length cap is found (its existence decides the cap case and
    // DFS order makes the first find the lexicographically least).
    void dfs(std::uint32_t depth, std::uint32_t min_x, const ResidueSet& z,
             std::vector<std::uint32_t>& seq, BranchOut& out) const {
        if (depth >= cap_) return;
        for (std::uint32_t x = min_x; x < n_; ++x) {
            ResidueSet nz = extend(z, x);
            ++out.nodes;
            if (nz.contains(0)) continue;
            seq.push_back(x);
            const std::uint32_t len = depth + 1;
            if (len > out.best_len) {
                out.best_len = len;
                out.best_seq = seq;
            }
            if (len == cap_) {
                out.found_cap = true;
                out.cap_seq = seq;
                seq.pop_back();
                return;
            }
            dfs(len, x, nz, seq, out);
            seq.pop_back();
            if (out.found_cap) return;
        }
    }

    const Modulus& mod() const { return mod_; }

private:
    Modulus mod_;
    std::uint32_t n_;
    std::uint32_t cap_;
    std::vector<ResidueSet> dil_;
    std::vector<std::vector<std::uint32_t>> dil_members_;
};

struct RunOut {
    std::uint32_t best_len = 0;
    std::vector<std::uint32_t> best_seq;
    bool exceeded = false;
    std::vector<std::uint32_t> cap_seq;
    std::uint64_t nodes = 0;
};

/*
 * Full search to depth cap.  For prime n the first element is fixed to 1:
 * dilating a sequence by a unit dilates all weighted sums by that unit, so
 * every dilation orbit of a zero-sum-free sequence contains a nondecreasing
 * representative starting at 1.  First-level branches (the next element) are
 * distributed over workers and merged in branch order, which makes value,
 * witness and node count independent of the worker count.
 */
RunOut run_search(const WeightSet& a, std::uint32_t cap, unsigned threads) {
    const Modulus& m = a.modulus();
    const std::uint32_t n = m.n();
    Engine eng(a, cap);
    RunOut res;

    std::uint32_t base_depth = 0;
    ResidueSet zbase(m);
    std::vector<std::uint32_t> prefix;
    if (m.prime()) {
        zbase = eng.dil(1); // closure of the sequence (1) is A itself
        ++res.nodes;
        res.best_len = 1;
        res.best_seq = {1};
        prefix = {1};
        base_depth = 1;
        if (cap == 1) {
            res.exceeded = true;
            res.cap_seq = {1};
            return res;
        }
    }

    std::vector<BranchOut> outs(n - 1);
    parallel_chunks(0, outs.size(), threads, [&](unsigned, std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            const std::uint32_t bx = static_cast<std::uint32_t>(i + 1);
            BranchOut& bo = outs[i];
            ResidueSet nz = eng.extend(zbase, bx);
            ++bo.nodes;
            if (nz.contains(0)) continue;
            std::vector<std::uint32_t> seq = prefix;
            seq.push_back(bx);
            const std::uint32_t len = base_depth + 1;
            bo.best_len = len;
            bo.best_seq = seq;
            if (len == cap) {
                bo.found_cap = true;
                bo.cap_seq = seq;
                continue;
            }
            eng.dfs(len, bx, nz, seq, bo);
        }
    });

    for (const BranchOut& bo : outs) {
        res.nodes += bo.nodes;
        if (!res.exceeded && bo.found_cap) {
            res.exceeded = true;
            res.cap_seq = bo.cap_seq;
        }
        if (bo.best_len > res.best_len) {
            res.best_len = bo.best_len;
            res.best_seq = bo.best_seq;
        }
    }
    return res;
}

} // namespace

DavenportResult davenport_constant(const WeightSet& a, std::uint32_t cap, unsigned threads) {
    const std::uint32_t n = a.n();
    const std::uint32_t effective_cap = cap == 0 ? n : cap;
    RunOut run = run_search(a, effective_cap, threads);

    DavenportResult out;
    out.cap = effective_cap;
    out.nodes_explored = run.nodes;
    if (run.exceeded) {
        if (effective_cap >= n)
            // The closure grows strictly along any zero-sum-free sequence, so
            // lengths >= n are impossible; reaching them means a solver bug.
            throw std::logic_error("davenport_constant: search exceeded the group order");
        out.cap_exceeded = true;
        out.witness = run.cap_seq;
        return out;
    }
    out.value = run.best_len + 1;
    out.witness = run.best_seq;
    return out;
}

bool satisfies_bound(const WeightSet& a, std::uint32_t k,
                     std::vector<std::uint32_t>* witness, std::uint64_t* nodes,
                     unsigned threads) {
    if (k == 0) throw std::invalid_argument("satisfies_bound: k must be >= 1");
    RunOut run = run_search(a, k, threads);
    if (nodes) *nodes = run.nodes;
    if (run.exceeded && witness) *witness = run.cap_seq;
    return !run.exceeded;
}

} // namespace davlab
