#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "davlab/construction.hpp"
#include "davlab/digest.hpp"
#include "davlab/extremal.hpp"
#include "davlab/parallel.hpp"
#include "davlab/primes.hpp"

namespace {

using nlohmann::json;

constexpr const char* kToolVersion = "davlab 0.1.0";
constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;       // bad parameters or inadmissible tier
constexpr int kExitVerifyFail = 3;  // verification did not pass
constexpr int kExitCoverFail = 4;   // randomized cover search failed

std::string iso_utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/*
 * Every run emits a manifest describing what produced the artifact.  With
 * --out FILE the manifest lands next to it as FILE.manifest.json; otherwise
 * it goes to stderr as a single line so stdout stays clean for the artifact.
 */
struct ManifestWriter {
    std::string command;
    std::string started_at = iso_utc_now();
    std::vector<std::pair<std::string, std::string>> arguments;

    void arg(const std::string& key, const std::string& value) {
        arguments.emplace_back(key, value);
    }

    void write(const std::string& out_path, const std::string& artifact) const {
        json j;
        j["schema"] = "davlab-manifest/1";
        j["tool_version"] = kToolVersion;
        j["command"] = command;
        json args = json::object();
        for (const auto& [k, v] : arguments) args[k] = v;
        j["arguments"] = args;
        j["started_at"] = started_at;
        j["finished_at"] = iso_utc_now();
        j["result_digest"] = davlab::format_digest(davlab::fnv1a64(artifact));
        if (out_path.empty()) {
            std::cerr << j.dump() << "\n";
        } else {
            std::ofstream f(out_path + ".manifest.json", std::ios::binary);
            f << j.dump(2) << "\n";
        }
    }
};

// Writes the artifact to --out or stdout, then the manifest.
void emit(const std::string& out_path, const std::string& artifact, const ManifestWriter& mw) {
    if (out_path.empty()) {
        std::cout << artifact;
    } else {
        std::ofstream f(out_path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open " + out_path + " for writing");
        f << artifact;
    }
    mw.write(out_path, artifact);
}

std::pair<std::uint32_t, std::uint32_t> parse_range(const std::string& text, const char* what) {
    const auto pos = text.find("..");
    auto parse_one = [&](const std::string& s) {
        std::size_t used = 0;
        unsigned long v = 0;
        try {
            v = std::stoul(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != s.size() || s.empty() || v > 0xFFFFFFFFUL)
            throw davlab::ParamError(std::string(what) + ": expected N or LO..HI, got \"" + text +
                                     "\"");
        return static_cast<std::uint32_t>(v);
    };
    if (pos == std::string::npos) {
        const std::uint32_t v = parse_one(text);
        return {v, v};
    }
    const std::uint32_t lo = parse_one(text.substr(0, pos));
    const std::uint32_t hi = parse_one(text.substr(pos + 2));
    if (lo > hi)
        throw davlab::ParamError(std::string(what) + ": empty range \"" + text + "\"");
    return {lo, hi};
}

std::vector<std::uint32_t> parse_weights(const std::string& text, std::uint32_t n) {
    if (text == "all") {
        std::vector<std::uint32_t> w(n - 1);
        for (std::uint32_t i = 1; i < n; ++i) w[i - 1] = i;
        return w;
    }
    if (text == "pm1") {
        if (n == 2) return {1};
        return {1, n - 1};
    }
    std::vector<std::uint32_t> w;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        unsigned long v = 0;
        try {
            v = std::stoul(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != item.size() || item.empty())
            throw davlab::ParamError("--weights: expected a comma-separated list, \"all\" or "
                                     "\"pm1\", got \"" + text + "\"");
        w.push_back(static_cast<std::uint32_t>(v));
    }
    if (w.empty()) throw davlab::ParamError("--weights: empty list");
    return w;
}

/* --------------------------------------------------------------------- */
/* fd rows (fd-exact and scan share the output format)                    */
/* --------------------------------------------------------------------- */

std::string join_u32(const std::vector<std::uint32_t>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(v[i]);
    }
    return out;
}

json fd_row_json(const davlab::ExtremalResult& r, double wall_ms) {
    json row;
    row["p"] = r.p;
    row["k"] = r.k;
    if (r.value)
        row["value"] = *r.value;
    else
        row["value"] = "infinite within cap";
    row["lower_bound"] = davlab::fd_lower_bound(r.p, r.k);
    row["witness"] = r.witness;
    row["orbits_tested"] = r.orbits_tested;
    row["size_cap"] = r.size_cap;
    row["wall_time_ms"] = static_cast<std::uint64_t>(wall_ms);
    return row;
}

// RFC 4180: witness lists contain commas, so that field is double-quoted.
std::string fd_rows_csv(const std::vector<davlab::ExtremalResult>& rows) {
    std::string out = "p,k,value,lower_bound,witness\r\n";
    for (const auto& r : rows) {
        out += std::to_string(r.p) + "," + std::to_string(r.k) + ",";
        if (r.value) out += std::to_string(*r.value);
        out += "," + std::to_string(davlab::fd_lower_bound(r.p, r.k)) + ",";
        if (!r.witness.empty()) out += "\"" + join_u32(r.witness) + "\"";
        out += "\r\n";
    }
    return out;
}

int run_fd_rows(const std::vector<std::pair<std::uint32_t, std::uint32_t>>& grid,
                std::uint32_t size_cap, const std::string& format, const std::string& out_path,
                unsigned threads, ManifestWriter& mw) {
    std::vector<davlab::ExtremalResult> rows;
    json jrows = json::array();
    for (const auto& [p, k] : grid) {
        const auto t0 = std::chrono::steady_clock::now();
        davlab::ExtremalResult r = davlab::fd_exact(p, k, size_cap, threads);
        const double ms = std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - t0)
                              .count();
        jrows.push_back(fd_row_json(r, ms));
        rows.push_back(std::move(r));
    }
    const std::string artifact =
        format == "csv" ? fd_rows_csv(rows) : jrows.dump(2) + "\n";
    emit(out_path, artifact, mw);
    return kExitOk;
}

/* --------------------------------------------------------------------- */
/* Subcommand drivers                                                     */
/* --------------------------------------------------------------------- */

int cmd_davenport(std::uint32_t n, const std::string& weights_text, std::uint32_t cap,
                  unsigned threads, const std::string& out_path, ManifestWriter& mw) {
    const davlab::Modulus m(n);
    const davlab::WeightSet a(m, parse_weights(weights_text, n));
    const davlab::DavenportResult res = davlab::davenport_constant(a, cap, threads);

    json j;
    j["n"] = n;
    j["weights"] = a.values();
    j["cap"] = res.cap;
    if (res.cap_exceeded)
        j["value"] = "exceeds cap";
    else
        j["value"] = res.value;
    j["witness"] = res.witness;
    j["nodes_explored"] = res.nodes_explored;
    emit(out_path, j.dump(2) + "\n", mw);
    return kExitOk;
}

int cmd_construct(std::uint32_t p, std::uint32_t k, const std::string& scale_text,
                  std::uint64_t seed, bool test_mode, const std::string& mode_text,
                  std::uint64_t max_rounds, std::uint64_t cover_samples,
                  const std::string& tier_text, std::uint64_t samples, unsigned threads,
                  const std::string& out_path, ManifestWriter& mw) {
    davlab::ConstructOptions opts;
    opts.test_mode = test_mode;
    opts.cover.max_rounds = max_rounds;
    opts.cover.samples = cover_samples;
    opts.samples = samples;
    opts.threads = threads;

    if (mode_text == "greedy")
        opts.cover.mode = davlab::CoverMode::greedy;
    else if (mode_text == "paper")
        opts.cover.mode = davlab::CoverMode::paper;
    else if (mode_text == "sampled")
        opts.cover.mode = davlab::CoverMode::sampled;
    else if (mode_text != "auto")
        throw davlab::ParamError("--mode: expected auto|greedy|paper|sampled");

    if (tier_text != "auto") {
        const auto tier = davlab::tier_from_name(tier_text);
        if (!tier)
            throw davlab::ParamError(
                "--tier: expected auto|exact|goodness-full|goodness-sampled|condition-exact");
        opts.tier = *tier;
        opts.tier_set = true;
    }

    const davlab::Certificate cert =
        davlab::construct_weight_set(p, k, davlab::Rational::parse(scale_text), seed, opts);
    emit(out_path, davlab::certificate_to_json(cert), mw);
    if (!cert.verification.pass) {
        std::cerr << "verification (" << davlab::tier_name(cert.verification.tier)
                  << ") did not pass: " << cert.verification.detail << "\n";
        return kExitVerifyFail;
    }
    return kExitOk;
}

int cmd_verify(const std::string& cert_path, const std::string& tier_text, std::uint64_t samples,
               unsigned threads, const std::string& out_path, ManifestWriter& mw) {
    const davlab::Certificate cert = davlab::load_certificate(cert_path);
    std::optional<davlab::VerifyTier> tier;
    if (tier_text != "stored") {
        tier = davlab::tier_from_name(tier_text);
        if (!tier)
            throw davlab::ParamError(
                "--tier: expected stored|exact|goodness-full|goodness-sampled|condition-exact");
    }
    const davlab::VerificationReport rep =
        davlab::verify_certificate(cert, tier, samples, threads);

    json j;
    j["certificate"] = cert_path;
    j["tier"] = davlab::tier_name(rep.tier);
    j["pass"] = rep.pass;
    j["checked"] = rep.checked;
    j["total"] = rep.total;
    j["detail"] = rep.detail;
    j["failure_witness"] = rep.failure_witness;
    j["min_core_sizes"] = rep.min_core_sizes;
    emit(out_path, j.dump(2) + "\n", mw);
    return rep.pass ? kExitOk : kExitVerifyFail;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Weighted Davenport constants: exact solvers, extremal tables and "
                 "certified randomized weight-set constructions"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    // davenport
    auto* sub_dav = app.add_subcommand("davenport", "Exact D_A(Z_n) for an explicit weight set");
    std::uint32_t dav_n = 0;
    std::string dav_weights;
    std::uint32_t dav_cap = 0;
    unsigned dav_threads = 0;
    std::string dav_out;
    sub_dav->add_option("--n", dav_n, "Group order n >= 2")->required();
    sub_dav->add_option("--weights", dav_weights, "Comma list (\"1,4\"), \"all\" or \"pm1\"")
        ->required();
    sub_dav->add_option("--cap", dav_cap, "Stop the search at this sequence length");
    sub_dav->add_option("--threads", dav_threads, "Worker threads (0: DAVLAB_THREADS or 1)");
    sub_dav->add_option("--out", dav_out, "Write the JSON result here instead of stdout");

    // fd-exact
    auto* sub_fd = app.add_subcommand("fd-exact", "Exact extremal f(p, k) over a prime range");
    std::string fd_p, fd_format = "json", fd_out;
    std::uint32_t fd_k = 2, fd_cap = 0;
    unsigned fd_threads = 0;
    sub_fd->add_option("--p", fd_p, "Prime or range LO..HI (non-primes are skipped)")->required();
    sub_fd->add_option("--k", fd_k, "Davenport bound k >= 1");
    sub_fd->add_option("--size-cap", fd_cap, "Stop after this weight-set size (0: default cap)");
    sub_fd->add_option("--format", fd_format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    sub_fd->add_option("--threads", fd_threads, "Worker threads (0: DAVLAB_THREADS or 1)");
    sub_fd->add_option("--out", fd_out, "Write the table here instead of stdout");

    // scan
    auto* sub_scan = app.add_subcommand("scan", "f(p, k) over a (p, k) grid");
    std::string scan_p, scan_k = "2..2", scan_format = "csv", scan_out;
    std::uint32_t scan_cap = 0;
    unsigned scan_threads = 0;
    sub_scan->add_option("--p", scan_p, "Prime range LO..HI")->required();
    sub_scan->add_option("--k", scan_k, "k range LO..HI");
    sub_scan->add_option("--size-cap", scan_cap, "Stop after this weight-set size (0: default cap)");
    sub_scan->add_option("--format", scan_format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    sub_scan->add_option("--threads", scan_threads, "Worker threads (0: DAVLAB_THREADS or 1)");
    sub_scan->add_option("--out", scan_out, "Write the table here instead of stdout");

    // construct
    auto* sub_con = app.add_subcommand("construct",
                                       "Randomized weight set with D_A(F_p) <= k, certified");
    std::uint32_t con_p = 0, con_k = 0;
    std::string con_scale = "9", con_mode = "auto", con_tier = "auto", con_out;
    std::uint64_t con_seed = 0, con_rounds = 64, con_cover_samples = 4096, con_samples = 4096;
    unsigned con_threads = 0;
    bool con_test = false;
    sub_con->add_option("--p", con_p, "Prime modulus")->required();
    sub_con->add_option("--k", con_k, "Target Davenport bound k_total >= 2")->required();
    sub_con->add_option("--C", con_scale, "Interval scale C as a decimal (default 9)");
    sub_con->add_option("--seed", con_seed, "RNG seed");
    sub_con->add_flag("--test-mode", con_test,
                      "Lift the C > 8 and no-wrap guards (demonstration runs)");
    sub_con->add_option("--mode", con_mode, "Cover search: auto|greedy|paper|sampled");
    sub_con->add_option("--max-rounds", con_rounds, "Candidate draws per cover step");
    sub_con->add_option("--cover-samples", con_cover_samples,
                        "Survivor samples per step (sampled cover mode)");
    sub_con->add_option("--tier", con_tier,
                        "Verification tier: auto|exact|goodness-full|goodness-sampled|"
                        "condition-exact");
    sub_con->add_option("--samples", con_samples, "Verification samples (sampled tiers)");
    sub_con->add_option("--threads", con_threads, "Worker threads (0: DAVLAB_THREADS or 1)");
    sub_con->add_option("--out", con_out, "Write the certificate here instead of stdout");

    // verify
    auto* sub_ver = app.add_subcommand("verify", "Re-verify a certificate file");
    std::string ver_cert, ver_tier = "stored", ver_out;
    std::uint64_t ver_samples = 4096;
    unsigned ver_threads = 0;
    sub_ver->add_option("--cert", ver_cert, "Certificate JSON path")->required();
    sub_ver->add_option("--tier", ver_tier,
                        "Override tier: stored|exact|goodness-full|goodness-sampled|"
                        "condition-exact");
    sub_ver->add_option("--samples", ver_samples, "Verification samples (sampled tiers)");
    sub_ver->add_option("--threads", ver_threads, "Worker threads (0: DAVLAB_THREADS or 1)");
    sub_ver->add_option("--out", ver_out, "Write the report here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*sub_dav) {
            ManifestWriter mw;
            mw.command = "davenport";
            mw.arg("n", std::to_string(dav_n));
            mw.arg("weights", dav_weights);
            mw.arg("cap", std::to_string(dav_cap));
            return cmd_davenport(dav_n, dav_weights, dav_cap,
                                 davlab::resolve_threads(dav_threads), dav_out, mw);
        }
        if (*sub_fd) {
            ManifestWriter mw;
            mw.command = "fd-exact";
            mw.arg("p", fd_p);
            mw.arg("k", std::to_string(fd_k));
            mw.arg("size_cap", std::to_string(fd_cap));
            mw.arg("format", fd_format);
            const auto [lo, hi] = parse_range(fd_p, "--p");
            if (lo == hi && !davlab::is_prime(lo))
                throw davlab::ParamError("--p: " + std::to_string(lo) + " is not prime");
            std::vector<std::pair<std::uint32_t, std::uint32_t>> grid;
            for (std::uint32_t p : davlab::primes_in_range(lo, hi)) grid.emplace_back(p, fd_k);
            return run_fd_rows(grid, fd_cap, fd_format, fd_out,
                               davlab::resolve_threads(fd_threads), mw);
        }
        if (*sub_scan) {
            ManifestWriter mw;
            mw.command = "scan";
            mw.arg("p", scan_p);
            mw.arg("k", scan_k);
            mw.arg("size_cap", std::to_string(scan_cap));
            mw.arg("format", scan_format);
            const auto [plo, phi] = parse_range(scan_p, "--p");
            const auto [klo, khi] = parse_range(scan_k, "--k");
            if (klo < 1) throw davlab::ParamError("--k: k must be >= 1");
            std::vector<std::pair<std::uint32_t, std::uint32_t>> grid;
            for (std::uint32_t p : davlab::primes_in_range(plo, phi))
                for (std::uint32_t k = klo; k <= khi; ++k) grid.emplace_back(p, k);
            return run_fd_rows(grid, scan_cap, scan_format, scan_out,
                               davlab::resolve_threads(scan_threads), mw);
        }
        if (*sub_con) {
            ManifestWriter mw;
            mw.command = "construct";
            mw.arg("p", std::to_string(con_p));
            mw.arg("k", std::to_string(con_k));
            mw.arg("C", con_scale);
            mw.arg("seed", std::to_string(con_seed));
            mw.arg("test_mode", con_test ? "true" : "false");
            mw.arg("mode", con_mode);
            mw.arg("tier", con_tier);
            return cmd_construct(con_p, con_k, con_scale, con_seed, con_test, con_mode,
                                 con_rounds, con_cover_samples, con_tier, con_samples,
                                 davlab::resolve_threads(con_threads), con_out, mw);
        }
        if (*sub_ver) {
            ManifestWriter mw;
            mw.command = "verify";
            mw.arg("cert", ver_cert);
            mw.arg("tier", ver_tier);
            return cmd_verify(ver_cert, ver_tier, ver_samples,
                              davlab::resolve_threads(ver_threads), ver_out, mw);
        }
    } catch (const davlab::ParamError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const davlab::TierError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const davlab::CoverError& e) {
        std::cerr << "error: cover search failed: " << e.what() << " (residual "
                  << e.residual << ")\n";
        return kExitCoverFail;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
