#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include <sys/wait.h>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
    int code = -1;
    std::string out;
    std::string err;
};

std::string binary_path() {
    const char* env = std::getenv("DAVLAB_BIN");
    REQUIRE_MESSAGE(env != nullptr, "DAVLAB_BIN must point at the davlab executable");
    return env;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

fs::path scratch_dir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "davlab_cli_tests";
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

// Runs the tool through the shell, capturing exit code, stdout and stderr.
RunResult run(const std::string& args, const std::string& env_prefix = "") {
    const fs::path out = scratch_dir() / "stdout.txt";
    const fs::path err = scratch_dir() / "stderr.txt";
    const std::string cmd = env_prefix + "\"" + binary_path() + "\" " + args + " > \"" +
                            out.string() + "\" 2> \"" + err.string() + "\"";
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

} // namespace

TEST_CASE("version flag") {
    const auto r = run("--version");
    CHECK(r.code == 0);
    CHECK(r.out.find("davlab 0.1.0") != std::string::npos);
}

TEST_CASE("usage errors exit with 2") {
    CHECK(run("").code == 2);                      // missing subcommand
    CHECK(run("davenport --n 5").code == 2);       // missing --weights
    CHECK(run("nonsense").code == 2);
    CHECK(run("davenport --n 5 --weights 0,2").code == 2);  // weight 0 is invalid
    CHECK(run("davenport --n 5 --weights ,").code == 2);
    CHECK(run("fd-exact --p 9 --k 2").code == 2);  // single p must be prime
    CHECK(run("fd-exact --p 13..3 --k 2").code == 2);
    CHECK(run("--help").code == 0);
}

TEST_CASE("davenport subcommand") {
    const auto r = run("davenport --n 5 --weights 1,4");
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(j["n"] == 5);
    CHECK(j["weights"] == json::array({1, 4}));
    CHECK(j["value"] == 3);
    CHECK(j["witness"] == json::array({1, 2}));
    CHECK(j["cap"] == 5);  // defaulted cap is the effective one, n
    CHECK(j["nodes_explored"].get<std::uint64_t>() > 0);

    // the manifest goes to stderr when writing to stdout
    CHECK(r.err.find("davlab-manifest/1") != std::string::npos);
    CHECK(r.err.find("result_digest") != std::string::npos);

    const auto capped = run("davenport --n 5 --weights 1 --cap 2");
    REQUIRE(capped.code == 0);
    const json c = json::parse(capped.out);
    CHECK(c["value"] == "exceeds cap");
    CHECK(c["cap"] == 2);

    const auto all = run("davenport --n 7 --weights all");
    CHECK(json::parse(all.out)["value"] == 2);
    const auto pm = run("davenport --n 11 --weights pm1");
    CHECK(json::parse(pm.out)["value"] == 4);
}

TEST_CASE("fd-exact csv golden table") {
    const auto r = run("fd-exact --p 3..13 --k 2 --format csv");
    REQUIRE(r.code == 0);
    CHECK(r.out ==
          "p,k,value,lower_bound,witness\r\n"
          "3,2,2,1,\"1,2\"\r\n"
          "5,2,3,2,\"1,2,3\"\r\n"
          "7,2,3,2,\"1,2,5\"\r\n"
          "11,2,4,3,\"1,2,4,7\"\r\n"
          "13,2,4,3,\"1,2,5,11\"\r\n");

    const auto empty = run("fd-exact --p 14..16 --k 2 --format csv");
    REQUIRE(empty.code == 0);
    CHECK(empty.out == "p,k,value,lower_bound,witness\r\n");
}

TEST_CASE("fd-exact json rows") {
    const auto r = run("fd-exact --p 7 --k 3");
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    REQUIRE(j.is_array());
    REQUIRE(j.size() == 1);
    CHECK(j[0]["p"] == 7);
    CHECK(j[0]["k"] == 3);
    CHECK(j[0]["value"] == 2);
    CHECK(j[0]["lower_bound"] == 1);
    CHECK(j[0]["witness"] == json::array({1, 3}));
    CHECK(j[0]["orbits_tested"].get<std::uint64_t>() > 0);

    // honest report when the cap stops the search
    const auto capped = run("fd-exact --p 7 --k 2 --size-cap 2");
    const json c = json::parse(capped.out);
    CHECK(c[0]["value"] == "infinite within cap");
}

TEST_CASE("scan grid") {
    const auto r = run("scan --p 3..13 --k 2..3");
    REQUIRE(r.code == 0);
    std::size_t rows = 0;
    for (char ch : r.out)
        if (ch == '\n') ++rows;
    CHECK(rows == 11); // header + 5 primes x 2 values of k
    CHECK(r.out.find("3,3,1,1,\"1\"\r\n") != std::string::npos);
    CHECK(r.out.find("13,3,3,2,\"1,3,5\"\r\n") != std::string::npos);
}

TEST_CASE("construct guard failures") {
    const auto guard = run("construct --p 101 --k 4 --seed 1");
    CHECK(guard.code == 2);
    CHECK(guard.err.find("1931") != std::string::npos);

    CHECK(run("construct --p 10007 --k 4 --C 8 --seed 1").code == 2);
    CHECK(run("construct --p 10006 --k 4 --seed 1").code == 2);   // composite

    // tier not admissible at this size
    CHECK(run("construct --p 1009 --k 4 --C 3 --seed 1 --test-mode --tier exact").code == 2);
}

TEST_CASE("construct cover failure exits with 4") {
    const auto r = run("construct --p 61 --k 4 --seed 1 --test-mode");
    CHECK(r.code == 4);
    CHECK(r.err.find("cover search failed") != std::string::npos);
}

TEST_CASE("construct, write, verify round trip") {
    const fs::path cert = scratch_dir() / "cert43.json";
    const auto r = run("construct --p 43 --k 4 --C 1.5 --seed 42 --test-mode --out \"" +
                       cert.string() + "\"");
    REQUIRE(r.code == 0);
    REQUIRE(fs::exists(cert));

    const std::string text = slurp(cert);
    const json j = json::parse(text);
    CHECK(j["schema"] == "davenport-cert/1");
    CHECK(j["p"] == 43);
    CHECK(j["weights"].size() == 24);
    CHECK(j["digest"] == "fnv1a64:6cf8a1b11275066a");
    CHECK(j["verification"]["pass"] == true);
    CHECK(j["verification"]["tier"] == "exact");

    const fs::path manifest = scratch_dir() / "cert43.json.manifest.json";
    REQUIRE(fs::exists(manifest));
    const json m = json::parse(slurp(manifest));
    CHECK(m["schema"] == "davlab-manifest/1");
    CHECK(m["arguments"]["p"] == "43");
    CHECK(m["result_digest"].get<std::string>().rfind("fnv1a64:", 0) == 0);

    const auto v = run("verify --cert \"" + cert.string() + "\"");
    REQUIRE(v.code == 0);
    const json rep = json::parse(v.out);
    CHECK(rep["pass"] == true);
    CHECK(rep["tier"] == "exact");

    const auto vg = run("verify --cert \"" + cert.string() + "\" --tier goodness-full");
    CHECK(vg.code == 0);
    CHECK(json::parse(vg.out)["min_core_sizes"] == json::array({17}));

    // flip one digest character: the file no longer verifies
    std::string tampered = text;
    const auto pos = tampered.find("fnv1a64:");
    REQUIRE(pos != std::string::npos);
    tampered[pos + 8] = tampered[pos + 8] == '0' ? '1' : '0';
    const fs::path bad = scratch_dir() / "cert43_bad.json";
    std::ofstream(bad, std::ios::binary) << tampered;
    const auto vb = run("verify --cert \"" + bad.string() + "\"");
    CHECK(vb.code == 3);
    CHECK(json::parse(vb.out)["detail"].get<std::string>().find("digest") != std::string::npos);

    CHECK(run("verify --cert \"" + (scratch_dir() / "missing.json").string() + "\"").code == 2);
}

TEST_CASE("construct failing verification exits with 3") {
    // C = 1 keeps the intervals so short that the cores cannot multiply past
    // p: the certificate records the failed check and the exit code says so.
    const auto r = run("construct --p 10007 --k 4 --C 1 --seed 42 --test-mode");
    CHECK(r.code == 3);
    CHECK(r.err.find("did not pass") != std::string::npos);
    CHECK(r.err.find("core product") != std::string::npos);
    const json cert = json::parse(r.out);
    CHECK(cert["verification"]["pass"] == false);
    CHECK(cert["verification"]["detail"].get<std::string>().find("<= p") != std::string::npos);
}

TEST_CASE("certificates are byte-identical across runs and thread counts") {
    const fs::path a = scratch_dir() / "det_a.json";
    const fs::path b = scratch_dir() / "det_b.json";
    const fs::path c = scratch_dir() / "det_c.json";
    const std::string args = "construct --p 59 --k 5 --C 1.2 --seed 7 --test-mode --out ";
    REQUIRE(run(args + "\"" + a.string() + "\"").code == 0);
    REQUIRE(run(args + "\"" + b.string() + "\"").code == 0);
    REQUIRE(run(args + "\"" + c.string() + "\" --threads 4", "DAVLAB_THREADS=3 ").code == 0);
    const std::string ta = slurp(a);
    CHECK(!ta.empty());
    CHECK(ta == slurp(b));
    CHECK(ta == slurp(c));
}

TEST_CASE("output files land where requested") {
    const fs::path out = scratch_dir() / "table.csv";
    const auto r = run("fd-exact --p 3..7 --k 2 --format csv --out \"" + out.string() + "\"");
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    const std::string text = slurp(out);
    CHECK(text.rfind("p,k,value,lower_bound,witness\r\n", 0) == 0);
    CHECK(fs::exists(scratch_dir() / "table.csv.manifest.json"));
}
