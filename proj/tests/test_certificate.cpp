#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <string>

#include "davlab/construction.hpp"

using namespace davlab;

namespace {

ConstructOptions test_opts() {
    ConstructOptions o;
    o.test_mode = true;
    return o;
}

Certificate small_cert() {
    return construct_weight_set(43, 4, Rational{3, 2}, 42, test_opts());
}

} // namespace

TEST_CASE("json round trip preserves every field") {
    const Certificate cert = small_cert();
    const std::string text = certificate_to_json(cert);
    const Certificate back = certificate_from_json(text);

    CHECK(back.p == cert.p);
    CHECK(back.k_total == cert.k_total);
    CHECK(back.scale == cert.scale);
    CHECK(back.interval_radius == cert.interval_radius);
    CHECK(back.seed == cert.seed);
    CHECK(back.test_mode == cert.test_mode);
    REQUIRE(back.stages.size() == cert.stages.size());
    for (std::size_t r = 0; r < cert.stages.size(); ++r) {
        CHECK(back.stages[r].dim == cert.stages[r].dim);
        CHECK(back.stages[r].mode == cert.stages[r].mode);
        CHECK(back.stages[r].ys == cert.stages[r].ys);
        CHECK(back.stages[r].xs == cert.stages[r].xs);
        CHECK(back.stages[r].redraws == cert.stages[r].redraws);
        CHECK(back.stages[r].bad_size_known == cert.stages[r].bad_size_known);
        CHECK(back.stages[r].bad_size == cert.stages[r].bad_size);
        CHECK(back.stages[r].normal_known == cert.stages[r].normal_known);
        CHECK(back.stages[r].normal_count == cert.stages[r].normal_count);
    }
    CHECK(back.weights == cert.weights);
    CHECK(back.wrapped == cert.wrapped);
    CHECK(back.accounting_bound == cert.accounting_bound);
    REQUIRE(back.bounds.size() == cert.bounds.size());
    for (std::size_t i = 0; i < cert.bounds.size(); ++i) {
        CHECK(back.bounds[i].name == cert.bounds[i].name);
        CHECK(back.bounds[i].lhs == cert.bounds[i].lhs);
        CHECK(back.bounds[i].rhs == cert.bounds[i].rhs);
        CHECK(back.bounds[i].holds == cert.bounds[i].holds);
    }
    CHECK(back.verification.tier == cert.verification.tier);
    CHECK(back.verification.pass == cert.verification.pass);
    CHECK(back.verification.checked == cert.verification.checked);
    CHECK(back.verification.total == cert.verification.total);
    CHECK(back.verification.detail == cert.verification.detail);
    CHECK(back.verification.failure_witness == cert.verification.failure_witness);
    CHECK(back.verification.min_core_sizes == cert.verification.min_core_sizes);
    CHECK(back.digest == cert.digest);

    // the serialization is canonical: reserializing reproduces the bytes
    CHECK(certificate_to_json(back) == text);
    CHECK(text.back() == '\n');
}

TEST_CASE("file round trip") {
    const Certificate cert = small_cert();
    const auto path =
        (std::filesystem::temp_directory_path() / "davlab_test_cert.json").string();
    save_certificate(cert, path);
    const Certificate back = load_certificate(path);
    CHECK(certificate_to_json(back) == certificate_to_json(cert));
    std::remove(path.c_str());

    CHECK_THROWS_AS(load_certificate("/nonexistent/dir/cert.json"), std::runtime_error);
}

TEST_CASE("digest format and stability") {
    const Certificate cert = small_cert();
    REQUIRE(cert.digest.size() == 8 + 16);
    CHECK(cert.digest.substr(0, 8) == "fnv1a64:");
    for (char c : cert.digest.substr(8))
        CHECK(((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f')));
    CHECK(cert.digest == "fnv1a64:6cf8a1b11275066a");

    // recomputing over the serialized form agrees
    CHECK(certificate_digest(cert) == cert.digest);
    Certificate copy = cert;
    copy.digest.clear();
    CHECK(certificate_digest(copy) == cert.digest);
}

TEST_CASE("verify accepts the genuine certificate") {
    const Certificate cert = small_cert();
    const auto stored = verify_certificate(cert);
    CHECK(stored.pass);
    CHECK(stored.tier == VerifyTier::exact);

    const auto cond = verify_certificate(cert, VerifyTier::condition_exact);
    CHECK(cond.pass);
    CHECK(cond.total == 1764);

    const auto good = verify_certificate(cert, VerifyTier::goodness_full);
    CHECK(good.pass);
    CHECK(good.min_core_sizes == std::vector<std::uint64_t>{17});
}

TEST_CASE("tampered weights fail the digest check") {
    Certificate cert = small_cert();
    cert.weights.push_back(40);
    const auto rep = verify_certificate(cert);
    CHECK_FALSE(rep.pass);
    CHECK(rep.detail.find("digest") != std::string::npos);
}

TEST_CASE("tampered weights with a fresh digest fail assembly equality") {
    Certificate cert = small_cert();
    // swap in a value the assembly cannot produce, keeping the set sorted
    REQUIRE(!cert.weights.empty());
    std::vector<std::uint32_t> tampered;
    for (std::uint32_t v = 1; v < 43 && tampered.size() < cert.weights.size(); ++v)
        tampered.push_back(v);
    cert.weights = tampered;
    cert.digest = certificate_digest(cert);
    const auto rep = verify_certificate(cert);
    CHECK_FALSE(rep.pass);
    CHECK(rep.detail.find("weight") != std::string::npos);
}

TEST_CASE("dropping a cover block fails cover validity") {
    Certificate cert = small_cert();
    REQUIRE(cert.stages.size() == 1);
    REQUIRE(cert.stages[0].ys.size() == 3);
    cert.stages[0].ys.pop_back();
    cert.stages[0].xs.pop_back();
    cert.digest = certificate_digest(cert);
    const auto rep = verify_certificate(cert);
    CHECK_FALSE(rep.pass);
    CHECK(rep.detail.find("cover") != std::string::npos);
}

TEST_CASE("tampered verification counters are caught") {
    Certificate cert = small_cert();
    cert.verification.checked += 1;
    cert.digest = certificate_digest(cert);
    const auto rep = verify_certificate(cert);
    CHECK_FALSE(rep.pass);
    CHECK(rep.detail.find("stored verification report") != std::string::npos);
}

TEST_CASE("malformed input") {
    CHECK_THROWS_AS(certificate_from_json("{not json"), std::runtime_error);
    CHECK_THROWS_AS(certificate_from_json("{}"), std::runtime_error); // missing fields

    const Certificate cert = small_cert();
    std::string text = certificate_to_json(cert);
    const auto pos = text.find("davenport-cert/1");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 16, "davenport-cert/9");
    CHECK_THROWS_AS(certificate_from_json(text), ParamError);
}

TEST_CASE("inadmissible tier overrides are rejected") {
    const auto cert = construct_weight_set(499, 8, Rational{1, 1}, 3, test_opts());
    CHECK(cert.verification.tier == VerifyTier::goodness_sampled);
    CHECK_THROWS_AS(verify_certificate(cert, VerifyTier::exact), TierError);
    CHECK_THROWS_AS(verify_certificate(cert, VerifyTier::condition_exact), TierError);
    const auto rep = verify_certificate(cert, VerifyTier::goodness_sampled);
    CHECK(rep.pass);
}
