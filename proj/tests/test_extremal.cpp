#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>

#include "davlab/davenport.hpp"
#include "davlab/extremal.hpp"

using namespace davlab;

TEST_CASE("canonical forms") {
    const Modulus m(5);
    CHECK(canonical_form(WeightSet(m, {2, 4})) == std::vector<std::uint32_t>{1, 2});
    CHECK(is_canonical(WeightSet(m, {1, 2})));
    CHECK_FALSE(is_canonical(WeightSet(m, {2, 4})));

    const Modulus m7(7);
    // {1,3,4} dilates to the lexicographically smaller {1,2,6} (by 1/3 = 5)
    CHECK_FALSE(is_canonical(WeightSet(m7, {1, 3, 4})));
    CHECK(canonical_form(WeightSet(m7, {1, 3, 4})) == std::vector<std::uint32_t>{1, 2, 6});

    // idempotent, always contains 1
    for (std::uint32_t mask = 1; mask < 64; ++mask) {
        std::vector<std::uint32_t> ws;
        for (std::uint32_t w = 1; w < 7; ++w)
            if (mask & (1u << (w - 1))) ws.push_back(w);
        const auto canon = canonical_form(WeightSet(m7, ws));
        CHECK(canon.front() == 1);
        CHECK(canonical_form(WeightSet(m7, canon)) == canon);
    }

    CHECK_THROWS_AS(canonical_form(WeightSet(Modulus(6), {1, 5})), std::domain_error);
}

TEST_CASE("extremal values for k = 2") {
    const std::map<std::uint32_t, std::uint32_t> golden{
        {3, 2}, {5, 3}, {7, 3}, {11, 4}, {13, 4}, {17, 5}, {19, 5}};
    for (const auto& [p, want] : golden) {
        const auto r = fd_exact(p, 2);
        REQUIRE(r.value.has_value());
        CHECK(*r.value == want);
        CHECK(r.witness.size() == want);
        CHECK(*r.value >= fd_lower_bound(p, 2));

        // witness must actually satisfy the bound, in canonical form
        const WeightSet a(Modulus(p), r.witness);
        CHECK(satisfies_bound(a, 2));
        CHECK(is_canonical(a));
    }
    CHECK(fd_exact(7, 2).witness == std::vector<std::uint32_t>{1, 2, 5});
}

TEST_CASE("extremal values for k = 3") {
    const std::map<std::uint32_t, std::uint32_t> golden{{5, 2}, {7, 2}, {11, 3}, {13, 3}};
    for (const auto& [p, want] : golden) {
        const auto r = fd_exact(p, 3);
        REQUIRE(r.value.has_value());
        CHECK(*r.value == want);
        const WeightSet a(Modulus(p), r.witness);
        CHECK(satisfies_bound(a, 3));
    }
}

TEST_CASE("quotient oracle agrees with the search for k = 2") {
    for (std::uint32_t p : {3u, 5u, 7u, 11u, 13u, 17u, 19u, 23u}) {
        const auto direct = fd_exact(p, 2);
        const auto oracle = fd_quotient_oracle(p);
        REQUIRE(direct.value.has_value());
        REQUIRE(oracle.value.has_value());
        CHECK(*direct.value == *oracle.value);
        CHECK(direct.witness == oracle.witness);
    }
}

TEST_CASE("value is monotone nonincreasing in k") {
    for (std::uint32_t p : {7u, 11u, 13u}) {
        std::uint32_t prev = p; // sentinel upper bound
        for (std::uint32_t k = 2; k <= 4; ++k) {
            const auto r = fd_exact(p, k);
            REQUIRE(r.value.has_value());
            CHECK(*r.value <= prev);
            prev = *r.value;
        }
    }
}

// Once k reaches floor(log2 p) + 1 the pair {1, -1} works, so f(p, k) = 2
// for every such k < p.
TEST_CASE("stabilization at two for large k") {
    for (std::uint32_t p : {5u, 7u, 11u, 13u}) {
        std::uint32_t lg = 0, v = p;
        while (v >>= 1) ++lg;
        for (std::uint32_t k : {lg + 1, p - 1}) {
            const auto r = fd_exact(p, k);
            REQUIRE(r.value.has_value());
            CHECK(*r.value == 2);
        }
    }
}

TEST_CASE("caps end the search honestly") {
    // k = 1 requires a zero weighted singleton sum, impossible over F_p
    const auto r = fd_exact(7, 1);
    CHECK_FALSE(r.value.has_value());
    CHECK(r.witness.empty());
    CHECK(r.orbits_tested > 0);

    // explicit cap below the true value
    const auto capped = fd_exact(7, 2, 2);
    CHECK_FALSE(capped.value.has_value());
    CHECK(capped.size_cap == 2);
}

TEST_CASE("search respects thread count without changing results") {
    const auto r1 = fd_exact(13, 2, 0, 1);
    const auto r4 = fd_exact(13, 2, 0, 4);
    REQUIRE(r1.value.has_value());
    CHECK(*r1.value == *r4.value);
    CHECK(r1.witness == r4.witness);
    CHECK(r1.orbits_tested == r4.orbits_tested);
}

TEST_CASE("lower bound is exact-integer") {
    CHECK(fd_lower_bound(7, 2) == 2);   // ceil(sqrt 7) - 1
    CHECK(fd_lower_bound(11, 2) == 3);
    CHECK(fd_lower_bound(9973, 2) == 99);
    CHECK(fd_lower_bound(8, 3) == 1);
    CHECK(fd_lower_bound(9, 2) == 2);   // 3^2 = 9 exactly
}
