#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "davlab/zmod.hpp"

using namespace davlab;

TEST_CASE("modulus arithmetic") {
    const Modulus m(7);
    CHECK(m.n() == 7);
    CHECK(m.prime());
    CHECK(m.reduce(-1) == 6);
    CHECK(m.reduce(15) == 1);
    CHECK(m.add(5, 4) == 2);
    CHECK(m.sub(2, 5) == 4);
    CHECK(m.mul(3, 5) == 1);
    CHECK(m.neg(3) == 4);
    CHECK(m.neg(0) == 0);
    CHECK(m.pow(3, 6) == 1);
    CHECK(m.pow(3, 0) == 1);
    CHECK_THROWS_AS(Modulus(1), std::invalid_argument);
    CHECK_THROWS_AS(Modulus(0), std::invalid_argument);
}

TEST_CASE("modular inverses") {
    const Modulus p(97);
    const auto table = p.inverse_table();
    for (std::uint32_t a = 1; a < 97; ++a) {
        CHECK(p.inv(a) == table[a]);
        CHECK(p.mul(a, table[a]) == 1);
    }

    const Modulus composite(12);
    CHECK(composite.inv(5) == 5); // 5 * 5 = 25 = 1 mod 12
    CHECK_THROWS_AS(composite.inv(4), std::domain_error);
    CHECK_THROWS_AS(composite.inv(0), std::domain_error);
    CHECK_THROWS_AS(composite.inverse_table(), std::domain_error);
}

TEST_CASE("residues are bound to their modulus") {
    const Modulus m5(5), m7(7);
    const Residue a(m5, 3), b(m5, 4);
    CHECK((a + b).value() == 2);
    CHECK((a - b).value() == 4);
    CHECK((a * b).value() == 2);
    CHECK((-a).value() == 2);
    CHECK_THROWS_AS(a + Residue(m7, 1), std::invalid_argument);
}

TEST_CASE("residue set basics") {
    const Modulus m(11);
    ResidueSet s(m);
    CHECK(s.empty());
    s.insert(3);
    s.insert(3);
    s.insert(7);
    CHECK(s.size() == 2);
    CHECK(s.contains(3));
    CHECK_FALSE(s.contains(4));
    s.erase(3);
    CHECK(s.size() == 1);

    const auto full = ResidueSet::full(m);
    CHECK(full.size() == 11);
    const auto single = ResidueSet::singleton(m, 5);
    CHECK(single.members() == std::vector<std::uint32_t>{5});

    auto u = ResidueSet::from_values(m, {1, 2, 9});
    auto v = ResidueSet::from_values(m, {2, 3});
    auto both = u;
    both |= v;
    CHECK(both.members() == std::vector<std::uint32_t>{1, 2, 3, 9});
    auto meet = u;
    meet &= v;
    CHECK(meet.members() == std::vector<std::uint32_t>{2});
    CHECK(meet.is_subset_of(u));
    CHECK_FALSE(u.is_subset_of(v));
    CHECK_THROWS_AS(ResidueSet::from_values(m, {11}), std::invalid_argument);
}

TEST_CASE("or_rotated agrees with per-element rotation") {
    std::mt19937 gen(12345);
    for (std::uint32_t n : {5u, 64u, 65u, 127u, 128u, 499u}) {
        const Modulus m(n);
        std::uniform_int_distribution<std::uint32_t> val(0, n - 1);
        for (int rep = 0; rep < 50; ++rep) {
            ResidueSet base(m), other(m);
            const int fill = 1 + static_cast<int>(gen() % n);
            for (int i = 0; i < fill; ++i) {
                base.insert(val(gen));
                other.insert(val(gen));
            }
            const std::uint32_t shift = val(gen);

            ResidueSet got = base;
            got.or_rotated(other, shift);

            ResidueSet want = base;
            for (std::uint32_t v : other.members()) want.insert(m.add(v, shift));
            CHECK(got == want);
        }
    }
}

TEST_CASE("dilation") {
    const Modulus m(7);
    const auto s = ResidueSet::from_values(m, {1, 2, 3});
    CHECK(dilate(s, 3u).members() == std::vector<std::uint32_t>{2, 3, 6});
    CHECK(dilate(s, 1u) == s);
    CHECK(dilate(s, 0u).members() == std::vector<std::uint32_t>{0});
    CHECK(dilate(ResidueSet(m), 0u).empty());

    // units preserve cardinality
    std::mt19937 gen(7);
    const Modulus p(101);
    for (int rep = 0; rep < 20; ++rep) {
        ResidueSet r(p);
        for (int i = 0; i < 30; ++i) r.insert(gen() % 101);
        const std::uint32_t c = 1 + gen() % 100;
        CHECK(dilate(r, c).size() == r.size());
    }
}

TEST_CASE("sumsets") {
    const Modulus m(7);
    const auto a = ResidueSet::from_values(m, {1, 2});
    const auto b = ResidueSet::from_values(m, {0, 5});
    CHECK(sumset(a, b).members() == std::vector<std::uint32_t>{0, 1, 2, 6});
    CHECK(sumset(a, ResidueSet(m)).empty());

    std::mt19937 gen(99);
    for (std::uint32_t n : {12u, 64u, 101u}) {
        const Modulus mm(n);
        for (int rep = 0; rep < 30; ++rep) {
            ResidueSet x(mm), y(mm);
            for (std::uint32_t i = 0; i < 1 + gen() % n; ++i) x.insert(gen() % n);
            for (std::uint32_t i = 0; i < 1 + gen() % n; ++i) y.insert(gen() % n);

            ResidueSet naive(mm);
            for (std::uint32_t u : x.members())
                for (std::uint32_t v : y.members()) naive.insert(mm.add(u, v));
            CHECK(sumset(x, y) == naive);
            CHECK(sumset(x, y) == sumset(y, x));
        }
    }
}

TEST_CASE("negation and difference sets") {
    const Modulus m(9);
    const auto s = ResidueSet::from_values(m, {1, 3});
    CHECK(negate(s).members() == std::vector<std::uint32_t>{6, 8});
    CHECK(difference_set(s).members() == std::vector<std::uint32_t>{0, 2, 7});
}

TEST_CASE("quotient sets") {
    const Modulus m5(5);
    const auto s = ResidueSet::from_values(m5, {1, 2});
    CHECK(quotient_set(s, s).members() == std::vector<std::uint32_t>{1, 2, 3});

    const Modulus m7(7);
    const auto a = ResidueSet::from_values(m7, {1, 2, 5});
    auto q = quotient_set(a, a);
    CHECK(q.members() == std::vector<std::uint32_t>{1, 2, 3, 4, 5, 6});

    const Modulus m12(12);
    CHECK_THROWS_AS(quotient_set(ResidueSet::from_values(m12, {1}),
                                 ResidueSet::from_values(m12, {1})),
                    std::domain_error);
}

// |A| |B| > p forces every c in F_p to be a ratio of differences: the p + 1
// values a + c b (a in A, b in B) must collide.
TEST_CASE("difference quotients cover the field when |A||B| > p") {
    std::mt19937 gen(4242);
    const std::vector<std::uint32_t> primes{5, 7, 11, 13, 31, 53, 101};
    for (int rep = 0; rep < 200; ++rep) {
        const std::uint32_t p = primes[gen() % primes.size()];
        const Modulus m(p);
        ResidueSet a(m), b(m);
        while (static_cast<std::uint64_t>(a.size()) * b.size() <= p) {
            a.insert(gen() % p);
            b.insert(gen() % p);
        }
        const auto q = quotient_set(difference_set(a), difference_set(b));
        CHECK(q == ResidueSet::full(m));
    }
}

TEST_CASE("remove_zero") {
    const Modulus m(5);
    auto s = ResidueSet::from_values(m, {0, 1, 4});
    const auto t = remove_zero(s);
    CHECK(t.members() == std::vector<std::uint32_t>{1, 4});
    CHECK(remove_zero(t) == t);
    CHECK(s.contains(0)); // original untouched
}

TEST_CASE("interval materialization") {
    const Modulus m(11);
    const auto full = materialize_interval(m, {Residue(m, 1), 3, IntervalKind::full});
    CHECK(full.set.members() == std::vector<std::uint32_t>{0, 1, 2, 3, 8, 9, 10});
    CHECK_FALSE(full.wrapped);

    const auto wrap = materialize_interval(m, {Residue(m, 1), 6, IntervalKind::full});
    CHECK(wrap.wrapped);
    CHECK(wrap.set == ResidueSet::full(m));

    const auto half = materialize_interval(m, {Residue(m, 2), 3, IntervalKind::half});
    CHECK(half.set.members() == std::vector<std::uint32_t>{0, 2, 4, 6});
    const auto pos = materialize_interval(m, {Residue(m, 2), 3, IntervalKind::positive});
    CHECK(pos.set.members() == std::vector<std::uint32_t>{2, 4, 6});

    CHECK_THROWS_AS(materialize_interval(m, {Residue(m, 0), 3, IntervalKind::full}),
                    std::invalid_argument);
    CHECK_THROWS_AS(materialize_interval(m, {Residue(m, 1), 0, IntervalKind::full}),
                    std::invalid_argument);
}

TEST_CASE("symmetric core of a single interval is its positive half") {
    const Modulus m(101);
    const auto sc = extract_symmetric_core(m, {{Residue(m, 1), 10, IntervalKind::full}}, false);
    CHECK(sc.pattern == 0);
    CHECK(sc.core.size() == 11); // [0, 10]
    for (std::uint32_t v = 0; v <= 10; ++v) CHECK(sc.core.contains(v));
}

TEST_CASE("symmetric cores: cardinality and difference containment") {
    std::mt19937 gen(31337);
    for (std::uint32_t r : {1u, 2u, 3u, 4u}) {
        for (std::uint32_t p : {13u, 61u, 211u, 499u}) {
            const Modulus m(p);
            for (int rep = 0; rep < 40; ++rep) {
                const std::uint32_t radius = 1 + gen() % std::min(10u, (p - 1) / 4);
                std::vector<IntervalSpec> specs;
                for (std::uint32_t i = 0; i < r; ++i)
                    specs.push_back({Residue(m, 1 + gen() % (p - 1)), radius, IntervalKind::full});
                const bool with_unit = gen() % 2 == 0;

                ResidueSet total = with_unit
                    ? materialize_interval(m, {Residue(m, 1), radius, IntervalKind::full}).set
                    : materialize_interval(m, specs[0]).set;
                for (std::size_t i = with_unit ? 0 : 1; i < specs.size(); ++i)
                    total = sumset(total, materialize_interval(m, specs[i]).set);

                const auto sc = extract_symmetric_core(m, specs, with_unit);
                const std::uint32_t slots = r + (with_unit ? 1 : 0);
                CHECK((static_cast<std::uint64_t>(sc.core.size()) << slots) >= total.size());
                CHECK(sc.core.is_subset_of(total));
                // halves differ by at most a full interval: Y - Y stays inside
                // the symmetric sumset itself
                CHECK(difference_set(sc.core).is_subset_of(total));

                // deterministic: same input, same pattern and core
                const auto sc2 = extract_symmetric_core(m, specs, with_unit);
                CHECK(sc2.pattern == sc.pattern);
                CHECK(sc2.core == sc.core);
            }
        }
    }
}
