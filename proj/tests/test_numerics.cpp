#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>

#include "omdsc/numerics/alpha.hpp"
#include "omdsc/numerics/error.hpp"
#include "omdsc/numerics/residue.hpp"
#include "omdsc/numerics/scalar.hpp"
#include "support.hpp"

using namespace omdsc;

namespace {

// Oracle: walk forward from lo to hi collecting elements.
std::set<std::int64_t> walk(std::int64_t lo, std::int64_t hi, std::int64_t k) {
    std::set<std::int64_t> out;
    std::int64_t i = lo;
    while (true) {
        out.insert(i);
        if (i == hi) break;
        i = (i + 1) % k;
    }
    return out;
}

}  // namespace

TEST_CASE("residue examples") {
    CHECK(residue(13, 10) == 3);
    CHECK(residue(10, 10) == 0);
    CHECK(residue(-3, 10) == 7);
    CHECK_THROWS_AS(residue(1, 0), Error);
    try {
        residue(5, 0);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InvalidModulus);
    }
    CHECK(Residue(-1, 4).value() == 3);
}

TEST_CASE("residue is idempotent and k-periodic") {
    testing::Rng rng(11);
    for (int n = 0; n < 5000; ++n) {
        const auto x = testing::uniform(rng, -100000, 100000);
        const auto k = testing::uniform(rng, 1, 500);
        const auto r = residue(x, k);
        CHECK(r >= 0);
        CHECK(r < k);
        CHECK(residue(r, k) == r);
        CHECK(residue(x + k, k) == r);
    }
}

TEST_CASE("interval examples") {
    CyclicInterval wrap(8, 2, 10);
    CHECK(interval_size(wrap) == 5);
    CHECK(interval_contains(wrap, Residue(0, 10)));
    CHECK_FALSE(interval_contains(wrap, Residue(5, 10)));
    CHECK(interval_size(CyclicInterval(3, 3, 10)) == 1);
    CHECK(interval_size(CyclicInterval(0, 9, 10)) == 10);
    for (int x = 0; x < 10; ++x) CHECK(CyclicInterval(0, 9, 10).contains(x));
    CHECK_THROWS_AS(wrap.contains(Residue(1, 11)), Error);
    CHECK_THROWS_AS(CyclicInterval(Residue(1, 10), Residue(2, 11)), Error);
}

TEST_CASE("interval size and membership agree with a walk, exhaustive k <= 64") {
    for (std::int64_t k = 1; k <= 64; ++k) {
        for (std::int64_t l = 0; l < k; ++l) {
            for (std::int64_t r = 0; r < k; ++r) {
                CyclicInterval iv(l, r, k);
                const auto set = walk(l, r, k);
                REQUIRE(iv.size() == residue(r - l, k) + 1);
                REQUIRE(iv.size() == static_cast<std::int64_t>(set.size()));
                if (k <= 32) {
                    for (std::int64_t x = 0; x < k; ++x) REQUIRE(iv.contains(x) == (set.count(x) == 1));
                }
            }
        }
    }
}

TEST_CASE("interval complement, exhaustive k <= 32") {
    for (std::int64_t k = 2; k <= 32; ++k) {
        for (std::int64_t l = 0; l < k; ++l) {
            for (std::int64_t r = 0; r < k; ++r) {
                CyclicInterval iv(l, r, k);
                if (iv.size() == k) continue;
                CyclicInterval co(residue(r + 1, k), residue(l - 1, k), k);
                CHECK(iv.size() + co.size() == k);
                for (std::int64_t x = 0; x < k; ++x) REQUIRE((iv.contains(x) != co.contains(x)));
            }
        }
    }
}

TEST_CASE("for_each visits lo..hi in order") {
    std::vector<std::int64_t> seen;
    CyclicInterval(8, 2, 10).for_each([&](std::int64_t i) { seen.push_back(i); });
    CHECK(seen == std::vector<std::int64_t>{8, 9, 0, 1, 2});
    CHECK(CyclicInterval(8, 2, 10).offset(1) == 3);
}

TEST_CASE("solve_alpha reproduces exact powers") {
    const auto a27 = solve_alpha(27);
    CHECK(std::fabs(a27.alpha_exact - 3.0) <= 1e-12);
    CHECK(a27.alpha_used == Rational(4));
    const auto a256 = solve_alpha(256);
    CHECK(std::fabs(a256.alpha_exact - 4.0) <= 1e-12);
    CHECK(a256.alpha_used == Rational(4));
    const auto a3125 = solve_alpha(3125);
    CHECK(std::fabs(a3125.alpha_exact - 5.0) <= 1e-12);
    CHECK(Rational(5) <= a3125.alpha_used);
    CHECK(a3125.alpha_used - Rational(5) < Rational(1, 1 << 20));
    CHECK_THROWS_AS(solve_alpha(1), Error);
}

TEST_CASE("solve_alpha invariants and monotonicity") {
    double prev = 0;
    for (std::int64_t k = 2; k <= 5000; k += (k < 100 ? 1 : 37)) {
        const auto a = solve_alpha(k);
        CHECK(a.alpha_exact >= prev);
        prev = a.alpha_exact;
        const double used = a.alpha_used.to_double();
        CHECK(used >= a.alpha_exact);
        CHECK(used >= 4.0);
        CHECK(used * std::log(used) >= std::log(static_cast<double>(k)) * (1 - 1e-9));
        // multiple of 2^-20
        CHECK((a.alpha_used * Rational(1 << 20)).is_integer());
    }
    CHECK_THROWS_AS(alpha_with_override(256, Rational(3)), Error);
    CHECK(alpha_with_override(256, Rational(9, 2)).alpha_used == Rational(9, 2));
}

TEST_CASE("rational arithmetic has no drift") {
    testing::Rng rng(5);
    for (int n = 0; n < 2000; ++n) {
        const Rational a = testing::random_rational(rng);
        const Rational b = testing::random_rational(rng);
        CHECK((a + b) - b == a);
        if (a != Rational(0)) CHECK(a * (Rational(1) / a) == Rational(1));
    }
}

TEST_CASE("rational canonical form and text") {
    CHECK(Rational(3, 6).str() == "1/2");
    CHECK(Rational(3, -6).str() == "-1/2");
    CHECK(Rational(4).str() == "4/1");
    CHECK(Rational::parse("6/4") == Rational(3, 2));
    CHECK(Rational::parse("0.125") == Rational(1, 8));
    CHECK(Rational::parse("-7") == Rational(-7));
    CHECK(Rational::from_double(0.375) == Rational(3, 8));
    CHECK_THROWS_AS(Rational::parse("1/0"), Error);
    CHECK_THROWS_AS(Rational::parse("abc"), Error);
    CHECK(Rational(7, 2).floor() == 3);
    CHECK(Rational(-7, 2).floor() == -4);
    CHECK(Rational(7, 2).ceil() == 4);
}

TEST_CASE("float text round-trips") {
    for (double x : {0.0, 0.1, 1.0 / 3.0, 12345.678, 2.5e-7}) {
        CHECK(NumTraits<double>::parse(NumTraits<double>::str(x)) == x);
    }
    CHECK(NumTraits<double>::parse("1/4") == 0.25);
}

TEST_CASE("competitive ratio") {
    CHECK(competitive_ratio(Rational(0), Rational(0)).value == Rational(1));
    CHECK(competitive_ratio(Rational(2), Rational(1)).value == Rational(2));
    CHECK(competitive_ratio(Rational(3), Rational(0)).infinite);
    CHECK(competitive_ratio(3.0, 0.0).str() == "inf");
    CHECK_THROWS_AS(competitive_ratio(Rational(-1), Rational(1)), Error);
}

TEST_CASE("backend names") {
    CHECK(parse_backend("exact") == Backend::Exact);
    CHECK(parse_backend("float") == Backend::Float);
    CHECK_THROWS_AS(parse_backend("quad"), Error);
}
