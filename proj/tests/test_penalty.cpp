#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <functional>
#include <set>

#include "omdsc/engine/engine.hpp"
#include "omdsc/numerics/error.hpp"
#include "omdsc/penalty/penalty.hpp"
#include "support.hpp"

using namespace omdsc;

namespace {

// Oracle: every sum of zeros (with repetition) up to limit, by explicit DFS.
std::set<std::int64_t> sums_of(const std::vector<std::int64_t>& zeros, std::int64_t limit) {
    std::set<std::int64_t> out;
    std::function<void(std::int64_t, std::size_t)> go = [&](std::int64_t total, std::size_t from) {
        for (std::size_t i = from; i < zeros.size(); ++i) {
            const std::int64_t t = total + zeros[i];
            if (t > limit) continue;
            out.insert(t);
            go(t, i);
        }
    };
    go(0, 0);
    return out;
}

// Oracle: minimum over all integer partitions of n, enumerated recursively.
Rational partition_min(const PenaltyFunction& f, std::int64_t n, std::int64_t max_part) {
    if (n == 0) return Rational(0);
    Rational best(1000000);
    for (std::int64_t p = std::min(n, max_part); p >= 1; --p) {
        const Rational c = f(p) + partition_min(f, n - p, p);
        if (c < best) best = c;
    }
    return best;
}

std::vector<bool> table_of(std::initializer_list<int> xs) {
    std::vector<bool> v;
    for (int x : xs) v.push_back(x != 0);
    return v;
}

}  // namespace

TEST_CASE("zero_penalty_set examples") {
    auto f = PenaltyFunction::from_zeros({2, 3});
    CHECK(zero_penalty_set(f, 10) == table_of({0, 0, 1, 1, 1, 1, 1, 1, 1, 1, 1}));
    auto one = zero_penalty_set(PenaltyFunction::constant_one(), 10);
    for (std::size_t n = 0; n <= 10; ++n) CHECK_FALSE(one[n]);
    auto f36 = zero_penalty_set(PenaltyFunction::from_zeros({3, 6}), 20);
    for (std::int64_t n = 1; n <= 20; ++n) CHECK(f36[static_cast<std::size_t>(n)] == (n % 3 == 0));
    CHECK_THROWS_AS(zero_penalty_set(PenaltyFunction::ceil_div(3), 10), Error);
}

TEST_CASE("zero_penalty_set matches explicit sum enumeration") {
    testing::Rng rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        auto zeros = testing::random_zeros(rng, 12, 3);
        auto f = PenaltyFunction::from_zeros(zeros);
        const std::int64_t limit = 60;
        auto set = zero_penalty_set(f, limit);
        auto oracle = sums_of(f.zeros(), limit);
        for (std::int64_t n = 1; n <= limit; ++n) {
            REQUIRE(set[static_cast<std::size_t>(n)] == (oracle.count(n) == 1));
        }
    }
}

TEST_CASE("zero_penalty_set is closed under addition") {
    testing::Rng rng(23);
    for (int trial = 0; trial < 60; ++trial) {
        auto f = PenaltyFunction::from_zeros(testing::random_zeros(rng, 15, 3));
        const std::int64_t limit = 200;
        auto set = zero_penalty_set(f, limit);
        for (std::int64_t a = 1; a <= limit; ++a) {
            if (!set[static_cast<std::size_t>(a)]) continue;
            for (std::int64_t b = 1; a + b <= limit; ++b) {
                if (set[static_cast<std::size_t>(b)]) REQUIRE(set[static_cast<std::size_t>(a + b)]);
            }
        }
    }
}

TEST_CASE("classify examples") {
    CHECK(classify(PenaltyFunction::constant_one()).variant == PenaltyClass::Variant::CaseI);
    auto c2 = classify(PenaltyFunction::from_zeros({2, 4}));
    CHECK(c2.variant == PenaltyClass::Variant::CaseII);
    CHECK(c2.k == 2);
    CHECK(classify(PenaltyFunction::from_zeros({2, 3})).variant == PenaltyClass::Variant::CaseIII);
    CHECK_THROWS_AS(classify(PenaltyFunction::linear()), Error);
    CHECK(classify(PenaltyFunction::constant_one()).regime() == "Case (i): 2-competitive (Dooly et al.)");
    CHECK(classify(PenaltyFunction::multiples_of(5)).regime() ==
          "Case (ii), k=5: Theta(log k / log log k)");
    CHECK(classify(PenaltyFunction::from_zeros({2, 3})).regime() == "Case (iii): unbounded");
}

TEST_CASE("classification agrees with the zero-penalty set") {
    testing::Rng rng(29);
    const std::int64_t limit = 240;
    for (int trial = 0; trial < 300; ++trial) {
        auto f = trial % 10 == 0 ? PenaltyFunction::constant_one()
                                 : PenaltyFunction::from_zeros(testing::random_zeros(rng, 12, 3));
        auto c = classify(f);
        auto set = zero_penalty_set(f, limit);
        switch (c.variant) {
            case PenaltyClass::Variant::CaseI:
                for (std::int64_t n = 1; n <= limit; ++n) REQUIRE_FALSE(set[static_cast<std::size_t>(n)]);
                break;
            case PenaltyClass::Variant::CaseII:
                REQUIRE(c.k == f.zeros().front());
                for (std::int64_t n = 1; n <= limit; ++n) {
                    REQUIRE(set[static_cast<std::size_t>(n)] == (n % c.k == 0));
                }
                break;
            case PenaltyClass::Variant::CaseIII: {
                // nonempty, and equal to the multiples of no single k
                for (std::int64_t k = 1; k <= limit; ++k) {
                    bool same = true;
                    for (std::int64_t n = 1; n <= limit && same; ++n) {
                        same = set[static_cast<std::size_t>(n)] == (n % k == 0);
                    }
                    REQUIRE_FALSE(same);
                }
                break;
            }
        }
    }
}

TEST_CASE("effective_penalty examples") {
    auto f = PenaltyFunction::from_zeros({2, 3});
    CHECK(effective_penalty(f, 7) == Rational(0));
    CHECK(effective_penalty(f, 1) == f(1));
    auto c3 = PenaltyFunction::ceil_div(3);
    CHECK(effective_penalty(c3, 7) == Rational(3));
    for (std::int64_t n = 1; n <= 50; ++n) CHECK(effective_penalty(c3, n) == Rational((n + 2) / 3));
    CHECK(effective_penalty(PenaltyFunction::linear(), 9) == Rational(9));
}

TEST_CASE("effective_penalty equals the partition minimum") {
    testing::Rng rng(31);
    for (int trial = 0; trial < 40; ++trial) {
        auto f = testing::random_penalty(rng);
        for (std::int64_t n = 1; n <= 14; ++n) REQUIRE(f.effective(n) == partition_min(f, n, n));
    }
    std::vector<Rational> general{Rational(3), Rational(5), Rational(1), Rational(7)};
    PenaltyFunction g(general, TailRule::constant_value(Rational(4)));
    for (std::int64_t n = 1; n <= 14; ++n) CHECK(g.effective(n) == partition_min(g, n, n));
}

TEST_CASE("effective_penalty is subadditive and binary-valued for binary f") {
    testing::Rng rng(37);
    for (int trial = 0; trial < 40; ++trial) {
        auto f = testing::random_penalty(rng);
        for (std::int64_t a = 1; a < 100; ++a) {
            for (std::int64_t b = 1; a + b <= 100; ++b) {
                REQUIRE(f.effective(a + b) <= f.effective(a) + f.effective(b));
            }
        }
        if (f.binary()) {
            auto set = zero_penalty_set(f, 3000);
            for (std::int64_t n = 1; n <= 3000; ++n) {
                REQUIRE(f.effective(n) == Rational(set[static_cast<std::size_t>(n)] ? 0 : 1));
            }
        }
    }
}

TEST_CASE("penalty JSON round-trip") {
    for (const auto& f : {PenaltyFunction::constant_one(), PenaltyFunction::from_zeros({2, 3}),
                          PenaltyFunction::ceil_div(4), PenaltyFunction::linear(),
                          PenaltyFunction({Rational(0), Rational(60)}, TailRule::constant_value(60))}) {
        CHECK(PenaltyFunction::from_json(f.to_json()) == f);
    }
    auto j = nlohmann::json::parse(R"({"table":[1,"0",1],"tail":"constant_one"})");
    auto f = PenaltyFunction::from_json(j);
    CHECK(f.zeros() == std::vector<std::int64_t>{2});
    CHECK_THROWS_AS(PenaltyFunction::from_json(nlohmann::json::parse(R"({"table":[]})")), Error);
    CHECK_THROWS_AS(PenaltyFunction::from_json(nlohmann::json::parse(R"({"table":[1],"tail":"x"})")), Error);
    CHECK_THROWS_AS(PenaltyFunction({Rational(-1)}, TailRule::constant_one()), Error);
}

TEST_CASE("mode tags") {
    CHECK(PenaltyFunction::from_zeros({3}).binary());
    CHECK_FALSE(PenaltyFunction::ceil_div(3).binary());
    CHECK_FALSE(PenaltyFunction::linear().binary());
}

TEST_CASE("scale_normalize") {
    PenaltyFunction f60({Rational(60), Rational(0)}, TailRule::constant_value(60));
    Instance<Rational> inst(f60);
    inst.add(Rational(0), 1);
    inst.add(Rational(30), 1);
    inst.add(Rational(90), 1);
    inst.finalize();
    auto sc = scale_normalize(f60, inst, Rational(60));
    CHECK(sc.penalty.binary());
    CHECK(sc.instance.arrivals()[1].time == Rational(1, 2));
    CHECK(sc.instance.arrivals()[2].time == Rational(3, 2));

    auto id = scale_normalize(PenaltyFunction::from_zeros({2}), inst, Rational(1));
    CHECK(id.instance.arrivals() == inst.arrivals());

    PenaltyFunction mixed({Rational(60), Rational(30)}, TailRule::constant_value(60));
    try {
        scale_normalize(mixed, inst, Rational(60));
        FAIL("expected not-scalable");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NotScalable);
    }
}

TEST_CASE("scaling preserves schedule cost up to the factor") {
    testing::Rng rng(41);
    for (int trial = 0; trial < 50; ++trial) {
        const Rational mu(testing::uniform(rng, 1, 90), testing::uniform(rng, 1, 7));
        PenaltyFunction f({mu, Rational(0), mu}, TailRule::constant_value(mu));
        auto inst = testing::random_instance<Rational>(rng, f, 10);
        auto sc = scale_normalize(f, inst, mu);
        // random FIFO schedule: cut the sorted requests into groups matched at or after the last member
        auto times = inst.request_times();
        std::vector<std::pair<Rational, std::int64_t>> g, gs;
        std::size_t i = 0;
        while (i < times.size()) {
            const auto size = static_cast<std::size_t>(testing::uniform(rng, 1, 4));
            const std::size_t end = std::min(times.size(), i + size);
            const Rational t = times[end - 1] + Rational(testing::uniform(rng, 0, 3), 2);
            g.emplace_back(t, static_cast<std::int64_t>(end - i));
            gs.emplace_back(t / mu, static_cast<std::int64_t>(end - i));
            i = end;
        }
        REQUIRE(schedule_cost(inst, g) == mu * schedule_cost(sc.instance, gs));
    }
}
