#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "support.hpp"

using namespace omdsc;
using namespace omdsc::testing;

namespace {

// Larger bursts so the recurring algorithm sees many full rounds.
template <class Num>
Instance<Num> bursty_instance(Rng& rng, const PenaltyFunction& f, std::int64_t events, std::int64_t max_count) {
    Instance<Num> inst(f);
    Rational t(0);
    for (std::int64_t i = 0; i < events; ++i) {
        t += Rational(uniform(rng, 0, 24), 64);
        inst.add(NumTraits<Num>::from_rational(t), static_cast<std::uint64_t>(uniform(rng, 1, max_count)));
    }
    inst.finalize();
    return inst;
}

}  // namespace

TEST_CASE("immediate") {
    Rng rng(1);
    const auto zplus = PenaltyFunction::multiples_of(1);
    for (int i = 0; i < 20; ++i) {
        auto tr = simulate("immediate", random_instance<Rational>(rng, zplus, uniform(rng, 0, 30)));
        CHECK(tr.total_cost() == 0);
    }
    auto tr = simulate("immediate", make_instance<Rational>(PenaltyFunction::linear(), {{Rational(0), 3}}));
    CHECK(tr.ledger.size_cost_total == 3);
    CHECK(tr.ledger.waiting_cost_total == 0);
}

TEST_CASE_TEMPLATE("tcp_ack examples", Num, Rational, double) {
    auto tr = simulate("tcp_ack", make_instance<Num>(PenaltyFunction::constant_one(), {{Rational(0), 2}}));
    REQUIRE(tr.matches.size() == 1);
    CHECK(tr.matches[0].time == NumTraits<Num>::from_rational(Rational(1, 2)));
    CHECK(tr.total_cost() == Num(2));
    // waiting counter restarts after each flush
    auto two = simulate("tcp_ack", make_instance<Num>(PenaltyFunction::constant_one(),
                                                      {{Rational(0), 1}, {Rational(3), 4}}));
    REQUIRE(two.matches.size() == 2);
    CHECK(two.matches[1].time == NumTraits<Num>::from_rational(Rational(13, 4)));
}

TEST_CASE("ceil_div examples") {
    const auto f3 = PenaltyFunction::ceil_div(3);
    auto a = simulate("ceil_div:3", make_instance<Rational>(f3, {{Rational(0), 3}}));
    REQUIRE(a.matches.size() == 1);
    CHECK(a.matches[0].time == 0);
    CHECK(a.ledger.size_cost_total == 1);
    CHECK(a.ledger.waiting_cost_total == 0);

    auto b = simulate("ceil_div:3", make_instance<Rational>(f3, {{Rational(0), 1}}));
    CHECK(b.matches.at(0).time == 1);
    CHECK(b.total_cost() == 2);

    // k = 1 behaves as immediate matching
    Rng rng(2);
    const auto f1 = PenaltyFunction::ceil_div(1);
    for (int i = 0; i < 20; ++i) {
        const auto inst = random_instance<Rational>(rng, f1, uniform(rng, 0, 30));
        auto c = simulate("ceil_div:1", inst);
        auto d = simulate("immediate", inst);
        CHECK(c.total_cost() == d.total_cost());
        CHECK(c.ledger.waiting_cost_total == 0);
    }
}

TEST_CASE("ceil_div reset variants differ only in counter handling") {
    // one request waits 3/4, then a full batch of 3 arrives; with reset on every
    // match the lone request is flushed 1 time unit after the size-3 match
    const auto f3 = PenaltyFunction::ceil_div(3);
    const auto inst = make_instance<Rational>(f3, {{Rational(0), 1}, {Rational(3, 4), 2}, {Rational(3, 4), 1}});
    auto every = simulate("ceil_div:3", inst);
    auto flush = simulate("ceil_div:3,reset=flush", inst);
    REQUIRE(every.matches.size() == 2);
    REQUIRE(flush.matches.size() == 2);
    CHECK(every.matches[1].time == Rational(7, 4));
    CHECK(flush.matches[1].time == 1);
}

TEST_CASE("mar_reference rule trace at k = 100") {
    const auto f = PenaltyFunction::multiples_of(100);
    auto tr = simulate("mar_ref:100", make_instance<Rational>(f, {{Rational(0), 99}, {Rational(1, 2), 99}}));
    REQUIRE(tr.matches.size() == 3);
    CHECK(tr.matches[0].size == 89);
    CHECK(tr.matches[0].time == 0);
    CHECK(tr.matches[1].size == 100);
    CHECK(tr.matches[1].time == Rational(1, 2));
    CHECK(tr.matches[2].size == 9);
    CHECK(tr.matches[2].time == 1);
    CHECK(tr.matches[2].line == "time_one");
}

TEST_CASE_TEMPLATE("recurring k = 256: first wait at p1 ends at 2/255", Num, Rational, double) {
    const auto f = PenaltyFunction::multiples_of(256);
    auto tr = simulate("recurring:256", make_instance<Num>(f, {{Rational(0), 255}}));
    REQUIRE(!tr.matches.empty());
    CHECK(NumTraits<Num>::to_double(tr.matches[0].time) == doctest::Approx(2.0 / 255).epsilon(1e-12));
    // W_i = 2(255 - i)/255 at that instant, deficient below 1/4 from i = 224 on
    CHECK(tr.matches[0].line == "p4");
    CHECK(tr.matches[0].size == 224);
    CHECK(tr.termination == Termination::Normal);
}

TEST_CASE("recurring: initial call satisfies the entry conditions") {
    auto alg = algo::recurring<Rational>(solve_alpha(256));
    const auto d = alg->diagnostics();
    CHECK(d["rec_condition_checks"] == 1);
    CHECK(d["rec_condition_violations"]["outside"] == 0);
    CHECK(d["rec_condition_violations"]["inside"] == 0);
    CHECK(d["rec_condition_violations"]["abar"] == 0);
}

TEST_CASE("recurring invariants on random instances (exact)") {
    Rng rng(11);
    for (std::int64_t k : {16, 64, 256, 625}) {
        const auto f = PenaltyFunction::multiples_of(k);
        const std::string spec = "recurring:" + std::to_string(k);
        for (int trial = 0; trial < 12; ++trial) {
            const auto inst = bursty_instance<Rational>(rng, f, uniform(rng, 1, 60), uniform(rng, 1, 2 * k));
            auto tr = simulate(spec, inst);
            REQUIRE(tr.termination == Termination::Normal);
            const auto& d = tr.diagnostics["algorithm"];
            CHECK(d["rec_condition_checks"].get<std::int64_t>() > 0);
            CHECK(d["rec_condition_violations"]["outside"] == 0);
            CHECK(d["rec_condition_violations"]["inside"] == 0);
            CHECK(d["rec_condition_violations"]["abar"] == 0);
            CHECK(d["shrink_violations"] == 0);
            CHECK(d["unmatched_violations"] == 0);
            CHECK(d["level_violations"] == 0);

            for (const auto& m : tr.matches) {
                if (m.size % k == 0) {
                    CHECK(m.size_cost == 0);
                } else {
                    CHECK(m.size_cost == 1);
                }
                CHECK(m.size < k + 1);
            }
            for (const auto& ph : d["phases"]) {
                if (!ph["completed"].get<bool>()) continue;
                CHECK(Rational::parse(ph["min_w_end"].get<std::string>()) >= Rational(1));
                const std::string tag = "phase " + std::to_string(ph["index"].get<std::int64_t>());
                const Rational cost = tr.ledger.per_phase.at(tag);
                const std::int64_t bound = 8 * ph["calls"].get<std::int64_t>() + 2 * ph["exit_size"].get<std::int64_t>() + 1;
                CHECK(cost <= Rational(bound));
            }
        }
    }
}

TEST_CASE("recurring with an alpha override") {
    const auto f = PenaltyFunction::multiples_of(256);
    Rng rng(5);
    const auto inst = bursty_instance<Rational>(rng, f, 30, 300);
    auto tr = simulate("recurring:256,alpha=6", inst);
    CHECK(tr.termination == Termination::Normal);
    CHECK(tr.diagnostics["algorithm"]["alpha"] == "6/1");
    CHECK(tr.diagnostics["algorithm"]["rec_condition_violations"]["inside"] == 0);
}

TEST_CASE("recurring float backend tracks the exact backend") {
    Rng rng(21);
    for (std::int64_t k : {16, 256}) {
        const auto f = PenaltyFunction::multiples_of(k);
        const std::string spec = "recurring:" + std::to_string(k);
        for (int trial = 0; trial < 10; ++trial) {
            Rng copy = rng;
            const auto ex = bursty_instance<Rational>(rng, f, 20, 2 * k);
            const auto fl = bursty_instance<double>(copy, f, 20, 2 * k);
            auto a = simulate(spec, ex);
            auto b = simulate(spec, fl);
            CHECK(b.termination == Termination::Normal);
            CHECK(b.total_cost() == doctest::Approx(a.total_cost().to_double()).epsilon(1e-6));
        }
    }
}

TEST_CASE("algorithm registry") {
    CHECK(algo::make_algorithm<Rational>("ceil_div:4,reset=flush")->name() == "ceil_div:4,reset=flush");
    CHECK(algo::make_algorithm<double>("tcp_ack")->name() == "tcp_ack");
    for (const char* bad : {"nope", "ceil_div", "ceil_div:x", "recurring:16,beta=2", "tcp_ack:3", "ceil_div:2,reset"}) {
        try {
            algo::make_algorithm<Rational>(bad);
            FAIL("accepted " << bad);
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::Parse);
        }
    }
}
