#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "support.hpp"

using namespace omdsc;
using namespace omdsc::testing;

namespace {

// Matches more than is waiting.
struct Greedy final : OnlineAlgorithm<Rational> {
    std::string name() const override { return "greedy"; }
    void on_arrival(const Rational&, std::int64_t c, std::vector<Directive>& out) override {
        out.push_back({c + 1, "", ""});
    }
    std::optional<Rational> next_wakeup(const Rational&) const override { return std::nullopt; }
    void on_wakeup(const Rational&, std::vector<Directive>&) override {}
};

// Asks to be woken before the current time.
struct Backwards final : OnlineAlgorithm<Rational> {
    bool seen = false;
    std::string name() const override { return "backwards"; }
    void on_arrival(const Rational&, std::int64_t, std::vector<Directive>&) override { seen = true; }
    std::optional<Rational> next_wakeup(const Rational& now) const override {
        if (!seen) return std::nullopt;
        return now - Rational(1);
    }
    void on_wakeup(const Rational&, std::vector<Directive>&) override {}
};

// Injects one request after each of the first `left` matches.
struct Echo final : RequestSource<Rational> {
    int stage = 0;
    int left = 3;
    std::string name() const override { return "echo"; }
    std::optional<Rational> next_event_time() const override {
        if (stage == 0) return Rational(0);
        if (stage == 1) return Rational(5);
        return std::nullopt;
    }
    std::int64_t on_time(const Rational&) override {
        ++stage;
        return 1;
    }
    std::int64_t on_match(const Rational&, std::int64_t) override { return left-- > 0 ? 1 : 0; }
    bool finalized() const override { return stage == 2; }
};

// Records the times at which the algorithm sees arrivals.
struct Recorder final : OnlineAlgorithm<Rational> {
    std::vector<std::pair<Rational, std::int64_t>> seen;
    std::string name() const override { return "recorder"; }
    void on_arrival(const Rational& now, std::int64_t c, std::vector<Directive>& out) override {
        seen.emplace_back(now, c);
        out.push_back({c, "", ""});
    }
    std::optional<Rational> next_wakeup(const Rational&) const override { return std::nullopt; }
    void on_wakeup(const Rational&, std::vector<Directive>&) override {}
};

}  // namespace

TEST_CASE("immediate with f(n) = n") {
    auto inst = make_instance<Rational>(PenaltyFunction::linear(), {{Rational(0), 1}, {Rational(1), 1}});
    auto tr = simulate("immediate", inst);
    CHECK(tr.matches.size() == 2);
    CHECK(tr.ledger.waiting_cost_total == 0);
    CHECK(tr.ledger.size_cost_total == 2);
    CHECK(tr.termination == Termination::Normal);
}

TEST_CASE_TEMPLATE("tcp_ack single request", Num, Rational, double) {
    auto inst = make_instance<Num>(PenaltyFunction::constant_one(), {{Rational(0), 1}});
    auto tr = simulate("tcp_ack", inst);
    REQUIRE(tr.matches.size() == 1);
    CHECK(tr.matches[0].time == Num(1));
    CHECK(tr.ledger.size_cost_total == Num(1));
    CHECK(tr.ledger.waiting_cost_total == Num(1));
}

TEST_CASE("empty source terminates normally") {
    auto inst = make_instance<Rational>(PenaltyFunction::constant_one(), {});
    for (const char* a : {"immediate", "tcp_ack", "ceil_div:3", "mar_ref:4", "recurring:256"}) {
        auto tr = simulate(a, inst);
        CHECK(tr.termination == Termination::Normal);
        CHECK(tr.matches.empty());
        CHECK(tr.total_cost() == 0);
    }
}

TEST_CASE("protocol errors") {
    auto f = PenaltyFunction::constant_one();
    auto inst = make_instance<Rational>(f, {{Rational(0), 2}});
    {
        Greedy g;
        auto src = adv::fixed_source<Rational>(inst);
        try {
            run<Rational>(g, *src, f);
            FAIL("expected protocol error");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::Protocol);
        }
    }
    {
        Backwards b;
        auto src = adv::fixed_source<Rational>(inst);
        try {
            run<Rational>(b, *src, f);
            FAIL("expected protocol error");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::Protocol);
        }
    }
}

TEST_CASE("same-time injections are seen before time advances") {
    Recorder alg;
    Echo src;
    auto tr = run<Rational>(alg, src, PenaltyFunction::constant_one());
    REQUIRE(alg.seen.size() == 5);
    for (int i = 0; i < 4; ++i) CHECK(alg.seen[static_cast<std::size_t>(i)].first == 0);
    CHECK(alg.seen[4].first == 5);
    CHECK(tr.instance.total_requests() == 5);
    // injected arrivals come later in sequence at the same timestamp
    const auto& arr = tr.instance.arrivals();
    for (std::size_t i = 1; i < arr.size(); ++i) CHECK(arr[i - 1].seq < arr[i].seq);
    CHECK(tr.ledger.waiting_cost_total == 0);
}

TEST_CASE("event horizon forces a flagged flush") {
    auto inst = make_instance<Rational>(PenaltyFunction::constant_one(), {{Rational(0), 3}, {Rational(4), 1}});
    RunOptions<Rational> opts;
    opts.max_events = 1;
    auto tr = simulate("tcp_ack", inst, opts);
    CHECK(tr.termination == Termination::HorizonFlush);
    CHECK(tr.diagnostics["engine"]["stop_reason"].get<std::string>().find("horizon") != std::string::npos);
    REQUIRE(!tr.matches.empty());
    CHECK(tr.matches.back().line == "flush");
    CHECK(tr.matched() == 3);

    RunOptions<Rational> timed;
    timed.horizon_time = Rational(1, 10);
    auto tt = simulate("tcp_ack", inst, timed);
    CHECK(tt.termination == Termination::HorizonFlush);
    CHECK(tt.ledger.waiting_cost_total == Rational(3, 10));
}

TEST_CASE("schedule_cost examples") {
    auto inst = make_instance<Rational>(PenaltyFunction::constant_one(), {{Rational(0), 1}, {Rational(1), 1}});
    using G = std::vector<std::pair<Rational, std::int64_t>>;
    CHECK(schedule_cost(inst, G{{Rational(1), 2}}) == 2);
    CHECK(schedule_cost(inst, G{{Rational(0), 1}, {Rational(1), 1}}) == 2);
    CHECK_THROWS_AS(schedule_cost(inst, G{{Rational(0), 2}}), Error);
    CHECK_THROWS_AS(schedule_cost(inst, G{{Rational(1), 1}}), Error);
}

TEST_CASE("determinism, conservation and ledger consistency on random instances") {
    Rng rng(7);
    const std::vector<std::string> algs{"immediate", "tcp_ack", "ceil_div:3", "ceil_div:2,reset=flush",
                                        "mar_ref:9", "recurring:16", "recurring:256"};
    for (int trial = 0; trial < 60; ++trial) {
        const auto f = random_penalty(rng);
        const auto inst = random_instance<Rational>(rng, f, uniform(rng, 0, 40));
        const auto instd = random_instance<double>(rng, f, uniform(rng, 0, 40));
        for (const auto& a : algs) {
            auto t1 = simulate(a, inst);
            auto t2 = simulate(a, inst);
            CHECK(t1.to_json().dump() == t2.to_json().dump());
            CHECK(t1.termination == Termination::Normal);
            CHECK(t1.matched() == static_cast<std::int64_t>(inst.total_requests()));
            CHECK(t1.conservation_holds());
            CHECK(t1.member_waiting == t1.ledger.waiting_cost_total);

            Rational by_line(0), by_phase(0);
            for (const auto& [tag, v] : t1.ledger.per_line) by_line += v;
            for (const auto& [tag, v] : t1.ledger.per_phase) by_phase += v;
            CHECK(by_line == t1.total_cost());
            CHECK(by_phase == t1.total_cost());

            Rational size(0);
            for (std::size_t i = 0; i < t1.matches.size(); ++i) {
                size += t1.matches[i].size_cost;
                if (i > 0) CHECK(!(t1.matches[i].time < t1.matches[i - 1].time));
            }
            CHECK(size == t1.ledger.size_cost_total);

            auto td = simulate(a, instd);
            CHECK(td.conservation_holds());
            CHECK(td.matched() == static_cast<std::int64_t>(instd.total_requests()));
        }
    }
}

TEST_CASE("transcript json carries backend and ledger") {
    auto inst = make_instance<double>(PenaltyFunction::constant_one(), {{Rational(0), 2}});
    auto j = simulate("tcp_ack", inst).to_json();
    CHECK(j["backend"] == "float");
    CHECK(j["termination"] == "normal");
    CHECK(j["matches"].size() == 1);
    CHECK(j["ledger"].contains("per_line"));
}
