#include "omdsc/engine/engine.hpp"

#include <cmath>

#include "omdsc/numerics/error.hpp"

namespace omdsc {

const char* to_string(Termination t) {
    return t == Termination::Normal ? "normal" : "horizon_flush";
}

template <class Num>
std::int64_t Transcript<Num>::matched() const {
    std::int64_t n = 0;
    for (const auto& m : matches) n += m.size;
    return n;
}

template <class Num>
bool Transcript<Num>::conservation_holds() const {
    return NumTraits<Num>::equal(member_waiting, ledger.waiting_cost_total);
}

template <class Num>
nlohmann::json Transcript<Num>::to_json() const {
    using T = NumTraits<Num>;
    nlohmann::json j;
    j["backend"] = to_string(T::backend);
    j["algorithm"] = algorithm;
    j["source"] = source;
    j["termination"] = to_string(termination);
    j["events"] = events;
    auto& led = j["ledger"];
    led["size_cost"] = T::str(ledger.size_cost_total);
    led["waiting_cost"] = T::str(ledger.waiting_cost_total);
    led["total"] = T::str(ledger.total());
    led["per_phase"] = nlohmann::json::object();
    for (const auto& [tag, v] : ledger.per_phase) led["per_phase"][tag] = T::str(v);
    led["per_line"] = nlohmann::json::object();
    for (const auto& [tag, v] : ledger.per_line) led["per_line"][tag] = T::str(v);
    auto& ms = j["matches"] = nlohmann::json::array();
    for (const auto& m : matches) {
        ms.push_back({{"t", T::str(m.time)},
                      {"size", m.size},
                      {"size_cost", T::str(m.size_cost)},
                      {"first", m.first},
                      {"line", m.line},
                      {"phase", m.phase}});
    }
    j["instance"] = instance.to_json();
    j["diagnostics"] = diagnostics;
    j["diagnostics"]["conservation"] = conservation_holds();
    return j;
}

template <class Num>
Transcript<Num> run(OnlineAlgorithm<Num>& alg, RequestSource<Num>& src, const PenaltyFunction& penalty,
                    const RunOptions<Num>& options) {
    Transcript<Num> tr{Instance<Num>(penalty), {}, {}, Termination::Normal, alg.name(), src.name()};

    Num now(0);
    std::vector<Num> prefix{Num(0)};  // prefix sums of request arrival times
    std::uint64_t head = 0;            // oldest unmatched request
    std::string stop_reason;
    std::vector<Directive> out;

    auto unmatched = [&] { return static_cast<std::int64_t>(prefix.size() - 1 - head); };

    auto accrue = [&](const Num& to) {
        if (!(now < to)) return;
        const std::int64_t n = unmatched();
        if (n > 0) {
            const Num w = Num(n) * (to - now);
            tr.ledger.waiting_cost_total += w;
            tr.ledger.per_line[alg.line_tag()] += w;
            tr.ledger.per_phase[alg.phase_tag()] += w;
        }
        now = to;
    };

    auto match = [&](std::int64_t count, std::string line, std::string phase) {
        if (count <= 0) throw Error(ErrorKind::Protocol, "match directive with non-positive count");
        if (count > unmatched()) {
            throw Error(ErrorKind::Protocol, "match of " + std::to_string(count) + " exceeds " +
                                                 std::to_string(unmatched()) + " unmatched at t=" +
                                                 NumTraits<Num>::str(now));
        }
        const Num cost = NumTraits<Num>::from_rational(penalty(count));
        const std::uint64_t end = head + static_cast<std::uint64_t>(count);
        tr.member_waiting += Num(count) * now - (prefix[end] - prefix[head]);
        tr.ledger.size_cost_total += cost;
        tr.ledger.per_line[line] += cost;
        tr.ledger.per_phase[phase] += cost;
        tr.matches.push_back({now, count, cost, head, std::move(line), std::move(phase)});
        head = end;
    };

    // Returns the injected count, or nullopt once the event bound is hit.
    auto execute = [&](std::vector<Directive>& batch) -> std::optional<std::int64_t> {
        std::int64_t injected = 0;
        for (auto& d : batch) {
            if (tr.events >= options.max_events) {
                stop_reason = "event horizon reached during same-time matches";
                batch.clear();
                return std::nullopt;
            }
            ++tr.events;
            std::string line = d.line.empty() ? alg.line_tag() : std::move(d.line);
            std::string phase = d.phase.empty() ? alg.phase_tag() : std::move(d.phase);
            match(d.count, std::move(line), std::move(phase));
            injected += src.on_match(now, d.count);
        }
        batch.clear();
        return injected;
    };

    auto add_arrivals = [&](std::int64_t count) {
        tr.instance.add(now, static_cast<std::uint64_t>(count));
        for (std::int64_t i = 0; i < count; ++i) prefix.push_back(prefix.back() + now);
    };

    // Delivers arrivals at `now`, then any injections they cause, before time moves.
    auto deliver = [&](std::optional<std::int64_t> pending) {
        if (!pending) return false;
        std::int64_t count = *pending;
        while (count > 0) {
            add_arrivals(count);
            if (tr.events >= options.max_events) {
                stop_reason = "event horizon reached during same-time injections";
                return false;
            }
            ++tr.events;
            alg.on_arrival(now, count, out);
            const auto injected = execute(out);
            if (!injected) return false;
            count = *injected;
        }
        return true;
    };

    bool normal = false;
    while (true) {
        if (tr.events >= options.max_events) {
            stop_reason = "event horizon reached";
            break;
        }
        const auto ta = alg.next_wakeup(now);
        const auto ts = src.next_event_time();
        if (ta && *ta < now) throw Error(ErrorKind::Protocol, "algorithm wake-up in the past");
        if (ts && *ts < now) throw Error(ErrorKind::Protocol, "source event in the past");
        if (!ta && !ts) {
            if (src.finalized() && unmatched() == 0) {
                normal = true;
            } else if (src.finalized()) {
                stop_reason = "stall: unmatched requests and no scheduled wake-up";
            } else {
                stop_reason = "stall: source unfinalized with no scheduled event";
            }
            break;
        }
        const bool alg_first = ta && (!ts || !(*ts < *ta));
        const Num t = alg_first ? *ta : *ts;
        if (options.horizon_time && *options.horizon_time < t) {
            accrue(*options.horizon_time);
            stop_reason = "time horizon reached";
            break;
        }
        accrue(t);
        ++tr.events;
        if (alg_first) {
            alg.on_wakeup(now, out);
            if (!deliver(execute(out))) break;
        } else {
            if (!deliver(std::optional<std::int64_t>(src.on_time(now)))) break;
        }
    }

    if (!normal) {
        tr.termination = Termination::HorizonFlush;
        if (unmatched() > 0) match(unmatched(), "flush", alg.phase_tag());
        tr.diagnostics["engine"]["stop_reason"] = stop_reason;
    }
    tr.instance.finalize();
    tr.diagnostics["algorithm"] = alg.diagnostics();
    tr.diagnostics["source"] = src.diagnostics();
    return tr;
}

template <class Num>
Num schedule_cost(const Instance<Num>& instance, const std::vector<std::pair<Num, std::int64_t>>& groups) {
    const auto times = instance.request_times();
    Num total(0);
    std::size_t next = 0;
    for (const auto& [t, size] : groups) {
        if (size < 1 || next + static_cast<std::size_t>(size) > times.size()) {
            throw Error(ErrorKind::Domain, "schedule group sizes do not fit the instance");
        }
        total += NumTraits<Num>::from_rational(instance.penalty()(size));
        for (std::int64_t i = 0; i < size; ++i, ++next) {
            if (t < times[next]) throw Error(ErrorKind::Domain, "group matched before a member arrives");
            total += t - times[next];
        }
    }
    if (next != times.size()) throw Error(ErrorKind::Domain, "schedule leaves requests unmatched");
    return total;
}

template <class Num>
ScaledProblem<Num> scale_normalize(const PenaltyFunction& f, const Instance<Num>& instance,
                                   const Rational& mu) {
    if (!(Rational(0) < mu)) throw Error(ErrorKind::Domain, "scale factor must be positive");
    Rational c;
    if (!f.two_valued(&c) || c != mu) {
        throw Error(ErrorKind::NotScalable, "penalty is not valued in {0, " + mu.str() + "}");
    }
    std::vector<Rational> table;
    table.reserve(f.table().size());
    for (const Rational& v : f.table()) table.push_back(v / mu);
    PenaltyFunction scaled(std::move(table), TailRule::constant_one());
    Instance<Num> out(scaled);
    const Num m = NumTraits<Num>::from_rational(mu);
    for (const auto& a : instance.arrivals()) out.add(a.time / m, a.count);
    if (instance.finalized()) out.finalize();
    return {std::move(scaled), std::move(out), mu};
}

template struct Transcript<Rational>;
template struct Transcript<double>;
template Transcript<Rational> run(OnlineAlgorithm<Rational>&, RequestSource<Rational>&,
                                  const PenaltyFunction&, const RunOptions<Rational>&);
template Transcript<double> run(OnlineAlgorithm<double>&, RequestSource<double>&, const PenaltyFunction&,
                                const RunOptions<double>&);
template Rational schedule_cost(const Instance<Rational>&, const std::vector<std::pair<Rational, std::int64_t>>&);
template double schedule_cost(const Instance<double>&, const std::vector<std::pair<double, std::int64_t>>&);
template ScaledProblem<Rational> scale_normalize(const PenaltyFunction&, const Instance<Rational>&,
                                                 const Rational&);
template ScaledProblem<double> scale_normalize(const PenaltyFunction&, const Instance<double>&,
                                               const Rational&);

}  // namespace omdsc
