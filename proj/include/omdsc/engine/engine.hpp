#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "omdsc/engine/instance.hpp"
#include "omdsc/numerics/scalar.hpp"
#include "omdsc/penalty/penalty.hpp"

namespace omdsc {

/// Match `count` of the oldest unmatched requests. `line` and `phase` tag the
/// size cost in the ledger; empty tags fall back to the algorithm's tags.
struct Directive {
    std::int64_t count = 0;
    std::string line;
    std::string phase;
};

template <class Num>
class OnlineAlgorithm {
public:
    virtual ~OnlineAlgorithm() = default;

    virtual std::string name() const = 0;
    virtual void on_arrival(const Num& now, std::int64_t count, std::vector<Directive>& out) = 0;
    /// Absolute time of the next wake-up, valid only if no arrival intervenes.
    virtual std::optional<Num> next_wakeup(const Num& now) const = 0;
    virtual void on_wakeup(const Num& now, std::vector<Directive>& out) = 0;

    /// Tags applied to waiting cost accrued while the algorithm sits in its current state.
    virtual std::string line_tag() const { return {}; }
    virtual std::string phase_tag() const { return {}; }
    virtual nlohmann::json diagnostics() const { return nlohmann::json::object(); }
};

template <class Num>
class RequestSource {
public:
    virtual ~RequestSource() = default;

    virtual std::string name() const = 0;
    /// Next time the source wants control (an arrival or an internal event).
    virtual std::optional<Num> next_event_time() const = 0;
    /// Called at next_event_time(); returns the number of requests arriving now.
    virtual std::int64_t on_time(const Num& now) = 0;
    /// Called after every executed match; returns requests injected at `now`.
    virtual std::int64_t on_match(const Num& now, std::int64_t size) = 0;
    virtual bool finalized() const = 0;
    virtual nlohmann::json diagnostics() const { return nlohmann::json::object(); }
};

template <class Num>
struct MatchRecord {
    Num time;
    std::int64_t size = 0;
    Num size_cost;
    std::uint64_t first = 0;  // members are requests [first, first + size) in arrival order
    std::string line;
    std::string phase;
};

template <class Num>
struct CostLedger {
    Num size_cost_total{0};
    Num waiting_cost_total{0};
    std::map<std::string, Num> per_phase;
    std::map<std::string, Num> per_line;

    Num total() const { return size_cost_total + waiting_cost_total; }
};

enum class Termination { Normal, HorizonFlush };

const char* to_string(Termination t);

template <class Num>
struct Transcript {
    Instance<Num> instance;
    std::vector<MatchRecord<Num>> matches;
    CostLedger<Num> ledger;
    Termination termination = Termination::Normal;
    std::string algorithm;
    std::string source;
    std::uint64_t events = 0;
    /// Sum over matches of sum over members of (match time - arrival time).
    Num member_waiting{0};
    nlohmann::json diagnostics = nlohmann::json::object();

    Num total_cost() const { return ledger.total(); }
    std::int64_t matched() const;
    /// Waiting total agrees with the per-member view (exact, or 1e-9 relative).
    bool conservation_holds() const;

    nlohmann::json to_json() const;
};

template <class Num>
struct RunOptions {
    /// Bound on deliveries, wake-ups and executed matches together.
    std::uint64_t max_events = 50'000'000;
    std::optional<Num> horizon_time;
};

/// Runs the event loop until quiescence or the horizon.
template <class Num>
Transcript<Num> run(OnlineAlgorithm<Num>& algorithm, RequestSource<Num>& source,
                    const PenaltyFunction& penalty, const RunOptions<Num>& options = {});

/// Cost of matching sorted requests with the given (time, size) groups, FIFO.
template <class Num>
Num schedule_cost(const Instance<Num>& instance, const std::vector<std::pair<Num, std::int64_t>>& groups);

template <class Num>
struct ScaledProblem {
    PenaltyFunction penalty;
    Instance<Num> instance;
    Rational factor;
};

/// Divides penalties and arrival times by mu, for f with range {0, mu}.
template <class Num>
ScaledProblem<Num> scale_normalize(const PenaltyFunction& f, const Instance<Num>& instance,
                                   const Rational& mu);

extern template struct Transcript<Rational>;
extern template struct Transcript<double>;
extern template Transcript<Rational> run(OnlineAlgorithm<Rational>&, RequestSource<Rational>&,
                                         const PenaltyFunction&, const RunOptions<Rational>&);
extern template Transcript<double> run(OnlineAlgorithm<double>&, RequestSource<double>&,
                                       const PenaltyFunction&, const RunOptions<double>&);

}  // namespace omdsc
