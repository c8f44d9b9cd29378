#pragma once

#include <cstdint>
#include <vector>

#include "json.hpp"
#include "omdsc/numerics/error.hpp"
#include "omdsc/numerics/scalar.hpp"
#include "omdsc/penalty/penalty.hpp"

namespace omdsc {

template <class Num>
struct ArrivalEvent {
    Num time;
    std::uint64_t count = 0;
    std::uint64_t seq = 0;

    friend bool operator==(const ArrivalEvent&, const ArrivalEvent&) = default;
};

/// Arrival schedule plus the penalty it is evaluated under.
template <class Num>
class Instance {
public:
    explicit Instance(PenaltyFunction penalty) : penalty_(std::move(penalty)) {}

    void add(const Num& time, std::uint64_t count) {
        if (finalized_) throw Error(ErrorKind::Protocol, "arrival added to a finalized instance");
        if (count == 0) throw Error(ErrorKind::Domain, "arrival count must be positive");
        if (time < Num(0)) throw Error(ErrorKind::Domain, "arrival time must be nonnegative");
        if (!arrivals_.empty() && time < arrivals_.back().time) {
            throw Error(ErrorKind::Domain, "arrival times must be nondecreasing");
        }
        arrivals_.push_back({time, count, static_cast<std::uint64_t>(arrivals_.size())});
        total_ += count;
    }

    void finalize() { finalized_ = true; }
    bool finalized() const noexcept { return finalized_; }

    const std::vector<ArrivalEvent<Num>>& arrivals() const noexcept { return arrivals_; }
    const PenaltyFunction& penalty() const noexcept { return penalty_; }
    std::uint64_t total_requests() const noexcept { return total_; }

    /// One entry per request, in arrival order.
    std::vector<Num> request_times() const {
        std::vector<Num> out;
        out.reserve(total_);
        for (const auto& a : arrivals_) out.insert(out.end(), a.count, a.time);
        return out;
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["backend"] = to_string(NumTraits<Num>::backend);
        j["penalty"] = penalty_.to_json();
        auto& arr = j["arrivals"] = nlohmann::json::array();
        for (const auto& a : arrivals_) {
            arr.push_back({{"t", NumTraits<Num>::str(a.time)}, {"count", a.count}});
        }
        return j;
    }

    /// Reads the instance file format; the result is finalized.
    static Instance from_json(const nlohmann::json& j) {
        if (!j.is_object() || !j.contains("penalty") || !j.contains("arrivals")) {
            throw Error(ErrorKind::Parse, "instance needs \"penalty\" and \"arrivals\"");
        }
        Instance out(PenaltyFunction::from_json(j["penalty"]));
        for (const auto& a : j["arrivals"]) {
            const auto& t = a.at("t");
            Num time{};
            if (t.is_string()) {
                time = NumTraits<Num>::parse(t.get<std::string>());
            } else if (t.is_number_integer()) {
                time = NumTraits<Num>::from_rational(Rational(t.get<std::int64_t>()));
            } else if (t.is_number_float()) {
                time = NumTraits<Num>::from_rational(Rational::from_double(t.get<double>()));
            } else {
                throw Error(ErrorKind::Parse, "arrival time must be a number or \"p/q\" string");
            }
            out.add(time, a.at("count").get<std::uint64_t>());
        }
        out.finalize();
        return out;
    }

    friend bool operator==(const Instance& a, const Instance& b) {
        return a.arrivals_ == b.arrivals_ && a.penalty_ == b.penalty_;
    }

private:
    PenaltyFunction penalty_;
    std::vector<ArrivalEvent<Num>> arrivals_;
    std::uint64_t total_ = 0;
    bool finalized_ = false;
};

}  // namespace omdsc
