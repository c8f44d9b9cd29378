#pragma once

#include <cstdint>
#include <vector>

#include "json.hpp"
#include "omdsc/engine/instance.hpp"

namespace omdsc::offline {

enum class Method { Dp, Hull, BruteForce };

const char* to_string(Method m);

/// One matched group: request indices (arrival order) and the match time,
/// which is always the latest arrival among the members.
template <class Num>
struct Group {
    Num time;
    std::vector<std::int64_t> members;
};

template <class Num>
struct OfflineSolution {
    Num cost{0};
    std::vector<Group<Num>> groups;
    Method method = Method::Dp;

    nlohmann::json to_json() const;
};

/// O(m^2) interval DP over requests sorted by arrival, charging the effective
/// penalty per group. The float backend runs the row minimum through the
/// SIMD kernel table.
template <class Num>
OfflineSolution<Num> optimal_cost_dp(const Instance<Num>& instance);

/// True when f_eff(n) is c for n outside gZ and 0 inside (g = 0: never zero),
/// i.e. two-valued penalties of case (i) or (ii).
bool hull_applicable(const PenaltyFunction& f, Rational* c = nullptr, std::int64_t* g = nullptr);

/// Same recurrence in O(m) amortized with monotone lower envelopes, one per
/// residue class mod g plus one global. Throws Mode if not applicable.
template <class Num>
OfflineSolution<Num> optimal_cost_hull(const Instance<Num>& instance);

/// Exhaustive search over set partitions; m <= 10.
template <class Num>
OfflineSolution<Num> brute_force_opt(const Instance<Num>& instance);

/// Hull when applicable, otherwise the quadratic DP.
template <class Num>
OfflineSolution<Num> optimal_cost(const Instance<Num>& instance);

}  // namespace omdsc::offline
