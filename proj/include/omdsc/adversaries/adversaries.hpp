#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "omdsc/engine/engine.hpp"
#include "omdsc/numerics/alpha.hpp"

namespace omdsc::adv {

/// Replays a fixed arrival schedule; ignores matches.
template <class Num>
std::unique_ptr<RequestSource<Num>> fixed_source(Instance<Num> instance);

/// m single arrivals with exponential gaps of the given rate, rounded to a
/// 2^-30 grid so both backends see the same times.
template <class Num>
Instance<Num> poisson_instance(const PenaltyFunction& f, const Rational& rate, std::int64_t m,
                               std::uint64_t seed);

template <class Num>
std::unique_ptr<RequestSource<Num>> poisson_source(const PenaltyFunction& f, const Rational& rate,
                                                   std::int64_t m, std::uint64_t seed);

/// `events` arrival instants with exponential(rate) gaps (same grid), each
/// carrying a uniform count in [1, max_count].
template <class Num>
Instance<Num> batched_instance(const PenaltyFunction& f, const Rational& rate, std::int64_t events,
                               std::int64_t max_count, std::uint64_t seed);

/// k* requests at 0; if all are matched strictly before eps, l - k* more at
/// eps, where k* = min B_f and l = min(B_f minus multiples of k*).
template <class Num>
std::unique_ptr<RequestSource<Num>> case_iii_adversary(const PenaltyFunction& f, const Rational& eps);

/// k* and l for a case (iii) penalty.
std::pair<std::int64_t, std::int64_t> case_iii_parameters(const PenaltyFunction& f);

/// k-1 requests at 0, k-1 more right after each match before time 1, final at time 1.
template <class Num>
std::unique_ptr<RequestSource<Num>> mar_adversary(std::int64_t k);

/// The round-based lower-bound construction for B_f = kZ++.
template <class Num>
std::unique_ptr<RequestSource<Num>> lb_adversary(const AlphaParam& alpha);

/// Parses "fixed:<file>", "poisson:rate,m,seed", "batches:rate,events,max_count,seed",
/// "case3:eps", "mar:k", "lb:k[,alpha=p/q]" and "empty".
template <class Num>
std::unique_ptr<RequestSource<Num>> make_source(const std::string& spec, const PenaltyFunction& f);

}  // namespace omdsc::adv
