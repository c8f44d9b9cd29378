#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "omdsc/engine/engine.hpp"
#include "omdsc/numerics/alpha.hpp"

namespace omdsc::algo {

/// Matches every arriving request on its own, immediately.
template <class Num>
std::unique_ptr<OnlineAlgorithm<Num>> immediate();

/// Matches all remaining requests once the waiting cost since the last match reaches 1.
template <class Num>
std::unique_ptr<OnlineAlgorithm<Num>> tcp_ack();

/// Which matches restart the ceil_div waiting counter.
enum class CounterReset { EveryMatch, FlushOnly };

/// For f(n) = ceil(n/k): match k whenever k are waiting, and match all
/// remaining once the waiting cost since the last (counter-resetting) match reaches 1.
template <class Num>
std::unique_ptr<OnlineAlgorithm<Num>> ceil_div(std::int64_t k, CounterReset reset = CounterReset::EveryMatch);

/// ALG* of the square-root separation: >= k waiting -> match k; exactly k-1
/// waiting -> match k-1-floor(sqrt k); from time 1 on, match everything.
template <class Num>
std::unique_ptr<OnlineAlgorithm<Num>> mar_reference(std::int64_t k);

/// The phase-based recursive algorithm for B_f = kZ++.
template <class Num>
std::unique_ptr<OnlineAlgorithm<Num>> recurring(const AlphaParam& alpha);

/// Parses "immediate", "tcp_ack", "ceil_div:k[,reset=flush]", "mar_ref:k",
/// "recurring:k[,alpha=p/q]".
template <class Num>
std::unique_ptr<OnlineAlgorithm<Num>> make_algorithm(const std::string& spec);

}  // namespace omdsc::algo
