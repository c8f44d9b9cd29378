#pragma once

// Small hand-rolled generators shared by the property tests.

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "omdsc/adversaries/adversaries.hpp"
#include "omdsc/algorithms/algorithms.hpp"
#include "omdsc/engine/engine.hpp"
#include "omdsc/engine/instance.hpp"
#include "omdsc/numerics/rational.hpp"
#include "omdsc/penalty/penalty.hpp"

namespace omdsc::testing {

using Rng = std::mt19937_64;

inline std::int64_t uniform(Rng& rng, std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

inline Rational random_rational(Rng& rng, std::int64_t max_abs = 1000, std::int64_t max_den = 60) {
    return Rational(uniform(rng, -max_abs, max_abs), uniform(rng, 1, max_den));
}

/// Nonnegative time on a coarse grid so exact and float runs agree.
inline Rational random_time(Rng& rng, std::int64_t max_num = 40, std::int64_t den = 8) {
    return Rational(uniform(rng, 0, max_num), den);
}

inline std::vector<std::int64_t> random_zeros(Rng& rng, std::int64_t max_zero, std::int64_t max_count) {
    std::vector<std::int64_t> z;
    const std::int64_t n = uniform(rng, 1, max_count);
    for (std::int64_t i = 0; i < n; ++i) z.push_back(uniform(rng, 1, max_zero));
    return z;
}

/// Random binary or ceil-div penalty covering cases (i), (ii), (iii).
inline PenaltyFunction random_penalty(Rng& rng) {
    switch (uniform(rng, 0, 3)) {
        case 0: return PenaltyFunction::constant_one();
        case 1: {
            const std::int64_t k = uniform(rng, 1, 5);
            std::vector<std::int64_t> zeros{k};
            if (uniform(rng, 0, 1)) zeros.push_back(k * uniform(rng, 2, 3));
            return PenaltyFunction::from_zeros(zeros);
        }
        case 2: {
            const std::int64_t a = uniform(rng, 2, 4);
            return PenaltyFunction::from_zeros({a, a + uniform(rng, 1, 3)});
        }
        default: return PenaltyFunction::ceil_div(uniform(rng, 1, 4));
    }
}

/// Instance with m requests at grid times (several may share a time).
template <class Num>
Instance<Num> random_instance(Rng& rng, const PenaltyFunction& f, std::int64_t m,
                              std::int64_t max_num = 40, std::int64_t den = 8) {
    std::vector<Rational> times;
    for (std::int64_t i = 0; i < m; ++i) times.push_back(random_time(rng, max_num, den));
    std::sort(times.begin(), times.end());
    Instance<Num> inst(f);
    for (std::size_t i = 0; i < times.size();) {
        std::size_t j = i;
        while (j < times.size() && times[j] == times[i]) ++j;
        inst.add(NumTraits<Num>::from_rational(times[i]), j - i);
        i = j;
    }
    inst.finalize();
    return inst;
}

/// Runs a named algorithm over a fixed instance.
template <class Num>
Transcript<Num> simulate(const std::string& alg_spec, const Instance<Num>& inst, const RunOptions<Num>& opts = {}) {
    auto alg = algo::make_algorithm<Num>(alg_spec);
    auto src = adv::fixed_source<Num>(inst);
    return run(*alg, *src, inst.penalty(), opts);
}

template <class Num>
Instance<Num> make_instance(const PenaltyFunction& f, const std::vector<std::pair<Rational, std::uint64_t>>& arr) {
    Instance<Num> inst(f);
    for (const auto& [t, c] : arr) inst.add(NumTraits<Num>::from_rational(t), c);
    inst.finalize();
    return inst;
}

}  // namespace omdsc::testing
