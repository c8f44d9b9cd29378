#pragma once

#include <cstdint>

#include "omdsc/numerics/rational.hpp"

namespace omdsc {

/// The recursion/round parameter: the real solution of a^a = k, plus the
/// rational value the algorithms actually run with.
struct AlphaParam {
    std::int64_t k = 0;
    double alpha_exact = 0.0;
    Rational alpha_used;
};

/// Solves a * ln(a) = ln(k) by bisection; alpha_used is max(a, 4) rounded up
/// to a multiple of 2^-20.
AlphaParam solve_alpha(std::int64_t k);

/// Same k but with a caller-chosen alpha_used (must be >= alpha_exact and >= 4).
AlphaParam alpha_with_override(std::int64_t k, const Rational& alpha_used);

}  // namespace omdsc
