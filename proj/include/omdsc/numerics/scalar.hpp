#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>

#include "omdsc/numerics/error.hpp"
#include "omdsc/numerics/rational.hpp"

namespace omdsc {

enum class Backend { Exact, Float };

const char* to_string(Backend b);
Backend parse_backend(std::string_view text);

/// Tolerance used by the float backend for every threshold comparison.
inline constexpr double kFloatTolerance = 1e-9;

template <class Num>
struct NumTraits;

template <>
struct NumTraits<Rational> {
    static constexpr Backend backend = Backend::Exact;
    static constexpr bool exact = true;

    static Rational from_rational(const Rational& r) { return r; }
    static Rational ratio(std::int64_t p, std::int64_t q) { return Rational(p, q); }
    static Rational parse(std::string_view s) { return Rational::parse(s); }
    static std::string str(const Rational& r) { return r.str(); }
    static double to_double(const Rational& r) { return r.to_double(); }
    static std::int64_t floor(const Rational& r) { return r.floor(); }
    static std::int64_t ceil(const Rational& r) { return r.ceil(); }

    static bool reached(const Rational& value, const Rational& target) { return value >= target; }
    static bool equal(const Rational& a, const Rational& b) { return a == b; }
};

template <>
struct NumTraits<double> {
    static constexpr Backend backend = Backend::Float;
    static constexpr bool exact = false;

    static double from_rational(const Rational& r) { return r.to_double(); }
    static double ratio(std::int64_t p, std::int64_t q) {
        return static_cast<double>(p) / static_cast<double>(q);
    }
    static double parse(std::string_view s);
    static std::string str(double x);
    static double to_double(double x) { return x; }
    static std::int64_t floor(double x) {
        return static_cast<std::int64_t>(std::floor(x + kFloatTolerance * std::max(1.0, std::fabs(x))));
    }
    static std::int64_t ceil(double x) {
        return static_cast<std::int64_t>(std::ceil(x - kFloatTolerance * std::max(1.0, std::fabs(x))));
    }

    static bool reached(double value, double target) {
        return value >= target - kFloatTolerance * std::max(1.0, std::fabs(target));
    }
    static bool equal(double a, double b) {
        return std::fabs(a - b) <= kFloatTolerance * std::max({1.0, std::fabs(a), std::fabs(b)});
    }
};

/// Competitive ratio value; `infinite` marks a positive cost over a zero optimum.
template <class Num>
struct Ratio {
    bool infinite = false;
    Num value{};

    double to_double() const {
        return infinite ? HUGE_VAL : NumTraits<Num>::to_double(value);
    }
    std::string str() const { return infinite ? "inf" : NumTraits<Num>::str(value); }
};

/// alg/opt with 0/0 read as 1 and positive/0 as +infinity.
template <class Num>
Ratio<Num> competitive_ratio(const Num& alg_cost, const Num& opt_cost) {
    if (alg_cost < Num(0) || opt_cost < Num(0)) {
        throw Error(ErrorKind::Domain, "competitive ratio of a negative cost");
    }
    if (opt_cost == Num(0)) {
        if (alg_cost == Num(0)) return {false, Num(1)};
        return {true, Num(0)};
    }
    return {false, alg_cost / opt_cost};
}

}  // namespace omdsc
