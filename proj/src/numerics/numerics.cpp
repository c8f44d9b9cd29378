#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "omdsc/numerics/alpha.hpp"
#include "omdsc/numerics/error.hpp"
#include "omdsc/numerics/rational.hpp"
#include "omdsc/numerics/residue.hpp"
#include "omdsc/numerics/scalar.hpp"

namespace omdsc {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidModulus: return "invalid-modulus";
        case ErrorKind::Domain: return "domain";
        case ErrorKind::ModulusMismatch: return "modulus-mismatch";
        case ErrorKind::Mode: return "mode";
        case ErrorKind::NotScalable: return "not-scalable";
        case ErrorKind::TimeRegression: return "time-regression";
        case ErrorKind::Protocol: return "protocol";
        case ErrorKind::Classification: return "classification";
        case ErrorKind::Size: return "size";
        case ErrorKind::Parse: return "parse";
        case ErrorKind::Unfinalized: return "unfinalized";
        case ErrorKind::Degenerate: return "degenerate-parameters";
    }
    return "unknown";
}

// ---------------------------------------------------------------- Rational

Rational::Rational(std::int64_t num, std::int64_t den) {
    if (den == 0) throw Error(ErrorKind::Domain, "zero denominator");
    v_ = mpq_class(mpz_class(static_cast<long>(num)), mpz_class(static_cast<long>(den)));
    v_.canonicalize();
}

Rational& Rational::operator/=(const Rational& o) {
    if (o.v_ == 0) throw Error(ErrorKind::Domain, "division by zero");
    v_ /= o.v_;
    return *this;
}

Rational Rational::parse(std::string_view text) {
    std::string s(text);
    auto trim = [](std::string& x) {
        x.erase(0, x.find_first_not_of(" \t"));
        x.erase(x.find_last_not_of(" \t") + 1);
    };
    trim(s);
    if (s.empty()) throw Error(ErrorKind::Parse, "empty rational literal");
    try {
        if (auto dot = s.find('.'); dot != std::string::npos) {
            if (s.find_first_of("eE/") != std::string::npos) {
                throw Error(ErrorKind::Parse, "unsupported literal '" + s + "'");
            }
            std::string digits = s.substr(0, dot) + s.substr(dot + 1);
            const std::size_t frac = s.size() - dot - 1;
            mpz_class num(digits.empty() || digits == "-" ? "0" : digits, 10);
            mpz_class den;
            mpz_ui_pow_ui(den.get_mpz_t(), 10, frac);
            return Rational(mpq_class(num, den));
        }
        mpq_class q(s, 10);
        if (q.get_den() == 0) throw Error(ErrorKind::Parse, "zero denominator in '" + s + "'");
        return Rational(q);
    } catch (const std::invalid_argument&) {
        throw Error(ErrorKind::Parse, "malformed rational '" + s + "'");
    }
}

Rational Rational::from_double(double x) {
    if (!std::isfinite(x)) throw Error(ErrorKind::Domain, "non-finite double");
    return Rational(mpq_class(x));
}

std::string Rational::str() const {
    return v_.get_num().get_str() + "/" + v_.get_den().get_str();
}

std::int64_t Rational::floor() const {
    mpz_class q;
    mpz_fdiv_q(q.get_mpz_t(), v_.get_num_mpz_t(), v_.get_den_mpz_t());
    if (!q.fits_slong_p()) throw Error(ErrorKind::Domain, "floor out of range");
    return q.get_si();
}

std::int64_t Rational::ceil() const {
    mpz_class q;
    mpz_cdiv_q(q.get_mpz_t(), v_.get_num_mpz_t(), v_.get_den_mpz_t());
    if (!q.fits_slong_p()) throw Error(ErrorKind::Domain, "ceil out of range");
    return q.get_si();
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

// ---------------------------------------------------------------- scalar

const char* to_string(Backend b) { return b == Backend::Exact ? "exact" : "float"; }

Backend parse_backend(std::string_view text) {
    if (text == "exact") return Backend::Exact;
    if (text == "float") return Backend::Float;
    throw Error(ErrorKind::Parse, "unknown backend '" + std::string(text) + "'");
}

double NumTraits<double>::parse(std::string_view s) {
    if (s.find('/') != std::string_view::npos) return Rational::parse(s).to_double();
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(out)) {
        throw Error(ErrorKind::Parse, "malformed decimal '" + std::string(s) + "'");
    }
    return out;
}

std::string NumTraits<double>::str(double x) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, ptr);
}

// ---------------------------------------------------------------- residue

std::int64_t residue(std::int64_t x, std::int64_t k) {
    if (k <= 0) throw Error(ErrorKind::InvalidModulus, "modulus must be positive");
    const std::int64_t r = x % k;
    return r < 0 ? r + k : r;
}

Residue::Residue(std::int64_t x, std::int64_t modulus)
    : value_(residue(x, modulus)), modulus_(modulus) {}

std::string Residue::str() const {
    return std::to_string(value_) + " mod " + std::to_string(modulus_);
}

CyclicInterval::CyclicInterval(std::int64_t lo, std::int64_t hi, std::int64_t modulus)
    : lo_(residue(lo, modulus)), hi_(residue(hi, modulus)), modulus_(modulus) {}

CyclicInterval::CyclicInterval(const Residue& lo, const Residue& hi)
    : CyclicInterval(lo.value(), hi.value(), lo.modulus()) {
    if (lo.modulus() != hi.modulus()) {
        throw Error(ErrorKind::ModulusMismatch, "interval endpoints use different moduli");
    }
}

bool CyclicInterval::contains(std::int64_t x) const noexcept {
    if (lo_ <= hi_) return lo_ <= x && x <= hi_;
    return x <= hi_ || lo_ <= x;
}

bool CyclicInterval::contains(const Residue& x) const {
    if (x.modulus() != modulus_) {
        throw Error(ErrorKind::ModulusMismatch, "residue and interval use different moduli");
    }
    return contains(x.value());
}

std::string CyclicInterval::str() const {
    return "[" + std::to_string(lo_) + "," + std::to_string(hi_) + "] mod " + std::to_string(modulus_);
}

bool interval_contains(const CyclicInterval& iv, const Residue& x) { return iv.contains(x); }

// ---------------------------------------------------------------- alpha

namespace {

constexpr std::int64_t kAlphaGrid = 1 << 20;

// Smallest multiple of 2^-20 that is >= max(4, a) and satisfies g ln g >= ln k
// up to float rounding.
Rational round_up_to_grid(double a, double log_k) {
    const double start = std::max(a, 4.0);
    auto ticks = static_cast<std::int64_t>(std::floor(start * kAlphaGrid));
    auto ok = [&](std::int64_t t) {
        const double g = static_cast<double>(t) / kAlphaGrid;
        return g >= 4.0 && g * std::log(g) >= log_k * (1.0 - 1e-14);
    };
    while (!ok(ticks)) ++ticks;
    return Rational(ticks, kAlphaGrid);
}

}  // namespace

AlphaParam solve_alpha(std::int64_t k) {
    if (k < 2) throw Error(ErrorKind::Domain, "alpha requires k >= 2");
    const double target = std::log(static_cast<double>(k));
    double lo = 1.0;
    double hi = std::max(2.0, target + 1.0);
    while (hi * std::log(hi) < target) hi *= 2.0;
    for (int iter = 0; iter < 200 && hi - lo > 1e-13; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid * std::log(mid) < target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    AlphaParam out;
    out.k = k;
    out.alpha_exact = 0.5 * (lo + hi);
    out.alpha_used = round_up_to_grid(out.alpha_exact, target);
    return out;
}

AlphaParam alpha_with_override(std::int64_t k, const Rational& alpha_used) {
    AlphaParam out = solve_alpha(k);
    if (alpha_used.to_double() < 4.0 || alpha_used.to_double() + 1e-12 < out.alpha_exact) {
        throw Error(ErrorKind::Domain, "alpha override must be >= max(4, exact alpha)");
    }
    out.alpha_used = alpha_used;
    return out;
}

}  // namespace omdsc
