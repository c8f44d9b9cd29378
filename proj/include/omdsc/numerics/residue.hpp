#pragma once

#include <cstdint>
#include <string>

namespace omdsc {

/// An element of Z_k.
class Residue {
public:
    Residue(std::int64_t x, std::int64_t modulus);

    std::int64_t value() const noexcept { return value_; }
    std::int64_t modulus() const noexcept { return modulus_; }

    Residue operator+(std::int64_t d) const { return Residue(value_ + d, modulus_); }
    Residue operator-(std::int64_t d) const { return Residue(value_ - d, modulus_); }

    friend bool operator==(const Residue&, const Residue&) = default;

    std::string str() const;

private:
    std::int64_t value_;
    std::int64_t modulus_;
};

/// Mathematical remainder of x modulo k, always in [0, k).
std::int64_t residue(std::int64_t x, std::int64_t k);

/// The wrap-around set {lo, lo+1, ..., hi} of Z_k.
class CyclicInterval {
public:
    CyclicInterval(std::int64_t lo, std::int64_t hi, std::int64_t modulus);
    CyclicInterval(const Residue& lo, const Residue& hi);

    std::int64_t lo() const noexcept { return lo_; }
    std::int64_t hi() const noexcept { return hi_; }
    std::int64_t modulus() const noexcept { return modulus_; }

    std::int64_t size() const noexcept { return residue(hi_ - lo_, modulus_) + 1; }
    bool contains(std::int64_t x) const noexcept;
    bool contains(const Residue& x) const;

    /// Offset of x from lo walking forward, i.e. residue(x - lo).
    std::int64_t offset(std::int64_t x) const noexcept { return residue(x - lo_, modulus_); }

    /// Calls fn(i) for each element in order lo, lo+1, ..., hi.
    template <class Fn>
    void for_each(Fn&& fn) const {
        std::int64_t i = lo_;
        for (std::int64_t n = size(); n > 0; --n) {
            fn(i);
            if (++i == modulus_) i = 0;
        }
    }

    friend bool operator==(const CyclicInterval&, const CyclicInterval&) = default;

    std::string str() const;

private:
    std::int64_t lo_;
    std::int64_t hi_;
    std::int64_t modulus_;
};

inline std::int64_t interval_size(const CyclicInterval& iv) { return iv.size(); }
bool interval_contains(const CyclicInterval& iv, const Residue& x);

}  // namespace omdsc
