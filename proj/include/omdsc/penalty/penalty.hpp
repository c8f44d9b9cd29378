#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "omdsc/numerics/rational.hpp"

namespace omdsc {

/// How f(n) continues past the explicit table.
struct TailRule {
    enum class Kind { Constant, CeilDiv, Linear };

    Kind kind = Kind::Constant;
    Rational constant{1};     // Constant
    std::int64_t divisor = 0;  // CeilDiv

    static TailRule constant_one() { return {}; }
    static TailRule constant_value(Rational c) { return {Kind::Constant, std::move(c), 0}; }
    static TailRule ceil_div(std::int64_t k) { return {Kind::CeilDiv, Rational(1), k}; }
    static TailRule linear() { return {Kind::Linear, Rational(1), 0}; }

    bool is_constant_one() const { return kind == Kind::Constant && constant == Rational(1); }
    Rational at(std::int64_t n) const;

    friend bool operator==(const TailRule&, const TailRule&) = default;
};

enum class PenaltyMode { Binary, General };

/// Size-cost function f: Z++ -> R given by a finite table f(1..N) and a tail
/// rule. Immutable; effective penalties are precomputed at construction.
class PenaltyFunction {
public:
    PenaltyFunction(std::vector<Rational> table, TailRule tail);

    /// f == 1 everywhere.
    static PenaltyFunction constant_one();
    /// Binary f with f(z) = 0 exactly for the listed zeros; table length is
    /// max(zeros) unless `table_size` is larger.
    static PenaltyFunction from_zeros(const std::vector<std::int64_t>& zeros,
                                      std::int64_t table_size = 0);
    /// Binary f that is zero only at k (so B_f is the multiples of k).
    static PenaltyFunction multiples_of(std::int64_t k);
    /// f(n) = ceil(n / k).
    static PenaltyFunction ceil_div(std::int64_t k);
    /// f(n) = n.
    static PenaltyFunction linear();

    /// Raw f(n), n >= 1.
    Rational operator()(std::int64_t n) const;

    PenaltyMode mode() const noexcept { return mode_; }
    bool binary() const noexcept { return mode_ == PenaltyMode::Binary; }
    const std::vector<Rational>& table() const noexcept { return table_; }
    const TailRule& tail() const noexcept { return tail_; }
    std::int64_t table_size() const noexcept { return static_cast<std::int64_t>(table_.size()); }

    /// Sizes n <= N with f(n) = 0, ascending.
    const std::vector<std::int64_t>& zeros() const noexcept { return zeros_; }

    /// Minimum total size cost over all ways to split n requests into groups.
    Rational effective(std::int64_t n) const;
    std::int64_t memo_bound() const noexcept { return static_cast<std::int64_t>(memo_.size()) - 1; }

    /// Every table value, tail included, lies in {0, c} for one c > 0.
    bool two_valued(Rational* c = nullptr) const;

    nlohmann::json to_json() const;
    static PenaltyFunction from_json(const nlohmann::json& j);

    friend bool operator==(const PenaltyFunction& a, const PenaltyFunction& b) {
        return a.table_ == b.table_ && a.tail_ == b.tail_;
    }

private:
    void build_memo();

    std::vector<Rational> table_;
    TailRule tail_;
    PenaltyMode mode_;
    std::vector<std::int64_t> zeros_;
    std::vector<Rational> memo_;  // effective(n) for n <= memo bound
    std::int64_t zero_gcd_ = 0;   // gcd of zeros (0 if none)
};

/// Reachability over sums of zeros: entry n (1 <= n <= limit) is true iff n is
/// a finite sum of zeros of f. Entry 0 is always false.
std::vector<bool> zero_penalty_set(const PenaltyFunction& f, std::int64_t limit);

struct PenaltyClass {
    enum class Variant { CaseI, CaseII, CaseIII };

    Variant variant;
    std::int64_t k = 0;  // CaseII modulus
    std::vector<std::int64_t> zeros;

    std::string label() const;
    /// Competitive regime text, e.g. "Case (ii), k=5: Theta(log k / log log k)".
    std::string regime() const;
};

/// Binary f only; requires the constant-one tail.
PenaltyClass classify(const PenaltyFunction& f);

inline Rational effective_penalty(const PenaltyFunction& f, std::int64_t n) { return f.effective(n); }

}  // namespace omdsc
