#include "omdsc/penalty/penalty.hpp"

#include <algorithm>
#include <numeric>

#include "omdsc/numerics/error.hpp"

namespace omdsc {

namespace {

std::int64_t ceil_div_int(std::int64_t n, std::int64_t k) { return (n + k - 1) / k; }

}  // namespace

Rational TailRule::at(std::int64_t n) const {
    switch (kind) {
        case Kind::Constant: return constant;
        case Kind::CeilDiv: return Rational(ceil_div_int(n, divisor));
        case Kind::Linear: return Rational(n);
    }
    return constant;
}

PenaltyFunction::PenaltyFunction(std::vector<Rational> table, TailRule tail)
    : table_(std::move(table)), tail_(std::move(tail)) {
    if (table_.empty()) throw Error(ErrorKind::Domain, "penalty table must have at least one entry");
    if (tail_.kind == TailRule::Kind::CeilDiv && tail_.divisor < 1) {
        throw Error(ErrorKind::Domain, "ceil_div tail needs a positive divisor");
    }
    if (tail_.kind == TailRule::Kind::Constant && tail_.constant < Rational(0)) {
        throw Error(ErrorKind::Domain, "negative tail constant");
    }
    bool binary = tail_.is_constant_one();
    for (std::size_t i = 0; i < table_.size(); ++i) {
        if (table_[i] < Rational(0)) throw Error(ErrorKind::Domain, "negative penalty value");
        if (table_[i] == Rational(0)) zeros_.push_back(static_cast<std::int64_t>(i) + 1);
        if (table_[i] != Rational(0) && table_[i] != Rational(1)) binary = false;
    }
    mode_ = binary ? PenaltyMode::Binary : PenaltyMode::General;
    for (std::int64_t z : zeros_) zero_gcd_ = std::gcd(zero_gcd_, z);
    build_memo();
}

PenaltyFunction PenaltyFunction::constant_one() {
    return PenaltyFunction({Rational(1)}, TailRule::constant_one());
}

PenaltyFunction PenaltyFunction::from_zeros(const std::vector<std::int64_t>& zeros,
                                            std::int64_t table_size) {
    std::int64_t n = std::max<std::int64_t>(table_size, 1);
    for (std::int64_t z : zeros) {
        if (z < 1) throw Error(ErrorKind::Domain, "zeros must be positive");
        n = std::max(n, z);
    }
    std::vector<Rational> table(static_cast<std::size_t>(n), Rational(1));
    for (std::int64_t z : zeros) table[static_cast<std::size_t>(z - 1)] = Rational(0);
    return PenaltyFunction(std::move(table), TailRule::constant_one());
}

PenaltyFunction PenaltyFunction::multiples_of(std::int64_t k) {
    if (k < 1) throw Error(ErrorKind::Domain, "k must be positive");
    return from_zeros({k}, k);
}

PenaltyFunction PenaltyFunction::ceil_div(std::int64_t k) {
    if (k < 1) throw Error(ErrorKind::Domain, "k must be positive");
    return PenaltyFunction(std::vector<Rational>(static_cast<std::size_t>(k), Rational(1)),
                           TailRule::ceil_div(k));
}

PenaltyFunction PenaltyFunction::linear() {
    return PenaltyFunction({Rational(1)}, TailRule::linear());
}

Rational PenaltyFunction::operator()(std::int64_t n) const {
    if (n < 1) throw Error(ErrorKind::Domain, "penalty defined for n >= 1");
    if (n <= table_size()) return table_[static_cast<std::size_t>(n - 1)];
    return tail_.at(n);
}

bool PenaltyFunction::two_valued(Rational* c) const {
    if (tail_.kind != TailRule::Kind::Constant) return false;
    const Rational& v = tail_.constant;
    for (const Rational& x : table_) {
        if (x != Rational(0) && x != v) return false;
    }
    if (c) *c = v;
    return true;
}

void PenaltyFunction::build_memo() {
    const std::int64_t n_tab = table_size();
    Rational c;
    if (two_valued(&c)) {
        std::int64_t bound = std::max<std::int64_t>(1024, n_tab + 1);
        if (!zeros_.empty()) bound = std::max(bound, zeros_.front() * zeros_.back() + n_tab + 1);
        std::vector<bool> reach(static_cast<std::size_t>(bound + 1), false);
        reach[0] = true;
        for (std::int64_t n = 1; n <= bound; ++n) {
            for (std::int64_t z : zeros_) {
                if (z > n) break;
                if (reach[static_cast<std::size_t>(n - z)]) {
                    reach[static_cast<std::size_t>(n)] = true;
                    break;
                }
            }
        }
        memo_.assign(static_cast<std::size_t>(bound + 1), c);
        memo_[0] = Rational(0);
        for (std::int64_t n = 1; n <= bound; ++n) {
            if (reach[static_cast<std::size_t>(n)]) memo_[static_cast<std::size_t>(n)] = Rational(0);
        }
        return;
    }

    auto matches_family = [&](auto&& fn) {
        for (std::int64_t n = 1; n <= n_tab; ++n) {
            if (table_[static_cast<std::size_t>(n - 1)] != fn(n)) return false;
        }
        return true;
    };
    if ((tail_.kind == TailRule::Kind::CeilDiv &&
         matches_family([&](std::int64_t n) { return Rational(ceil_div_int(n, tail_.divisor)); })) ||
        (tail_.kind == TailRule::Kind::Linear &&
         matches_family([](std::int64_t n) { return Rational(n); }))) {
        // subadditive families: splitting never helps, so effective == f
        memo_.resize(static_cast<std::size_t>(n_tab + 1));
        memo_[0] = Rational(0);
        for (std::int64_t n = 1; n <= n_tab; ++n) memo_[static_cast<std::size_t>(n)] = (*this)(n);
        return;
    }

    const std::int64_t bound = std::max<std::int64_t>(1024, 10 * n_tab);
    memo_.assign(static_cast<std::size_t>(bound + 1), Rational(0));
    for (std::int64_t n = 1; n <= bound; ++n) {
        Rational best = (*this)(n);
        for (std::int64_t j = 1; j <= n / 2; ++j) {
            Rational cand = memo_[static_cast<std::size_t>(j)] + memo_[static_cast<std::size_t>(n - j)];
            if (cand < best) best = std::move(cand);
        }
        memo_[static_cast<std::size_t>(n)] = std::move(best);
    }
}

Rational PenaltyFunction::effective(std::int64_t n) const {
    if (n < 1) throw Error(ErrorKind::Domain, "effective penalty defined for n >= 1");
    if (n <= memo_bound()) return memo_[static_cast<std::size_t>(n)];
    Rational c;
    if (two_valued(&c)) {
        if (zero_gcd_ != 0 && n % zero_gcd_ == 0) return Rational(0);
        return c;
    }
    if (tail_.kind == TailRule::Kind::CeilDiv || tail_.kind == TailRule::Kind::Linear) {
        return tail_.at(n);
    }
    throw Error(ErrorKind::Domain, "effective penalty requested beyond the memo bound");
}

nlohmann::json PenaltyFunction::to_json() const {
    nlohmann::json j;
    auto& arr = j["table"] = nlohmann::json::array();
    for (const Rational& x : table_) arr.push_back(x.str());
    switch (tail_.kind) {
        case TailRule::Kind::Constant:
            if (tail_.is_constant_one()) {
                j["tail"] = "constant_one";
            } else {
                j["tail"] = {{"constant", tail_.constant.str()}};
            }
            break;
        case TailRule::Kind::CeilDiv: j["tail"] = {{"ceil_div", tail_.divisor}}; break;
        case TailRule::Kind::Linear: j["tail"] = "linear"; break;
    }
    return j;
}

namespace {

Rational json_rational(const nlohmann::json& v) {
    if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
    if (v.is_string()) return Rational::parse(v.get<std::string>());
    throw Error(ErrorKind::Parse, "penalty values must be integers or \"p/q\" strings");
}

}  // namespace

PenaltyFunction PenaltyFunction::from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("table") || !j["table"].is_array()) {
        throw Error(ErrorKind::Parse, "penalty needs a \"table\" array");
    }
    std::vector<Rational> table;
    for (const auto& v : j["table"]) table.push_back(json_rational(v));
    TailRule tail = TailRule::constant_one();
    if (j.contains("tail")) {
        const auto& t = j["tail"];
        if (t.is_string()) {
            const auto s = t.get<std::string>();
            if (s == "constant_one") {
                tail = TailRule::constant_one();
            } else if (s == "linear") {
                tail = TailRule::linear();
            } else {
                throw Error(ErrorKind::Parse, "unknown tail rule '" + s + "'");
            }
        } else if (t.is_object() && t.contains("ceil_div")) {
            tail = TailRule::ceil_div(t["ceil_div"].get<std::int64_t>());
        } else if (t.is_object() && t.contains("constant")) {
            tail = TailRule::constant_value(json_rational(t["constant"]));
        } else {
            throw Error(ErrorKind::Parse, "malformed tail rule");
        }
    }
    return PenaltyFunction(std::move(table), std::move(tail));
}

std::vector<bool> zero_penalty_set(const PenaltyFunction& f, std::int64_t limit) {
    if (!f.binary()) throw Error(ErrorKind::Mode, "zero-penalty set needs a binary penalty");
    if (limit < 1) throw Error(ErrorKind::Domain, "limit must be >= 1");
    std::vector<bool> reach(static_cast<std::size_t>(limit + 1), false);
    reach[0] = true;
    const auto& zeros = f.zeros();
    for (std::int64_t n = 1; n <= limit; ++n) {
        for (std::int64_t z : zeros) {
            if (z > n) break;
            if (reach[static_cast<std::size_t>(n - z)]) {
                reach[static_cast<std::size_t>(n)] = true;
                break;
            }
        }
    }
    reach[0] = false;
    return reach;
}

PenaltyClass classify(const PenaltyFunction& f) {
    if (!f.binary()) throw Error(ErrorKind::Mode, "classification needs a binary penalty");
    PenaltyClass out{PenaltyClass::Variant::CaseI, 0, f.zeros()};
    if (out.zeros.empty()) return out;
    const std::int64_t k = out.zeros.front();
    const bool all_multiples =
        std::all_of(out.zeros.begin(), out.zeros.end(), [k](std::int64_t z) { return z % k == 0; });
    if (all_multiples) {
        out.variant = PenaltyClass::Variant::CaseII;
        out.k = k;
    } else {
        out.variant = PenaltyClass::Variant::CaseIII;
    }
    return out;
}

std::string PenaltyClass::label() const {
    switch (variant) {
        case Variant::CaseI: return "CaseI";
        case Variant::CaseII: return "CaseII(" + std::to_string(k) + ")";
        case Variant::CaseIII: return "CaseIII";
    }
    return "?";
}

std::string PenaltyClass::regime() const {
    switch (variant) {
        case Variant::CaseI: return "Case (i): 2-competitive (Dooly et al.)";
        case Variant::CaseII:
            if (k == 1) return "Case (ii), k=1: 1-competitive (immediate matching)";
            if (k == 2) return "Case (ii), k=2: 3-competitive (Emek et al.)";
            return "Case (ii), k=" + std::to_string(k) + ": Theta(log k / log log k)";
        case Variant::CaseIII: return "Case (iii): unbounded";
    }
    return "?";
}

}  // namespace omdsc
