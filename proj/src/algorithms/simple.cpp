#include <cmath>

#include "omdsc/algorithms/algorithms.hpp"
#include "omdsc/numerics/error.hpp"

namespace omdsc::algo {
namespace {

template <class Num>
class Immediate final : public OnlineAlgorithm<Num> {
public:
    std::string name() const override { return "immediate"; }
    void on_arrival(const Num&, std::int64_t count, std::vector<Directive>& out) override {
        for (std::int64_t i = 0; i < count; ++i) out.push_back({1, "arrival", ""});
    }
    std::optional<Num> next_wakeup(const Num&) const override { return std::nullopt; }
    void on_wakeup(const Num&, std::vector<Directive>&) override {}
};

// Waiting-cost counter rule. k == 0 disables the size-k rule (plain TCP-ack).
template <class Num>
class CounterRule final : public OnlineAlgorithm<Num> {
public:
    CounterRule(std::int64_t k, CounterReset reset) : k_(k), reset_(reset) {}

    std::string name() const override {
        if (k_ == 0) return "tcp_ack";
        return "ceil_div:" + std::to_string(k_) + (reset_ == CounterReset::FlushOnly ? ",reset=flush" : "");
    }

    void on_arrival(const Num& now, std::int64_t count, std::vector<Directive>& out) override {
        accrue(now);
        unmatched_ += count;
        while (k_ > 0 && unmatched_ >= k_) {
            out.push_back({k_, "size_k", ""});
            unmatched_ -= k_;
            if (reset_ == CounterReset::EveryMatch) acc_ = Num(0);
        }
    }

    std::optional<Num> next_wakeup(const Num&) const override {
        if (unmatched_ == 0) return std::nullopt;
        if (NumTraits<Num>::reached(acc_, Num(1))) return last_;
        return last_ + (Num(1) - acc_) / Num(unmatched_);
    }

    void on_wakeup(const Num& now, std::vector<Directive>& out) override {
        accrue(now);
        if (unmatched_ > 0) out.push_back({unmatched_, "flush_all", ""});
        ++flushes_;
        unmatched_ = 0;
        acc_ = Num(0);
    }

    std::string line_tag() const override { return "wait"; }

    nlohmann::json diagnostics() const override { return {{"flushes", flushes_}}; }

private:
    void accrue(const Num& now) {
        if (unmatched_ > 0) acc_ += Num(unmatched_) * (now - last_);
        last_ = now;
    }

    std::int64_t k_;
    CounterReset reset_;
    std::int64_t unmatched_ = 0;
    Num acc_{0};
    Num last_{0};
    std::uint64_t flushes_ = 0;
};

template <class Num>
class MarReference final : public OnlineAlgorithm<Num> {
public:
    explicit MarReference(std::int64_t k) : k_(k), root_(isqrt(k)) {
        if (k < 2) throw Error(ErrorKind::Domain, "mar_ref needs k >= 2");
    }

    std::string name() const override { return "mar_ref:" + std::to_string(k_); }

    void on_arrival(const Num& now, std::int64_t count, std::vector<Directive>& out) override {
        unmatched_ += count;
        apply(now, out);
    }

    std::optional<Num> next_wakeup(const Num& now) const override {
        if (unmatched_ > 0 && now < Num(1)) return Num(1);
        return std::nullopt;
    }

    void on_wakeup(const Num& now, std::vector<Directive>& out) override { apply(now, out); }

private:
    static std::int64_t isqrt(std::int64_t k) {
        auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(k)));
        while (r * r > k) --r;
        while ((r + 1) * (r + 1) <= k) ++r;
        return r;
    }

    void apply(const Num& now, std::vector<Directive>& out) {
        if (!(now < Num(1))) {
            if (unmatched_ > 0) out.push_back({unmatched_, "time_one", ""});
            unmatched_ = 0;
            return;
        }
        while (unmatched_ >= k_) {
            out.push_back({k_, "size_k", ""});
            unmatched_ -= k_;
        }
        const std::int64_t part = k_ - 1 - root_;
        if (unmatched_ == k_ - 1 && part > 0) {
            out.push_back({part, "k_minus_one", ""});
            unmatched_ -= part;
        }
    }

    std::int64_t k_;
    std::int64_t root_;
    std::int64_t unmatched_ = 0;
};

}  // namespace

template <class Num>
std::unique_ptr<OnlineAlgorithm<Num>> immediate() {
    return std::make_unique<Immediate<Num>>();
}

template <class Num>
std::unique_ptr<OnlineAlgorithm<Num>> tcp_ack() {
    return std::make_unique<CounterRule<Num>>(0, CounterReset::EveryMatch);
}

template <class Num>
std::unique_ptr<OnlineAlgorithm<Num>> ceil_div(std::int64_t k, CounterReset reset) {
    if (k < 1) throw Error(ErrorKind::Domain, "ceil_div needs k >= 1");
    return std::make_unique<CounterRule<Num>>(k, reset);
}

template <class Num>
std::unique_ptr<OnlineAlgorithm<Num>> mar_reference(std::int64_t k) {
    return std::make_unique<MarReference<Num>>(k);
}

#define OMDSC_INSTANTIATE(Num)                                                              \
    template std::unique_ptr<OnlineAlgorithm<Num>> immediate<Num>();                        \
    template std::unique_ptr<OnlineAlgorithm<Num>> tcp_ack<Num>();                          \
    template std::unique_ptr<OnlineAlgorithm<Num>> ceil_div<Num>(std::int64_t, CounterReset); \
    template std::unique_ptr<OnlineAlgorithm<Num>> mar_reference<Num>(std::int64_t);
OMDSC_INSTANTIATE(Rational)
OMDSC_INSTANTIATE(double)
#undef OMDSC_INSTANTIATE

}  // namespace omdsc::algo
