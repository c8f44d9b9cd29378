#include <charconv>
#include <cmath>
#include <fstream>
#include <random>

#include "omdsc/adversaries/adversaries.hpp"
#include "omdsc/numerics/error.hpp"

namespace omdsc::adv {
namespace {

constexpr std::int64_t kGrid = std::int64_t{1} << 30;

Rational on_grid(double t) { return Rational(std::llround(t * static_cast<double>(kGrid)), kGrid); }

template <class Num>
class FixedSource final : public RequestSource<Num> {
public:
    explicit FixedSource(Instance<Num> inst) : inst_(std::move(inst)) {}

    std::string name() const override { return "fixed"; }

    std::optional<Num> next_event_time() const override {
        if (next_ >= inst_.arrivals().size()) return std::nullopt;
        return inst_.arrivals()[next_].time;
    }

    std::int64_t on_time(const Num& now) override {
        std::int64_t count = 0;
        const auto& arr = inst_.arrivals();
        while (next_ < arr.size() && arr[next_].time == now) count += static_cast<std::int64_t>(arr[next_++].count);
        return count;
    }

    std::int64_t on_match(const Num&, std::int64_t) override { return 0; }
    bool finalized() const override { return next_ >= inst_.arrivals().size(); }

private:
    Instance<Num> inst_;
    std::size_t next_ = 0;
};

template <class Num>
class CaseIII final : public RequestSource<Num> {
public:
    CaseIII(const PenaltyFunction& f, const Rational& eps) : eps_(NumTraits<Num>::from_rational(eps)) {
        if (!(Rational(0) < eps)) throw Error(ErrorKind::Domain, "epsilon must be positive");
        std::tie(kstar_, ell_) = case_iii_parameters(f);
    }

    std::string name() const override { return "case3"; }

    std::optional<Num> next_event_time() const override {
        if (stage_ == 0) return Num(0);
        if (stage_ == 1) return eps_;
        return std::nullopt;
    }

    std::int64_t on_time(const Num&) override {
        if (stage_ == 0) {
            stage_ = 1;
            given_ = kstar_;
            return kstar_;
        }
        stage_ = 2;
        if (matched_before_eps_ >= kstar_) {
            given_ += ell_ - kstar_;
            return ell_ - kstar_;
        }
        return 0;
    }

    std::int64_t on_match(const Num& now, std::int64_t size) override {
        if (now < eps_) matched_before_eps_ += size;
        return 0;
    }

    bool finalized() const override { return stage_ == 2; }

    nlohmann::json diagnostics() const override {
        return {{"k_star", kstar_}, {"ell", ell_}, {"given", given_},
                {"all_matched_before_eps", matched_before_eps_ >= kstar_}};
    }

private:
    Num eps_;
    std::int64_t kstar_ = 0, ell_ = 0;
    int stage_ = 0;
    std::int64_t matched_before_eps_ = 0;
    std::int64_t given_ = 0;
};

template <class Num>
class Mar final : public RequestSource<Num> {
public:
    explicit Mar(std::int64_t k) : k_(k) {
        if (k < 2) throw Error(ErrorKind::Domain, "mar adversary needs k >= 2");
    }

    std::string name() const override { return "mar:" + std::to_string(k_); }

    std::optional<Num> next_event_time() const override {
        if (stage_ == 0) return Num(0);
        if (stage_ == 1) return Num(1);
        return std::nullopt;
    }

    std::int64_t on_time(const Num&) override {
        if (stage_++ == 0) {
            given_ += k_ - 1;
            return k_ - 1;
        }
        return 0;
    }

    std::int64_t on_match(const Num& now, std::int64_t) override {
        if (stage_ != 1 || !(now < Num(1))) return 0;
        ++matches_before_one_;
        given_ += k_ - 1;
        return k_ - 1;
    }

    bool finalized() const override { return stage_ == 2; }

    nlohmann::json diagnostics() const override {
        return {{"k", k_}, {"matches_before_one", matches_before_one_}, {"given", given_}};
    }

private:
    std::int64_t k_;
    int stage_ = 0;
    std::int64_t matches_before_one_ = 0;
    std::int64_t given_ = 0;
};

template <class Num>
class Empty final : public RequestSource<Num> {
public:
    std::string name() const override { return "empty"; }
    std::optional<Num> next_event_time() const override { return std::nullopt; }
    std::int64_t on_time(const Num&) override { return 0; }
    std::int64_t on_match(const Num&, std::int64_t) override { return 0; }
    bool finalized() const override { return true; }
};

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(sep, start);
        out.push_back(text.substr(start, pos - start));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

std::int64_t to_int(const std::string& text, const std::string& spec) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw Error(ErrorKind::Parse, "bad integer '" + text + "' in source spec '" + spec + "'");
    }
    return v;
}

}  // namespace

std::pair<std::int64_t, std::int64_t> case_iii_parameters(const PenaltyFunction& f) {
    const auto cls = classify(f);
    if (cls.variant != PenaltyClass::Variant::CaseIII) {
        throw Error(ErrorKind::Classification, "case3 adversary needs a case (iii) penalty");
    }
    const std::int64_t maxz = cls.zeros.back();
    const std::int64_t limit = 4 * maxz * maxz;
    const auto set = zero_penalty_set(f, limit);
    std::int64_t kstar = 0, ell = 0;
    for (std::int64_t n = 1; n <= limit; ++n) {
        if (!set[static_cast<std::size_t>(n)]) continue;
        if (kstar == 0) {
            kstar = n;
        } else if (n % kstar != 0) {
            ell = n;
            break;
        }
    }
    if (ell == 0) throw Error(ErrorKind::Classification, "no non-multiple found below the search bound");
    return {kstar, ell};
}

template <class Num>
std::unique_ptr<RequestSource<Num>> fixed_source(Instance<Num> instance) {
    return std::make_unique<FixedSource<Num>>(std::move(instance));
}

template <class Num>
Instance<Num> poisson_instance(const PenaltyFunction& f, const Rational& rate, std::int64_t m,
                               std::uint64_t seed) {
    if (!(Rational(0) < rate)) throw Error(ErrorKind::Domain, "poisson rate must be positive");
    if (m < 0) throw Error(ErrorKind::Domain, "request count must be nonnegative");
    std::mt19937_64 rng(seed);
    std::exponential_distribution<double> gap(rate.to_double());
    Instance<Num> inst(f);
    double t = 0;
    std::optional<Rational> pending;
    std::uint64_t count = 0;
    for (std::int64_t i = 0; i < m; ++i) {
        t += gap(rng);
        Rational g = on_grid(t);
        if (pending && *pending == g) {
            ++count;
            continue;
        }
        if (pending) inst.add(NumTraits<Num>::from_rational(*pending), count);
        pending = g;
        count = 1;
    }
    if (pending) inst.add(NumTraits<Num>::from_rational(*pending), count);
    inst.finalize();
    return inst;
}

template <class Num>
std::unique_ptr<RequestSource<Num>> poisson_source(const PenaltyFunction& f, const Rational& rate,
                                                   std::int64_t m, std::uint64_t seed) {
    return fixed_source(poisson_instance<Num>(f, rate, m, seed));
}

template <class Num>
Instance<Num> batched_instance(const PenaltyFunction& f, const Rational& rate, std::int64_t events,
                               std::int64_t max_count, std::uint64_t seed) {
    if (!(Rational(0) < rate) || max_count < 1) throw Error(ErrorKind::Domain, "bad batch parameters");
    std::mt19937_64 rng(seed);
    std::exponential_distribution<double> gap(rate.to_double());
    std::uniform_int_distribution<std::int64_t> size(1, max_count);
    Instance<Num> inst(f);
    double t = 0;
    Rational last(-1);
    for (std::int64_t i = 0; i < events; ++i) {
        if (i > 0) t += gap(rng);
        Rational g = on_grid(t);
        const auto c = static_cast<std::uint64_t>(size(rng));
        if (g == last) {
            g += Rational(1, kGrid);  // keep instants distinct
            t = g.to_double();
        }
        inst.add(NumTraits<Num>::from_rational(g), c);
        last = g;
    }
    inst.finalize();
    return inst;
}

template <class Num>
std::unique_ptr<RequestSource<Num>> case_iii_adversary(const PenaltyFunction& f, const Rational& eps) {
    return std::make_unique<CaseIII<Num>>(f, eps);
}

template <class Num>
std::unique_ptr<RequestSource<Num>> mar_adversary(std::int64_t k) {
    return std::make_unique<Mar<Num>>(k);
}

template <class Num>
std::unique_ptr<RequestSource<Num>> make_source(const std::string& spec, const PenaltyFunction& f) {
    const auto colon = spec.find(':');
    const std::string head = spec.substr(0, colon);
    const std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
    if (head == "empty") return std::make_unique<Empty<Num>>();
    if (head == "fixed") {
        std::ifstream in(rest);
        if (!in) throw Error(ErrorKind::Parse, "cannot open instance file '" + rest + "'");
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorKind::Parse, std::string("instance file: ") + e.what());
        }
        return fixed_source(Instance<Num>::from_json(j));
    }
    const auto args = split(rest, ',');
    if (head == "poisson" && args.size() == 3) {
        return poisson_source<Num>(f, Rational::parse(args[0]), to_int(args[1], spec),
                                   static_cast<std::uint64_t>(to_int(args[2], spec)));
    }
    if (head == "batches" && args.size() == 4) {
        return fixed_source(batched_instance<Num>(f, Rational::parse(args[0]), to_int(args[1], spec),
                                                  to_int(args[2], spec),
                                                  static_cast<std::uint64_t>(to_int(args[3], spec))));
    }
    if (head == "case3" && args.size() == 1) {
        return case_iii_adversary<Num>(f, args[0].empty() ? Rational(1, 1000) : Rational::parse(args[0]));
    }
    if (head == "mar" && args.size() == 1) return mar_adversary<Num>(to_int(args[0], spec));
    if (head == "lb" && !args.empty()) {
        const std::int64_t k = to_int(args[0], spec);
        AlphaParam alpha = solve_alpha(k);
        for (std::size_t i = 1; i < args.size(); ++i) {
            if (args[i].rfind("alpha=", 0) != 0) throw Error(ErrorKind::Parse, "unknown lb option '" + args[i] + "'");
            alpha = alpha_with_override(k, Rational::parse(args[i].substr(6)));
        }
        return lb_adversary<Num>(alpha);
    }
    throw Error(ErrorKind::Parse, "unknown source spec '" + spec + "'");
}

#define OMDSC_INSTANTIATE(Num)                                                                          \
    template std::unique_ptr<RequestSource<Num>> fixed_source<Num>(Instance<Num>);                      \
    template Instance<Num> poisson_instance<Num>(const PenaltyFunction&, const Rational&, std::int64_t, \
                                                 std::uint64_t);                                        \
    template std::unique_ptr<RequestSource<Num>> poisson_source<Num>(const PenaltyFunction&,            \
                                                                     const Rational&, std::int64_t,     \
                                                                     std::uint64_t);                    \
    template Instance<Num> batched_instance<Num>(const PenaltyFunction&, const Rational&, std::int64_t, \
                                                 std::int64_t, std::uint64_t);                          \
    template std::unique_ptr<RequestSource<Num>> case_iii_adversary<Num>(const PenaltyFunction&,        \
                                                                         const Rational&);              \
    template std::unique_ptr<RequestSource<Num>> mar_adversary<Num>(std::int64_t);                      \
    template std::unique_ptr<RequestSource<Num>> make_source<Num>(const std::string&, const PenaltyFunction&);
OMDSC_INSTANTIATE(Rational)
OMDSC_INSTANTIATE(double)
#undef OMDSC_INSTANTIATE

}  // namespace omdsc::adv
