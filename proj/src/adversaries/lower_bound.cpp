// Round-based adaptive adversary for B_f = kZ++. It tracks the greedy waiting
// profile W over the requests it has given and shrinks the live interval
// [p, q] on every event until the interval is shorter than alpha^2.

#include <vector>

#include "omdsc/adversaries/adversaries.hpp"
#include "omdsc/engine/profile.hpp"
#include "omdsc/numerics/error.hpp"
#include "omdsc/numerics/residue.hpp"

namespace omdsc::adv {
namespace {

template <class Num>
class LowerBound final : public RequestSource<Num> {
    using T = NumTraits<Num>;

    struct Round {
        std::int64_t n;
        std::string event;
        Num time;
        std::int64_t p, q, h, injected;
    };

public:
    explicit LowerBound(const AlphaParam& alpha)
        : k_(alpha.k), alpha_(alpha.alpha_used), w_(alpha.k), q_(alpha.k - 1) {
        if (k_ < 2) throw Error(ErrorKind::Domain, "lb adversary needs k >= 2");
        if (Rational(k_) < alpha_ * alpha_) {
            throw Error(ErrorKind::Degenerate, "alpha^2 exceeds k; the construction has no rounds");
        }
    }

    std::string name() const override { return "lb:" + std::to_string(k_) + ",alpha=" + alpha_.str(); }

    std::optional<Num> next_event_time() const override {
        if (!started_) return Num(0);
        if (finalized_) return std::nullopt;
        return threshold_time(w_, abar(), anchor_ + Num(1));
    }

    std::int64_t on_time(const Num& now) override {
        w_.advance(now);
        if (!started_) {
            started_ = true;
            w_.add_arrivals(k_ - 1);
            s_ = k_ - 1;
            anchor_ = w_.W(abar());
            log("start", now, 0, k_ - 1);
            round_start();
            return k_ - 1;
        }
        // (c): W_a-bar gained 1 since the last event
        const std::int64_t h = h_now();
        p_ = residue(q_ - h + 1, k_);
        ++n_;
        anchor_ = w_.W(abar());
        log("c", now, h, 0);
        round_start();
        return 0;
    }

    std::int64_t on_match(const Num& now, std::int64_t size) override {
        w_.advance(now);
        a_ += size;
        if (finalized_ || size % k_ == 0) return 0;
        // (b)
        const std::int64_t h = h_now();
        const std::int64_t q_old = q_;
        if (!CyclicInterval(residue(q_old - h + 1, k_), q_old, k_).contains(abar())) {
            p_ = residue(q_old - h + 1, k_);
        } else {
            p_ = residue(q_old - 2 * h + 1, k_);
            q_ = residue(q_old - h, k_);
        }
        const std::int64_t give = residue(q_ - s_, k_);
        w_.add_arrivals(give);
        s_ += give;
        ++n_;
        anchor_ = w_.W(abar());
        log("b", now, h, give);
        round_start();
        return give;
    }

    bool finalized() const override { return finalized_; }

    nlohmann::json diagnostics() const override {
        nlohmann::json j{{"k", k_},
                         {"alpha", alpha_.str()},
                         {"rounds", n_},
                         {"n_star", n_star_ ? nlohmann::json(*n_star_) : nlohmann::json()},
                         {"given", s_},
                         {"round_start_checks", checks_},
                         {"violations", {{"size", viol_size_}, {"waiting", viol_wait_}, {"position", viol_pos_}}}};
        auto& ev = j["events"] = nlohmann::json::array();
        for (const auto& r : log_) {
            ev.push_back({{"n", r.n}, {"event", r.event}, {"t", T::str(r.time)}, {"p", r.p}, {"q", r.q},
                          {"h", r.h}, {"injected", r.injected}});
        }
        return j;
    }

private:
    std::int64_t abar() const { return residue(a_, k_); }
    std::int64_t size() const { return CyclicInterval(p_, q_, k_).size(); }
    std::int64_t h_now() const { return (Rational(size()) / (alpha_ * alpha_)).ceil(); }

    void log(const char* event, const Num& now, std::int64_t h, std::int64_t injected) {
        log_.push_back({n_, event, now, p_, q_, h, injected});
    }

    // Checks the three round-start conditions, then event (a).
    void round_start() {
        ++checks_;
        const std::int64_t len = size();
        Rational pow_n(1);
        for (std::int64_t i = 0; i < n_; ++i) pow_n *= alpha_;
        viol_size_ += Rational(len) * pow_n * pow_n < Rational(k_) || Rational(k_) < Rational(len) * pow_n;
        const Num bound = T::from_rational(Rational(2 * n_) / alpha_);
        const CyclicInterval iv(p_, q_, k_);
        bool over = false;
        iv.for_each([&](std::int64_t i) { over = over || !T::reached(bound, w_.W(i)); });
        viol_wait_ += over;
        viol_pos_ += !CyclicInterval(residue(q_ + 1, k_), p_, k_).contains(abar()) || residue(s_, k_) != q_;
        if (Rational(len) < alpha_ * alpha_) {
            finalized_ = true;
            n_star_ = n_;
        }
    }

    std::int64_t k_;
    Rational alpha_;
    WaitingProfile<Num> w_;
    std::int64_t p_ = 0, q_;
    std::int64_t s_ = 0, a_ = 0;
    std::int64_t n_ = 0;
    Num anchor_{0};
    bool started_ = false;
    bool finalized_ = false;
    std::optional<std::int64_t> n_star_;
    std::vector<Round> log_;
    std::uint64_t checks_ = 0;
    std::uint64_t viol_size_ = 0, viol_wait_ = 0, viol_pos_ = 0;
};

}  // namespace

template <class Num>
std::unique_ptr<RequestSource<Num>> lb_adversary(const AlphaParam& alpha) {
    return std::make_unique<LowerBound<Num>>(alpha);
}

template std::unique_ptr<RequestSource<Rational>> lb_adversary<Rational>(const AlphaParam&);
template std::unique_ptr<RequestSource<double>> lb_adversary<double>(const AlphaParam&);

}  // namespace omdsc::adv
