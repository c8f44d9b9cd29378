// Phase-based recursive algorithm for B_f = kZ++, run as an explicit state
// machine. Each recursion level is entered through enter(); every wait is a
// state whose timed target is a threshold on one W_i.

#include <string>
#include <vector>

#include "omdsc/algorithms/algorithms.hpp"
#include "omdsc/engine/profile.hpp"
#include "omdsc/numerics/error.hpp"
#include "omdsc/numerics/residue.hpp"

namespace omdsc::algo {
namespace {

enum class Line { P1, P3, P5, P6, Step1 };

const char* line_name(Line l) {
    switch (l) {
        case Line::P1: return "p1";
        case Line::P3: return "p3";
        case Line::P5: return "p5";
        case Line::P6: return "p6";
        case Line::Step1: return "step1";
    }
    return "?";
}

template <class Num>
struct PhaseStats {
    std::int64_t index = 0;
    std::int64_t calls = 0;
    std::int64_t exit_size = 0;
    std::string exit_by;
    std::int64_t step1_matches = 0;
    bool completed = false;
    std::optional<Num> min_w_end;
};

template <class Num>
class Recurring final : public OnlineAlgorithm<Num> {
    using T = NumTraits<Num>;

public:
    explicit Recurring(const AlphaParam& alpha)
        : k_(alpha.k), alpha_(alpha.alpha_used), ceil_alpha_(alpha.alpha_used.ceil()), w_(alpha.k) {
        if (k_ < 2) throw Error(ErrorKind::Domain, "recurring needs k >= 2");
        start_phase(Num(0));
    }

    std::string name() const override {
        return "recurring:" + std::to_string(k_) + ",alpha=" + alpha_.str();
    }

    void on_arrival(const Num& now, std::int64_t count, std::vector<Directive>& out) override {
        w_.advance(now);
        while (count > 0) {
            const std::int64_t take = chunk(count);
            w_.add_arrivals(take);
            s_ += take;
            count -= take;
            global_rule(out);
            settle(out, false);
        }
    }

    std::optional<Num> next_wakeup(const Num&) const override {
        if (s_ - a_ == 0) return std::nullopt;
        const std::int64_t abar = residue(a_, k_);
        switch (line_) {
            case Line::P1:
            case Line::P5: return threshold_time(w_, abar, anchor_ + Num(2));
            case Line::P3:
            case Line::P6: return threshold_time(w_, abar, anchor_ + Num(1));
            case Line::Step1: return threshold_time(w_, abar, Num(1));
        }
        return std::nullopt;
    }

    void on_wakeup(const Num& now, std::vector<Directive>& out) override {
        w_.advance(now);
        settle(out, true);
    }

    std::string line_tag() const override { return line_name(line_); }
    std::string phase_tag() const override { return "phase " + std::to_string(phase_); }

    nlohmann::json diagnostics() const override {
        nlohmann::json j;
        j["k"] = k_;
        j["alpha"] = alpha_.str();
        j["rec_condition_checks"] = checks_;
        j["rec_condition_violations"] = {{"outside", viol_outside_}, {"inside", viol_inside_}, {"abar", viol_abar_}};
        j["shrink_violations"] = viol_shrink_;
        j["unmatched_violations"] = viol_unmatched_;
        j["level_violations"] = viol_level_;
        auto& ph = j["phases"] = nlohmann::json::array();
        for (const auto& p : phases_) {
            nlohmann::json e{{"index", p.index},          {"calls", p.calls},
                             {"exit_size", p.exit_size},  {"exit_by", p.exit_by},
                             {"step1_matches", p.step1_matches}, {"completed", p.completed}};
            e["min_w_end"] = p.min_w_end ? nlohmann::json(T::str(*p.min_w_end)) : nlohmann::json();
            ph.push_back(std::move(e));
        }
        return j;
    }

private:
    std::int64_t abar() const { return residue(a_, k_); }
    std::int64_t sbar() const { return residue(s_, k_); }
    Num level(std::int64_t l) const { return T::from_rational(Rational(l) / alpha_); }

    // How many of the pending arrivals can be absorbed before a waiting
    // condition on s-bar could change the state.
    std::int64_t chunk(std::int64_t count) const {
        switch (line_) {
            case Line::P3: {
                const std::int64_t d = residue(pp_ - s_, k_);  // units until s-bar reaches p'
                return d == 0 ? 1 : std::min(count, d);
            }
            case Line::P6: {
                const std::int64_t d = residue(p_ - s_, k_);
                return d == 0 ? 1 : std::min(count, d);
            }
            case Line::Step1: return T::reached(w_.W(abar()), Num(1)) ? 1 : count;
            default: return count;
        }
    }

    void emit(std::vector<Directive>& out, std::int64_t count, const char* line) {
        if (count <= 0) return;
        out.push_back({count, line, phase_tag()});
        a_ += count;
    }

    void global_rule(std::vector<Directive>& out) {
        while (s_ - a_ >= k_) emit(out, k_, "global");
        if (s_ - a_ < 0 || s_ - a_ >= k_) ++viol_unmatched_;
    }

    void start_phase(const Num& now) {
        w_.reset(now);
        s_ = 0;
        a_ = 0;
        phases_.push_back({});
        phases_.back().index = phase_ = static_cast<std::int64_t>(phases_.size()) - 1;
        prev_size_ = k_;
        prev_level_ = -1;
        enter(0, k_ - 1, 0);
    }

    void check_entry(const CyclicInterval& iv, std::int64_t l) {
        ++checks_;
        const auto w = w_.values();
        const Num inside = level(l);
        bool bad_out = false, bad_in = false;
        for (std::int64_t i = 0; i < k_; ++i) {
            const Num& wi = w[static_cast<std::size_t>(i)];
            if (iv.contains(i)) {
                bad_in = bad_in || !T::reached(wi, inside);
            } else {
                bad_out = bad_out || !T::reached(wi, Num(1));
            }
        }
        viol_outside_ += bad_out;
        viol_inside_ += bad_in;
        viol_abar_ += abar() != iv.lo();
        if (l < 0 || l > ceil_alpha_) ++viol_level_;
        // each call raises l or shrinks to at most floor(2L/alpha) + 1
        if (prev_level_ >= 0 && l != prev_level_ + 1 &&
            iv.size() > (Rational(2 * prev_size_) / alpha_).floor() + 1) {
            ++viol_shrink_;
        }
    }

    // recurring([p, q], l)
    void enter(std::int64_t p, std::int64_t q, std::int64_t l) {
        const CyclicInterval iv(p, q, k_);
        auto& ph = phases_.back();
        ++ph.calls;
        check_entry(iv, l);
        prev_size_ = iv.size();
        prev_level_ = l;
        p_ = p;
        q_ = q;
        l_ = l;
        // d1
        if (Rational(iv.size()) <= alpha_ || Rational(l) >= alpha_) {
            ph.exit_size = iv.size();
            ph.exit_by = Rational(l) >= alpha_ ? "level" : "size";
            line_ = Line::Step1;
            return;
        }
        line_ = Line::P1;
        anchor_ = w_.W(abar());
    }

    // Runs the state machine until it blocks. `timer` marks a wake-up at the
    // current state's own threshold time.
    void settle(std::vector<Directive>& out, bool timer) {
        while (true) {
            const std::int64_t ab = abar();
            switch (line_) {
                case Line::P1: {
                    if (!timer && !T::reached(w_.W(ab), anchor_ + Num(2))) return;
                    timer = false;
                    const CyclicInterval iv(p_, q_, k_);
                    const Num next = level(l_ + 1);
                    const auto first = w_.first_below(iv, next);
                    if (!first) {  // d2
                        enter(p_, q_, l_ + 1);
                        break;
                    }
                    // p2: deficient indices closest to and farthest from p
                    pp_ = *first;
                    qq_ = *w_.last_below(iv, next);
                    line_ = Line::P3;
                    anchor_ = w_.W(p_);
                    break;
                }
                case Line::P3: {
                    if (CyclicInterval(pp_, residue(p_ - 1, k_), k_).contains(sbar())) {
                        emit(out, residue(pp_ - a_, k_), "p4");
                        line_ = Line::P5;
                        anchor_ = w_.W(abar());
                        break;
                    }
                    if (!timer && !T::reached(w_.W(p_), anchor_ + Num(1))) return;
                    timer = false;
                    enter(p_, q_, l_ + 1);  // d3
                    break;
                }
                case Line::P5: {
                    if (!timer && !T::reached(w_.W(ab), anchor_ + Num(2))) return;
                    timer = false;
                    if (w_.all_at_least(CyclicInterval(pp_, qq_, k_), level(l_ + 1))) {  // c
                        line_ = Line::P6;
                        anchor_ = w_.W(pp_);
                        break;
                    }
                    // p8
                    const std::int64_t L = CyclicInterval(p_, q_, k_).size();
                    const std::int64_t reach = residue(pp_ + (Rational(2 * L) / alpha_).floor(), k_);
                    const std::int64_t r =
                        residue(reach - pp_, k_) <= residue(q_ - pp_, k_) ? reach : q_;
                    enter(pp_, r, l_);  // d5
                    break;
                }
                case Line::P6: {
                    if (CyclicInterval(p_, residue(pp_ - 1, k_), k_).contains(sbar())) {
                        emit(out, residue(p_ - a_, k_), "p7");
                        enter(abar(), q_, l_ + 1);  // d4
                        break;
                    }
                    if (!timer && !T::reached(w_.W(pp_), anchor_ + Num(1))) return;
                    timer = false;
                    enter(abar(), q_, l_ + 1);  // d4
                    break;
                }
                case Line::Step1: {
                    if (s_ <= a_) return;
                    if (!timer && !T::reached(w_.W(ab), Num(1))) return;
                    timer = false;
                    emit(out, 1, "step1");
                    ++phases_.back().step1_matches;
                    // Step 2
                    const Num mn = w_.min_value();
                    if (!T::reached(mn, Num(1))) break;
                    // Step 3
                    auto& ph = phases_.back();
                    ph.completed = true;
                    ph.min_w_end = mn;
                    emit(out, s_ - a_, "step3");
                    start_phase(w_.last_update());
                    break;
                }
            }
        }
    }

    std::int64_t k_;
    Rational alpha_;
    std::int64_t ceil_alpha_;
    WaitingProfile<Num> w_;
    std::int64_t s_ = 0;
    std::int64_t a_ = 0;

    Line line_ = Line::P1;
    std::int64_t p_ = 0, q_ = 0, l_ = 0;
    std::int64_t pp_ = 0, qq_ = 0;
    Num anchor_{0};

    std::int64_t phase_ = 0;
    std::vector<PhaseStats<Num>> phases_;
    std::int64_t prev_size_ = 0;
    std::int64_t prev_level_ = -1;

    std::uint64_t checks_ = 0;
    std::uint64_t viol_outside_ = 0, viol_inside_ = 0, viol_abar_ = 0;
    std::uint64_t viol_shrink_ = 0, viol_unmatched_ = 0, viol_level_ = 0;
};

}  // namespace

template <class Num>
std::unique_ptr<OnlineAlgorithm<Num>> recurring(const AlphaParam& alpha) {
    return std::make_unique<Recurring<Num>>(alpha);
}

template std::unique_ptr<OnlineAlgorithm<Rational>> recurring<Rational>(const AlphaParam&);
template std::unique_ptr<OnlineAlgorithm<double>> recurring<double>(const AlphaParam&);

}  // namespace omdsc::algo
