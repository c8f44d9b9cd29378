#include "omdsc/offline/offline.hpp"

#include <algorithm>
#include <deque>
#include <functional>

#include "omdsc/kernels/kernels.hpp"
#include "omdsc/numerics/error.hpp"
#include "omdsc/numerics/scalar.hpp"

namespace omdsc::offline {
namespace {

template <class Num>
void require_finalized(const Instance<Num>& inst) {
    if (!inst.finalized()) throw Error(ErrorKind::Unfinalized, "offline optimum needs a finalized instance");
}

template <class Num>
std::vector<Num> prefix_sums(const std::vector<Num>& t) {
    std::vector<Num> p(t.size() + 1, Num(0));
    for (std::size_t i = 0; i < t.size(); ++i) p[i + 1] = p[i] + t[i];
    return p;
}

// Walks the argmin chain back from m into consecutive groups.
template <class Num>
std::vector<Group<Num>> groups_from(const std::vector<std::int64_t>& from, const std::vector<Num>& t) {
    std::vector<Group<Num>> out;
    for (auto i = static_cast<std::int64_t>(t.size()); i > 0;) {
        const std::int64_t j = from[static_cast<std::size_t>(i)];
        Group<Num> g{t[static_cast<std::size_t>(i - 1)], {}};
        for (std::int64_t r = j; r < i; ++r) g.members.push_back(r);
        out.push_back(std::move(g));
        i = j;
    }
    std::reverse(out.begin(), out.end());
    return out;
}

template <class Num>
std::vector<Num> effective_table(const PenaltyFunction& f, std::int64_t m) {
    std::vector<Num> pen(static_cast<std::size_t>(m + 1), Num(0));
    for (std::int64_t n = 1; n <= m; ++n) pen[static_cast<std::size_t>(n)] = NumTraits<Num>::from_rational(f.effective(n));
    return pen;
}

// Lower envelope of y = b_j - j x, lines added with increasing j, queried at
// nondecreasing x.
template <class Num>
class Envelope {
public:
    explicit Envelope(const std::vector<Num>& b) : b_(&b) {}

    void add(std::int64_t j) {
        while (q_.size() >= 2 && redundant(q_[q_.size() - 2], q_.back(), j)) q_.pop_back();
        q_.push_back(j);
    }

    bool empty() const { return q_.empty(); }

    std::pair<Num, std::int64_t> query(const Num& x) {
        while (q_.size() >= 2 && !(value(q_[0], x) < value(q_[1], x))) q_.pop_front();
        return {value(q_[0], x), q_[0]};
    }

private:
    Num value(std::int64_t j, const Num& x) const { return (*b_)[static_cast<std::size_t>(j)] - Num(j) * x; }

    // Line j2 never strictly wins once j3 is present (slopes -j1 > -j2 > -j3).
    bool redundant(std::int64_t j1, std::int64_t j2, std::int64_t j3) const {
        const Num& b1 = (*b_)[static_cast<std::size_t>(j1)];
        const Num& b2 = (*b_)[static_cast<std::size_t>(j2)];
        const Num& b3 = (*b_)[static_cast<std::size_t>(j3)];
        return (b3 - b1) * Num(j2 - j1) <= (b2 - b1) * Num(j3 - j1);
    }

    const std::vector<Num>* b_;
    std::deque<std::int64_t> q_;
};

}  // namespace

const char* to_string(Method m) {
    switch (m) {
        case Method::Dp: return "dp";
        case Method::Hull: return "hull";
        case Method::BruteForce: return "brute_force";
    }
    return "?";
}

template <class Num>
nlohmann::json OfflineSolution<Num>::to_json() const {
    nlohmann::json j;
    j["backend"] = omdsc::to_string(NumTraits<Num>::backend);
    j["cost"] = NumTraits<Num>::str(cost);
    j["method"] = to_string(method);
    auto& gs = j["groups"] = nlohmann::json::array();
    for (const auto& g : groups) {
        nlohmann::json e{{"t", NumTraits<Num>::str(g.time)}, {"size", g.members.size()}};
        const bool contiguous = !g.members.empty() && g.members.back() - g.members.front() + 1 ==
                                                          static_cast<std::int64_t>(g.members.size());
        if (contiguous) {
            e["first"] = g.members.front();
        } else {
            e["members"] = g.members;
        }
        gs.push_back(std::move(e));
    }
    return j;
}

template <class Num>
OfflineSolution<Num> optimal_cost_dp(const Instance<Num>& inst) {
    require_finalized(inst);
    const auto t = inst.request_times();
    const auto m = static_cast<std::int64_t>(t.size());
    const auto P = prefix_sums(t);
    const auto pen = effective_table<Num>(inst.penalty(), m);
    std::vector<Num> dp(static_cast<std::size_t>(m + 1), Num(0));
    std::vector<std::int64_t> from(static_cast<std::size_t>(m + 1), 0);

    if constexpr (NumTraits<Num>::exact) {
        for (std::int64_t i = 1; i <= m; ++i) {
            const Num& ti = t[static_cast<std::size_t>(i - 1)];
            std::optional<Num> best;
            for (std::int64_t j = 0; j < i; ++j) {
                Num c = dp[static_cast<std::size_t>(j)] + pen[static_cast<std::size_t>(i - j)] +
                        Num(i - j) * ti - (P[static_cast<std::size_t>(i)] - P[static_cast<std::size_t>(j)]);
                if (!best || c < *best) {
                    best = std::move(c);
                    from[static_cast<std::size_t>(i)] = j;
                }
            }
            dp[static_cast<std::size_t>(i)] = *best;
        }
    } else {
        // pen_rev[x] = f_eff(m - x), so row i reads f_eff(i - j) at pen_rev[m - i + j]
        std::vector<double> pen_rev(static_cast<std::size_t>(m), 0.0);
        for (std::int64_t x = 0; x < m; ++x) pen_rev[static_cast<std::size_t>(x)] = pen[static_cast<std::size_t>(m - x)];
        const auto& k = kernels::active();
        for (std::int64_t i = 1; i <= m; ++i) {
            const double ti = t[static_cast<std::size_t>(i - 1)];
            const auto n = static_cast<std::size_t>(i);
            const auto r = k.dp_row_min(std::span<const double>(dp.data(), n), std::span<const double>(P.data(), n),
                                        std::span<const double>(pen_rev.data() + (m - i), n), ti);
            dp[n] = r.value + static_cast<double>(i) * ti - P[n];
            from[n] = static_cast<std::int64_t>(r.index);
        }
    }
    return {dp[static_cast<std::size_t>(m)], groups_from(from, t), Method::Dp};
}

bool hull_applicable(const PenaltyFunction& f, Rational* c, std::int64_t* g) {
    Rational value;
    if (!f.two_valued(&value)) return false;
    const auto& zeros = f.zeros();
    const std::int64_t base = zeros.empty() ? 0 : zeros.front();
    if (base != 0 && !std::all_of(zeros.begin(), zeros.end(), [base](std::int64_t z) { return z % base == 0; })) {
        return false;
    }
    if (c) *c = value;
    if (g) *g = base;
    return true;
}

template <class Num>
OfflineSolution<Num> optimal_cost_hull(const Instance<Num>& inst) {
    require_finalized(inst);
    Rational c_r;
    std::int64_t g = 0;
    if (!hull_applicable(inst.penalty(), &c_r, &g)) {
        throw Error(ErrorKind::Mode, "hull DP needs a two-valued case (i) or (ii) penalty");
    }
    const Num c = NumTraits<Num>::from_rational(c_r);
    const auto t = inst.request_times();
    const auto m = static_cast<std::int64_t>(t.size());
    const auto P = prefix_sums(t);
    std::vector<Num> dp(static_cast<std::size_t>(m + 1), Num(0));
    std::vector<Num> b(static_cast<std::size_t>(m + 1), Num(0));  // dp[j] + P[j]
    std::vector<std::int64_t> from(static_cast<std::size_t>(m + 1), 0);

    Envelope<Num> all(b);
    std::vector<Envelope<Num>> cls;
    if (g > 0) cls.resize(static_cast<std::size_t>(g), Envelope<Num>(b));
    all.add(0);
    if (g > 0) cls[0].add(0);

    for (std::int64_t i = 1; i <= m; ++i) {
        const Num& ti = t[static_cast<std::size_t>(i - 1)];
        auto [best, arg] = all.query(ti);
        best += c;
        if (g > 0) {
            auto& e = cls[static_cast<std::size_t>(i % g)];
            if (!e.empty()) {
                auto [v, j] = e.query(ti);
                if (v < best || (v == best && j < arg)) {
                    best = v;
                    arg = j;
                }
            }
        }
        const auto n = static_cast<std::size_t>(i);
        dp[n] = best + Num(i) * ti - P[n];
        from[n] = arg;
        b[n] = dp[n] + P[n];
        all.add(i);
        if (g > 0) cls[static_cast<std::size_t>(i % g)].add(i);
    }
    return {dp[static_cast<std::size_t>(m)], groups_from(from, t), Method::Hull};
}

template <class Num>
OfflineSolution<Num> brute_force_opt(const Instance<Num>& inst) {
    require_finalized(inst);
    const auto t = inst.request_times();
    const auto m = static_cast<std::int64_t>(t.size());
    if (m > 10) throw Error(ErrorKind::Size, "brute force limited to 10 requests");
    const auto pen = effective_table<Num>(inst.penalty(), m);
    OfflineSolution<Num> best{Num(0), {}, Method::BruteForce};
    if (m == 0) return best;

    // restricted growth strings: label[i] <= 1 + max(label[0..i-1])
    std::vector<std::int64_t> label(static_cast<std::size_t>(m), 0);
    bool have = false;
    std::function<void(std::int64_t, std::int64_t)> rec = [&](std::int64_t i, std::int64_t blocks) {
        if (i == m) {
            std::vector<Group<Num>> gs(static_cast<std::size_t>(blocks));
            for (std::int64_t r = 0; r < m; ++r) {
                auto& gr = gs[static_cast<std::size_t>(label[static_cast<std::size_t>(r)])];
                gr.members.push_back(r);
                gr.time = t[static_cast<std::size_t>(r)];  // sorted, so the last member is the latest
            }
            Num cost(0);
            for (const auto& gr : gs) {
                cost += pen[gr.members.size()];
                for (auto r : gr.members) cost += gr.time - t[static_cast<std::size_t>(r)];
            }
            if (!have || cost < best.cost) {
                have = true;
                best.cost = cost;
                best.groups = std::move(gs);
            }
            return;
        }
        for (std::int64_t l = 0; l <= blocks; ++l) {
            label[static_cast<std::size_t>(i)] = l;
            rec(i + 1, std::max(blocks, l + 1));
        }
    };
    rec(0, 0);
    return best;
}

template <class Num>
OfflineSolution<Num> optimal_cost(const Instance<Num>& inst) {
    if (hull_applicable(inst.penalty())) return optimal_cost_hull(inst);
    return optimal_cost_dp(inst);
}

#define OMDSC_INSTANTIATE(Num)                                                     \
    template struct OfflineSolution<Num>;                                          \
    template OfflineSolution<Num> optimal_cost_dp<Num>(const Instance<Num>&);      \
    template OfflineSolution<Num> optimal_cost_hull<Num>(const Instance<Num>&);    \
    template OfflineSolution<Num> brute_force_opt<Num>(const Instance<Num>&);      \
    template OfflineSolution<Num> optimal_cost<Num>(const Instance<Num>&);
OMDSC_INSTANTIATE(Rational)
OMDSC_INSTANTIATE(double)
#undef OMDSC_INSTANTIATE

}  // namespace omdsc::offline
