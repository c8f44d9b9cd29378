#pragma once

// Waiting profiles: W_0..W_{k-1} where W_i grows at rate residue(s - i, k)
// while the request counter s is constant.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <type_traits>
#include <vector>

#include "omdsc/kernels/kernels.hpp"
#include "omdsc/numerics/error.hpp"
#include "omdsc/numerics/residue.hpp"
#include "omdsc/numerics/scalar.hpp"

namespace omdsc {

/// Stores every W_i explicitly; advancing costs O(k). The float
/// instantiation runs the advance and the scans through the SIMD kernels.
template <class Num>
class DenseProfile {
public:
    DenseProfile(std::int64_t k, Num start = Num(0))
        : k_(k), w_(static_cast<std::size_t>(check_k(k)), Num(0)), last_(std::move(start)) {}

    std::int64_t k() const noexcept { return k_; }
    std::int64_t s() const noexcept { return s_; }
    const Num& last_update() const noexcept { return last_; }

    std::int64_t rate(std::int64_t i) const { return residue(s_ - i, k_); }
    Num W(std::int64_t i) const { return w_[static_cast<std::size_t>(i)]; }

    void advance(const Num& to) {
        if (to < last_) throw Error(ErrorKind::TimeRegression, "profile advanced backwards");
        if (to == last_) return;
        const Num dt = to - last_;
        if constexpr (std::is_same_v<Num, double>) {
            kernels::active().advance_profile(std::span<double>(w_), 0, static_cast<std::size_t>(k_),
                                              static_cast<std::size_t>(residue(s_, k_)), dt);
        } else {
            const std::int64_t sm = residue(s_, k_);
            for (std::int64_t i = 0; i < k_; ++i) {
                const std::int64_t r = sm >= i ? sm - i : sm + k_ - i;
                if (r != 0) w_[static_cast<std::size_t>(i)] += dt * Num(r);
            }
        }
        last_ = to;
    }

    void add_arrivals(std::int64_t count) { s_ += count; }

    /// Zeroes every W and s, restarting at `now`.
    void reset(const Num& now) {
        std::fill(w_.begin(), w_.end(), Num(0));
        s_ = 0;
        last_ = now;
    }

    /// True iff W_i >= threshold for every i in the interval.
    bool all_at_least(const CyclicInterval& iv, const Num& threshold) const {
        return !first_below(iv, threshold).has_value();
    }

    /// Element of the interval with W_i < threshold that is closest to iv.lo().
    std::optional<std::int64_t> first_below(const CyclicInterval& iv, const Num& threshold) const {
        if constexpr (std::is_same_v<Num, double>) {
            const double thr = threshold - kFloatTolerance * std::max(1.0, std::fabs(threshold));
            for (auto [lo, len] : segments(iv)) {
                auto seg = std::span<const double>(w_).subspan(static_cast<std::size_t>(lo),
                                                               static_cast<std::size_t>(len));
                const std::size_t j = kernels::active().first_below(seg, thr);
                if (j < seg.size()) return lo + static_cast<std::int64_t>(j);
            }
            return std::nullopt;
        } else {
            std::optional<std::int64_t> out;
            std::int64_t i = iv.lo();
            for (std::int64_t n = iv.size(); n > 0 && !out; --n) {
                if (w_[static_cast<std::size_t>(i)] < threshold) out = i;
                if (++i == k_) i = 0;
            }
            return out;
        }
    }

    /// Element of the interval with W_i < threshold that is farthest from iv.lo().
    std::optional<std::int64_t> last_below(const CyclicInterval& iv, const Num& threshold) const {
        if constexpr (std::is_same_v<Num, double>) {
            const double thr = threshold - kFloatTolerance * std::max(1.0, std::fabs(threshold));
            auto segs = segments(iv);
            for (auto it = segs.rbegin(); it != segs.rend(); ++it) {
                auto [lo, len] = *it;
                auto seg = std::span<const double>(w_).subspan(static_cast<std::size_t>(lo),
                                                               static_cast<std::size_t>(len));
                const std::size_t j = kernels::active().last_below(seg, thr);
                if (j < seg.size()) return lo + static_cast<std::int64_t>(j);
            }
            return std::nullopt;
        } else {
            std::int64_t i = iv.hi();
            for (std::int64_t n = iv.size(); n > 0; --n) {
                if (w_[static_cast<std::size_t>(i)] < threshold) return i;
                i = (i == 0) ? k_ - 1 : i - 1;
            }
            return std::nullopt;
        }
    }

    Num min_value() const {
        if constexpr (std::is_same_v<Num, double>) {
            return kernels::active().min_value(std::span<const double>(w_));
        } else {
            return *std::min_element(w_.begin(), w_.end());
        }
    }

    std::vector<Num> values() const { return w_; }

private:
    static std::int64_t check_k(std::int64_t k) {
        if (k < 1) throw Error(ErrorKind::InvalidModulus, "profile modulus must be positive");
        return k;
    }

    // The interval as up to two contiguous [lo, lo+len) runs, in cyclic order.
    std::vector<std::pair<std::int64_t, std::int64_t>> segments(const CyclicInterval& iv) const {
        const std::int64_t lo = iv.lo();
        const std::int64_t size = iv.size();
        if (lo + size <= k_) return {{lo, size}};
        return {{lo, k_ - lo}, {0, size - (k_ - lo)}};
    }

    std::int64_t k_;
    std::int64_t s_ = 0;
    std::vector<Num> w_;
    Num last_;
};

/// Stores the time spent at each residue of s in a Fenwick tree, so an
/// advance is O(log k) and a single W_i read is O(log k):
///   W_i = R - i*S + k * sum_{r < i} T_r,  S = sum T_r,  R = sum r*T_r.
template <class Num>
class HistogramProfile {
public:
    HistogramProfile(std::int64_t k, Num start = Num(0))
        : k_(k), tree_(static_cast<std::size_t>(check_k(k)) + 1, Num(0)), last_(std::move(start)) {}

    std::int64_t k() const noexcept { return k_; }
    std::int64_t s() const noexcept { return s_; }
    const Num& last_update() const noexcept { return last_; }

    std::int64_t rate(std::int64_t i) const { return residue(s_ - i, k_); }

    Num W(std::int64_t i) const {
        Num out = r_sum_ - Num(i) * total_;
        if (i > 0) out += Num(k_) * prefix(i);
        return out;
    }

    void advance(const Num& to) {
        if (to < last_) throw Error(ErrorKind::TimeRegression, "profile advanced backwards");
        if (to == last_) return;
        const Num dt = to - last_;
        const std::int64_t sm = residue(s_, k_);
        add(sm, dt);
        total_ += dt;
        if (sm != 0) r_sum_ += Num(sm) * dt;
        last_ = to;
    }

    void add_arrivals(std::int64_t count) { s_ += count; }

    void reset(const Num& now) {
        std::fill(tree_.begin(), tree_.end(), Num(0));
        total_ = Num(0);
        r_sum_ = Num(0);
        s_ = 0;
        last_ = now;
    }

    bool all_at_least(const CyclicInterval& iv, const Num& threshold) const {
        return !first_below(iv, threshold).has_value();
    }

    std::optional<std::int64_t> first_below(const CyclicInterval& iv, const Num& threshold) const {
        std::int64_t i = iv.lo();
        for (std::int64_t n = iv.size(); n > 0; --n) {
            if (!NumTraits<Num>::reached(W(i), threshold)) return i;
            if (++i == k_) i = 0;
        }
        return std::nullopt;
    }

    std::optional<std::int64_t> last_below(const CyclicInterval& iv, const Num& threshold) const {
        std::int64_t i = iv.hi();
        for (std::int64_t n = iv.size(); n > 0; --n) {
            if (!NumTraits<Num>::reached(W(i), threshold)) return i;
            i = (i == 0) ? k_ - 1 : i - 1;
        }
        return std::nullopt;
    }

    Num min_value() const {
        // W_i is a walk: W_{i+1} - W_i = k*T_i - S, so one pass suffices.
        Num cur = W(0);
        Num best = cur;
        for (std::int64_t i = 0; i + 1 < k_; ++i) {
            cur += Num(k_) * point(i) - total_;
            if (cur < best) best = cur;
        }
        return best;
    }

    std::vector<Num> values() const {
        std::vector<Num> out;
        out.reserve(static_cast<std::size_t>(k_));
        Num cur = W(0);
        out.push_back(cur);
        for (std::int64_t i = 0; i + 1 < k_; ++i) {
            cur += Num(k_) * point(i) - total_;
            out.push_back(cur);
        }
        return out;
    }

private:
    static std::int64_t check_k(std::int64_t k) {
        if (k < 1) throw Error(ErrorKind::InvalidModulus, "profile modulus must be positive");
        return k;
    }

    void add(std::int64_t r, const Num& dt) {
        for (auto i = static_cast<std::size_t>(r) + 1; i < tree_.size(); i += i & (~i + 1)) {
            tree_[i] += dt;
        }
    }

    // sum of T_r for r < i
    Num prefix(std::int64_t i) const {
        Num out(0);
        for (auto j = static_cast<std::size_t>(i); j > 0; j -= j & (~j + 1)) out += tree_[j];
        return out;
    }

    Num point(std::int64_t r) const { return prefix(r + 1) - prefix(r); }

    std::int64_t k_;
    std::int64_t s_ = 0;
    std::vector<Num> tree_;
    Num total_{0};
    Num r_sum_{0};
    Num last_;
};

/// The profile representation each backend runs with.
template <class Num>
using WaitingProfile =
    std::conditional_t<NumTraits<Num>::exact, HistogramProfile<Num>, DenseProfile<Num>>;

/// Time from `p.last_update()` until W_i reaches `target`: zero if already
/// reached, nullopt if the rate is zero.
template <class Profile, class Num>
std::optional<Num> time_to_threshold(const Profile& p, std::int64_t i, const Num& target) {
    const Num w = p.W(i);
    if (NumTraits<Num>::reached(w, target)) return Num(0);
    const std::int64_t r = p.rate(i);
    if (r == 0) return std::nullopt;
    return (target - w) / Num(r);
}

/// Absolute time at which W_i reaches `target`, given no further arrivals.
template <class Profile, class Num>
std::optional<Num> threshold_time(const Profile& p, std::int64_t i, const Num& target) {
    auto dt = time_to_threshold(p, i, target);
    if (!dt) return std::nullopt;
    return p.last_update() + *dt;
}

/// Value-returning form of Profile::advance.
template <class Profile, class Num>
Profile advance_profile(Profile p, const Num& to) {
    p.advance(to);
    return p;
}

}  // namespace omdsc
