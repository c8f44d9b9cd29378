// Compiled with -mavx2 -ffp-contract=off; only reached after a CPUID check.

#include <immintrin.h>

#include <cmath>

#include "omdsc/kernels/kernels.hpp"

namespace omdsc::kernels {
namespace {

void advance_profile(std::span<double> w, std::size_t first, std::size_t k, std::size_t s_mod,
                     double dt) {
    const std::size_t n = w.size();
    const __m256d vdt = _mm256_set1_pd(dt);
    const __m256d vk = _mm256_set1_pd(static_cast<double>(k));
    const __m256d vzero = _mm256_setzero_pd();
    const __m256d step = _mm256_set1_pd(4.0);
    // rates are small integers, exact in double
    __m256d vrate = _mm256_setr_pd(
        static_cast<double>(s_mod) - static_cast<double>(first),
        static_cast<double>(s_mod) - static_cast<double>(first + 1),
        static_cast<double>(s_mod) - static_cast<double>(first + 2),
        static_cast<double>(s_mod) - static_cast<double>(first + 3));
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d neg = _mm256_cmp_pd(vrate, vzero, _CMP_LT_OQ);
        const __m256d rate = _mm256_add_pd(vrate, _mm256_and_pd(neg, vk));
        const __m256d cur = _mm256_loadu_pd(w.data() + i);
        _mm256_storeu_pd(w.data() + i, _mm256_add_pd(cur, _mm256_mul_pd(rate, vdt)));
        vrate = _mm256_sub_pd(vrate, step);
    }
    for (; i < n; ++i) {
        const std::size_t idx = first + i;
        const std::size_t rate = s_mod >= idx ? s_mod - idx : s_mod + k - idx;
        w[i] += static_cast<double>(rate) * dt;
    }
}

std::size_t first_below(std::span<const double> w, double threshold) {
    const std::size_t n = w.size();
    const __m256d vt = _mm256_set1_pd(threshold);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const int mask =
            _mm256_movemask_pd(_mm256_cmp_pd(_mm256_loadu_pd(w.data() + i), vt, _CMP_LT_OQ));
        if (mask != 0) return i + static_cast<std::size_t>(__builtin_ctz(mask));
    }
    for (; i < n; ++i) {
        if (w[i] < threshold) return i;
    }
    return n;
}

std::size_t last_below(std::span<const double> w, double threshold) {
    const std::size_t n = w.size();
    const __m256d vt = _mm256_set1_pd(threshold);
    std::size_t end = n;
    while (end % 4 != 0) {
        if (w[end - 1] < threshold) return end - 1;
        --end;
    }
    for (; end >= 4; end -= 4) {
        const int mask = _mm256_movemask_pd(
            _mm256_cmp_pd(_mm256_loadu_pd(w.data() + end - 4), vt, _CMP_LT_OQ));
        if (mask != 0) return end - 4 + static_cast<std::size_t>(31 - __builtin_clz(mask));
    }
    return n;
}

double min_value(std::span<const double> w) {
    const std::size_t n = w.size();
    std::size_t i = 0;
    double m = w[0];
    if (n >= 4) {
        __m256d vm = _mm256_loadu_pd(w.data());
        for (i = 4; i + 4 <= n; i += 4) vm = _mm256_min_pd(vm, _mm256_loadu_pd(w.data() + i));
        alignas(32) double lanes[4];
        _mm256_store_pd(lanes, vm);
        for (double x : lanes) m = x < m ? x : m;
    }
    for (; i < n; ++i) m = w[i] < m ? w[i] : m;
    return m;
}

inline __m256d row_candidates(const double* dp, const double* prefix, const double* pen,
                              __m256d vj, __m256d vt) {
    const __m256d base = _mm256_add_pd(_mm256_loadu_pd(dp), _mm256_loadu_pd(prefix));
    return _mm256_add_pd(_mm256_sub_pd(base, _mm256_mul_pd(vj, vt)), _mm256_loadu_pd(pen));
}

RowMin dp_row_min(std::span<const double> dp, std::span<const double> prefix,
                  std::span<const double> pen, double t) {
    const std::size_t n = dp.size();
    const __m256d vt = _mm256_set1_pd(t);
    const __m256d step = _mm256_set1_pd(4.0);
    auto scalar_at = [&](std::size_t j) {
        return ((dp[j] + prefix[j]) - static_cast<double>(j) * t) + pen[j];
    };

    double best = HUGE_VAL;
    std::size_t i = 0;
    if (n >= 4) {
        __m256d vj = _mm256_setr_pd(0.0, 1.0, 2.0, 3.0);
        __m256d vm = _mm256_set1_pd(HUGE_VAL);
        for (; i + 4 <= n; i += 4) {
            vm = _mm256_min_pd(vm, row_candidates(dp.data() + i, prefix.data() + i,
                                                  pen.data() + i, vj, vt));
            vj = _mm256_add_pd(vj, step);
        }
        alignas(32) double lanes[4];
        _mm256_store_pd(lanes, vm);
        for (double x : lanes) best = x < best ? x : best;
    }
    for (std::size_t j = i; j < n; ++j) {
        const double c = scalar_at(j);
        best = c < best ? c : best;
    }

    // second pass: first index attaining the minimum
    const __m256d vbest = _mm256_set1_pd(best);
    __m256d vj = _mm256_setr_pd(0.0, 1.0, 2.0, 3.0);
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
        const __m256d c = row_candidates(dp.data() + j, prefix.data() + j, pen.data() + j, vj, vt);
        const int mask = _mm256_movemask_pd(_mm256_cmp_pd(c, vbest, _CMP_EQ_OQ));
        if (mask != 0) return {best, j + static_cast<std::size_t>(__builtin_ctz(mask))};
        vj = _mm256_add_pd(vj, step);
    }
    for (; j < n; ++j) {
        if (scalar_at(j) == best) return {best, j};
    }
    return {best, 0};
}

}  // namespace

const KernelTable* avx2_table() {
    static const KernelTable table{Isa::Avx2, "avx2",    advance_profile, first_below,
                                   last_below, min_value, dp_row_min};
    return &table;
}

}  // namespace omdsc::kernels
