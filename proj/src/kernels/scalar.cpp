#include <cmath>

#include "omdsc/kernels/kernels.hpp"

namespace omdsc::kernels {
namespace {

void advance_profile(std::span<double> w, std::size_t first, std::size_t k, std::size_t s_mod,
                     double dt) {
    for (std::size_t n = 0; n < w.size(); ++n) {
        const std::size_t i = first + n;
        const std::size_t rate = s_mod >= i ? s_mod - i : s_mod + k - i;
        w[n] += static_cast<double>(rate) * dt;
    }
}

std::size_t first_below(std::span<const double> w, double threshold) {
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (w[i] < threshold) return i;
    }
    return w.size();
}

std::size_t last_below(std::span<const double> w, double threshold) {
    for (std::size_t i = w.size(); i > 0; --i) {
        if (w[i - 1] < threshold) return i - 1;
    }
    return w.size();
}

double min_value(std::span<const double> w) {
    double m = w[0];
    for (double x : w) m = x < m ? x : m;
    return m;
}

RowMin dp_row_min(std::span<const double> dp, std::span<const double> prefix,
                  std::span<const double> pen, double t) {
    RowMin best{HUGE_VAL, 0};
    for (std::size_t j = 0; j < dp.size(); ++j) {
        const double c = ((dp[j] + prefix[j]) - static_cast<double>(j) * t) + pen[j];
        if (c < best.value) best = {c, j};
    }
    return best;
}

}  // namespace

const KernelTable& scalar_table() {
    static const KernelTable table{Isa::Scalar, "scalar",  advance_profile, first_below,
                                   last_below,  min_value, dp_row_min};
    return table;
}

}  // namespace omdsc::kernels
