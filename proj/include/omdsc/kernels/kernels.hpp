#pragma once

// Float-backend inner loops. Each kernel has a scalar reference and an AVX2
// variant; the AVX2 variant must be bit-identical to the scalar one (no FMA
// contraction, same operation order, first-index tie-breaking).

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace omdsc::kernels {

enum class Isa { Scalar, Avx2 };

struct RowMin {
    double value;
    std::size_t index;
};

struct KernelTable {
    Isa isa;
    const char* name;

    /// w[i] += dt * ((s_mod - (first + i)) mod k) for i in [0, w.size()).
    void (*advance_profile)(std::span<double> w, std::size_t first, std::size_t k,
                            std::size_t s_mod, double dt);

    /// Index of the first element < threshold, or w.size() if none.
    std::size_t (*first_below)(std::span<const double> w, double threshold);

    /// Index of the last element < threshold, or w.size() if none.
    std::size_t (*last_below)(std::span<const double> w, double threshold);

    /// Minimum element (w must be non-empty).
    double (*min_value)(std::span<const double> w);

    /// min over j of ((dp[j] + prefix[j]) - j * t) + pen[j], first index on ties.
    RowMin (*dp_row_min)(std::span<const double> dp, std::span<const double> prefix,
                         std::span<const double> pen, double t);
};

const KernelTable& scalar_table();
/// Null when the binary was built without AVX2 support.
const KernelTable* avx2_table();

/// True when the running CPU can execute the AVX2 table.
bool cpu_has_avx2();

/// Table chosen at first use: AVX2 when available, unless OMDSC_KERNELS=scalar.
const KernelTable& active();

/// Forces a table for the rest of the process (tests and benchmarks).
void select(Isa isa);

std::string_view to_string(Isa isa);

}  // namespace omdsc::kernels
