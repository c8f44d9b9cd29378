#include <atomic>
#include <cstdlib>
#include <string>

#include "omdsc/kernels/kernels.hpp"

namespace omdsc::kernels {

#if !defined(OMDSC_HAVE_AVX2)
const KernelTable* avx2_table() { return nullptr; }
#endif

bool cpu_has_avx2() {
#if defined(OMDSC_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

namespace {

const KernelTable* pick_default() {
    if (const char* env = std::getenv("OMDSC_KERNELS"); env && std::string(env) == "scalar") {
        return &scalar_table();
    }
    if (cpu_has_avx2() && avx2_table() != nullptr) return avx2_table();
    return &scalar_table();
}

std::atomic<const KernelTable*>& slot() {
    static std::atomic<const KernelTable*> current{pick_default()};
    return current;
}

}  // namespace

const KernelTable& active() { return *slot().load(std::memory_order_acquire); }

void select(Isa isa) {
    const KernelTable* t = &scalar_table();
    if (isa == Isa::Avx2 && cpu_has_avx2() && avx2_table() != nullptr) t = avx2_table();
    slot().store(t, std::memory_order_release);
}

std::string_view to_string(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

}  // namespace omdsc::kernels
