#include <atomic>
#include <cstdlib>
#include <string_view>

#include "kernels_impl.hpp"

namespace hess2::kernels {
namespace {

bool cpu_has_avx2() {
#if HESS2_HAVE_AVX2 && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const KernelTable* initial_selection() {
    const char* env = std::getenv("HESS2_KERNELS");
    if (env != nullptr && std::string_view(env) == "scalar") return &detail::kScalarTable;
    if (const KernelTable* t = avx2()) return t;
    return &detail::kScalarTable;
}

std::atomic<const KernelTable*>& current() {
    static std::atomic<const KernelTable*> table{initial_selection()};
    return table;
}

}  // namespace

const KernelTable& scalar() { return detail::kScalarTable; }

const KernelTable* avx2() {
#if HESS2_HAVE_AVX2
    static const bool ok = cpu_has_avx2();
    return ok ? &detail::kAvx2Table : nullptr;
#else
    return nullptr;
#endif
}

const KernelTable& active() { return *current().load(std::memory_order_acquire); }

bool select(std::string_view isa) {
    const KernelTable* t = nullptr;
    if (isa == "scalar") t = &detail::kScalarTable;
    if (isa == "avx2") t = avx2();
    if (t == nullptr) return false;
    current().store(t, std::memory_order_release);
    return true;
}

}  // namespace hess2::kernels
