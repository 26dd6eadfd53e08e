#include <atomic>
#include <cstdlib>
#include <cstring>
#include <stdexcept>

#include "tables.hpp"

namespace tls::kernels {

const char* to_string(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

bool avx2_supported() {
#if defined(TLSDRIVE_HAVE_AVX2)
    static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    return ok;
#else
    return false;
#endif
}

const Table& table(Isa isa) {
    if (isa == Isa::Scalar) return detail::scalar_table;
#if defined(TLSDRIVE_HAVE_AVX2)
    if (avx2_supported()) return detail::avx2_table;
#endif
    throw std::invalid_argument("avx2 kernels are not available on this machine");
}

namespace {

const Table* pick_default() {
    const char* force = std::getenv("TLSDRIVE_FORCE_SCALAR");
    if (force && *force && std::strcmp(force, "0") != 0) return &detail::scalar_table;
    return avx2_supported() ? &table(Isa::Avx2) : &detail::scalar_table;
}

std::atomic<const Table*>& slot() {
    static std::atomic<const Table*> current{pick_default()};
    return current;
}

}  // namespace

const Table& active() { return *slot().load(std::memory_order_relaxed); }
Isa active_isa() { return active().isa; }
void set_active(Isa isa) { slot().store(&table(isa), std::memory_order_relaxed); }

}  // namespace tls::kernels
