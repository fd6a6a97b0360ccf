#include <atomic>
#include <cstdlib>
#include <cstring>
#include <stdexcept>
#include <string>

#include "jtel/simd/kernels.hpp"

namespace jtel::simd {

namespace {

Isa detect() noexcept {
    if (const char* env = std::getenv("JTEL_SIMD"); env != nullptr && std::strcmp(env, "scalar") == 0) {
        return Isa::scalar;
    }
    return isa_supported(Isa::avx2) ? Isa::avx2 : Isa::scalar;
}

std::atomic<Isa>& active() {
    static std::atomic<Isa> isa{detect()};
    return isa;
}

void check_sizes(std::size_t a, std::size_t b, const char* what) {
    if (a != b) throw std::invalid_argument(std::string(what) + ": span sizes differ");
}

}  // namespace

const char* isa_name(Isa isa) noexcept { return isa == Isa::avx2 ? "avx2" : "scalar"; }

bool isa_supported(Isa isa) noexcept {
    if (isa == Isa::scalar) return true;
#if defined(JTEL_WITH_AVX2)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Isa active_isa() noexcept { return active().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
    if (!isa_supported(isa)) {
        throw std::invalid_argument(std::string("instruction set not available: ") + isa_name(isa));
    }
    active().store(isa, std::memory_order_relaxed);
}

void exp(std::span<const double> x, std::span<double> out) {
    check_sizes(x.size(), out.size(), "exp");
#if defined(JTEL_WITH_AVX2)
    if (active_isa() == Isa::avx2) return avx2::exp(x, out);
#endif
    scalar::exp(x, out);
}

void discounted_call(std::span<const double> log_spot, std::span<const double> log_bond,
                     double strike, std::span<double> out) {
    check_sizes(log_spot.size(), log_bond.size(), "discounted_call");
    check_sizes(log_spot.size(), out.size(), "discounted_call");
#if defined(JTEL_WITH_AVX2)
    if (active_isa() == Isa::avx2) return avx2::discounted_call(log_spot, log_bond, strike, out);
#endif
    scalar::discounted_call(log_spot, log_bond, strike, out);
}

Moments moments(std::span<const double> values) {
#if defined(JTEL_WITH_AVX2)
    if (active_isa() == Isa::avx2) return avx2::moments(values);
#endif
    return scalar::moments(values);
}

void bessel_i0_i1s(std::span<const double> z, std::span<double> i0, std::span<double> i1s) {
    check_sizes(z.size(), i0.size(), "bessel_i0_i1s");
    check_sizes(z.size(), i1s.size(), "bessel_i0_i1s");
#if defined(JTEL_WITH_AVX2)
    if (active_isa() == Isa::avx2) return avx2::bessel_i0_i1s(z, i0, i1s);
#endif
    scalar::bessel_i0_i1s(z, i0, i1s);
}

}  // namespace jtel::simd
