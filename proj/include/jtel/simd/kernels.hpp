#pragma once

// Data-parallel inner loops: batch exp, discounted call payoffs, moment sums
// and the I0 / I1 power series. Every kernel has a scalar reference and, on
// x86-64, an AVX2+FMA variant; the dispatching entry points pick the variant
// once per process from CPUID (override with JTEL_SIMD=scalar).
//
// The scalar and AVX2 variants perform identical arithmetic for moments()
// and bessel_i0_i1s(), so those agree bit for bit. exp() and
// discounted_call() agree to a few ulp (the vector exp is a polynomial).

#include <span>

namespace jtel::simd {

enum class Isa { scalar, avx2 };

const char* isa_name(Isa isa) noexcept;
bool isa_supported(Isa isa) noexcept;

Isa active_isa() noexcept;

/// Throws std::invalid_argument if the ISA is not available on this CPU/build.
void set_active_isa(Isa isa);

struct Moments {
    double sum = 0.0;
    double sum_sq = 0.0;
};

/// out[i] = exp(x[i]).
void exp(std::span<const double> x, std::span<double> out);

/// out[i] = max(exp(log_spot[i] - log_bond[i]) - strike * exp(-log_bond[i]), 0).
void discounted_call(std::span<const double> log_spot, std::span<const double> log_bond,
                     double strike, std::span<double> out);

/// Sum and sum of squares, accumulated in four interleaved lanes.
Moments moments(std::span<const double> values);

/// i0[k] = I0(z[k]) and i1s[k] = 2 I1(z[k]) / z[k]. Requires 0 <= z <= 700.
void bessel_i0_i1s(std::span<const double> z, std::span<double> i0, std::span<double> i1s);

namespace scalar {
void exp(std::span<const double> x, std::span<double> out);
void discounted_call(std::span<const double> log_spot, std::span<const double> log_bond,
                     double strike, std::span<double> out);
Moments moments(std::span<const double> values);
void bessel_i0_i1s(std::span<const double> z, std::span<double> i0, std::span<double> i1s);
}  // namespace scalar

#if defined(JTEL_WITH_AVX2)
namespace avx2 {
void exp(std::span<const double> x, std::span<double> out);
void discounted_call(std::span<const double> log_spot, std::span<const double> log_bond,
                     double strike, std::span<double> out);
Moments moments(std::span<const double> values);
void bessel_i0_i1s(std::span<const double> z, std::span<double> i0, std::span<double> i1s);
}  // namespace avx2
#endif

}  // namespace jtel::simd
