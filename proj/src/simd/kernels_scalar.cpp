#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "jtel/simd/kernels.hpp"
#include "jtel/special.hpp"

namespace jtel::simd::scalar {

void exp(std::span<const double> x, std::span<double> out) {
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = std::exp(x[i]);
}

void discounted_call(std::span<const double> log_spot, std::span<const double> log_bond,
                     double strike, std::span<double> out) {
    for (std::size_t i = 0; i < log_spot.size(); ++i) {
        const double forward = std::exp(log_spot[i] - log_bond[i]);
        const double discount = std::exp(-log_bond[i]);
        out[i] = std::max(forward - strike * discount, 0.0);
    }
}

Moments moments(std::span<const double> values) {
    std::array<double, 4> sum{};
    std::array<double, 4> sq{};
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double v = values[i];
        sum[i % 4] += v;
        sq[i % 4] += v * v;
    }
    return {(sum[0] + sum[1]) + (sum[2] + sum[3]), (sq[0] + sq[1]) + (sq[2] + sq[3])};
}

void bessel_i0_i1s(std::span<const double> z, std::span<double> i0, std::span<double> i1s) {
    constexpr double eps = 1e-17;
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (!(z[i] >= 0.0) || z[i] > kBesselMaxArgument) {
            throw std::domain_error("Bessel argument outside [0, 700]");
        }
        const double w = 0.25 * z[i] * z[i];
        double t0 = 1.0, s0 = 1.0;
        double t1 = 1.0, s1 = 1.0;
        bool live0 = true, live1 = true;
        for (int k = 1; live0 || live1; ++k) {
            const double kk = k;
            if (live0) {
                t0 = t0 * w / (kk * kk);
                s0 = s0 + t0;
                live0 = !(t0 < eps * s0);
            }
            if (live1) {
                t1 = t1 * w / (kk * (kk + 1.0));
                s1 = s1 + t1;
                live1 = !(t1 < eps * s1);
            }
        }
        i0[i] = s0;
        i1s[i] = s1;
    }
}

}  // namespace jtel::simd::scalar
