#include <immintrin.h>

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "jtel/simd/kernels.hpp"
#include "jtel/special.hpp"

namespace jtel::simd::avx2 {

namespace {

// 2^k for integer-valued k in [-1022, 1023], built directly in the exponent field.
inline __m256d pow2(__m256d k) {
    const __m256d magic = _mm256_set1_pd(4503599627370496.0);  // 2^52
    const __m256d biased = _mm256_add_pd(_mm256_add_pd(k, _mm256_set1_pd(1023.0)), magic);
    return _mm256_castsi256_pd(_mm256_slli_epi64(_mm256_castpd_si256(biased), 52));
}

inline __m256d exp4(__m256d x) {
    const __m256d log2e = _mm256_set1_pd(1.4426950408889634);
    const __m256d ln2_hi = _mm256_set1_pd(6.93147180369123816490e-01);
    const __m256d ln2_lo = _mm256_set1_pd(1.90821492927058770002e-10);
    const __m256d hi_cut = _mm256_set1_pd(709.782712893384);
    const __m256d lo_cut = _mm256_set1_pd(-745.2);

    const __m256d xc = _mm256_min_pd(_mm256_max_pd(x, lo_cut), hi_cut);
    const __m256d n = _mm256_round_pd(_mm256_mul_pd(xc, log2e),
                                      _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(n, ln2_hi, xc);
    r = _mm256_fnmadd_pd(n, ln2_lo, r);

    // Taylor polynomial to degree 13; |r| <= ln2/2 keeps the truncation below 1e-17.
    static constexpr double inv_fact[14] = {
        1.0,
        1.0,
        1.0 / 2.0,
        1.0 / 6.0,
        1.0 / 24.0,
        1.0 / 120.0,
        1.0 / 720.0,
        1.0 / 5040.0,
        1.0 / 40320.0,
        1.0 / 362880.0,
        1.0 / 3628800.0,
        1.0 / 39916800.0,
        1.0 / 479001600.0,
        1.0 / 6227020800.0,
    };
    __m256d p = _mm256_set1_pd(inv_fact[13]);
    for (int k = 12; k >= 0; --k) p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(inv_fact[k]));

    // Split the scaling so 2^n stays representable down to the subnormal range.
    const __m256d n1 = _mm256_floor_pd(_mm256_mul_pd(n, _mm256_set1_pd(0.5)));
    const __m256d n2 = _mm256_sub_pd(n, n1);
    __m256d result = _mm256_mul_pd(_mm256_mul_pd(p, pow2(n1)), pow2(n2));

    const __m256d over = _mm256_cmp_pd(x, hi_cut, _CMP_GT_OQ);
    const __m256d under = _mm256_cmp_pd(x, lo_cut, _CMP_LT_OQ);
    const __m256d nan = _mm256_cmp_pd(x, x, _CMP_UNORD_Q);
    result = _mm256_blendv_pd(result, _mm256_set1_pd(HUGE_VAL), over);
    result = _mm256_blendv_pd(result, _mm256_setzero_pd(), under);
    result = _mm256_blendv_pd(result, x, nan);
    return result;
}

// Scalar tail of exp() that reuses the vector code on a padded lane.
inline double exp1(double x) {
    alignas(32) double buf[4] = {x, 0.0, 0.0, 0.0};
    _mm256_store_pd(buf, exp4(_mm256_load_pd(buf)));
    return buf[0];
}

}  // namespace

void exp(std::span<const double> x, std::span<double> out) {
    const std::size_t n = x.size();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) _mm256_storeu_pd(&out[i], exp4(_mm256_loadu_pd(&x[i])));
    for (; i < n; ++i) out[i] = exp1(x[i]);
}

void discounted_call(std::span<const double> log_spot, std::span<const double> log_bond,
                     double strike, std::span<double> out) {
    const std::size_t n = log_spot.size();
    const __m256d k = _mm256_set1_pd(strike);
    const __m256d zero = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d s = _mm256_loadu_pd(&log_spot[i]);
        const __m256d b = _mm256_loadu_pd(&log_bond[i]);
        const __m256d fwd = exp4(_mm256_sub_pd(s, b));
        const __m256d disc = exp4(_mm256_sub_pd(zero, b));
        _mm256_storeu_pd(&out[i], _mm256_max_pd(_mm256_sub_pd(fwd, _mm256_mul_pd(k, disc)), zero));
    }
    for (; i < n; ++i) {
        const double v = exp1(log_spot[i] - log_bond[i]) - strike * exp1(-log_bond[i]);
        out[i] = v > 0.0 ? v : 0.0;
    }
}

Moments moments(std::span<const double> values) {
    const std::size_t n = values.size();
    __m256d s = _mm256_setzero_pd();
    __m256d q = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d v = _mm256_loadu_pd(&values[i]);
        s = _mm256_add_pd(s, v);
        q = _mm256_add_pd(q, _mm256_mul_pd(v, v));
    }
    alignas(32) double sum[4];
    alignas(32) double sq[4];
    _mm256_store_pd(sum, s);
    _mm256_store_pd(sq, q);
    for (; i < n; ++i) {
        sum[i % 4] += values[i];
        sq[i % 4] += values[i] * values[i];
    }
    return {(sum[0] + sum[1]) + (sum[2] + sum[3]), (sq[0] + sq[1]) + (sq[2] + sq[3])};
}

void bessel_i0_i1s(std::span<const double> z, std::span<double> i0, std::span<double> i1s) {
    for (double v : z) {
        if (!(v >= 0.0) || v > kBesselMaxArgument) {
            throw std::domain_error("Bessel argument outside [0, 700]");
        }
    }
    const __m256d eps = _mm256_set1_pd(1e-17);
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d quarter = _mm256_set1_pd(0.25);
    const std::size_t n = z.size();
    std::size_t i = 0;
    for (; i < n; i += 4) {
        alignas(32) double zb[4] = {0.0, 0.0, 0.0, 0.0};
        const std::size_t lanes = (n - i < 4) ? n - i : 4;
        for (std::size_t l = 0; l < lanes; ++l) zb[l] = z[i + l];
        const __m256d zv = _mm256_load_pd(zb);
        const __m256d w = _mm256_mul_pd(_mm256_mul_pd(quarter, zv), zv);
        __m256d t0 = one, s0 = one, t1 = one, s1 = one;
        __m256d live0 = _mm256_castsi256_pd(_mm256_set1_epi64x(-1));
        __m256d live1 = live0;
        for (int k = 1; _mm256_movemask_pd(_mm256_or_pd(live0, live1)) != 0; ++k) {
            const __m256d kk = _mm256_set1_pd(static_cast<double>(k));
            // Converged lanes keep their values; live lanes take the same
            // rounding steps as the scalar reference.
            const __m256d nt0 = _mm256_div_pd(_mm256_mul_pd(t0, w), _mm256_mul_pd(kk, kk));
            const __m256d ns0 = _mm256_add_pd(s0, nt0);
            t0 = _mm256_blendv_pd(t0, nt0, live0);
            s0 = _mm256_blendv_pd(s0, ns0, live0);
            live0 = _mm256_and_pd(live0, _mm256_cmp_pd(t0, _mm256_mul_pd(eps, s0), _CMP_NLT_UQ));

            const __m256d nt1 =
                _mm256_div_pd(_mm256_mul_pd(t1, w), _mm256_mul_pd(kk, _mm256_add_pd(kk, one)));
            const __m256d ns1 = _mm256_add_pd(s1, nt1);
            t1 = _mm256_blendv_pd(t1, nt1, live1);
            s1 = _mm256_blendv_pd(s1, ns1, live1);
            live1 = _mm256_and_pd(live1, _mm256_cmp_pd(t1, _mm256_mul_pd(eps, s1), _CMP_NLT_UQ));
        }
        alignas(32) double r0[4];
        alignas(32) double r1[4];
        _mm256_store_pd(r0, s0);
        _mm256_store_pd(r1, s1);
        for (std::size_t l = 0; l < lanes; ++l) {
            i0[i + l] = r0[l];
            i1s[i + l] = r1[l];
        }
    }
}

}  // namespace jtel::simd::avx2
