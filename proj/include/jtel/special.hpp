#pragma once

// Special functions on the ranges the pricing and density code needs.

namespace jtel {

/// Largest argument accepted by the Bessel series before exp overflow.
inline constexpr double kBesselMaxArgument = 700.0;

/// Modified Bessel I0 by its power series; throws std::domain_error for
/// z < 0 or z > kBesselMaxArgument.
double bessel_i0(double z);

/// Modified Bessel I1 = I0'.
double bessel_i1(double z);

/// 2 I1(z) / z, finite (= 1) at z = 0.
double bessel_i1_scaled(double z);

/// Rising factorial (m)_k = m (m+1) ... (m+k-1), (m)_0 = 1.
double pochhammer(double m, int k);

/// Confluent hypergeometric 1F1(alpha; beta; z) by its series. Negative z
/// with beta >= alpha goes through Kummer's transformation so every summed
/// term is positive. Throws std::invalid_argument for beta a non-positive
/// integer and NumericalError when the term budget runs out.
double hyp1f1(double alpha, double beta, double z);

/// P(N <= n) for N ~ Poisson(mean).
double poisson_cdf(int n, double mean);

/// P(N > n) for N ~ Poisson(mean), accurate in the far tail.
double poisson_upper_tail(int n, double mean);

}  // namespace jtel
