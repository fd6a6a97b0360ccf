#include "jtel/special.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "jtel/error.hpp"

namespace jtel {

namespace {

constexpr double kSeriesEps = 1e-17;
constexpr int kSeriesBudget = 10000;

void check_bessel_argument(double z) {
    if (!(z >= 0.0) || z > kBesselMaxArgument) {
        throw std::domain_error("Bessel argument outside [0, 700]");
    }
}

}  // namespace

double bessel_i0(double z) {
    check_bessel_argument(z);
    const double w = 0.25 * z * z;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < kSeriesBudget; ++k) {
        term *= w / (static_cast<double>(k) * k);
        sum += term;
        if (term < kSeriesEps * sum) break;
    }
    return sum;
}

double bessel_i1_scaled(double z) {
    check_bessel_argument(z);
    const double w = 0.25 * z * z;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < kSeriesBudget; ++k) {
        term *= w / (static_cast<double>(k) * (k + 1));
        sum += term;
        if (term < kSeriesEps * sum) break;
    }
    return sum;
}

double bessel_i1(double z) { return 0.5 * z * bessel_i1_scaled(z); }

double pochhammer(double m, int k) {
    if (k < 0) throw std::invalid_argument("pochhammer: negative length");
    double value = 1.0;
    for (int i = 0; i < k; ++i) value *= m + i;
    return value;
}

double hyp1f1(double alpha, double beta, double z) {
    if (beta <= 0.0 && beta == std::floor(beta)) {
        throw std::invalid_argument("hyp1f1: beta must not be a non-positive integer");
    }
    if (z < 0.0 && beta - alpha >= 0.0 && beta > 0.0) {
        return std::exp(z) * hyp1f1(beta - alpha, beta, -z);
    }
    double term = 1.0;
    double sum = 1.0;
    for (int n = 0; n < kSeriesBudget; ++n) {
        term *= (alpha + n) * z / ((beta + n) * (n + 1));
        sum += term;
        if (term == 0.0) return sum;
        // The ratio |term_{n+1}/term_n| only decreases once n exceeds |z| - beta.
        if (std::abs(term) <= 1e-16 * std::abs(sum) && n + beta > std::abs(z)) return sum;
    }
    throw NumericalError("hyp1f1: series did not converge within the term budget");
}

double poisson_cdf(int n, double mean) {
    if (n < 0) return 0.0;
    if (mean <= 0.0) return 1.0;
    return boost::math::gamma_q(static_cast<double>(n) + 1.0, mean);
}

double poisson_upper_tail(int n, double mean) {
    if (n < 0) return 1.0;
    if (mean <= 0.0) return 0.0;
    return boost::math::gamma_p(static_cast<double>(n) + 1.0, mean);
}

}  // namespace jtel
