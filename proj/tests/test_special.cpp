#include <gtest/gtest.h>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/hypergeometric_1F1.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <stdexcept>

#include "jtel/error.hpp"
#include "jtel/quadrature.hpp"
#include "jtel/special.hpp"
#include "test_util.hpp"

using namespace jtel;
using testutil::rel_err;

TEST(Special, BesselAtZero) {
    EXPECT_EQ(bessel_i0(0.0), 1.0);
    EXPECT_EQ(bessel_i1(0.0), 0.0);
    EXPECT_EQ(bessel_i1_scaled(0.0), 1.0);
}

TEST(Special, BesselI0AtOneHighPrecision) {
    using big = boost::multiprecision::cpp_bin_float_50;
    big sum = 0, term = 1;
    for (int n = 0; n < 200; ++n) {
        if (n > 0) term /= big(4 * n * n);
        sum += term;
    }
    EXPECT_LE(rel_err(bessel_i0(1.0), sum.convert_to<double>()), 1e-14);
}

TEST(Special, BesselMatchesBoost) {
    for (double z : {1e-3, 0.5, 2.0, 10.0, 55.0, 300.0, 699.0}) {
        EXPECT_LE(rel_err(bessel_i0(z), boost::math::cyl_bessel_i(0, z)), 1e-13) << z;
        EXPECT_LE(rel_err(bessel_i1(z), boost::math::cyl_bessel_i(1, z)), 1e-13) << z;
        EXPECT_LE(rel_err(bessel_i1_scaled(z), 2 * boost::math::cyl_bessel_i(1, z) / z), 1e-13) << z;
    }
}

TEST(Special, BesselDerivativeIdentity) {
    const double h = 1e-5;
    for (double z : {0.3, 1.0, 4.0, 20.0}) {
        const double d = (bessel_i0(z + h) - bessel_i0(z - h)) / (2 * h);
        EXPECT_LE(rel_err(d, bessel_i1(z)), 1e-6);
    }
}

TEST(Special, BesselRangeErrors) {
    EXPECT_THROW(bessel_i0(-1.0), std::domain_error);
    EXPECT_THROW(bessel_i0(kBesselMaxArgument * 1.01), std::domain_error);
}

TEST(Special, Pochhammer) {
    EXPECT_EQ(pochhammer(3, 0), 1.0);
    EXPECT_EQ(pochhammer(3, 2), 12.0);
    EXPECT_EQ(pochhammer(0, 1), 0.0);
    EXPECT_EQ(pochhammer(1, 5), 120.0);
}

TEST(Special, Hyp1f1Identities) {
    EXPECT_EQ(hyp1f1(2.5, 3.5, 0.0), 1.0);
    for (double z : {-3.0, -0.5, 0.7, 4.0}) EXPECT_LE(rel_err(hyp1f1(1, 1, z), std::exp(z)), 1e-12);
    EXPECT_LE(rel_err(hyp1f1(1, 2, -1), 1 - std::exp(-1.0)), 1e-12);
}

TEST(Special, Hyp1f1MatchesBoost) {
    for (int n = 0; n <= 20; ++n) {
        for (double z : {-8.0, -1.3, 0.4, 2.0}) {
            const double alpha = n / 2 + 1;
            const double beta = n + 1;
            EXPECT_LE(rel_err(hyp1f1(alpha, beta, z), boost::math::hypergeometric_1F1(alpha, beta, z)), 1e-12)
                << n << " " << z;
        }
    }
}

TEST(Special, Hyp1f1RejectsPoles) { EXPECT_THROW(hyp1f1(1.0, -2.0, 0.5), std::invalid_argument); }

TEST(Special, Poisson) {
    EXPECT_NEAR(poisson_cdf(0, 2.0), std::exp(-2.0), 1e-16);
    EXPECT_NEAR(poisson_cdf(3, 1.5) + poisson_upper_tail(3, 1.5), 1.0, 1e-15);
    // Far tail: the leading term dominates.
    const double t = poisson_upper_tail(40, 1.0);
    const double lead = std::exp(-1.0 - std::lgamma(42.0));
    EXPECT_GT(t, lead);
    EXPECT_LT(t, 1.05 * lead);
}

TEST(Special, QuadratureWithBreakpoints) {
    const double bp[] = {0.3};
    EXPECT_NEAR(integrate([](double x) { return std::abs(x - 0.3); }, 0.0, 1.0, bp), 0.045 + 0.245, 1e-14);
    EXPECT_NEAR(integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, {}, 1e-10), 2.0, 1e-8);
}
