#include <gtest/gtest.h>

#include <boost/math/special_functions/bessel.hpp>
#include <cmath>
#include <random>
#include <stdexcept>

#include "jtel/density.hpp"
#include "jtel/mc.hpp"
#include "jtel/quadrature.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace jtel;
using testutil::rel_err;

namespace {

DensityParams dp(double cp, double cm, double lp, double lm) {
    DensityParams p;
    p.c_plus = cp;
    p.c_minus = cm;
    p.lambda_plus = lp;
    p.lambda_minus = lm;
    return p;
}

double continuous_mass(double t, int n, Regime s, const DensityParams& p) {
    return integrate([&](double x) { return p_n_continuous(x, t, n, s, p); }, p.c_minus * t, p.c_plus * t);
}

}  // namespace

TEST(Density, SymmetricFirstKernels) {
    const DensityParams p = dp(1.0, -1.0, 1.0, 1.0);
    for (double x : {-0.9, 0.0, 0.5}) {
        EXPECT_NEAR(q_n(x, 1.0, 1, Regime::plus, p), 0.5, 1e-15);
        EXPECT_NEAR(p_n(x, 1.0, 1, Regime::plus, p).continuous, std::exp(-1.0) / 2, 1e-15);
    }
    EXPECT_NEAR(continuous_mass(1.0, 2, Regime::plus, p), std::exp(-1.0) / 2, 1e-12);
}

TEST(Density, SupportAndAtom) {
    const DensityParams p = dp(0.4, -0.3, 1.2, 0.8);
    EXPECT_EQ(p_n(0.41, 1.0, 3, Regime::plus, p).continuous, 0.0);
    EXPECT_EQ(p_n(-0.31, 1.0, 2, Regime::minus, p).continuous, 0.0);
    EXPECT_EQ(density_total(0.5, 1.0, Regime::plus, p).continuous, 0.0);
    const DensityValue a = p_n(0.4, 1.0, 0, Regime::plus, p);
    EXPECT_NEAR(a.atom_weight, std::exp(-1.2), 1e-16);
    EXPECT_EQ(a.continuous, 0.0);
    EXPECT_DOUBLE_EQ(a.atom_x, 0.4);
}

TEST(Density, PerCountMassesMatchOde) {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.3, 2.5);
    for (int trial = 0; trial < 3; ++trial) {
        const DensityParams p = dp(u(rng) * 0.3, -u(rng) * 0.3, u(rng), u(rng));
        for (Regime s : {Regime::plus, Regime::minus}) {
            const double t = 1.3;
            const auto pi = oracle::switch_count_law(p.lambda(s), p.lambda(-s), t, 20);
            for (int n = 1; n <= 20; ++n) {
                const double m = continuous_mass(t, n, s, p);
                EXPECT_LE(std::abs(m - pi[n]), 1e-8 * std::max(pi[n], 1e-3)) << n;
            }
        }
    }
}

TEST(Density, MatchesOccupationTimeOracle) {
    const DensityParams p = dp(0.5, -0.2, 1.7, 0.6);
    for (int n = 1; n <= 12; ++n) {
        for (double x : {-0.15, 0.05, 0.3, 0.45}) {
            for (Regime s : {Regime::plus, Regime::minus}) {
                const double want = oracle::telegraph_density_n(x, 1.0, n, sign(s), 0.5, -0.2, 1.7, 0.6);
                EXPECT_LE(rel_err(p_n_continuous(x, 1.0, n, s, p), want), 1e-12) << n << " " << x;
            }
        }
    }
}

TEST(Density, TotalIsSumOfCounts) {
    const DensityParams p = dp(0.3, -0.25, 2.0, 1.1);
    const double t = 1.5;
    for (int i = 1; i < 100; ++i) {
        const double x = p.c_minus * t + i * p.dc() * t / 100.0;
        for (Regime s : {Regime::plus, Regime::minus}) {
            double sum = 0.0;
            for (int n = 1; n <= 60; ++n) sum += p_n_continuous(x, t, n, s, p);
            EXPECT_LE(rel_err(density_total(x, t, s, p).continuous, sum), 1e-10);
        }
    }
}

TEST(Density, TotalNormalized) {
    const DensityParams p = dp(0.6, -0.4, 1.5, 3.0);
    for (double t : {0.25, 1.0, 4.0}) {
        for (Regime s : {Regime::plus, Regime::minus}) {
            const double mass = integrate([&](double x) { return density_total(x, t, s, p).continuous; },
                                          p.c_minus * t, p.c_plus * t);
            EXPECT_NEAR(mass + density_total(0.0, t, s, p).atom_weight, 1.0, 1e-8);
        }
    }
}

TEST(Density, SymmetricClassicalForm) {
    // nu = 0 from the rising regime: e^{-lt}/(2c) [l I0(z) + l (ct + x)/r I1(z)], r = sqrt(c^2t^2 - x^2), z = l r / c.
    const double c = 0.7, l = 1.3, t = 1.1;
    const DensityParams p = dp(c, -c, l, l);
    for (double x : {-0.5, 0.0, 0.2, 0.6}) {
        const double r = std::sqrt(c * c * t * t - x * x);
        const double z = l * r / c;
        const double i0 = boost::math::cyl_bessel_i(0, z);
        const double i1 = boost::math::cyl_bessel_i(1, z);
        const double want = std::exp(-l * t) / (2 * c) * (l * i0 + l * (c * t + x) / r * i1);
        EXPECT_LE(rel_err(density_total(x, t, Regime::plus, p).continuous, want), 1e-12) << x;
    }
}

TEST(Density, KolmogorovFirstOrderUnderForwardScheme) {
    const DensityParams p = dp(1.0, -1.0, 1.0, 1.0);
    KolmogorovGrid g;
    g.t = 1.0;
    g.x = {-0.5, -0.1, 0.3, 0.6};
    g.scheme = DifferenceScheme::forward;
    g.spacing = 1e-3;
    const double r1 = kolmogorov_residual(2, Regime::plus, p, g).max_residual;
    g.spacing = 5e-4;
    const double r2 = kolmogorov_residual(2, Regime::plus, p, g).max_residual;
    EXPECT_NEAR(r1 / r2, 2.0, 0.5);
}

TEST(Density, KolmogorovCentralSmallResidual) {
    const DensityParams p = dp(0.4, -0.3, 1.5, 0.9);
    KolmogorovGrid g;
    g.t = 1.0;
    g.x = {-0.2, 0.0, 0.1, 0.3};
    g.spacing = 1e-4;
    for (Regime s : {Regime::plus, Regime::minus}) {
        for (int n = 1; n <= 6; ++n) EXPECT_LE(kolmogorov_residual(n, s, p, g).max_residual, 1e-6) << n;
    }
}

TEST(Density, KolmogorovPerturbedIsOrderOne) {
    const DensityParams p = dp(1.0, -1.0, 1.0, 1.0);
    KolmogorovGrid g;
    g.t = 1.0;
    g.x = {-0.3, 0.0, 0.4};
    g.spacing = 1e-4;
    const double r = kolmogorov_residual(
                         [&](double x, double t) { return 1.01 * p_n_continuous(x, t, 2, Regime::plus, p); },
                         [&](double x, double t) { return p_n_continuous(x, t, 1, Regime::minus, p); },
                         Regime::plus, p, g)
                         .max_residual;
    EXPECT_GT(r, 1e-3);
}

TEST(Density, KolmogorovRejectsBoundaryGrid) {
    const DensityParams p = dp(1.0, -1.0, 1.0, 1.0);
    KolmogorovGrid g;
    g.t = 1.0;
    g.x = {0.99995};
    EXPECT_THROW(kolmogorov_residual(1, Regime::plus, p, g), std::invalid_argument);
}

TEST(Density, MgfAtZeroIsOne) {
    const DensityParams p = dp(0.3, -0.2, 1.0, 2.0);
    EXPECT_NEAR(mgf(0.0, 1.0, Regime::plus, p, -0.1, 0.2), 1.0, 1e-10);
}

TEST(Density, MgfMatchesMatrixExponential) {
    const DensityParams p = dp(0.3, -0.2, 1.0, 2.0);
    for (double z : {-2.0, -0.5, 0.7, 1.5}) {
        for (Regime s : {Regime::plus, Regime::minus}) {
            const double want = oracle::mgf_matrix_exp(z, 1.2, sign(s), 0.3, -0.2, 1.0, 2.0, -0.1, 0.2);
            EXPECT_LE(rel_err(mgf(z, 1.2, s, p, -0.1, 0.2), want), 1e-9) << z;
        }
    }
}

TEST(Density, MgfMatchesMonteCarlo) {
    const ModelParams mp = testutil::make_params(0.5, -0.5, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0);
    const DensityParams p = DensityParams::from_model(mp);
    const McEstimate e = mc_expectation(
        mp, 1.0, [&](const RegimePath& path) { return std::exp(telegraph_value(path, 0.5, -0.5, 1.0)); },
        Measure::physical, {200000, 4, 0});
    EXPECT_TRUE(testutil::within_se(mgf(1.0, 1.0, Regime::plus, p, 0.0, 0.0), e.mean, e.std_error));
    // Slope at zero is the mean of X + ln kappa.
    const ModelParams jp = testutil::make_params(0.5, -0.3, 1.4, 0.8, -0.2, 0.3, 0.0, 0.0, 1.0);
    const DensityParams q = DensityParams::from_model(jp);
    const double h = 1e-4;
    const double slope = (mgf(h, 1.0, Regime::plus, q, -0.2, 0.3) - mgf(-h, 1.0, Regime::plus, q, -0.2, 0.3)) / (2 * h);
    const McEstimate m = mc_expectation(
        jp, 1.0,
        [&](const RegimePath& path) { return std::log(stock_price(path, jp, 1.0)); },
        Measure::physical, {200000, 5, 0});
    EXPECT_TRUE(testutil::within_se(slope, m.mean, m.std_error)) << slope << " " << m.mean;
}

TEST(Density, InvalidParams) {
    EXPECT_THROW(dp(0.1, 0.2, 1, 1).validate(), std::invalid_argument);
    EXPECT_THROW(dp(0.2, 0.1, 0, 1).validate(), std::invalid_argument);
}
