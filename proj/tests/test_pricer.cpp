#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "jtel/error.hpp"
#include "jtel/measure.hpp"
#include "jtel/pricer.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace jtel;
using testutil::make_params;
using testutil::rel_err;

namespace {

SeriesParams unit_series() { return SeriesParams{1.0, 1.0, 1.0, -1.0, 0.0, 0.0}; }

}  // namespace

TEST(Pricer, PnSpecialValues) {
    EXPECT_EQ(P_n(0.7, 0, Regime::minus, 0.4), 1.0);
    EXPECT_NEAR(P_n(0.7, 0, Regime::plus, 0.4), std::exp(-0.28), 1e-16);
    for (int n = 1; n <= 8; ++n) {
        EXPECT_LE(rel_err(P_n(1.3, n, Regime::plus, 0.0), std::pow(1.3, n) / std::tgamma(n + 1.0)), 1e-14);
    }
}

TEST(Pricer, PnEvenOddIdentity) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.1, 2.0), a(-1.5, 1.5);
    for (int trial = 0; trial < 40; ++trial) {
        const double t = u(rng), ab = a(rng);
        const int n = trial % 11;
        const double lhs = P_n(t, 2 * n, Regime::minus, ab) - P_n(t, 2 * n, Regime::plus, ab);
        const double rhs = ab * P_n(t, 2 * n + 1, Regime::plus, ab);
        EXPECT_LE(std::abs(lhs - rhs), 1e-10 * std::max(std::abs(rhs), 1e-12)) << n;
    }
}

TEST(Pricer, RhoN) {
    EXPECT_NEAR(rho_n(1.0, 2, Regime::plus, unit_series()), std::exp(-1.0) / 2, 1e-15);
    // Zero-coupon bond from the discounted total mass.
    const SeriesParams sp{0.8, 1.7, 0.3, -0.2, 0.04, 0.04};
    double sum = 0.0;
    for (int n = 0; n <= 60; ++n) sum += rho_n(1.5, n, Regime::minus, sp);
    EXPECT_NEAR(sum, std::exp(-0.06), 1e-10);
}

TEST(Pricer, RhoSolvesForwardSystem) {
    const SeriesParams sp{0.8, 1.7, 0.3, -0.2, 0.04, 0.07};
    const double h = 1e-4, t = 0.9;
    for (Regime s : {Regime::plus, Regime::minus}) {
        for (int n = 1; n <= 8; ++n) {
            // The regime at the last switch decides which rate applies to rho_n.
            const Regime last = n % 2 == 0 ? s : -s;
            const double d = (rho_n(t + h, n, s, sp) - rho_n(t - h, n, s, sp)) / (2 * h);
            const double rhs = -(sp.lambda(last) + sp.r(last)) * rho_n(t, n, s, sp) +
                               sp.lambda(-last) * rho_n(t, n - 1, s, sp);
            EXPECT_LE(std::abs(d - rhs), 1e-6) << n;
        }
    }
}

TEST(Pricer, BetaCoefficients) {
    for (int k = 1; k <= 20; ++k) {
        EXPECT_EQ(beta_coeff(k, 0), 1.0);
        if (k > 1) EXPECT_EQ(beta_coeff(k, 1), 1.0);
    }
    EXPECT_EQ(beta_coeff(4, 2), 2.0);
    EXPECT_THROW(beta_coeff(3, 3), std::out_of_range);
}

TEST(Pricer, PhiKnBoundaryAndZeroRate) {
    EXPECT_DOUBLE_EQ(phi_kn(0, 3, 0.8, 0.3), P_n(0.8, 7, Regime::plus, 0.3));
    for (int n = 1; n <= 5; ++n) {
        for (int k = 1; k <= n; ++k) {
            const int m = 2 * n - k + 1;
            EXPECT_LE(rel_err(phi_kn(k, n, 0.8, 0.0), std::pow(0.8, m) / std::tgamma(m + 1.0)), 1e-13);
        }
    }
    EXPECT_THROW(phi_kn(4, 3, 0.5, 0.1), std::out_of_range);
}

TEST(Pricer, VnBasics) {
    EXPECT_NEAR(v_n(0.6, 0.4, 0, Regime::plus, 0.3), std::exp(-0.18), 1e-16);
    EXPECT_EQ(v_n(0.6, 0.4, 0, Regime::minus, 0.3), 0.0);
    // Zero rate difference: binomial form.
    const double p = 0.6, q = 0.4;
    for (int n = 1; n <= 8; ++n) {
        for (Regime s : {Regime::plus, Regime::minus}) {
            const int m = s == Regime::plus ? n / 2 : (n - 1) / 2;
            double sum = 0.0;
            for (int k = 0; k <= m; ++k) {
                sum += std::tgamma(n + 1.0) / (std::tgamma(k + 1.0) * std::tgamma(n - k + 1.0)) * std::pow(q, k) *
                       std::pow(p, n - k);
            }
            EXPECT_LE(rel_err(v_n(p, q, n, s, 0.0), sum / std::tgamma(n + 1.0)), 1e-13) << n;
        }
    }
    EXPECT_THROW(v_n(-0.1, 0.2, 2, Regime::plus, 0.0), std::invalid_argument);
}

TEST(Pricer, UnSingleSwitchPoint) {
    EXPECT_NEAR(u_n(0.0, 1.0, 1, Regime::plus, unit_series()), std::exp(-1.0) * 0.5, 1e-15);
}

TEST(Pricer, UnRegions) {
    const SeriesParams sp{0.9, 1.6, 0.25, -0.15, 0.03, 0.06};
    const double t = 1.2;
    for (int n = 0; n <= 6; ++n) {
        EXPECT_EQ(u_n(0.25 * t + 1e-9, t, n, Regime::plus, sp), 0.0);
        EXPECT_DOUBLE_EQ(u_n(-0.15 * t - 1e-9, t, n, Regime::minus, sp), rho_n(t, n, Regime::minus, sp));
    }
}

TEST(Pricer, UnContinuousAcrossRegionEdges) {
    const SeriesParams sp{0.9, 1.6, 0.25, -0.15, 0.03, 0.06};
    const double t = 1.2, e = 1e-10;
    for (int n = 1; n <= 6; ++n) {
        for (Regime s : {Regime::plus, Regime::minus}) {
            EXPECT_NEAR(u_n(-0.15 * t - e, t, n, s, sp), u_n(-0.15 * t + e, t, n, s, sp), 1e-8);
            EXPECT_NEAR(u_n(0.25 * t - e, t, n, s, sp), u_n(0.25 * t + e, t, n, s, sp), 1e-8);
        }
    }
    // The atom: u_0 from the rising regime drops by e^{-(lambda + r) t} at c+ t.
    const double jump = u_n(0.25 * t - e, t, 0, Regime::plus, sp) - u_n(0.25 * t + e, t, 0, Regime::plus, sp);
    EXPECT_NEAR(jump, std::exp(-(0.9 + 0.03) * t), 1e-8);
}

TEST(Pricer, UnMatchesQuadrature) {
    const ModelParams p = testutil::asymmetric();
    const MartingaleIntensities mi = martingale_intensities(p);
    const SeriesParams disc = discount_series(p, mi);
    const RiskNeutralRates rr = risk_neutral_rates(p, mi);
    const oracle::Market m{p.c_plus, p.c_minus, mi.lambda_star_plus, mi.lambda_star_minus, p.r_plus, p.r_minus};
    const double t = 1.4;
    for (int n = 0; n <= 8; ++n) {
        for (double y : {-0.1, 0.0, 0.12}) {
            for (Regime s : {Regime::plus, Regime::minus}) {
                const double want = oracle::truncated_moment(y, t, n, sign(s), m, [](double) { return 1.0; });
                EXPECT_LE(rel_err(u_n(y, t, n, s, disc), want), 1e-8) << n << " " << y;
                const double want_U = oracle::truncated_moment(y, t, n, sign(s), m, [](double x) { return std::exp(x); }) *
                                      kappa(n, s, p.h_plus, p.h_minus);
                EXPECT_LE(rel_err(U_n(y, t, n, s, p, mi), want_U), 1e-8) << n << " " << y;
            }
        }
    }
    EXPECT_NEAR(rr.a_r * p.c_plus + rr.b_r, p.r_plus, 1e-16);
    EXPECT_NEAR(rr.a_r * p.c_minus + rr.b_r, p.r_minus, 1e-16);
}

TEST(Pricer, CallLimits) {
    const ModelParams p = testutil::asymmetric();
    EXPECT_LE(rel_err(call_price(p, {1e-8, 1.0}).price, p.s0), 1e-8);
    // Discounting alone moves the price by about K r T, so the horizon is 1e-8.
    EXPECT_NEAR(call_price(p, {95.0, 1e-8}).price, 5.0, 1e-6);
    EXPECT_NEAR(call_price(p, {105.0, 1e-8}).price, 0.0, 1e-6);
    const PriceBreakdown short_dated = call_price(p, {95.0, 1e-6});
    EXPECT_GE(short_dated.price, short_dated.lower_bound);
    EXPECT_LE(short_dated.price - 5.0, 1e-4);
}

TEST(Pricer, CallMonotoneAndBounded) {
    for (Regime s : {Regime::plus, Regime::minus}) {
        const ModelParams p = testutil::asymmetric(s);
        double prev = p.s0;
        for (double K = 60.0; K <= 140.0; K += 5.0) {
            const PriceBreakdown b = call_price(p, {K, 1.5});
            EXPECT_LE(b.price, prev + 1e-12);
            EXPECT_GE(b.price, b.lower_bound - 1e-12);
            EXPECT_GE(b.price, 0.0);
            EXPECT_LE(b.tail_bound, 1e-12);
            prev = b.price;
        }
    }
}

TEST(Pricer, SeriesCases) {
    EXPECT_EQ(call_price(testutil::asymmetric(), {100.0, 1.0}).series_case, SeriesCase::contracting);
    const ModelParams up = make_params(0.15, -0.1, 1.0, 1.5, -0.1, 0.3, 0.05, 0.04);
    EXPECT_EQ(call_price(up, {100.0, 1.0}).series_case, SeriesCase::expanding);
    const ModelParams flat = testutil::ratio_family();  // 0.75 * 1.25 < 1
    EXPECT_EQ(call_price(flat, {100.0, 1.0}).series_case, SeriesCase::contracting);
    const ModelParams neutral = make_params(0.15, -0.1, 1.0, 1.5, -0.2, 0.25, 0.05, 0.04);
    const PriceBreakdown nb = call_price(neutral, {100.0, 1.0});
    EXPECT_EQ(nb.series_case, SeriesCase::neutral);
}

TEST(Pricer, ArbitrageRejected) {
    ModelParams p = testutil::asymmetric();
    p.h_plus = 0.2;
    EXPECT_THROW(call_price(p, {100.0, 1.0}), ArbitrageError);
    EXPECT_THROW(call_price(testutil::asymmetric(), {-1.0, 1.0}), std::invalid_argument);
}

TEST(Pricer, Merton) {
    const MertonResult m = merton_price(0.1, 0.05, 0.5, 100.0, 100.0, 1.0);
    // n0 is the largest in-the-money jump count: 100 e^{0.1} / 2 < 100, so only N = 0 pays.
    EXPECT_EQ(m.n0, 0);
    EXPECT_NEAR(m.lambda_star, 0.1, 1e-15);
    EXPECT_LE(rel_err(m.price, oracle::merton_enumeration(0.1, 0.05, 0.5, 100.0, 100.0, 1.0)), 1e-12);
    const ModelParams market = make_params(0.1, 0.1, 1.0, 1.0, -0.5, -0.5, 0.05, 0.05);
    EXPECT_LE(rel_err(call_price(market, {100.0, 1.0}).price, m.price), 1e-10);
    // Upward jumps with c < r.
    const MertonResult up = merton_price(0.01, 0.05, -0.2, 100.0, 95.0, 2.0);
    EXPECT_LE(rel_err(up.price, oracle::merton_enumeration(0.01, 0.05, -0.2, 100.0, 95.0, 2.0)), 1e-12);
    EXPECT_LE(rel_err(merton_price(0.1, 0.05, 0.5, 100.0, 1e-9, 1.0).price, 100.0), 1e-9);
    EXPECT_THROW(merton_price(0.05, 0.1, 0.5, 100.0, 100.0, 1.0), ArbitrageError);
}

TEST(Pricer, SymmetricExplicitSum) {
    const SymmetricCheck c = symmetric_price_check(1.0, 0.05, 0.3, 0.2, 100.0, Regime::plus, {100.0, 1.0});
    EXPECT_LE(rel_err(c.explicit_price, c.series_price), 1e-10);
    const MartingaleIntensities mi =
        martingale_intensities(make_params(0.35, -0.25, 1.0, 1.0, -0.2, 0.2, 0.05, 0.05));
    EXPECT_NEAR(mi.lambda_star_plus, 0.3 / 0.2, 1e-14);
    EXPECT_NEAR(mi.lambda_star_minus, 0.3 / 0.2, 1e-14);
    EXPECT_THROW(symmetric_price_check(1.0, 0.05, 0.3, 1.2, 100.0, Regime::plus, {100.0, 1.0}),
                 std::invalid_argument);
}

TEST(Pricer, EuropeanF) {
    const ModelParams p = make_params(0.15, -0.1, 1.0, 1.5, -0.2, 0.15, 0.05, 0.05);
    EXPECT_LE(rel_err(european_price_F(0.2, 90.0, Regime::plus, Payoff::constant(1.0), p, 1.0), std::exp(-0.04)), 1e-10);
    EXPECT_LE(rel_err(european_price_F(0.2, 90.0, Regime::minus, Payoff::stock(), p, 1.0), 90.0), 1e-8);
    const ModelParams q = testutil::asymmetric();
    for (Regime s : {Regime::plus, Regime::minus}) {
        ModelParams qs = q;
        qs.sigma0 = s;
        EXPECT_LE(rel_err(european_price_F(0.0, 100.0, s, Payoff::call(100.0), q, 1.0),
                          call_price(qs, {100.0, 1.0}).price),
                  1e-8);
    }
    EXPECT_EQ(european_price_F(1.0, 120.0, Regime::plus, Payoff::call(100.0), q, 1.0), 20.0);
}

TEST(Pricer, CallPriceFunctionMatchesSeries) {
    const ModelParams p = testutil::asymmetric();
    CallPriceFunction F(p, {100.0, 1.0});
    for (double t : {0.0, 0.3, 0.9}) {
        for (double x : {80.0, 100.0, 115.0}) {
            for (Regime s : {Regime::plus, Regime::minus}) {
                ModelParams q = p;
                q.s0 = x;
                q.sigma0 = s;
                const double want = call_price(q, {100.0, 1.0 - t}).price;
                EXPECT_LE(std::abs(F(t, x, s) - want), 1e-12 * std::max(want, 1.0));
                // A second call hits the cached table.
                EXPECT_EQ(F(t, x, s), F(t, x, s));
            }
        }
    }
    EXPECT_EQ(F(1.0, 130.0, Regime::plus), 30.0);
}
