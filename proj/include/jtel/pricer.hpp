#pragma once

// European call prices by the switch-count series, its Merton and symmetric
// special cases, and the general pricing function F(t, x, sigma).

#include <functional>
#include <unordered_map>
#include <vector>

#include "jtel/measure.hpp"
#include "jtel/regime.hpp"

namespace jtel {

struct CallSpec {
    double strike = 1.0;
    double maturity = 1.0;

    void validate() const;
};

struct SeriesControls {
    double tail_epsilon = 1e-12;
    int max_terms = 400;

    void validate() const;
};

struct RiskNeutralRates {
    double a_r;    // (r+ - r-)/(c+ - c-)
    double b_r;    // (c+ r- - c- r+)/(c+ - c-)
    double a_bar;  // (lambda*+ + r+) - (lambda*- + r-)
};

/// Throws std::invalid_argument when c_plus == c_minus (a_r, b_r undefined).
RiskNeutralRates risk_neutral_rates(const ModelParams& params, const MartingaleIntensities& mi);

/// Intensities, velocities and rates entering one family of series terms.
/// The discounted-probability terms u_n use (lambda*, c, r); the share-measure
/// terms U_n use (lambda*(1 + h), c, 0).
struct SeriesParams {
    double lambda_plus;
    double lambda_minus;
    double c_plus;
    double c_minus;
    double r_plus = 0.0;
    double r_minus = 0.0;

    double lambda(Regime s) const noexcept { return by_regime(s, lambda_plus, lambda_minus); }
    double c(Regime s) const noexcept { return by_regime(s, c_plus, c_minus); }
    double r(Regime s) const noexcept { return by_regime(s, r_plus, r_minus); }
    double dc() const noexcept { return c_plus - c_minus; }
    double a_bar() const noexcept { return (lambda_plus + r_plus) - (lambda_minus + r_minus); }
};

SeriesParams discount_series(const ModelParams& params, const MartingaleIntensities& mi);
/// Throws std::invalid_argument if some lambda*(1 + h) <= 0.
SeriesParams share_series(const ModelParams& params, const MartingaleIntensities& mi);

/// (t^n/n!) 1F1(m+1; n+1; -a_bar t), m = floor(n/2) for sigma = +1 and
/// floor((n-1)/2) for sigma = -1; P_0 = exp(-a_bar t) (+1) or 1 (-1).
double P_n(double t, int n, Regime sigma, double a_bar);

/// E*[B(t)^{-1}; N(t) = n] = exp(-(lambda_- + r_-) t) Lambda_n P_n(t).
double rho_n(double t, int n, Regime sigma, const SeriesParams& sp);

/// (k - j)_{floor(j/2)} / floor(j/2)!, 0 <= j < k.
double beta_coeff(int k, int j);

/// phi_{0,n} = P_{2n+1}(p); phi_{k,n} = sum_{j<k} a^{k-j-1} beta_{k,j} P^-_{2n-j}(p), 0 <= k <= n.
double phi_kn(int k, int n, double p, double a_bar);

/// Polynomial-hypergeometric part of u_n on the middle region (p, q >= 0).
double v_n(double p, double q, int n, Regime sigma, double a_bar);

/// E[B(t)^{-1}; X(t) >= y, N(t) = n] under the intensities of sp:
/// 0 for y > c+ t, rho_n for y <= c- t, the closed form in between.
/// With c+ == c- the middle region is empty.
double u_n(double y, double t, int n, Regime sigma, const SeriesParams& sp);

/// u_n under the share measure (lambda*(1 + h), r = 0).
double U_n(double y, double t, int n, Regime sigma, const ModelParams& params,
           const MartingaleIntensities& mi);

enum class SeriesCase { contracting, expanding, neutral };  // sign of ln((1+h-)(1+h+))

const char* series_case_name(SeriesCase c) noexcept;

struct PriceTerm {
    int n;
    double b;        // ln kappa_n
    double y_shift;  // y - b
    double u;
    double U;
};

struct PriceBreakdown {
    double y = 0.0;
    std::vector<PriceTerm> terms;
    SeriesCase series_case = SeriesCase::neutral;
    // Truncation indices of the series split; -1 where the set is empty or not applicable.
    int n_minus = -1, n_plus = -1;  // contracting case
    int m_minus = -1, m_plus = -1;  // expanding case
    double u = 0.0;
    double U = 0.0;
    double price = 0.0;
    double tail_bound = 0.0;
    double discount = 0.0;     // E*[B(T)^{-1}]
    double lower_bound = 0.0;  // max(0, S0 - K * discount)
};

/// Throws ArbitrageError or NumericalError (tail not reached within max_terms).
PriceBreakdown call_price(const ModelParams& params, const CallSpec& spec,
                          const SeriesControls& controls = {});

struct MertonResult {
    double price;
    double u;
    double U;
    int n0;
    double lambda_star;
};

/// Single-regime market dS = S-(c dt - h dN) with rate r. Requires
/// 0 < h < 1 with c > r, or h < 0 with c < r; otherwise ArbitrageError.
MertonResult merton_price(double c, double r, double h, double s0, double strike, double maturity);

struct SymmetricCheck {
    double explicit_price;  // S0 U - K u with u from the explicit binomial sum
    double series_price;    // call_price on the same model
    double u_explicit;
    double u_series;
    int n_plus;
    int n_minus;
};

/// lambda+- = lambda, r+- = r, c+- = r +- c, h+- = -+h with c > 0, 0 < h < 1.
SymmetricCheck symmetric_price_check(double lambda, double r, double c, double h, double s0,
                                     Regime sigma, const CallSpec& spec,
                                     const SeriesControls& controls = {});

/// Continuous, piecewise smooth payoff with its kink locations.
struct Payoff {
    std::function<double(double)> f;
    std::vector<double> kinks;

    static Payoff call(double strike);
    static Payoff stock();
    static Payoff constant(double value);
    static Payoff custom(std::function<double(double)> f, std::vector<double> kinks = {});

    double operator()(double s) const { return f(s); }
};

/// Value at time t, spot x, regime sigma of a claim paying f(S(T)) at
/// maturity, by per-switch-count quadrature. t = T returns f(x).
double european_price_F(double t, double x, Regime sigma, const Payoff& payoff,
                        const ModelParams& params, double maturity,
                        const SeriesControls& controls = {});

/// F(t, x, sigma) for a call, by the closed-form series with per-maturity
/// tables of rho_n. Not thread-safe: give each worker its own instance.
class CallPriceFunction {
public:
    CallPriceFunction(const ModelParams& params, const CallSpec& spec,
                      const SeriesControls& controls = {});

    double operator()(double t, double x, Regime sigma);

    const ModelParams& params() const noexcept { return params_; }
    const CallSpec& spec() const noexcept { return spec_; }

private:
    struct Table {
        std::vector<double> rho_disc[2];
        std::vector<double> rho_share[2];
    };
    const Table& table(double tau);

    ModelParams params_;
    CallSpec spec_;
    SeriesControls controls_;
    SeriesParams disc_;
    SeriesParams share_;
    static constexpr std::size_t kCacheCapacity = 1 << 16;
    std::unordered_map<double, Table> cache_;
    Table scratch_;
};

}  // namespace jtel
