#include "jtel/pricer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "jtel/density.hpp"
#include "jtel/error.hpp"
#include "jtel/quadrature.hpp"
#include "jtel/special.hpp"

namespace jtel {

namespace {

int floor_half(int n) { return n >= 0 ? n / 2 : -((1 - n) / 2); }

// ln of lambda_sigma^{ceil(n/2)} lambda_{-sigma}^{floor(n/2)}.
double log_switch_rates(int n, Regime sigma, const SeriesParams& sp) {
    return ((n + 1) / 2) * std::log(sp.lambda(sigma)) + (n / 2) * std::log(sp.lambda(-sigma));
}

// Closed form on the middle region, p, q >= 0.
double middle_term(double p, double q, int n, Regime sigma, const SeriesParams& sp) {
    const double v = v_n(p, q, n, sigma, sp.a_bar());
    if (v == 0.0) return 0.0;
    const double log_pref = -(sp.lambda_plus + sp.r_plus) * q - (sp.lambda_minus + sp.r_minus) * p +
                            log_switch_rates(n, sigma, sp);
    return std::exp(log_pref) * v;
}

enum class Region { above, middle, below };

Region region_of(double y, double t, const SeriesParams& sp) {
    if (sp.dc() == 0.0) return y <= sp.c_plus * t ? Region::below : Region::above;
    if (y > sp.c_plus * t) return Region::above;
    if (y <= sp.c_minus * t) return Region::below;
    return Region::middle;
}

// u_n with the region-below value supplied by the caller (possibly cached).
template <class Rho>
double u_n_region(double y, double t, int n, Regime sigma, const SeriesParams& sp, Rho&& rho) {
    switch (region_of(y, t, sp)) {
        case Region::above:
            return 0.0;
        case Region::below:
            return rho();
        case Region::middle:
            break;
    }
    const double p = (sp.c_plus * t - y) / sp.dc();
    const double q = (y - sp.c_minus * t) / sp.dc();
    return middle_term(p, q, n, sigma, sp);
}

double max_intensity(const SeriesParams& a, const SeriesParams& b) {
    return std::max({a.lambda_plus, a.lambda_minus, b.lambda_plus, b.lambda_minus});
}

struct SeriesSum {
    double u = 0.0;
    double U = 0.0;
    double tail = 1.0;
    int terms = 0;
};

// Sum of the discounted-probability and share-measure terms over switch
// counts. rho_disc / rho_share, when given, hold precomputed rho_n(T).
SeriesSum sum_call_series(double s0, double strike, double maturity, Regime sigma, double h_plus,
                          double h_minus, const SeriesParams& disc, const SeriesParams& share,
                          const SeriesControls& controls, const std::vector<double>* rho_disc,
                          const std::vector<double>* rho_share, std::vector<PriceTerm>* terms) {
    const double y = std::log(strike / s0);
    const double rate = max_intensity(disc, share) * maturity;
    const double c_top = disc.c_plus * maturity;
    const double pair_log =
        std::log1p(h_plus) + std::log1p(h_minus);  // ln kappa_{n+2} - ln kappa_n
    SeriesSum out;
    double b_prev = 0.0;
    for (int n = 0; n < controls.max_terms; ++n) {
        const double b = log_kappa(n, sigma, h_plus, h_minus);
        const double ys = y - b;
        const double un = u_n_region(ys, maturity, n, sigma, disc, [&] {
            return rho_disc && n < static_cast<int>(rho_disc->size()) ? (*rho_disc)[n]
                                                                      : rho_n(maturity, n, sigma, disc);
        });
        const double Un = u_n_region(ys, maturity, n, sigma, share, [&] {
            return rho_share && n < static_cast<int>(rho_share->size())
                       ? (*rho_share)[n]
                       : rho_n(maturity, n, sigma, share);
        });
        out.u += un;
        out.U += Un;
        out.terms = n + 1;
        if (terms) terms->push_back({n, b, ys, un, Un});

        out.tail = poisson_upper_tail(n, rate);
        if (out.tail < controls.tail_epsilon) return out;
        // kappa is pairwise non-increasing: once two consecutive shifted
        // arguments clear the top of the support, every later term vanishes.
        if (pair_log <= 0.0 && n >= 1 && y - std::max(b, b_prev) > c_top) {
            out.tail = 0.0;
            return out;
        }
        b_prev = b;
    }
    throw NumericalError("call series: tail bound " + std::to_string(out.tail) + " not below " +
                         std::to_string(controls.tail_epsilon) + " within " +
                         std::to_string(controls.max_terms) + " terms");
}

double discount_factor(double maturity, Regime sigma, const SeriesParams& disc,
                       const SeriesControls& controls) {
    const double rate = std::max(disc.lambda_plus, disc.lambda_minus) * maturity;
    double sum = 0.0;
    for (int n = 0; n < controls.max_terms; ++n) {
        sum += rho_n(maturity, n, sigma, disc);
        if (poisson_upper_tail(n, rate) < controls.tail_epsilon) return sum;
    }
    throw NumericalError("discount factor: tail not reached within the term budget");
}

}  // namespace

void CallSpec::validate() const {
    if (!(strike > 0.0) || !std::isfinite(strike)) throw std::invalid_argument("strike must be positive");
    if (!(maturity > 0.0) || !std::isfinite(maturity)) {
        throw std::invalid_argument("maturity must be positive");
    }
}

void SeriesControls::validate() const {
    if (!(tail_epsilon > 0.0)) throw std::invalid_argument("tail_epsilon must be positive");
    if (max_terms < 1) throw std::invalid_argument("max_terms must be at least 1");
}

RiskNeutralRates risk_neutral_rates(const ModelParams& p, const MartingaleIntensities& mi) {
    const auto [a_r, b_r] = linear_transform_coeffs(p.c_plus, p.c_minus, p.r_plus, p.r_minus);
    return {a_r, b_r, (mi.lambda_star_plus + p.r_plus) - (mi.lambda_star_minus + p.r_minus)};
}

SeriesParams discount_series(const ModelParams& p, const MartingaleIntensities& mi) {
    return {mi.lambda_star_plus, mi.lambda_star_minus, p.c_plus, p.c_minus, p.r_plus, p.r_minus};
}

SeriesParams share_series(const ModelParams& p, const MartingaleIntensities& mi) {
    const double lp = mi.lambda_star_plus * (1.0 + p.h_plus);
    const double lm = mi.lambda_star_minus * (1.0 + p.h_minus);
    if (!(lp > 0.0) || !(lm > 0.0)) {
        throw std::invalid_argument("share-measure intensities lambda*(1+h) must be positive");
    }
    return {lp, lm, p.c_plus, p.c_minus, 0.0, 0.0};
}

double P_n(double t, int n, Regime sigma, double a_bar) {
    if (n < 0) throw std::invalid_argument("P_n: negative index");
    if (!(t >= 0.0)) throw std::invalid_argument("P_n: negative time");
    if (n == 0) return sigma == Regime::plus ? std::exp(-a_bar * t) : 1.0;
    if (t == 0.0) return 0.0;
    const int m = sigma == Regime::plus ? n / 2 : floor_half(n - 1);
    return std::exp(n * std::log(t) - std::lgamma(n + 1.0)) * hyp1f1(m + 1.0, n + 1.0, -a_bar * t);
}

double rho_n(double t, int n, Regime sigma, const SeriesParams& sp) {
    if (n < 0) throw std::invalid_argument("rho_n: negative index");
    const double base = -(sp.lambda_minus + sp.r_minus) * t;
    if (n == 0) return std::exp(base) * P_n(t, 0, sigma, sp.a_bar());
    if (t == 0.0) return 0.0;
    const int m = sigma == Regime::plus ? n / 2 : floor_half(n - 1);
    const double log_mag =
        base + log_switch_rates(n, sigma, sp) + n * std::log(t) - std::lgamma(n + 1.0);
    return std::exp(log_mag) * hyp1f1(m + 1.0, n + 1.0, -sp.a_bar() * t);
}

double beta_coeff(int k, int j) {
    if (k < 1 || j < 0 || j >= k) {
        throw std::out_of_range("beta_coeff: need 0 <= j < k, got k = " + std::to_string(k) +
                                ", j = " + std::to_string(j));
    }
    // (k-j)_h / h! = C(k-j+h-1, h); every partial product is an integer, so this is exact.
    const int half = j / 2;
    double r = 1.0;
    for (int i = 1; i <= half; ++i) r = r * (k - j + i - 1) / i;
    return r;
}

double phi_kn(int k, int n, double p, double a_bar) {
    if (k < 0 || k > n) throw std::out_of_range("phi_kn: need 0 <= k <= n");
    if (k == 0) return P_n(p, 2 * n + 1, Regime::plus, a_bar);
    double sum = 0.0;
    for (int j = 0; j < k; ++j) {
        sum += std::pow(a_bar, k - j - 1) * beta_coeff(k, j) * P_n(p, 2 * n - j, Regime::minus, a_bar);
    }
    return sum;
}

double v_n(double p, double q, int n, Regime sigma, double a_bar) {
    if (!(p >= 0.0) || !(q >= 0.0)) throw std::invalid_argument("v_n: p and q must be non-negative");
    if (n < 0) throw std::invalid_argument("v_n: negative index");
    if (n == 0) return sigma == Regime::plus ? std::exp(-a_bar * p) : 0.0;
    if (n == 1) return P_n(p, 1, sigma, a_bar);

    // P^-_j(p) for j <= n, shared by every phi_{k,m} below.
    std::vector<double> pm(n + 2);
    for (int j = 0; j <= n + 1; ++j) pm[j] = P_n(p, j, Regime::minus, a_bar);
    auto phi = [&](int k, int m) {
        if (k == 0) return pm[2 * m + 1];
        double s = 0.0;
        for (int j = 0; j < k; ++j) s += std::pow(a_bar, k - j - 1) * beta_coeff(k, j) * pm[2 * m - j];
        return s;
    };

    const int m = n / 2;
    double value;
    double qk = 1.0;  // q^k / k!
    if (n % 2 == 1) {
        value = pm[n];
        for (int k = 1; k <= m; ++k) {
            qk *= q / k;
            value += qk * phi(k, m);
        }
    } else if (sigma == Regime::minus) {
        value = pm[n];
        for (int k = 1; k <= m - 1; ++k) {
            qk *= q / k;
            value += qk * phi(k + 1, m);
        }
    } else {
        value = P_n(p, n, Regime::plus, a_bar);
        for (int k = 1; k <= m; ++k) {
            qk *= q / k;
            value += qk * phi(k - 1, m - 1);
        }
    }
    return value;
}

double u_n(double y, double t, int n, Regime sigma, const SeriesParams& sp) {
    if (!(t > 0.0)) throw std::invalid_argument("u_n: t must be positive");
    if (n < 0) throw std::invalid_argument("u_n: negative index");
    return u_n_region(y, t, n, sigma, sp, [&] { return rho_n(t, n, sigma, sp); });
}

double U_n(double y, double t, int n, Regime sigma, const ModelParams& params,
           const MartingaleIntensities& mi) {
    return u_n(y, t, n, sigma, share_series(params, mi));
}

const char* series_case_name(SeriesCase c) noexcept {
    switch (c) {
        case SeriesCase::contracting:
            return "contracting";
        case SeriesCase::expanding:
            return "expanding";
        case SeriesCase::neutral:
            return "neutral";
    }
    return "neutral";
}

PriceBreakdown call_price(const ModelParams& params, const CallSpec& spec,
                          const SeriesControls& controls) {
    params.validate();
    spec.validate();
    controls.validate();
    const MartingaleIntensities mi = martingale_intensities(params);
    const SeriesParams disc = discount_series(params, mi);
    const SeriesParams share = share_series(params, mi);
    const Regime sigma = params.sigma0;
    const double T = spec.maturity;

    PriceBreakdown out;
    out.y = std::log(spec.strike / params.s0);
    const SeriesSum s = sum_call_series(params.s0, spec.strike, T, sigma, params.h_plus,
                                        params.h_minus, disc, share, controls, nullptr, nullptr,
                                        &out.terms);
    out.u = s.u;
    out.U = s.U;
    out.tail_bound = s.tail;
    out.price = std::max(params.s0 * s.U - spec.strike * s.u, 0.0);
    out.discount = discount_factor(T, sigma, disc, controls);
    out.lower_bound = std::max(0.0, params.s0 - spec.strike * out.discount);

    const double pair_log = std::log1p(params.h_plus) + std::log1p(params.h_minus);
    out.series_case = pair_log < 0.0   ? SeriesCase::contracting
                      : pair_log > 0.0 ? SeriesCase::expanding
                                       : SeriesCase::neutral;
    if (out.series_case != SeriesCase::neutral) {
        // Scan far enough that y - b_n has left [c- T, c+ T] for both parities.
        const double b01 = std::min(0.0, log_kappa(1, sigma, params.h_plus, params.h_minus));
        const double span = std::abs(out.y) + std::abs(b01) + (std::abs(params.c_plus) +
                                                              std::abs(params.c_minus)) * T;
        const long limit = std::min<long>(2 * static_cast<long>(span / std::abs(pair_log)) + 4, 1000000);
        for (int n = 0; n <= limit; ++n) {
            const double ys = out.y - log_kappa(n, sigma, params.h_plus, params.h_minus);
            const bool above_lo = ys > params.c_minus * T;
            const bool above_hi = ys > params.c_plus * T;
            if (out.series_case == SeriesCase::contracting) {
                if (above_lo && out.n_minus < 0) out.n_minus = n;
                if (above_hi && out.n_plus < 0) out.n_plus = n;
            } else {
                if (above_lo) out.m_minus = n;
                if (above_hi) out.m_plus = n;
            }
        }
    }
    return out;
}

MertonResult merton_price(double c, double r, double h, double s0, double strike, double maturity) {
    if (!(s0 > 0.0) || !(strike > 0.0) || !(maturity > 0.0)) {
        throw std::invalid_argument("merton_price: s0, strike and maturity must be positive");
    }
    const bool falling = h > 0.0 && h < 1.0 && c > r;
    const bool rising = h < 0.0 && c < r;
    if (!falling && !rising) {
        throw ArbitrageError("merton_price: need 0 < h < 1 with c > r, or h < 0 with c < r");
    }
    MertonResult out{};
    out.lambda_star = (c - r) / h;
    // S(T) = S0 e^{cT} (1-h)^N > K  <=>  N ln(1-h) > ln(K/S0) - cT.
    const double x = (std::log(strike / s0) - c * maturity) / std::log1p(-h);
    const double clamped = std::clamp(x, -1e9, 1e9);
    const double z_u = out.lambda_star * maturity;
    const double z_U = out.lambda_star * (1.0 - h) * maturity;
    if (falling) {
        out.n0 = static_cast<int>(std::ceil(clamped)) - 1;
        out.u = std::exp(-r * maturity) * poisson_cdf(out.n0, z_u);
        out.U = poisson_cdf(out.n0, z_U);
    } else {
        out.n0 = static_cast<int>(std::floor(clamped));
        out.u = std::exp(-r * maturity) * poisson_upper_tail(out.n0, z_u);
        out.U = poisson_upper_tail(out.n0, z_U);
    }
    out.price = std::max(s0 * out.U - strike * out.u, 0.0);
    return out;
}

SymmetricCheck symmetric_price_check(double lambda, double r, double c, double h, double s0,
                                     Regime sigma, const CallSpec& spec,
                                     const SeriesControls& controls) {
    if (!(lambda > 0.0) || !(r > 0.0) || !(c > 0.0) || !(h > 0.0 && h < 1.0)) {
        throw std::invalid_argument(
            "symmetric_price_check: need lambda > 0, r > 0, c > 0 and 0 < h < 1");
    }
    spec.validate();
    controls.validate();
    ModelParams p;
    p.lambda_plus = p.lambda_minus = lambda;
    p.r_plus = p.r_minus = r;
    p.c_plus = r + c;
    p.c_minus = r - c;
    p.h_plus = -h;
    p.h_minus = h;
    p.s0 = s0;
    p.sigma0 = sigma;

    SymmetricCheck out{};
    const PriceBreakdown series = call_price(p, spec, controls);
    out.series_price = series.price;
    out.u_series = series.u;

    const double T = spec.maturity;
    const double y = std::log(spec.strike / s0);
    const double ls = c / h;
    const double log_pair = std::log1p(-h * h);
    out.n_plus = static_cast<int>(std::ceil((y - (r + c) * T) / log_pair));
    out.n_minus = static_cast<int>(std::ceil((y - (r - c) * T) / log_pair));

    // u^{(sigma)} with a_bar = 0: every middle term is a truncated binomial sum.
    const double damp = std::exp(-(ls + r) * T);
    double u = 0.0;
    double b_prev = 0.0;
    for (int n = 0; n < controls.max_terms; ++n) {
        const double b = log_kappa(n, sigma, -h, h);
        const double pn = ((r + c) * T - y + b) / (2.0 * c);
        const double qn = (y - (r - c) * T - b) / (2.0 * c);
        const double log_fact = std::lgamma(n + 1.0);
        if (pn >= 0.0 && qn <= 0.0) {
            u += damp * std::exp(n * std::log(ls * T) - log_fact);
        } else if (pn >= 0.0) {
            const int m = sigma == Regime::plus ? n / 2 : floor_half(n - 1);
            double inner = 0.0;
            for (int k = 0; k <= m; ++k) {
                const double log_binom =
                    std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
                inner += std::exp(log_binom + k * std::log(qn) + (n - k) * std::log(pn));
            }
            u += damp * std::exp(n * std::log(ls) - log_fact) * inner;
        }
        if (poisson_upper_tail(n, ls * T) < controls.tail_epsilon) break;
        if (n >= 1 && y - std::max(b, b_prev) > (r + c) * T) break;
        b_prev = b;
    }
    out.u_explicit = u;
    out.explicit_price = std::max(s0 * series.U - spec.strike * u, 0.0);
    return out;
}

Payoff Payoff::call(double strike) {
    return {[strike](double s) { return s > strike ? s - strike : 0.0; }, {strike}};
}

Payoff Payoff::stock() {
    return {[](double s) { return s; }, {}};
}

Payoff Payoff::constant(double value) {
    return {[value](double) { return value; }, {}};
}

Payoff Payoff::custom(std::function<double(double)> f, std::vector<double> kinks) {
    return {std::move(f), std::move(kinks)};
}

double european_price_F(double t, double x, Regime sigma, const Payoff& payoff,
                        const ModelParams& params, double maturity,
                        const SeriesControls& controls) {
    if (!(x > 0.0)) throw std::invalid_argument("european_price_F: spot must be positive");
    if (!(t <= maturity) || !(t >= 0.0)) {
        throw std::invalid_argument("european_price_F: need 0 <= t <= maturity");
    }
    if (t == maturity) return payoff(x);
    controls.validate();
    const double tau = maturity - t;
    const MartingaleIntensities mi = martingale_intensities(params);
    const SeriesParams disc = discount_series(params, mi);
    const double rate = std::max(mi.lambda_star_plus, mi.lambda_star_minus) * tau;

    // Atom: no switch, X = c_sigma tau.
    double sum = rho_n(tau, 0, sigma, disc) * payoff(x * std::exp(params.c(sigma) * tau));
    if (params.c_plus == params.c_minus) {
        // Deterministic log-return; only the jump count is random.
        for (int n = 1; n < controls.max_terms; ++n) {
            const double kap = kappa(n, sigma, params.h_plus, params.h_minus);
            const double term = rho_n(tau, n, sigma, disc) * payoff(x * std::exp(params.c_plus * tau) * kap);
            sum += term;
            if (poisson_upper_tail(n, rate) < controls.tail_epsilon &&
                std::abs(term) <= controls.tail_epsilon * std::max(std::abs(sum), 1e-300)) {
                return sum;
            }
        }
        throw NumericalError("european_price_F: series did not converge");
    }

    const RiskNeutralRates rr = risk_neutral_rates(params, mi);
    const DensityParams dp = DensityParams::from_model(params, mi.lambda_star_plus, mi.lambda_star_minus);
    const double lo = params.c_minus * tau;
    const double hi = params.c_plus * tau;
    const double disc_b = std::exp(-rr.b_r * tau);
    double prev_term = std::numeric_limits<double>::infinity();
    for (int n = 1; n < controls.max_terms; ++n) {
        const double kap = kappa(n, sigma, params.h_plus, params.h_minus);
        std::vector<double> breaks;
        for (double k : payoff.kinks) {
            if (k > 0.0) {
                const double yk = std::log(k / (x * kap));
                if (yk > lo && yk < hi) breaks.push_back(yk);
            }
        }
        auto integrand = [&](double y) {
            const double dens = p_n_continuous(y, tau, n, sigma, dp);
            if (dens == 0.0) return 0.0;
            return std::exp(-rr.a_r * y) * payoff(x * std::exp(y) * kap) * dens;
        };
        const double term = disc_b * integrate(integrand, lo, hi, breaks);
        sum += term;
        const double scale = std::max(std::abs(sum), 1e-300);
        if (poisson_upper_tail(n, rate) < controls.tail_epsilon &&
            std::abs(term) <= controls.tail_epsilon * scale &&
            std::abs(prev_term) <= controls.tail_epsilon * scale) {
            return sum;
        }
        prev_term = term;
    }
    throw NumericalError("european_price_F: series did not converge within the term budget");
}

CallPriceFunction::CallPriceFunction(const ModelParams& params, const CallSpec& spec,
                                     const SeriesControls& controls)
    : params_(params), spec_(spec), controls_(controls) {
    params_.validate();
    spec_.validate();
    controls_.validate();
    const MartingaleIntensities mi = martingale_intensities(params_);
    disc_ = discount_series(params_, mi);
    share_ = share_series(params_, mi);
}

const CallPriceFunction::Table& CallPriceFunction::table(double tau) {
    if (auto it = cache_.find(tau); it != cache_.end()) return it->second;
    Table tab;
    const double rate = max_intensity(disc_, share_) * tau;
    for (Regime s : {Regime::plus, Regime::minus}) {
        const int idx = s == Regime::plus ? 0 : 1;
        for (int n = 0; n < controls_.max_terms; ++n) {
            tab.rho_disc[idx].push_back(rho_n(tau, n, s, disc_));
            tab.rho_share[idx].push_back(rho_n(tau, n, s, share_));
            if (poisson_upper_tail(n, rate) < controls_.tail_epsilon) break;
        }
    }
    // Once full, later maturities (typically one-off switch times) bypass the cache.
    if (cache_.size() >= kCacheCapacity) {
        scratch_ = std::move(tab);
        return scratch_;
    }
    return cache_.emplace(tau, std::move(tab)).first->second;
}

double CallPriceFunction::operator()(double t, double x, Regime sigma) {
    const double K = spec_.strike;
    if (!(x > 0.0)) throw std::invalid_argument("call price function: spot must be positive");
    if (t == spec_.maturity) return x > K ? x - K : 0.0;
    const double tau = spec_.maturity - t;
    if (!(tau > 0.0)) throw std::invalid_argument("call price function: t beyond maturity");
    const Table& tab = table(tau);
    const int idx = sigma == Regime::plus ? 0 : 1;
    const SeriesSum s = sum_call_series(x, K, tau, sigma, params_.h_plus, params_.h_minus, disc_,
                                        share_, controls_, &tab.rho_disc[idx], &tab.rho_share[idx],
                                        nullptr);
    return std::max(x * s.U - K * s.u, 0.0);
}

}  // namespace jtel
