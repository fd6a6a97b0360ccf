#include "jtel/density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "jtel/error.hpp"
#include "jtel/quadrature.hpp"
#include "jtel/simd/kernels.hpp"
#include "jtel/special.hpp"

namespace jtel {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Occupation times in each regime implied by reaching x at time t.
struct Occupation {
    double t_plus;
    double t_minus;
};

Occupation occupation(double x, double t, const DensityParams& p) {
    return {(x - p.c_minus * t) / p.dc(), (p.c_plus * t - x) / p.dc()};
}

void check_t(double t) {
    if (!(t > 0.0) || !std::isfinite(t)) throw std::invalid_argument("density: t must be positive");
}

}  // namespace

DensityParams DensityParams::from_model(const ModelParams& p) {
    return from_model(p, p.lambda_plus, p.lambda_minus);
}

DensityParams DensityParams::from_model(const ModelParams& p, double lambda_p, double lambda_m) {
    DensityParams d{p.c_plus, p.c_minus, lambda_p, lambda_m};
    d.validate();
    return d;
}

void DensityParams::validate() const {
    if (!(c_plus > c_minus)) throw std::invalid_argument("density: requires c_plus > c_minus");
    if (!(lambda_plus > 0.0) || !(lambda_minus > 0.0) || !std::isfinite(lambda_plus) ||
        !std::isfinite(lambda_minus)) {
        throw std::invalid_argument("density: switch intensities must be positive");
    }
}

double log_q_n(double x, double t, int n, Regime sigma, const DensityParams& params) {
    check_t(t);
    if (n < 1) throw std::invalid_argument("q_n: n must be >= 1");
    const Occupation o = occupation(x, t, params);
    if (!(o.t_plus > 0.0) || !(o.t_minus > 0.0)) return kNegInf;
    const double lp = std::log(params.lambda_plus);
    const double lm = std::log(params.lambda_minus);
    const double la = std::log(o.t_minus);  // time at c_minus
    const double lb = std::log(o.t_plus);   // time at c_plus
    const double ldc = std::log(params.dc());
    const int k = n / 2;
    if (n % 2 == 0) {
        // Start regime is visited k+1 times, the other k times; the start
        // regime's occupation is split into k+1 pieces.
        const double own = sigma == Regime::plus ? lb : la;
        const double other = sigma == Regime::plus ? la : lb;
        return k * (lp + lm) + k * own + (k - 1) * other - std::lgamma(k + 1.0) - std::lgamma(k) - ldc;
    }
    const double rates = sigma == Regime::plus ? (k + 1) * lp + k * lm : k * lp + (k + 1) * lm;
    return rates + k * (la + lb) - 2.0 * std::lgamma(k + 1.0) - ldc;
}

double q_n(double x, double t, int n, Regime sigma, const DensityParams& params) {
    return std::exp(log_q_n(x, t, n, sigma, params));
}

double p_n_continuous(double x, double t, int n, Regime sigma, const DensityParams& params) {
    check_t(t);
    if (n < 0) throw std::invalid_argument("p_n: negative switch count");
    if (n == 0) return 0.0;
    const double lq = log_q_n(x, t, n, sigma, params);
    if (lq == kNegInf) return 0.0;
    const Occupation o = occupation(x, t, params);
    return std::exp(lq - params.lambda_plus * o.t_plus - params.lambda_minus * o.t_minus);
}

DensityValue p_n(double x, double t, int n, Regime sigma, const DensityParams& params) {
    check_t(t);
    DensityValue v;
    v.atom_x = params.c(sigma) * t;
    if (n == 0) {
        v.atom_weight = std::exp(-params.lambda(sigma) * t);
        return v;
    }
    v.continuous = p_n_continuous(x, t, n, sigma, params);
    return v;
}

namespace {

// Bessel-form continuous part given I0(z) and 2 I1(z)/z at the point.
double total_from_bessel(double x, double t, Regime sigma, const DensityParams& p, double i0,
                         double i1s) {
    const Occupation o = occupation(x, t, p);
    const double own_time = sigma == Regime::plus ? o.t_plus : o.t_minus;
    const double damp = std::exp(-p.lambda_plus * o.t_plus - p.lambda_minus * o.t_minus);
    return damp * (p.lambda(sigma) / p.dc() * i0 +
                   p.lambda_plus * p.lambda_minus * own_time / p.dc() * i1s);
}

double bessel_argument(double x, double t, const DensityParams& p) {
    const Occupation o = occupation(x, t, p);
    const double prod = std::max(o.t_plus, 0.0) * std::max(o.t_minus, 0.0);
    return 2.0 * std::sqrt(p.lambda_plus * p.lambda_minus * prod);
}

bool in_closed_support(double x, double t, const DensityParams& p) {
    return x >= p.c_minus * t && x <= p.c_plus * t;
}

}  // namespace

DensityValue density_total(double x, double t, Regime sigma, const DensityParams& params) {
    check_t(t);
    DensityValue v;
    v.atom_x = params.c(sigma) * t;
    v.atom_weight = std::exp(-params.lambda(sigma) * t);
    if (!in_closed_support(x, t, params)) return v;
    const double z = bessel_argument(x, t, params);
    v.continuous = total_from_bessel(x, t, sigma, params, bessel_i0(z), bessel_i1_scaled(z));
    return v;
}

std::vector<double> density_grid(std::span<const double> xs, double t, Regime sigma,
                                 const DensityParams& params) {
    check_t(t);
    std::vector<double> z(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) z[i] = bessel_argument(xs[i], t, params);
    std::vector<double> i0(xs.size()), i1s(xs.size());
    simd::bessel_i0_i1s(z, i0, i1s);
    std::vector<double> out(xs.size(), 0.0);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (in_closed_support(xs[i], t, params)) {
            out[i] = total_from_bessel(xs[i], t, sigma, params, i0[i], i1s[i]);
        }
    }
    return out;
}

double mgf(double z, double t, Regime sigma, const DensityParams& params, double h_plus,
           double h_minus, const MgfControls& controls) {
    check_t(t);
    if (z == 0.0) return 1.0;
    const double lo = params.c_minus * t;
    const double hi = params.c_plus * t;
    const double lambda_max = std::max(params.lambda_plus, params.lambda_minus);

    double sum = std::exp(z * params.c(sigma) * t - params.lambda(sigma) * t);
    std::vector<double> terms{sum};
    for (int n = 1; n <= controls.max_terms; ++n) {
        const double shift = z * log_kappa(n, sigma, h_plus, h_minus);
        auto integrand = [&](double x) {
            const double lq = log_q_n(x, t, n, sigma, params);
            if (lq == kNegInf) return 0.0;
            const Occupation o = occupation(x, t, params);
            return std::exp(lq - params.lambda_plus * o.t_plus - params.lambda_minus * o.t_minus +
                            z * x + shift);
        };
        const double term = integrate(integrand, lo, hi);
        if (!std::isfinite(term)) throw NumericalError("mgf: non-finite series term");
        terms.push_back(term);
        sum += term;
        // Regime alternation makes consecutive ratios oscillate; compare over two steps.
        if (n >= 3 && n > lambda_max * t) {
            const double prev2 = terms[n - 2];
            const double rho = prev2 > 0.0 ? term / prev2 : 0.0;
            if (rho < 1.0) {
                const double tail = (term + terms[n - 1]) * rho / (1.0 - rho);
                if (tail <= controls.tail_epsilon * std::abs(sum)) return sum;
            }
        }
    }
    throw NumericalError("mgf: series did not converge within " +
                         std::to_string(controls.max_terms) + " terms at z = " + std::to_string(z));
}

ResidualReport kolmogorov_residual(const std::function<double(double, double)>& f,
                                   const std::function<double(double, double)>& source,
                                   Regime sigma, const DensityParams& params,
                                   const KolmogorovGrid& grid) {
    params.validate();
    const double h = grid.spacing;
    if (!(h > 0.0)) throw std::invalid_argument("kolmogorov_residual: spacing must be positive");
    if (!(grid.t - h > 0.0)) throw std::invalid_argument("kolmogorov_residual: t too small for spacing");
    const double c = params.c(sigma);
    const double lam = params.lambda(sigma);
    auto strictly_inside = [&](double x, double t) {
        return x > params.c_minus * t && x < params.c_plus * t;
    };
    ResidualReport report{0.0, h};
    for (double x : grid.x) {
        const double t = grid.t;
        for (double dt : {-h, 0.0, h}) {
            for (double dx : {-h, 0.0, h}) {
                if (!strictly_inside(x + dx, t + dt)) {
                    throw std::invalid_argument("kolmogorov_residual: stencil at x = " +
                                                std::to_string(x) + " leaves the support interior");
                }
            }
        }
        double ft, fx;
        const double f0 = f(x, t);
        if (grid.scheme == DifferenceScheme::central) {
            ft = (f(x, t + h) - f(x, t - h)) / (2.0 * h);
            fx = (f(x + h, t) - f(x - h, t)) / (2.0 * h);
        } else {
            ft = (f(x, t + h) - f0) / h;
            fx = (f(x + h, t) - f0) / h;
        }
        const double r = ft + c * fx + lam * f0 - lam * source(x, t);
        report.max_residual = std::max(report.max_residual, std::abs(r));
    }
    return report;
}

ResidualReport kolmogorov_residual(int n, Regime sigma, const DensityParams& params,
                                   const KolmogorovGrid& grid) {
    if (n < 1) throw std::invalid_argument("kolmogorov_residual: n must be >= 1");
    auto f = [&](double x, double t) { return p_n_continuous(x, t, n, sigma, params); };
    // The n = 1 source is the atom of the other regime, which sits on the boundary.
    auto g = [&](double x, double t) { return p_n_continuous(x, t, n - 1, -sigma, params); };
    return kolmogorov_residual(f, g, sigma, params, grid);
}

}  // namespace jtel
