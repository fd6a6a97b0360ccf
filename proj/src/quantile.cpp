#include "jtel/quantile.hpp"

#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "jtel/error.hpp"
#include "jtel/special.hpp"

namespace jtel {

namespace {

constexpr double kMaxLogGamma = 700.0;

// Root of a function with f(lo) > 0 > f(hi) (or the reverse) to full precision.
template <class F>
double bisect_root(F&& f, double lo, double hi) {
    const auto [a, b] =
        boost::math::tools::bisect(f, lo, hi, boost::math::tools::eps_tolerance<double>(52));
    return 0.5 * (a + b);
}

// ln(1 + e^u) without overflow.
double softplus(double u) { return u > 0.0 ? u + std::log1p(std::exp(-u)) : std::log1p(std::exp(u)); }

// phi = -a w - ln C_n - ln(S0 e^w - K), written in u = ln(S0 e^w / K - 1) so
// that w = ln(K/S0) + softplus(u) and ln(S0 e^w - K) = ln K + u. The success
// region of slice n is {phi >= 0}; phi -> +inf as u -> -inf.
struct SliceEquation {
    double a;
    double w0;
    double log_c;
    double log_k;

    double operator()(double u) const { return -a * (w0 + softplus(u)) - log_c - log_k - u; }
};

SliceEquation slice_equation(int n, double gamma, const QuantileModel& m) {
    const ModelParams& p = m.params;
    const double log_kappa_star = log_kappa(n, p.sigma0, m.mi.h_star_plus, m.mi.h_star_minus);
    const double log_kap = log_kappa(n, p.sigma0, p.h_plus, p.h_minus);
    const double log_c = std::log(gamma) + log_kappa_star - m.a * log_kap + m.b * m.spec.maturity;
    return {m.a, std::log(m.spec.strike / p.s0), log_c, std::log(m.spec.strike)};
}

constexpr double kUMax = 1e6;

double lower_bracket(const SliceEquation& eq, double start) {
    double u = start;
    double step = 1.0;
    while (eq(u) <= 0.0) {
        u -= step;
        step *= 2.0;
        if (u < -kUMax) throw NumericalError("threshold: no lower bracket");
    }
    return u;
}

}  // namespace

const char* threshold_case_name(ThresholdCase c) noexcept {
    return c == ThresholdCase::single ? "single_threshold" : "double_threshold";
}

QuantileModel QuantileModel::build(const ModelParams& params, const CallSpec& spec,
                                   const SeriesControls& controls) {
    params.validate();
    spec.validate();
    controls.validate();
    QuantileModel m;
    m.params = params;
    m.spec = spec;
    m.mi = martingale_intensities(params);
    const auto [a, b] =
        linear_transform_coeffs(params.c_plus, params.c_minus, m.mi.c_star_plus, m.mi.c_star_minus);
    m.a = a;
    m.b = b;
    m.kind = -a <= 1.0 ? ThresholdCase::single : ThresholdCase::pair;
    m.disc = discount_series(params, m.mi);
    m.share = share_series(params, m.mi);
    m.physical = {params.lambda_plus, params.lambda_minus, params.c_plus, params.c_minus, 0.0, 0.0};
    const double rate = std::max({m.disc.lambda_plus, m.disc.lambda_minus, m.share.lambda_plus,
                                  m.share.lambda_minus, params.lambda_plus, params.lambda_minus}) *
                        spec.maturity;
    m.n_terms = 0;
    for (int n = 0; n < controls.max_terms; ++n) {
        if (poisson_upper_tail(n, rate) < controls.tail_epsilon) {
            m.n_terms = n + 1;
            break;
        }
    }
    if (m.n_terms == 0) throw NumericalError("quantile: switch-count tail not reached within budget");
    m.perfect_price = call_price(params, spec, controls).price;
    return m;
}

Threshold threshold_z(int n, double gamma, const QuantileModel& m) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw std::invalid_argument("threshold_z: gamma must be positive");
    if (n < 0) throw std::invalid_argument("threshold_z: negative switch count");
    const SliceEquation eq = slice_equation(n, gamma, m);
    const double b_n = log_kappa(n, m.params.sigma0, m.params.h_plus, m.params.h_minus);
    Threshold th;
    th.n = n;
    auto fill = [&](double u, double& z, double& y) {
        const double d = softplus(u);
        z = m.spec.strike / m.params.s0 * std::exp(d);
        y = eq.w0 + d - b_n;
    };

    if (m.kind == ThresholdCase::single) {
        // phi strictly decreasing; it may level off above zero when -a = 1.
        double hi = 0.0;
        double step = 1.0;
        while (eq(hi) >= 0.0) {
            hi += step;
            step *= 2.0;
            if (hi > kUMax) {
                th.full = true;
                return th;
            }
        }
        const double lo = lower_bracket(eq, hi - 1.0);
        fill(bisect_root(eq, lo, hi), th.z1, th.y1);
        return th;
    }

    // Pair case: phi has a single minimum at u* = -ln(-a - 1).
    const double u_star = -std::log(-m.a - 1.0);
    if (eq(u_star) >= 0.0) {
        th.full = true;
        return th;
    }
    const double lo = lower_bracket(eq, u_star - 1.0);
    fill(bisect_root(eq, lo, u_star), th.z1, th.y1);
    double hi = u_star + 1.0;
    double step = 1.0;
    while (eq(hi) <= 0.0) {
        hi += step;
        step *= 2.0;
        if (hi > kUMax) throw NumericalError("threshold: no upper bracket for the second root");
    }
    fill(bisect_root(eq, u_star, hi), th.z2, th.y2);
    return th;
}

double threshold_residual(int n, double gamma, double z, const QuantileModel& m) {
    const SliceEquation eq = slice_equation(n, gamma, m);
    const double u = std::log(z * m.params.s0 / m.spec.strike - 1.0);
    // z^{-a} vs C (S0 z - K): relative gap = |1 - exp(-phi)|.
    return std::abs(std::expm1(-eq(u)));
}

std::vector<Threshold> thresholds_at(double gamma, const QuantileModel& m) {
    std::vector<Threshold> out;
    out.reserve(m.n_terms);
    for (int n = 0; n < m.n_terms; ++n) out.push_back(threshold_z(n, gamma, m));
    return out;
}

namespace {

double budget_from(const std::vector<Threshold>& ths, const QuantileModel& m) {
    const ModelParams& p = m.params;
    const double T = m.spec.maturity;
    const double K = m.spec.strike;
    const double y = std::log(K / p.s0);
    double total = 0.0;
    for (const Threshold& th : ths) {
        const double ys = y - log_kappa(th.n, p.sigma0, p.h_plus, p.h_minus);
        double U = u_n(ys, T, th.n, p.sigma0, m.share);
        double u = u_n(ys, T, th.n, p.sigma0, m.disc);
        if (!th.full) {
            U -= u_n(th.y1, T, th.n, p.sigma0, m.share);
            u -= u_n(th.y1, T, th.n, p.sigma0, m.disc);
            if (m.kind == ThresholdCase::pair) {
                U += u_n(th.y2, T, th.n, p.sigma0, m.share);
                u += u_n(th.y2, T, th.n, p.sigma0, m.disc);
            }
        }
        total += p.s0 * U - K * u;
    }
    return total;
}

double success_from(const std::vector<Threshold>& ths, const QuantileModel& m) {
    const double T = m.spec.maturity;
    const Regime s = m.params.sigma0;
    double fail = 0.0;
    for (const Threshold& th : ths) {
        if (th.full) continue;
        fail += u_n(th.y1, T, th.n, s, m.physical);
        if (m.kind == ThresholdCase::pair) fail -= u_n(th.y2, T, th.n, s, m.physical);
    }
    return std::clamp(1.0 - fail, 0.0, 1.0);
}

// Bisection in ln(gamma) on a map that is non-increasing in gamma. Returns
// the bracket (g_lo, g_hi) with value(g_lo) > target >= value(g_hi).
template <class V>
std::pair<double, double> bracket_log_gamma(V&& value, double target) {
    double g_lo = 0.0, g_hi = 0.0, step = 1.0;
    while (value(g_lo) <= target) {
        g_lo -= step;
        step *= 2.0;
        if (g_lo < -kMaxLogGamma) throw NumericalError("quantile: could not bracket gamma from below");
    }
    step = 1.0;
    while (value(g_hi) > target) {
        g_hi += step;
        step *= 2.0;
        if (g_hi > kMaxLogGamma) throw NumericalError("quantile: could not bracket gamma from above");
    }
    g_lo = std::min(g_lo, g_hi);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (g_lo + g_hi);
        if (mid <= g_lo || mid >= g_hi) break;
        if (value(mid) > target) {
            g_lo = mid;
        } else {
            g_hi = mid;
        }
    }
    return {g_lo, g_hi};
}

}  // namespace

double budget_at(double gamma, const QuantileModel& m) { return budget_from(thresholds_at(gamma, m), m); }

double success_at(double gamma, const QuantileModel& m) {
    return success_from(thresholds_at(gamma, m), m);
}

QuantileSolution solve_budget_gamma(double v0, const QuantileModel& m) {
    if (!(v0 > 0.0) || !(v0 < m.perfect_price)) {
        throw InfeasibleBudgetError("budget " + std::to_string(v0) +
                                        " must lie strictly between 0 and the perfect-hedge price " +
                                        std::to_string(m.perfect_price),
                                    m.perfect_price);
    }
    auto value = [&](double g) { return budget_at(std::exp(g), m); };
    const auto [g_lo, g_hi] = bracket_log_gamma(value, v0);

    QuantileSolution sol;
    sol.kind = m.kind;
    sol.target = v0;
    sol.perfect_price = m.perfect_price;
    // The upper end never exceeds the budget.
    sol.gamma = std::exp(g_hi);
    sol.thresholds = thresholds_at(sol.gamma, m);
    sol.budget = budget_from(sol.thresholds, m);
    sol.success_probability = success_from(sol.thresholds, m);
    sol.residual = std::abs(sol.budget - v0);
    sol.atom_gap = sol.residual > 1e-9 * m.params.s0;
    return sol;
}

QuantileSolution solve_budget_gamma(double v0, const ModelParams& params, const CallSpec& spec,
                                    const SeriesControls& controls) {
    return solve_budget_gamma(v0, QuantileModel::build(params, spec, controls));
}

double success_probability(const QuantileSolution& solution, const QuantileModel& m) {
    return success_from(solution.thresholds, m);
}

QuantileSolution solve_dual(double epsilon, const QuantileModel& m) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("solve_dual: epsilon must lie in (0, 1)");
    const double target = 1.0 - epsilon;
    const double floor_prob = success_at(std::exp(kMaxLogGamma), m);
    if (floor_prob >= target) {
        throw std::invalid_argument("solve_dual: success probability " + std::to_string(floor_prob) +
                                    " is reached with a vanishing budget; epsilon is too large");
    }
    auto value = [&](double g) { return success_at(std::exp(g), m); };
    // value(g_lo) > target >= value(g_hi); shift the target by an ulp so the
    // feasible end (probability >= target) is g_lo.
    const auto [g_lo, g_hi] = bracket_log_gamma(value, target);

    QuantileSolution sol;
    sol.kind = m.kind;
    sol.target = target;
    sol.perfect_price = m.perfect_price;
    sol.gamma = std::exp(g_lo);
    sol.thresholds = thresholds_at(sol.gamma, m);
    sol.budget = budget_from(sol.thresholds, m);
    sol.success_probability = success_from(sol.thresholds, m);
    sol.residual = std::abs(sol.success_probability - target);
    sol.atom_gap = sol.residual > 1e-9;
    return sol;
}

QuantileSolution solve_dual(double epsilon, const ModelParams& params, const CallSpec& spec,
                            const SeriesControls& controls) {
    return solve_dual(epsilon, QuantileModel::build(params, spec, controls));
}

double insurance_budget(double survival_prob, const ModelParams& params, const CallSpec& spec,
                        const SeriesControls& controls) {
    if (!(survival_prob > 0.0 && survival_prob <= 1.0)) {
        throw std::invalid_argument("insurance_budget: survival probability must lie in (0, 1]");
    }
    return survival_prob * call_price(params, spec, controls).price;
}

bool in_success_set(const QuantileSolution& solution, const QuantileModel& m, int n,
                    double x_terminal) {
    const Threshold th = n < static_cast<int>(solution.thresholds.size())
                             ? solution.thresholds[n]
                             : threshold_z(n, solution.gamma, m);
    if (th.full) return true;
    if (x_terminal <= th.y1) return true;
    return m.kind == ThresholdCase::pair && x_terminal >= th.y2;
}

bool density_ratio_success(const QuantileSolution& solution, const QuantileModel& m,
                           const RegimePath& path) {
    const double T = m.spec.maturity;
    const double z = girsanov_density(path, m.mi, T);
    const double s = stock_price(path, m.params, T);
    const double f = s > m.spec.strike ? s - m.spec.strike : 0.0;
    return 1.0 / z >= solution.gamma * f;
}

}  // namespace jtel
