#include "jtel/regime.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace jtel {

namespace {

void check_time(const RegimePath& path, double t) {
    if (!(t >= 0.0 && t <= path.horizon())) {
        throw std::out_of_range("time " + std::to_string(t) + " outside [0, " +
                                std::to_string(path.horizon()) + "]");
    }
}

}  // namespace

Regime regime_from_int(int value) {
    if (value == 1) return Regime::plus;
    if (value == -1) return Regime::minus;
    throw std::invalid_argument("regime must be +1 or -1, got " + std::to_string(value));
}

void ModelParams::validate() const {
    auto fail = [](const std::string& msg) { throw std::invalid_argument(msg); };
    if (!(lambda_plus > 0.0) || !(lambda_minus > 0.0)) fail("switch intensities must be positive");
    if (!(h_plus > -1.0) || !(h_minus > -1.0)) fail("jump sizes must exceed -1");
    if (!(c_minus <= c_plus)) fail("c_minus must not exceed c_plus");
    if (!(r_plus > 0.0) || !(r_minus > 0.0)) fail("interest rates must be positive");
    if (!(s0 > 0.0)) fail("s0 must be positive");
    for (double v : {c_plus, c_minus, lambda_plus, lambda_minus, h_plus, h_minus, r_plus, r_minus, s0}) {
        if (!std::isfinite(v)) fail("model parameters must be finite");
    }
}

ModelParams ModelParams::with_intensities(double lambda_p, double lambda_m) const {
    ModelParams copy = *this;
    copy.lambda_plus = lambda_p;
    copy.lambda_minus = lambda_m;
    return copy;
}

RegimePath::RegimePath(Regime sigma0, std::vector<double> switch_times, double horizon)
    : sigma0_(sigma0), switch_times_(std::move(switch_times)), horizon_(horizon) {
    if (!(horizon_ > 0.0)) throw std::invalid_argument("path horizon must be positive");
    double prev = 0.0;
    for (double s : switch_times_) {
        if (!(s > prev) || s > horizon_) {
            throw std::invalid_argument("switch times must be strictly increasing in (0, horizon]");
        }
        prev = s;
    }
}

MomentConstants moment_constants(const ModelParams& p) {
    MomentConstants m{};
    m.H = p.h_minus + p.h_plus;
    m.Lambda = p.lambda_minus + p.lambda_plus;
    m.gamma_c = p.lambda_minus * p.lambda_plus / m.Lambda;
    m.g = (p.c_plus * p.lambda_minus + p.c_minus * p.lambda_plus) / m.Lambda;
    m.a_plus = (p.lambda_plus * p.h_plus - p.lambda_minus * p.h_minus) / m.Lambda;
    m.a_minus = -m.a_plus;
    m.d_plus = (p.c_plus - p.c_minus) / m.Lambda;
    m.d_minus = -m.d_plus;
    return m;
}

RegimePath sample_path(double lambda_plus, double lambda_minus, Regime sigma0, double horizon,
                       std::uint64_t seed, std::uint64_t path_index) {
    if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
    if (!(lambda_plus > 0.0) || !(lambda_minus > 0.0)) {
        throw std::invalid_argument("switch intensities must be positive");
    }
    RandomStream rng(seed, path_index);
    std::vector<double> times;
    Regime current = sigma0;
    double t = 0.0;
    for (;;) {
        t += rng.exponential(by_regime(current, lambda_plus, lambda_minus));
        if (t > horizon) break;
        times.push_back(t);
        current = -current;
    }
    return RegimePath(sigma0, std::move(times), horizon);
}

RegimePath sample_path(const ModelParams& params, double horizon, std::uint64_t seed,
                       std::uint64_t path_index) {
    return sample_path(params.lambda_plus, params.lambda_minus, params.sigma0, horizon, seed,
                       path_index);
}

int switch_count(const RegimePath& path, double t) {
    check_time(path, t);
    const auto times = path.switch_times();
    return static_cast<int>(std::upper_bound(times.begin(), times.end(), t) - times.begin());
}

Regime regime_at(const RegimePath& path, double t) {
    const int n = switch_count(path, t);
    return (n % 2 == 0) ? path.sigma0() : -path.sigma0();
}

double integrate_rate(const RegimePath& path, double v_plus, double v_minus, double t) {
    check_time(path, t);
    double total = 0.0;
    double start = 0.0;
    Regime current = path.sigma0();
    for (double s : path.switch_times()) {
        if (s > t) break;
        total += by_regime(current, v_plus, v_minus) * (s - start);
        start = s;
        current = -current;
    }
    total += by_regime(current, v_plus, v_minus) * (t - start);
    return total;
}

double telegraph_value(const RegimePath& path, double c_plus, double c_minus, double t) {
    return integrate_rate(path, c_plus, c_minus, t);
}

double jump_value(const RegimePath& path, double h_plus, double h_minus, double t) {
    const int n = switch_count(path, t);
    // Pre-switch regimes alternate sigma0, -sigma0, ...
    const int own = (n + 1) / 2;
    const int other = n / 2;
    const Regime s = path.sigma0();
    return own * by_regime(s, h_plus, h_minus) + other * by_regime(-s, h_plus, h_minus);
}

double kappa(int n, Regime sigma0, double h_plus, double h_minus) {
    if (n < 0) throw std::invalid_argument("kappa: negative switch count");
    const double own = 1.0 + by_regime(sigma0, h_plus, h_minus);
    const double other = 1.0 + by_regime(-sigma0, h_plus, h_minus);
    const int k = n / 2;
    double value = std::pow(own * other, k);
    if (n % 2 == 1) value *= own;
    return value;
}

double log_kappa(int n, Regime sigma0, double h_plus, double h_minus) {
    if (n < 0) throw std::invalid_argument("log_kappa: negative switch count");
    const double own = std::log1p(by_regime(sigma0, h_plus, h_minus));
    const double other = std::log1p(by_regime(-sigma0, h_plus, h_minus));
    return ((n + 1) / 2) * own + (n / 2) * other;
}

double stock_price(const RegimePath& path, const ModelParams& params, double t) {
    const double x = telegraph_value(path, params.c_plus, params.c_minus, t);
    const int n = switch_count(path, t);
    return params.s0 * std::exp(x) * kappa(n, path.sigma0(), params.h_plus, params.h_minus);
}

double bond_price(const RegimePath& path, const ModelParams& params, double t) {
    return std::exp(integrate_rate(path, params.r_plus, params.r_minus, t));
}

std::pair<double, double> linear_transform_coeffs(double c_plus, double c_minus,
                                                  double c_tilde_plus, double c_tilde_minus) {
    const double dc = c_plus - c_minus;
    if (dc == 0.0) {
        throw std::invalid_argument("linear transform undefined for equal velocities");
    }
    const double a = (c_tilde_plus - c_tilde_minus) / dc;
    const double b = (c_plus * c_tilde_minus - c_minus * c_tilde_plus) / dc;
    return {a, b};
}

ConditionalMeans conditional_means(const ModelParams& params, Regime sigma_s, double dt) {
    if (!(dt >= 0.0)) throw std::invalid_argument("conditional_means: dt must be non-negative");
    const MomentConstants m = moment_constants(params);
    // (1 - e^{-Lambda dt}) / Lambda without cancellation for small dt.
    const double relax = -std::expm1(-m.Lambda * dt) / m.Lambda;
    const double lam = params.lambda(sigma_s);
    return {m.gamma_c * m.H * dt + lam * m.a(sigma_s) * relax,
            m.g * dt + lam * m.d(sigma_s) * relax};
}

std::pair<double, double> martingale_defect(const ModelParams& p) {
    return {p.lambda_minus * p.h_minus + p.c_minus, p.lambda_plus * p.h_plus + p.c_plus};
}

}  // namespace jtel
