#include "jtel/hedging.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>

#include "jtel/measure.hpp"
#include "jtel/parallel.hpp"

namespace jtel {

HedgePosition make_position(double phi, double capital, double stock, double bond) {
    return {phi, (capital - phi * stock) / bond, capital};
}

double hedge_ratio(double t, double s, Regime sigma, const PriceFn& F, const ModelParams& params) {
    const double h = params.h(sigma);
    if (h == 0.0) throw std::invalid_argument("hedge_ratio: zero jump size");
    if (!(s > 0.0)) throw std::invalid_argument("hedge_ratio: spot must be positive");
    return (F(t, s * (1.0 + h), -sigma) - F(t, s, sigma)) / (s * h);
}

double hedge_ratio_at_jump(double tau, double s_before, double s_after, Regime sigma_after,
                           const PriceFn& F, const ModelParams& params) {
    const Regime before = -sigma_after;
    const double h = params.h(before);
    if (h == 0.0) throw std::invalid_argument("hedge_ratio_at_jump: zero jump size");
    return (F(tau, s_after, sigma_after) - F(tau, s_before, before)) / (s_before * h);
}

double hedge_ratio_at_jump(double tau, double s_before, Regime sigma_before, const PriceFn& F,
                           const ModelParams& params) {
    return hedge_ratio_at_jump(tau, s_before, s_before * (1.0 + params.h(sigma_before)),
                               -sigma_before, F, params);
}

PdeResidual pde_residual(const PriceFn& F, const PdeGrid& grid, Regime sigma,
                         const ModelParams& params) {
    const MartingaleIntensities mi = martingale_intensities(params);
    const double c = params.c(sigma);
    const double r = params.r(sigma);
    const double h = params.h(sigma);
    const double ls = mi.lambda_star(sigma);
    const double dt = grid.dt;
    const double dx = grid.dx;
    if (!(dt > 0.0) || !(dx > 0.0)) throw std::invalid_argument("pde_residual: spacings must be positive");

    // Characteristics carrying a payoff kink back from maturity.
    constexpr int kKinkTerms = 60;
    auto near_kink = [&](double t, double x) {
        for (double K : grid.kinks) {
            for (double tt : {t - dt, t, t + dt}) {
                const double tau = grid.maturity - tt;
                for (Regime s0 : {Regime::plus, Regime::minus}) {
                    for (int n = 0; n < kKinkTerms; ++n) {
                        const double b = log_kappa(n, s0, params.h_plus, params.h_minus);
                        for (double v : {params.c_plus, params.c_minus}) {
                            if (std::abs(x - K * std::exp(-v * tau - b)) < 2.0 * dx) return true;
                        }
                    }
                }
            }
        }
        return false;
    };

    PdeResidual out{0.0, dt, dx};
    for (double t : grid.t) {
        if (!(t - dt >= 0.0) || !(t + dt < grid.maturity)) {
            throw std::invalid_argument("pde_residual: time stencil leaves (0, T)");
        }
        for (double x : grid.x) {
            if (!(x - dx > 0.0)) throw std::invalid_argument("pde_residual: space stencil leaves x > 0");
            if (near_kink(t, x)) {
                throw std::invalid_argument("pde_residual: grid point (" + std::to_string(t) + ", " +
                                            std::to_string(x) + ") within 2 dx of a kink locus");
            }
            const double f0 = F(t, x, sigma);
            double ft, fx;
            if (grid.scheme == DifferenceScheme::central) {
                ft = (F(t + dt, x, sigma) - F(t - dt, x, sigma)) / (2.0 * dt);
                fx = (F(t, x + dx, sigma) - F(t, x - dx, sigma)) / (2.0 * dx);
            } else {
                ft = (F(t + dt, x, sigma) - f0) / dt;
                fx = (F(t, x + dx, sigma) - f0) / dx;
            }
            const double res = ft + c * x * fx - (r + ls) * f0 + ls * F(t, x * (1.0 + h), -sigma);
            out.max_residual = std::max(out.max_residual, std::abs(res));
        }
    }
    return out;
}

namespace {

struct PathOutcome {
    double error = 0.0;
    double min_capital = 0.0;
    double sf_defect = 0.0;
    double jump_defect = 0.0;
    double lc_gap = 0.0;
    long switches = 0;
};

PathOutcome replicate_path(const RegimePath& path, const ModelParams& params, double maturity,
                           double v0, const std::function<double(double)>& payoff,
                           const PriceFn& F, int n_steps) {
    PathOutcome out;
    const auto switches = path.switch_times();
    const double dt = maturity / n_steps;

    Regime sigma = path.sigma0();
    double t = 0.0;
    double log_s = std::log(params.s0);
    double log_b = 0.0;
    double s = params.s0;
    double b = 1.0;

    double phi = hedge_ratio(0.0, s, sigma, F, params);
    double psi = (v0 - phi * s) / b;
    double capital = v0;
    double ledger = v0;  // V0 + running sum of phi dS + psi dB
    out.min_capital = capital;

    std::size_t next_switch = 0;
    int step = 1;
    while (t < maturity) {
        const double grid_t = step >= n_steps ? maturity : step * dt;
        const bool at_switch = next_switch < switches.size() && switches[next_switch] <= grid_t;
        const double t_next = at_switch ? switches[next_switch] : grid_t;

        // Deterministic drift and accrual up to t_next.
        const double span = t_next - t;
        log_s += params.c(sigma) * span;
        log_b += params.r(sigma) * span;
        const double s_new = std::exp(log_s);
        const double b_new = std::exp(log_b);
        ledger += phi * (s_new - s) + psi * (b_new - b);
        s = s_new;
        b = b_new;
        capital = phi * s + psi * b;
        t = t_next;

        if (at_switch) {
            ++next_switch;
            ++out.switches;
            const double h = params.h(sigma);
            const double s_after = s * (1.0 + h);
            const Regime after = -sigma;
            // Hold the left-continuous ratio through the jump.
            const double phi_jump = hedge_ratio_at_jump(t, s, s_after, after, F, params);
            out.lc_gap = std::max(out.lc_gap, std::abs(phi_jump - hedge_ratio(t, s, sigma, F, params)));
            psi = (capital - phi_jump * s) / b;
            phi = phi_jump;
            const double before = capital;
            ledger += phi * (s_after - s);
            log_s += std::log1p(h);
            s = s_after;
            sigma = after;
            capital = phi * s + psi * b;
            out.jump_defect = std::max(out.jump_defect, std::abs((capital - before) - phi * h * (s / (1.0 + h))));
            if (t < maturity) {
                phi = hedge_ratio(t, s, sigma, F, params);
                psi = (capital - phi * s) / b;
            }
        } else {
            ++step;
            if (t < maturity) {
                phi = hedge_ratio(t, s, sigma, F, params);
                psi = (capital - phi * s) / b;
            }
        }
        out.min_capital = std::min(out.min_capital, capital);
        out.sf_defect = std::max(out.sf_defect, std::abs(capital - ledger));
    }
    // Terminal claim is compared in undiscounted money at T.
    out.error = std::abs(capital - payoff(s));
    return out;
}

}  // namespace

BacktestReport replication_backtest(const ModelParams& params, double maturity,
                                    const std::function<double(double)>& payoff,
                                    const std::function<PriceFn()>& make_pricer,
                                    const BacktestConfig& config) {
    params.validate();
    if (config.n_paths < 1 || config.n_steps < 1) {
        throw std::invalid_argument("replication_backtest: need at least one path and one step");
    }
    const double v0 = make_pricer()(0.0, params.s0, params.sigma0);
    std::vector<PathOutcome> outcomes(config.n_paths);
    parallel_for(outcomes.size(), config.workers, [&](std::size_t begin, std::size_t end, unsigned) {
        const PriceFn F = make_pricer();
        for (std::size_t i = begin; i < end; ++i) {
            const RegimePath path = sample_path(params, maturity, config.seed, i);
            outcomes[i] = replicate_path(path, params, maturity, v0, payoff, F, config.n_steps);
        }
    });

    BacktestReport rep;
    rep.price = v0;
    rep.n_paths = config.n_paths;
    rep.n_steps = config.n_steps;
    rep.min_capital = v0;
    double sum = 0.0;
    for (const PathOutcome& o : outcomes) {
        sum += o.error;
        rep.max_abs_error = std::max(rep.max_abs_error, o.error);
        rep.min_capital = std::min(rep.min_capital, o.min_capital);
        rep.max_self_financing_defect = std::max(rep.max_self_financing_defect, o.sf_defect);
        rep.max_jump_defect = std::max(rep.max_jump_defect, o.jump_defect);
        rep.max_left_continuity_gap = std::max(rep.max_left_continuity_gap, o.lc_gap);
        rep.switches += o.switches;
    }
    rep.mean_abs_error = sum / config.n_paths;
    rep.admissible = rep.min_capital >= -config.admissibility_tolerance * params.s0;
    return rep;
}

BacktestReport replication_backtest(const ModelParams& params, const CallSpec& spec,
                                    const BacktestConfig& config, const SeriesControls& controls) {
    spec.validate();
    const double K = spec.strike;
    auto make = [&]() -> PriceFn {
        auto fn = std::make_shared<CallPriceFunction>(params, spec, controls);
        return [fn](double t, double x, Regime s) { return (*fn)(t, x, s); };
    };
    return replication_backtest(
        params, spec.maturity, [K](double s) { return s > K ? s - K : 0.0; }, make, config);
}

}  // namespace jtel
