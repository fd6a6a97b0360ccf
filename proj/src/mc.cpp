#include "jtel/mc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "jtel/density.hpp"
#include "jtel/error.hpp"
#include "jtel/measure.hpp"
#include "jtel/parallel.hpp"
#include "jtel/simd/kernels.hpp"

namespace jtel {

namespace {

void check_config(const McConfig& config) {
    if (config.n_paths < 2) throw std::invalid_argument("monte carlo: need at least two paths");
}

// Intensities the paths are drawn under, and whether Z(T) weights them.
struct Sampling {
    double lambda_plus;
    double lambda_minus;
    bool weighted;
    MartingaleIntensities mi{};
};

Sampling sampling_for(const ModelParams& params, Measure measure) {
    switch (measure) {
        case Measure::physical:
            return {params.lambda_plus, params.lambda_minus, false};
        case Measure::martingale: {
            const MartingaleIntensities mi = martingale_intensities(params);
            return {mi.lambda_star_plus, mi.lambda_star_minus, false, mi};
        }
        case Measure::reweighted: {
            const MartingaleIntensities mi = martingale_intensities(params);
            return {params.lambda_plus, params.lambda_minus, true, mi};
        }
    }
    throw std::invalid_argument("unknown measure");
}

RegimePath draw(const ModelParams& params, const Sampling& s, double maturity,
                const McConfig& config, std::size_t i) {
    return sample_path(s.lambda_plus, s.lambda_minus, params.sigma0, maturity, config.seed, i);
}

// Runs body(path_index, path) for every path, in parallel, with per-path output slots.
template <class Body>
void for_each_path(const ModelParams& params, const Sampling& s, double maturity,
                   const McConfig& config, Body&& body) {
    parallel_for(static_cast<std::size_t>(config.n_paths), config.workers,
                 [&](std::size_t begin, std::size_t end, unsigned) {
                     for (std::size_t i = begin; i < end; ++i) body(i, draw(params, s, maturity, config, i));
                 });
}

}  // namespace

const char* measure_name(Measure m) noexcept {
    switch (m) {
        case Measure::physical: return "physical";
        case Measure::martingale: return "martingale";
        case Measure::reweighted: return "reweighted";
    }
    return "?";
}

Measure measure_from_string(const std::string& name) {
    if (name == "physical") return Measure::physical;
    if (name == "martingale") return Measure::martingale;
    if (name == "reweighted") return Measure::reweighted;
    throw std::invalid_argument("unknown measure '" + name + "'");
}

McEstimate summarize(std::span<const double> samples, std::uint64_t seed) {
    const simd::Moments m = simd::moments(samples);
    const double n = static_cast<double>(samples.size());
    McEstimate est;
    est.n_paths = static_cast<long>(samples.size());
    est.seed = seed;
    est.mean = m.sum / n;
    const double var = std::max(0.0, (m.sum_sq - n * est.mean * est.mean) / (n - 1.0));
    est.std_error = std::sqrt(var / n);
    return est;
}

McEstimate mc_expectation(const ModelParams& params, double maturity, const PathFunctional& g,
                          Measure measure, const McConfig& config) {
    check_config(config);
    const Sampling s = sampling_for(params, measure);
    std::vector<double> values(config.n_paths);
    for_each_path(params, s, maturity, config, [&](std::size_t i, const RegimePath& path) {
        const double w = s.weighted ? girsanov_density(path, s.mi, maturity) : 1.0;
        values[i] = w * g(path);
    });
    return summarize(values, config.seed);
}

McEstimate mc_price(const ModelParams& params, const std::function<double(double)>& payoff,
                    double maturity, Measure measure, const McConfig& config) {
    auto g = [&](const RegimePath& path) {
        return payoff(stock_price(path, params, maturity)) / bond_price(path, params, maturity);
    };
    return mc_expectation(params, maturity, g, measure, config);
}

McEstimate mc_call_price(const ModelParams& params, const CallSpec& spec, Measure measure,
                         const McConfig& config) {
    check_config(config);
    spec.validate();
    const double T = spec.maturity;
    const Sampling s = sampling_for(params, measure);
    const double log_s0 = std::log(params.s0);
    std::vector<double> log_s(config.n_paths), log_b(config.n_paths), weight;
    if (s.weighted) weight.resize(config.n_paths);
    for_each_path(params, s, T, config, [&](std::size_t i, const RegimePath& path) {
        const int n = switch_count(path, T);
        log_s[i] = log_s0 + telegraph_value(path, params.c_plus, params.c_minus, T) +
                   log_kappa(n, params.sigma0, params.h_plus, params.h_minus);
        log_b[i] = integrate_rate(path, params.r_plus, params.r_minus, T);
        if (s.weighted) weight[i] = girsanov_density(path, s.mi, T);
    });
    std::vector<double> values(config.n_paths);
    simd::discounted_call(log_s, log_b, spec.strike, values);
    if (s.weighted) {
        for (std::size_t i = 0; i < values.size(); ++i) values[i] *= weight[i];
    }
    return summarize(values, config.seed);
}

std::vector<McEstimate> mc_switch_count_law(const ModelParams& params, double maturity, int n_max,
                                            Measure measure, const McConfig& config) {
    check_config(config);
    if (n_max < 0) throw std::invalid_argument("mc_switch_count_law: negative n_max");
    const Sampling s = sampling_for(params, measure);
    std::vector<int> count(config.n_paths);
    std::vector<double> weight(config.n_paths);
    for_each_path(params, s, maturity, config, [&](std::size_t i, const RegimePath& path) {
        count[i] = switch_count(path, maturity);
        weight[i] = s.weighted ? girsanov_density(path, s.mi, maturity) : 1.0;
    });
    std::vector<McEstimate> out;
    std::vector<double> values(config.n_paths);
    for (int n = 0; n <= n_max; ++n) {
        for (std::size_t i = 0; i < values.size(); ++i) values[i] = count[i] == n ? weight[i] : 0.0;
        out.push_back(summarize(values, config.seed));
    }
    return out;
}

McEstimate mc_success_probability(const QuantileSolution& solution, const QuantileModel& model,
                                  const McConfig& config) {
    check_config(config);
    const ModelParams& p = model.params;
    const double T = model.spec.maturity;
    const Sampling s = sampling_for(p, Measure::physical);
    std::vector<double> values(config.n_paths);
    for_each_path(p, s, T, config, [&](std::size_t i, const RegimePath& path) {
        const int n = switch_count(path, T);
        const double x = telegraph_value(path, p.c_plus, p.c_minus, T);
        values[i] = in_success_set(solution, model, n, x) ? 1.0 : 0.0;
    });
    return summarize(values, config.seed);
}

long mc_success_rule_mismatches(const QuantileSolution& solution, const QuantileModel& model,
                                const McConfig& config) {
    check_config(config);
    const ModelParams& p = model.params;
    const double T = model.spec.maturity;
    const Sampling s = sampling_for(p, Measure::physical);
    std::vector<char> mismatch(config.n_paths);
    for_each_path(p, s, T, config, [&](std::size_t i, const RegimePath& path) {
        const int n = switch_count(path, T);
        const double x = telegraph_value(path, p.c_plus, p.c_minus, T);
        mismatch[i] = in_success_set(solution, model, n, x) != density_ratio_success(solution, model, path);
    });
    return static_cast<long>(std::count(mismatch.begin(), mismatch.end(), char{1}));
}

LevelTrade trade_levels(const RegimePath& path, const ModelParams& params, double lower,
                        double upper) {
    if (!(0.0 < lower && lower < upper)) throw std::invalid_argument("trade_levels: need 0 < lower < upper");
    const double lo = std::log(lower);
    const double up = std::log(upper);
    const double T = path.horizon();
    LevelTrade tr;
    double x = std::log(params.s0);
    double lb = 0.0;
    double t = 0.0;
    Regime sigma = path.sigma0();
    bool holding = false;

    auto buy = [&](double when, double s, double xs, double lbs) {
        tr.bought = true;
        tr.t_buy = when;
        tr.s_buy = s;
        tr.log_s_buy = xs;
        tr.log_bond_buy = lbs;
        holding = true;
    };
    auto sell = [&](double when, double s, double xs, double lbs, bool at_upper) {
        tr.t_sell = when;
        tr.s_sell = s;
        tr.log_s_sell = xs;
        tr.log_bond_sell = lbs;
        tr.sold_at_upper = at_upper;
    };

    if (x >= lo) buy(0.0, params.s0, x, 0.0);
    const auto times = path.switch_times();
    for (std::size_t k = 0; k <= times.size(); ++k) {
        const double t_end = k < times.size() ? times[k] : T;
        const double v = params.c(sigma);
        const double r = params.r(sigma);
        const double len = t_end - t;
        if (!holding && v > 0.0 && x + v * len >= lo) {
            const double dt = (lo - x) / v;
            t += dt;
            lb += r * dt;
            x = lo;
            buy(t, lower, lo, lb);
        }
        if (holding && x >= up) {
            // Bought on a jump past the upper level: the exit is immediate.
            sell(t, std::exp(x), x, lb, true);
            return tr;
        }
        if (holding) {
            const double rem = t_end - t;
            const double x_end = x + v * rem;
            if (v < 0.0 && x_end <= lo) {
                const double dt = (lo - x) / v;
                sell(t + dt, lower, lo, lb + r * dt, false);
                return tr;
            }
            if (v > 0.0 && x_end >= up) {
                const double dt = (up - x) / v;
                sell(t + dt, upper, up, lb + r * dt, true);
                return tr;
            }
        }
        lb += r * (t_end - t);
        x += v * (t_end - t);
        t = t_end;
        if (k == times.size()) break;
        // Switch: the jump belongs to the pre-switch regime.
        const double h = params.h(sigma);
        sigma = -sigma;
        if (h == 0.0) continue;
        x += std::log1p(h);
        if (!holding) {
            if (x >= lo) buy(t, std::exp(x), x, lb);
        } else if (x <= lo || x >= up) {
            sell(t, std::exp(x), x, lb, x >= up);
            return tr;
        }
    }
    if (holding) sell(T, std::exp(x), x, lb, false);
    return tr;
}

ArbitrageDemo arbitrage_demo(const ModelParams& params, double lower, double upper, double maturity,
                             const McConfig& config) {
    check_config(config);
    if (params.h_plus != 0.0 || params.h_minus != 0.0 || params.r_plus != 0.0 || params.r_minus != 0.0) {
        throw std::invalid_argument("arbitrage_demo: requires h = 0 and r = 0 in both regimes");
    }
    if (!(params.lambda_plus > 0.0 && params.lambda_minus > 0.0 && params.s0 > 0.0 && maturity > 0.0)) {
        throw std::invalid_argument("arbitrage_demo: intensities, spot and horizon must be positive");
    }
    if (!(params.s0 < lower && lower < upper && upper < params.s0 * std::exp(params.c_plus * maturity))) {
        throw std::invalid_argument("arbitrage_demo: need s0 < A < B < s0 exp(c+ T)");
    }
    const Sampling s = sampling_for(params, Measure::physical);
    std::vector<double> profit(config.n_paths), positive(config.n_paths), upper_exit(config.n_paths);
    for_each_path(params, s, maturity, config, [&](std::size_t i, const RegimePath& path) {
        const LevelTrade tr = trade_levels(path, params, lower, upper);
        // Without jumps the buy is at A exactly; the gain is A (e^{x2 - x1} - 1).
        const double p = tr.bought ? tr.s_buy * std::expm1(tr.log_s_sell - tr.log_s_buy) : 0.0;
        profit[i] = p;
        positive[i] = p > 0.0 ? 1.0 : 0.0;
        upper_exit[i] = tr.sold_at_upper ? 1.0 : 0.0;
    });
    ArbitrageDemo demo;
    demo.profit = summarize(profit, config.seed);
    demo.positive = summarize(positive, config.seed);
    demo.upper_exit = summarize(upper_exit, config.seed);
    demo.min_profit = *std::min_element(profit.begin(), profit.end());
    demo.max_profit = *std::max_element(profit.begin(), profit.end());
    demo.losing_paths = std::count_if(profit.begin(), profit.end(), [](double p) { return p < 0.0; });
    return demo;
}

McEstimate arbitrage_control(const ModelParams& params, double lower, double upper, double maturity,
                             const McConfig& config) {
    check_config(config);
    const Sampling s = sampling_for(params, Measure::martingale);
    std::vector<double> profit(config.n_paths);
    for_each_path(params, s, maturity, config, [&](std::size_t i, const RegimePath& path) {
        const LevelTrade tr = trade_levels(path, params, lower, upper);
        profit[i] = tr.bought ? tr.s_sell * std::exp(-tr.log_bond_sell) - tr.s_buy * std::exp(-tr.log_bond_buy)
                              : 0.0;
    });
    return summarize(profit, config.seed);
}

ModelParams limit_model(const LimitBase& base, double level) {
    if (!(base.lambda0 > 0.0) || !(level > 0.0)) throw std::invalid_argument("limit_model: lambda0 and level must be positive");
    const double lambda = base.lambda0 * level;
    const double c = base.v_c * std::sqrt(lambda);
    const double a = -base.v_a * std::sqrt(lambda);
    const double B = 2.0 * (base.mu - a) / lambda;
    ModelParams p;
    p.lambda_plus = p.lambda_minus = lambda;
    p.c_plus = a + c;
    p.c_minus = a - c;
    p.h_plus = p.h_minus = std::expm1(0.5 * B);
    p.r_plus = p.r_minus = 0.0;
    p.s0 = 1.0;
    p.sigma0 = Regime::plus;
    return p;
}

LimitReport limit_scaling_check(const LimitBase& base, const std::vector<double>& levels,
                                const std::vector<double>& z, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("limit_scaling_check: t must be positive");
    const double v2 = base.v_c * base.v_c + base.v_a * base.v_a;
    LimitReport rep;
    for (double level : levels) {
        const ModelParams p = limit_model(base, level);
        const DensityParams dp = DensityParams::from_model(p);
        LimitLevel row;
        row.level = level;
        for (double zi : z) {
            const double lim = std::exp(base.mu * zi * t + 0.5 * v2 * zi * zi * t);
            double m = std::nan("");
            try {
                m = mgf(zi, t, p.sigma0, dp, p.h_plus, p.h_minus);
            } catch (const NumericalError&) {
                rep.diverged = true;
            }
            row.z.push_back(zi);
            row.mgf.push_back(m);
            row.limit.push_back(lim);
            row.rel_error.push_back(std::abs(m - lim) / lim);
        }
        rep.levels.push_back(std::move(row));
    }
    // Errors at round-off level count as equal.
    constexpr double kFloor = 1e-12;
    for (std::size_t k = 1; k < rep.levels.size(); ++k) {
        for (std::size_t j = 0; j < z.size(); ++j) {
            const double prev = rep.levels[k - 1].rel_error[j];
            const double cur = rep.levels[k].rel_error[j];
            if (!(cur <= prev + kFloor)) rep.monotone = false;
        }
    }
    if (rep.diverged) rep.monotone = false;
    return rep;
}

}  // namespace jtel
