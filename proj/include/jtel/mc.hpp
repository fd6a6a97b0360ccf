#pragma once

// Monte Carlo estimates under the physical and martingale measures, the
// no-jump arbitrage strategy and the diffusion-limit MGF check.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "jtel/pricer.hpp"
#include "jtel/quantile.hpp"
#include "jtel/regime.hpp"

namespace jtel {

/// physical: paths under lambda, no weight. martingale: paths under lambda*.
/// reweighted: paths under lambda, each weighted by the Girsanov density Z(T).
enum class Measure { physical, martingale, reweighted };

const char* measure_name(Measure m) noexcept;
/// Parses "physical", "martingale" or "reweighted".
Measure measure_from_string(const std::string& name);

struct McConfig {
    long n_paths = 100000;
    std::uint64_t seed = 1;
    unsigned workers = 0;  // 0: hardware concurrency
};

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    long n_paths = 0;
    std::uint64_t seed = 0;
};

/// Mean and standard error of per-path samples, in path order.
McEstimate summarize(std::span<const double> samples, std::uint64_t seed);

/// Per-path functional of a sampled path.
using PathFunctional = std::function<double(const RegimePath&)>;

/// E[weight * g(path)] over paths drawn under the chosen measure.
McEstimate mc_expectation(const ModelParams& params, double maturity, const PathFunctional& g,
                          Measure measure, const McConfig& config);

/// E[B(T)^{-1} payoff(S(T))].
McEstimate mc_price(const ModelParams& params, const std::function<double(double)>& payoff,
                    double maturity, Measure measure, const McConfig& config);

/// Call price through the batched discounted-payoff kernel.
McEstimate mc_call_price(const ModelParams& params, const CallSpec& spec, Measure measure,
                         const McConfig& config);

/// Weighted frequencies of N(T) = n for n <= n_max.
std::vector<McEstimate> mc_switch_count_law(const ModelParams& params, double maturity, int n_max,
                                            Measure measure, const McConfig& config);

/// Fraction of physical paths in the success set by the threshold rule.
McEstimate mc_success_probability(const QuantileSolution& solution, const QuantileModel& model,
                                  const McConfig& config);

/// Fraction of physical paths whose threshold-rule membership disagrees with
/// the density-ratio inequality.
long mc_success_rule_mismatches(const QuantileSolution& solution, const QuantileModel& model,
                                const McConfig& config);

struct LevelTrade {
    bool bought = false;
    double t_buy = 0.0, s_buy = 0.0, log_s_buy = 0.0, log_bond_buy = 0.0;
    double t_sell = 0.0, s_sell = 0.0, log_s_sell = 0.0, log_bond_sell = 0.0;
    bool sold_at_upper = false;
};

/// Buy at the first time S(t) >= lower, sell at the next time S(t) <= lower
/// or S(t) >= upper, or at the horizon. Crossings between switches are found
/// in closed form since ln S is piecewise linear.
LevelTrade trade_levels(const RegimePath& path, const ModelParams& params, double lower,
                        double upper);

struct ArbitrageDemo {
    McEstimate profit;
    McEstimate positive;      // P(profit > 0)
    McEstimate upper_exit;    // P(S(t2) = upper)
    double min_profit = 0.0;
    double max_profit = 0.0;
    long losing_paths = 0;
};

/// Requires h = 0 and r = 0 in both regimes and s0 < lower < upper < s0 e^{c+ T}.
ArbitrageDemo arbitrage_demo(const ModelParams& params, double lower, double upper, double maturity,
                             const McConfig& config);

/// Discounted profit of the same strategy under the martingale measure.
/// Requires an arbitrage-free model.
McEstimate arbitrage_control(const ModelParams& params, double lower, double upper, double maturity,
                             const McConfig& config);

struct LimitBase {
    double v_c = 0.2;
    double v_a = 0.1;
    double mu = 0.05;
    double lambda0 = 2.0;
};

/// Symmetric model at scale L: lambda = lambda0 L, c = v_c sqrt(lambda),
/// a = -v_a sqrt(lambda), c+- = a +- c, h+ = h- with ln((1+h-)(1+h+)) = 2(mu - a)/lambda.
ModelParams limit_model(const LimitBase& base, double level);

struct LimitLevel {
    double level = 0.0;
    std::vector<double> z;
    std::vector<double> mgf;
    std::vector<double> limit;
    std::vector<double> rel_error;
};

struct LimitReport {
    std::vector<LimitLevel> levels;
    bool monotone = true;  // per-z relative error non-increasing along levels
    bool diverged = false;
};

LimitReport limit_scaling_check(const LimitBase& base, const std::vector<double>& levels,
                                const std::vector<double>& z, double t);

}  // namespace jtel
