#pragma once

// Quantile hedging of a call: the maximal success set, its per-switch-count
// thresholds, the budget and dual equations for the Lagrange constant, and
// the survival-weighted insurance budget.

#include <vector>

#include "jtel/measure.hpp"
#include "jtel/pricer.hpp"
#include "jtel/regime.hpp"

namespace jtel {

enum class ThresholdCase { single, pair };  // -a <= 1 or -a > 1

const char* threshold_case_name(ThresholdCase c) noexcept;

/// Per-slice success region in log-return w = X(T) + ln kappa_n:
/// single: w <= w1; pair: w <= w1 or w >= w2. full: the whole slice succeeds.
struct Threshold {
    int n = 0;
    bool full = false;
    double z1 = 0.0, z2 = 0.0;  // roots of the threshold equation in z = S(T)/S0
    double y1 = 0.0, y2 = 0.0;  // the same in X(T): ln z - ln kappa_n
};

/// Constants of the density ratio dP*/dP = exp(a X(T) + b T) kappa*_N.
struct QuantileModel {
    ModelParams params;
    CallSpec spec;
    MartingaleIntensities mi;
    double a = 0.0;
    double b = 0.0;
    ThresholdCase kind = ThresholdCase::single;
    SeriesParams disc;      // lambda*, r
    SeriesParams share;     // lambda*(1+h), 0
    SeriesParams physical;  // lambda, 0
    int n_terms = 0;        // slices summed (Poisson-tail truncation)
    double perfect_price = 0.0;

    static QuantileModel build(const ModelParams& params, const CallSpec& spec,
                               const SeriesControls& controls = {});
};

/// Solves z^{-a} = gamma kappa*_n kappa_n^{-a} e^{bT} (S0 z - K) on z > K/S0.
/// An empty level set (pair case, or -a = 1 without a root) is returned as full.
Threshold threshold_z(int n, double gamma, const QuantileModel& model);

/// Relative residual of the threshold equation at z.
double threshold_residual(int n, double gamma, double z, const QuantileModel& model);

struct QuantileSolution {
    double gamma = 0.0;
    ThresholdCase kind = ThresholdCase::single;
    std::vector<Threshold> thresholds;
    double success_probability = 0.0;
    double budget = 0.0;    // E*[B^{-1} f 1_A] at gamma
    double target = 0.0;    // requested budget (primal) or 1 - epsilon (dual)
    double residual = 0.0;  // |budget - v0| (primal) or |P(A) - (1 - eps)| (dual)
    double perfect_price = 0.0;
    /// The map gamma -> budget (or probability) jumps across the target: an
    /// atom of the terminal law sits on a threshold. The feasible side is returned.
    bool atom_gap = false;
};

/// Budget E*[B(T)^{-1} f 1_A] for the success set at gamma.
double budget_at(double gamma, const QuantileModel& model);

/// P(A) at gamma under the physical measure.
double success_at(double gamma, const QuantileModel& model);

/// Thresholds for every summed slice at gamma.
std::vector<Threshold> thresholds_at(double gamma, const QuantileModel& model);

/// gamma with budget_at(gamma) = v0. Throws InfeasibleBudgetError unless 0 < v0 < c.
QuantileSolution solve_budget_gamma(double v0, const QuantileModel& model);
QuantileSolution solve_budget_gamma(double v0, const ModelParams& params, const CallSpec& spec,
                                    const SeriesControls& controls = {});

/// 1 - sum_n P(X(T) outside the success region, N = n) with physical intensities.
double success_probability(const QuantileSolution& solution, const QuantileModel& model);

/// gamma with P(A) = 1 - epsilon, then the budget it costs. Throws
/// std::invalid_argument for epsilon outside (0, 1) or below reach.
QuantileSolution solve_dual(double epsilon, const QuantileModel& model);
QuantileSolution solve_dual(double epsilon, const ModelParams& params, const CallSpec& spec,
                            const SeriesControls& controls = {});

/// survival_prob * c, the survival-weighted claim value.
double insurance_budget(double survival_prob, const ModelParams& params, const CallSpec& spec,
                        const SeriesControls& controls = {});

/// Threshold rule on a terminal state: does (X(T), N(T) = n) lie in A?
bool in_success_set(const QuantileSolution& solution, const QuantileModel& model, int n,
                    double x_terminal);

/// Direct density-ratio test 1/Z(T) >= gamma f(S(T)) on a path.
bool density_ratio_success(const QuantileSolution& solution, const QuantileModel& model,
                           const RegimePath& path);

}  // namespace jtel
