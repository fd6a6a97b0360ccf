#pragma once

// Two-state regime process and the telegraph, jump, stock and bond
// processes driven by it.

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "jtel/rng.hpp"

namespace jtel {

enum class Regime : int { minus = -1, plus = 1 };

constexpr Regime operator-(Regime s) noexcept {
    return s == Regime::plus ? Regime::minus : Regime::plus;
}

constexpr int sign(Regime s) noexcept { return static_cast<int>(s); }

/// Parses +1 / -1; anything else throws std::invalid_argument.
Regime regime_from_int(int value);

/// Picks the +1 or -1 member of a pair by regime.
constexpr double by_regime(Regime s, double plus_value, double minus_value) noexcept {
    return s == Regime::plus ? plus_value : minus_value;
}

/// Full market specification: velocities, switch intensities, relative
/// jump sizes, interest rates, spot and initial regime.
struct ModelParams {
    double c_plus = 0.0;
    double c_minus = 0.0;
    double lambda_plus = 1.0;
    double lambda_minus = 1.0;
    double h_plus = 0.0;
    double h_minus = 0.0;
    double r_plus = 0.0;
    double r_minus = 0.0;
    double s0 = 1.0;
    Regime sigma0 = Regime::plus;

    double c(Regime s) const noexcept { return by_regime(s, c_plus, c_minus); }
    double lambda(Regime s) const noexcept { return by_regime(s, lambda_plus, lambda_minus); }
    double h(Regime s) const noexcept { return by_regime(s, h_plus, h_minus); }
    double r(Regime s) const noexcept { return by_regime(s, r_plus, r_minus); }

    /// Throws std::invalid_argument naming the first violated invariant
    /// (lambda > 0, h > -1, c_minus <= c_plus, r > 0, s0 > 0).
    void validate() const;

    /// Copy with the switch intensities replaced, e.g. by the risk-neutral ones.
    ModelParams with_intensities(double lambda_p, double lambda_m) const;
};

/// One realization of the switching process on [0, horizon]: the initial
/// regime and the strictly increasing switch times in (0, horizon].
class RegimePath {
public:
    RegimePath(Regime sigma0, std::vector<double> switch_times, double horizon);

    Regime sigma0() const noexcept { return sigma0_; }
    double horizon() const noexcept { return horizon_; }
    std::span<const double> switch_times() const noexcept { return switch_times_; }

private:
    Regime sigma0_;
    std::vector<double> switch_times_;
    double horizon_;
};

struct MomentConstants {
    double H;        // h_minus + h_plus
    double Lambda;   // lambda_minus + lambda_plus
    double gamma_c;  // lambda_minus * lambda_plus / Lambda
    double g;        // stationary mean velocity
    double a_plus, a_minus;
    double d_plus, d_minus;

    double a(Regime s) const noexcept { return by_regime(s, a_plus, a_minus); }
    double d(Regime s) const noexcept { return by_regime(s, d_plus, d_minus); }
};

MomentConstants moment_constants(const ModelParams& params);

/// Switch times of an alternating Poisson process with the given intensities,
/// drawn from the substream (seed, path_index).
RegimePath sample_path(double lambda_plus, double lambda_minus, Regime sigma0, double horizon,
                       std::uint64_t seed, std::uint64_t path_index = 0);

/// Samples under the intensities in `params`. Throws on horizon <= 0.
RegimePath sample_path(const ModelParams& params, double horizon, std::uint64_t seed,
                       std::uint64_t path_index = 0);

// Path functionals. All take t in [0, horizon] and throw std::out_of_range otherwise.
// The regime is right-continuous: it has already flipped at a switch time.

Regime regime_at(const RegimePath& path, double t);
int switch_count(const RegimePath& path, double t);

/// Time integral of a regime-indexed rate: the telegraph process for
/// velocities, Y(t) for interest rates.
double integrate_rate(const RegimePath& path, double v_plus, double v_minus, double t);

double telegraph_value(const RegimePath& path, double c_plus, double c_minus, double t);

/// Sum of jump sizes h_{sigma(tau_j-)} over switches tau_j <= t.
double jump_value(const RegimePath& path, double h_plus, double h_minus, double t);

/// Cumulative product of (1 + h) after n switches from regime sigma0.
double kappa(int n, Regime sigma0, double h_plus, double h_minus);

/// ln kappa, finite whenever h > -1.
double log_kappa(int n, Regime sigma0, double h_plus, double h_minus);

double stock_price(const RegimePath& path, const ModelParams& params, double t);
double bond_price(const RegimePath& path, const ModelParams& params, double t);

/// Coefficients (a, b) with a*c_pm + b = c_tilde_pm, so that the telegraph
/// process with velocities c_tilde equals a*X(t) + b*t on the same path.
/// Throws std::invalid_argument when c_plus == c_minus.
std::pair<double, double> linear_transform_coeffs(double c_plus, double c_minus,
                                                  double c_tilde_plus, double c_tilde_minus);

struct ConditionalMeans {
    double jump;       // E[J(s+dt) - J(s) | sigma(s)]
    double telegraph;  // E[X(s+dt) - X(s) | sigma(s)]
};

ConditionalMeans conditional_means(const ModelParams& params, Regime sigma_s, double dt);

/// (lambda_minus h_minus + c_minus, lambda_plus h_plus + c_plus); both vanish
/// exactly when X + J is a martingale.
std::pair<double, double> martingale_defect(const ModelParams& params);

}  // namespace jtel
