#pragma once

// Transition densities of the telegraph process split by switch count, the
// total density with its atom, and the jump-telegraph moment-generating
// function.

#include <functional>
#include <span>
#include <vector>

#include "jtel/regime.hpp"

namespace jtel {

struct DensityParams {
    double c_plus = 1.0;
    double c_minus = -1.0;
    double lambda_plus = 1.0;
    double lambda_minus = 1.0;

    static DensityParams from_model(const ModelParams& p);
    /// Same velocities as `p` but with other switch intensities (e.g. lambda*).
    static DensityParams from_model(const ModelParams& p, double lambda_p, double lambda_m);

    double c(Regime s) const noexcept { return by_regime(s, c_plus, c_minus); }
    double lambda(Regime s) const noexcept { return by_regime(s, lambda_plus, lambda_minus); }
    double dc() const noexcept { return c_plus - c_minus; }
    double nu() const noexcept { return (lambda_plus - lambda_minus) / dc(); }
    double lambda_tilde() const noexcept {
        return (lambda_minus * c_plus - lambda_plus * c_minus) / dc();
    }

    /// Requires c_plus > c_minus and positive finite intensities.
    void validate() const;
};

struct DensityValue {
    double atom_weight = 0.0;  // mass at x = c_sigma t
    double atom_x = 0.0;
    double continuous = 0.0;
};

/// Polynomial kernel q_n on (c_- t, c_+ t); zero on and outside the endpoints.
/// n >= 1, t > 0.
double q_n(double x, double t, int n, Regime sigma, const DensityParams& params);

/// ln q_n, -infinity where q_n vanishes.
double log_q_n(double x, double t, int n, Regime sigma, const DensityParams& params);

/// Density of (X(t), N(t) = n). n = 0 is the pure atom.
DensityValue p_n(double x, double t, int n, Regime sigma, const DensityParams& params);

/// Continuous part of p_n only (0 for n = 0); convenient for integration.
double p_n_continuous(double x, double t, int n, Regime sigma, const DensityParams& params);

/// Full law of X(t): atom plus the Bessel closed form of the continuous part.
/// At the support endpoints the continuous part is the one-sided limit.
DensityValue density_total(double x, double t, Regime sigma, const DensityParams& params);

/// Continuous part of density_total on a batch of points, through the
/// vectorised Bessel kernel.
std::vector<double> density_grid(std::span<const double> xs, double t, Regime sigma,
                                 const DensityParams& params);

struct MgfControls {
    double tail_epsilon = 1e-10;
    int max_terms = 1000;
};

/// E[exp(z (X(t) + ln kappa_N(t)))] from regime sigma, summed over switch
/// counts with per-n quadrature. Throws NumericalError if the terms have not
/// decayed below the tail bound within max_terms.
double mgf(double z, double t, Regime sigma, const DensityParams& params, double h_plus,
           double h_minus, const MgfControls& controls = {});

enum class DifferenceScheme { central, forward };

struct KolmogorovGrid {
    double t = 1.0;
    std::vector<double> x;
    double spacing = 1e-4;
    DifferenceScheme scheme = DifferenceScheme::central;
};

struct ResidualReport {
    double max_residual = 0.0;
    double spacing = 0.0;
};

/// max |d_t p_n + c_sigma d_x p_n + lambda_sigma (p_n - p_{n-1}^{(-sigma)})|
/// over the grid by finite differences. Every stencil point must lie strictly
/// inside the support; otherwise std::invalid_argument.
ResidualReport kolmogorov_residual(int n, Regime sigma, const DensityParams& params,
                                   const KolmogorovGrid& grid);

/// Same residual for arbitrary candidate functions f(x, t) and source g(x, t).
ResidualReport kolmogorov_residual(const std::function<double(double, double)>& f,
                                   const std::function<double(double, double)>& source,
                                   Regime sigma, const DensityParams& params,
                                   const KolmogorovGrid& grid);

}  // namespace jtel
