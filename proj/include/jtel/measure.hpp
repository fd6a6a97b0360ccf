#pragma once

// No-arbitrage conditions, the risk-neutral intensities and the Girsanov
// density switching the physical measure to the martingale one.

#include <string>

#include "jtel/regime.hpp"

namespace jtel {

enum class RegimeStatus { ok, zero_jump, nonpositive_intensity };

struct ArbitrageReport {
    RegimeStatus plus = RegimeStatus::ok;
    RegimeStatus minus = RegimeStatus::ok;
    double ratio_plus = 0.0;   // (r_+ - c_+)/h_+, NaN when h_+ = 0
    double ratio_minus = 0.0;

    bool passed() const noexcept { return plus == RegimeStatus::ok && minus == RegimeStatus::ok; }
    RegimeStatus status(Regime s) const noexcept { return s == Regime::plus ? plus : minus; }
    /// One line per failing regime; empty when passed.
    std::string diagnostic() const;
};

ArbitrageReport no_arbitrage_check(const ModelParams& params);

/// Throws ArbitrageError carrying the diagnostic when the check fails.
void require_no_arbitrage(const ModelParams& params);

struct MartingaleIntensities {
    double lambda_star_plus;
    double lambda_star_minus;
    double c_star_plus;
    double c_star_minus;
    double h_star_plus;
    double h_star_minus;

    double lambda_star(Regime s) const noexcept {
        return by_regime(s, lambda_star_plus, lambda_star_minus);
    }
    double c_star(Regime s) const noexcept { return by_regime(s, c_star_plus, c_star_minus); }
    double h_star(Regime s) const noexcept { return by_regime(s, h_star_plus, h_star_minus); }
};

/// lambda*_s = (r_s - c_s)/h_s, c*_s = lambda_s - lambda*_s, h*_s = -c*_s/lambda_s.
/// Throws ArbitrageError unless no_arbitrage_check passes.
MartingaleIntensities martingale_intensities(const ModelParams& params);

/// Z(t) = exp(X*(t)) kappa*(t) along the path.
double girsanov_density(const RegimePath& path, const ModelParams& params, double t);
double girsanov_density(const RegimePath& path, const MartingaleIntensities& mi, double t);

}  // namespace jtel
