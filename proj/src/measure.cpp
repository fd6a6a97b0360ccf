#include "jtel/measure.hpp"

#include <cmath>
#include <limits>

#include "jtel/error.hpp"

namespace jtel {

namespace {

RegimeStatus classify(double c, double r, double h, double& ratio) {
    if (h == 0.0) {
        ratio = std::numeric_limits<double>::quiet_NaN();
        return RegimeStatus::zero_jump;
    }
    ratio = (r - c) / h;
    return ratio > 0.0 ? RegimeStatus::ok : RegimeStatus::nonpositive_intensity;
}

std::string describe(const char* name, RegimeStatus s, double ratio) {
    switch (s) {
        case RegimeStatus::ok:
            return {};
        case RegimeStatus::zero_jump:
            return std::string("regime ") + name +
                   ": jump size is zero; a market without jumps at switches has no martingale measure\n";
        case RegimeStatus::nonpositive_intensity:
            return std::string("regime ") + name + ": (r - c)/h = " + std::to_string(ratio) +
                   " is not positive\n";
    }
    return {};
}

}  // namespace

std::string ArbitrageReport::diagnostic() const {
    return describe("+1", plus, ratio_plus) + describe("-1", minus, ratio_minus);
}

ArbitrageReport no_arbitrage_check(const ModelParams& p) {
    ArbitrageReport rep;
    rep.plus = classify(p.c_plus, p.r_plus, p.h_plus, rep.ratio_plus);
    rep.minus = classify(p.c_minus, p.r_minus, p.h_minus, rep.ratio_minus);
    return rep;
}

void require_no_arbitrage(const ModelParams& params) {
    const ArbitrageReport rep = no_arbitrage_check(params);
    if (!rep.passed()) throw ArbitrageError(rep.diagnostic());
}

MartingaleIntensities martingale_intensities(const ModelParams& p) {
    require_no_arbitrage(p);
    MartingaleIntensities m{};
    m.lambda_star_plus = (p.r_plus - p.c_plus) / p.h_plus;
    m.lambda_star_minus = (p.r_minus - p.c_minus) / p.h_minus;
    m.c_star_plus = p.lambda_plus - m.lambda_star_plus;
    m.c_star_minus = p.lambda_minus - m.lambda_star_minus;
    m.h_star_plus = -m.c_star_plus / p.lambda_plus;
    m.h_star_minus = -m.c_star_minus / p.lambda_minus;
    return m;
}

double girsanov_density(const RegimePath& path, const MartingaleIntensities& mi, double t) {
    const double x = telegraph_value(path, mi.c_star_plus, mi.c_star_minus, t);
    const int n = switch_count(path, t);
    return std::exp(x + log_kappa(n, path.sigma0(), mi.h_star_plus, mi.h_star_minus));
}

double girsanov_density(const RegimePath& path, const ModelParams& params, double t) {
    return girsanov_density(path, martingale_intensities(params), t);
}

}  // namespace jtel
