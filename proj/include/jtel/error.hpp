#pragma once

#include <stdexcept>
#include <string>

namespace jtel {

/// No equivalent martingale measure: a jump size is zero or (r - c)/h <= 0 in some regime.
class ArbitrageError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A series did not reach its tail tolerance within the term budget, or a
/// root bracket could not be established.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Quantile-hedging budget outside (0, perfect-hedge price).
class InfeasibleBudgetError : public std::domain_error {
public:
    InfeasibleBudgetError(const std::string& what, double perfect_price)
        : std::domain_error(what), perfect_price_(perfect_price) {}

    double perfect_price() const noexcept { return perfect_price_; }

private:
    double perfect_price_;
};

}  // namespace jtel
