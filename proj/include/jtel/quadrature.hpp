#pragma once

#include <functional>
#include <span>

namespace jtel {

/// Adaptive Gauss-Kronrod (15/31) integration of f over [a, b]. Interior
/// breakpoints split the range so kinks and endpoint singularities of the
/// integrand sit on panel boundaries. The tolerance is relative to the L1
/// norm of each panel.
double integrate(const std::function<double(double)>& f, double a, double b,
                 std::span<const double> breakpoints = {}, double rel_tol = 1e-13);

}  // namespace jtel
