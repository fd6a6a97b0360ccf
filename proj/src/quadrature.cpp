#include "jtel/quadrature.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <vector>

namespace jtel {

double integrate(const std::function<double(double)>& f, double a, double b,
                 std::span<const double> breakpoints, double rel_tol) {
    if (!(b > a)) return 0.0;
    std::vector<double> nodes{a};
    for (double p : breakpoints) {
        if (p > a && p < b) nodes.push_back(p);
    }
    nodes.push_back(b);
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

    using Rule = boost::math::quadrature::gauss_kronrod<double, 31>;
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        double error = 0.0, l1 = 0.0;
        double panel = Rule::integrate(f, nodes[i], nodes[i + 1], 20, rel_tol, &error, &l1);
        if (error > rel_tol * l1) {
            // Endpoint singularity: the double-exponential rule never samples the ends.
            thread_local boost::math::quadrature::tanh_sinh<double> de;
            double de_error = 0.0;
            const double alt = de.integrate(f, nodes[i], nodes[i + 1], rel_tol, &de_error);
            if (de_error < error) panel = alt;
        }
        total += panel;
    }
    return total;
}

}  // namespace jtel
