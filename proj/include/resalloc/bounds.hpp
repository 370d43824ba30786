#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "resalloc/instance.hpp"

namespace resalloc {

/// A-priori bound on every optimal dual price:
/// p_max = (n/C) * (sum_k f_k(2C/n) - sum_k f_k(0)).
inline double p_max_bound(const ScalarInstance& inst) {
    const double n = static_cast<double>(inst.size());
    double s = 0.0;
    for (const auto& f : inst.costs)
        s += f.evaluate(2.0 * inst.demand / n) - f.evaluate(0.0);
    return n / inst.demand * s;
}

/// Vector-case analog with the uniform point x_bar_jk = 2 c_j / n and the
/// smallest demand in the denominator.
inline double p_max_bound(const VectorInstance& inst) {
    const double n = static_cast<double>(inst.size());
    std::vector<double> x_bar(inst.products), zero(inst.products, 0.0);
    for (std::size_t j = 0; j < inst.products; ++j) x_bar[j] = 2.0 * inst.demands[j] / n;
    double s = 0.0;
    for (const auto& cost : inst.costs)
        s += producer_cost_value(cost, x_bar) - producer_cost_value(cost, zero);
    double c_min = std::numeric_limits<double>::infinity();
    for (double c : inst.demands) c_min = std::min(c_min, c);
    return n / c_min * s;
}

/// Radius constant R = 3 * p_max * sqrt(n); all iterates stay within 2R.
inline double iterate_radius(double p_max, std::size_t n) {
    return 3.0 * p_max * std::sqrt(static_cast<double>(n));
}

/// Stepsize, iteration count and feasibility tolerance the subgradient
/// method needs for a target accuracy eps.
struct SubgradientRequirements {
    double stepsize = 0.0;    // h = eps / (n C^2)
    double iterations = 0.0;  // ceil(164 (C n p_max)^2 / eps^2), may be huge
    double infeas_tol = 0.0;  // eps / (3 p_max)
};

inline SubgradientRequirements subgradient_requirements(const ScalarInstance& inst, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("subgradient_requirements: eps > 0 required");
    const double n = static_cast<double>(inst.size());
    const double C = inst.demand;
    const double p_max = p_max_bound(inst);
    SubgradientRequirements r;
    r.stepsize = eps / (n * C * C);
    const double w = C * n * p_max / eps;
    r.iterations = std::ceil(164.0 * w * w);
    r.infeas_tol = eps / (3.0 * p_max);
    return r;
}

}  // namespace resalloc
