#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "resalloc/instance.hpp"

namespace resalloc {

enum class WaterFillBranch { center_zero, center_positive };

/// Exact minimizer of gamma*max_k(-p_k) + 0.5*||p - p_tilde||^2 over p >= 0.
/// p_out_k = max(p_center, p_tilde_k); in the positive branch p_center solves
/// sum_k (p_center - p_tilde_k)_+ = gamma.
struct WaterFillResult {
    double p_center = 0.0;
    std::vector<double> p_out;
    WaterFillBranch branch = WaterFillBranch::center_zero;
};

/// Solves the center-price equation exactly: sort the breakpoints, scan the
/// prefix sums of the piecewise-linear left side, invert the active piece in
/// closed form. No iterative root-finding, no tolerance.
inline WaterFillResult water_fill(std::span<const double> p_tilde, double gamma) {
    if (!(gamma > 0.0) || !std::isfinite(gamma))
        throw std::invalid_argument("water_fill: gamma must be positive and finite");
    for (double v : p_tilde)
        if (!std::isfinite(v)) throw std::invalid_argument("water_fill: non-finite input");
    if (p_tilde.empty()) throw std::invalid_argument("water_fill: empty input");

    WaterFillResult r;
    double deficit = 0.0;  // sum of (-p_tilde_k)_+
    for (double v : p_tilde) deficit += std::max(0.0, -v);
    if (deficit >= gamma) {
        r.branch = WaterFillBranch::center_zero;
        r.p_center = 0.0;
        r.p_out.resize(p_tilde.size());
        for (std::size_t k = 0; k < p_tilde.size(); ++k)
            r.p_out[k] = std::max(0.0, p_tilde[k]);
        return r;
    }

    std::vector<double> sorted(p_tilde.begin(), p_tilde.end());
    std::sort(sorted.begin(), sorted.end());
    // On [sorted[j-1], sorted[j]] the left side is j*c - prefix_j; the first
    // piece whose closed-form root stays below the next breakpoint is active.
    double prefix = 0.0;
    double center = 0.0;
    for (std::size_t j = 1; j <= sorted.size(); ++j) {
        prefix += sorted[j - 1];
        center = (gamma + prefix) / static_cast<double>(j);
        if (j == sorted.size() || center <= sorted[j]) break;
    }
    r.branch = WaterFillBranch::center_positive;
    r.p_center = center;
    r.p_out.resize(p_tilde.size());
    for (std::size_t k = 0; k < p_tilde.size(); ++k)
        r.p_out[k] = std::max(center, p_tilde[k]);
    return r;
}

/// One composite step: prediction p_tilde = p - step_scale*x, then the prox.
/// Also reports the implied purchase shares lambda_k, which sum to one
/// whenever the center price is positive.
struct CompositeStepResult {
    std::vector<double> price;    // the new iterate
    std::vector<double> shares;   // lambda
    double p_center = 0.0;
    WaterFillBranch branch = WaterFillBranch::center_zero;
};

inline CompositeStepResult composite_step(double demand, std::span<const double> p,
                                          std::span<const double> x, double step_scale) {
    if (!(step_scale > 0.0) || !std::isfinite(step_scale))
        throw std::invalid_argument("composite_step: step_scale must be positive");
    detail::require_dimension(x.size(), p.size(), "composite_step");
    std::vector<double> p_tilde(p.size());
    for (std::size_t k = 0; k < p.size(); ++k) p_tilde[k] = p[k] - step_scale * x[k];
    const double gamma = demand * step_scale;
    auto wf = water_fill(p_tilde, gamma);
    CompositeStepResult r;
    r.p_center = wf.p_center;
    r.branch = wf.branch;
    r.price = std::move(wf.p_out);
    r.shares.resize(p.size());
    for (std::size_t k = 0; k < p.size(); ++k)
        r.shares[k] = std::max(0.0, wf.p_center - p_tilde[k]) / gamma;
    return r;
}

/// Per-product prox for the vector case: row j of the output is the
/// water-fill of row j of P_tilde with budget gammas[j]. Rows are independent.
inline Matrix vector_prox(const Matrix& p_tilde, std::span<const double> gammas) {
    detail::require_dimension(gammas.size(), p_tilde.size(), "vector_prox");
    Matrix out(p_tilde.size());
    for (std::size_t j = 0; j < p_tilde.size(); ++j)
        out[j] = water_fill(p_tilde[j], gammas[j]).p_out;
    return out;
}

}  // namespace resalloc
