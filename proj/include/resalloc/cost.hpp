#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <utility>

namespace resalloc {

/// Quadratic production cost f(x) = alpha*x + (mu/2)*x^2.
/// alpha is the marginal cost at zero volume, mu the strong-convexity modulus.
struct QuadraticCost {
    double alpha = 0.0;
    double mu = 0.0;

    double evaluate(double x) const { return alpha * x + 0.5 * mu * x * x; }
    double derivative(double x) const { return alpha + mu * x; }
};

/// A producer's cost oracle: increasing, mu-strongly convex on [0, inf).
/// Holds the function, its derivative (marginal cost) and the modulus.
/// When the cost is quadratic the closed form is kept so the best
/// response avoids root-finding.
struct CostFunction {
    std::function<double(double)> evaluate;
    std::function<double(double)> derivative;
    double modulus = 0.0;
    std::optional<QuadraticCost> quadratic;
};

inline CostFunction make_cost(QuadraticCost q) {
    CostFunction f;
    f.evaluate = [q](double x) { return q.evaluate(x); };
    f.derivative = [q](double x) { return q.derivative(x); };
    f.modulus = q.mu;
    f.quadratic = q;
    return f;
}

inline CostFunction make_quadratic_cost(double alpha, double mu) {
    return make_cost(QuadraticCost{alpha, mu});
}

/// Profit-maximizing volume argmax_{x >= 0} { p*x - f(x) }.
///
/// Unique by strong convexity: zero when p <= f'(0), otherwise the root of
/// f'(x) = p. Quadratic costs use the closed form max(0, (p - alpha)/mu);
/// general costs fall back to monotone bisection with bracket doubling.
inline double best_response(const CostFunction& f, double p) {
    if (!std::isfinite(p) || p < 0.0)
        throw std::invalid_argument("best_response: price must be finite and nonnegative");
    if (f.quadratic) {
        const auto& q = *f.quadratic;
        return p <= q.alpha ? 0.0 : (p - q.alpha) / q.mu;
    }
    if (f.derivative(0.0) >= p) return 0.0;
    double hi = 1.0;
    while (f.derivative(hi) < p) {
        hi *= 2.0;
        if (!std::isfinite(hi))
            throw std::runtime_error("best_response: bracket doubling diverged");
    }
    double lo = 0.0;
    const double tol = 1e-12 * std::max(1.0, hi);
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (f.derivative(mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace resalloc
