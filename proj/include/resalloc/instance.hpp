#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "resalloc/cost.hpp"

namespace resalloc {

/// Nonnegative dual iterate, one price per producer.
using PriceVector = std::vector<double>;

/// Row-major matrix with m product rows of n producer entries.
using Matrix = std::vector<std::vector<double>>;

/// One-product allocation problem: n producers with costs f_k must jointly
/// cover a demand C at minimal total cost.
struct ScalarInstance {
    std::vector<CostFunction> costs;
    double demand = 0.0;

    std::size_t size() const { return costs.size(); }

    /// Instance-wide strong-convexity modulus, min over producers.
    double modulus() const {
        double mu = std::numeric_limits<double>::infinity();
        for (const auto& f : costs) mu = std::min(mu, f.modulus);
        return mu;
    }

    /// Lipschitz constant of the dual gradient, n/mu.
    double gradient_lipschitz() const {
        return static_cast<double>(size()) / modulus();
    }
};

/// Per-producer cost over m products. The separable default holds one scalar
/// cost per product; a joint oracle (evaluate + best response) may be supplied
/// instead for non-separable costs.
struct ProducerCost {
    std::vector<CostFunction> per_product;
    std::function<double(std::span<const double>)> joint_evaluate;
    std::function<std::vector<double>(std::span<const double>)> joint_best_response;

    bool separable() const { return !per_product.empty(); }

    double modulus() const {
        if (!separable()) return joint_modulus;
        double mu = std::numeric_limits<double>::infinity();
        for (const auto& f : per_product) mu = std::min(mu, f.modulus);
        return mu;
    }

    double joint_modulus = 0.0;
};

/// Many-product allocation problem: n producers, m products, demand c_j > 0
/// per product. Prices and volumes are m-by-n matrices (product rows).
struct VectorInstance {
    std::size_t products = 0;                 // m
    std::vector<double> demands;              // c, size m
    std::vector<ProducerCost> costs;          // size n

    std::size_t size() const { return costs.size(); }

    double modulus() const {
        double mu = std::numeric_limits<double>::infinity();
        for (const auto& f : costs) mu = std::min(mu, f.modulus());
        return mu;
    }

    double gradient_lipschitz() const {
        return static_cast<double>(size()) / modulus();
    }
};

namespace detail {
inline void require_dimension(std::size_t got, std::size_t want, const char* what) {
    if (got != want)
        throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}
}  // namespace detail

/// Best responses of all producers at prices p.
inline std::vector<double> best_response(const ScalarInstance& inst,
                                         std::span<const double> p) {
    detail::require_dimension(p.size(), inst.size(), "best_response");
    std::vector<double> x(inst.size());
    for (std::size_t k = 0; k < inst.size(); ++k)
        x[k] = best_response(inst.costs[k], p[k]);
    return x;
}

/// Producer k's best response to its price column p_col (one price per
/// product). Separable costs decompose per product; non-separable costs
/// require the user-supplied oracle.
inline std::vector<double> best_response_vector(const VectorInstance& inst,
                                                std::size_t producer,
                                                std::span<const double> p_col) {
    detail::require_dimension(p_col.size(), inst.products, "best_response_vector");
    const auto& cost = inst.costs.at(producer);
    if (cost.separable()) {
        std::vector<double> x(inst.products);
        for (std::size_t j = 0; j < inst.products; ++j)
            x[j] = best_response(cost.per_product[j], p_col[j]);
        return x;
    }
    if (!cost.joint_best_response)
        throw std::invalid_argument(
            "best_response_vector: non-separable cost without a best-response oracle");
    for (double v : p_col)
        if (!std::isfinite(v) || v < 0.0)
            throw std::invalid_argument("best_response_vector: invalid price");
    auto x = cost.joint_best_response(p_col);
    detail::require_dimension(x.size(), inst.products, "best_response_vector result");
    return x;
}

/// Dual objective phi(p) = sum_k [p_k x_k(p_k) - f_k(x_k(p_k))] - C min_k p_k.
inline double dual_value(const ScalarInstance& inst, std::span<const double> p) {
    detail::require_dimension(p.size(), inst.size(), "dual_value");
    double total = 0.0;
    double pmin = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < inst.size(); ++k) {
        const double x = best_response(inst.costs[k], p[k]);
        total += p[k] * x - inst.costs[k].evaluate(x);
        pmin = std::min(pmin, p[k]);
    }
    return total - inst.demand * pmin;
}

inline double producer_cost_value(const ProducerCost& cost, std::span<const double> x) {
    if (cost.separable()) {
        detail::require_dimension(x.size(), cost.per_product.size(), "producer_cost_value");
        double s = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j)
            s += cost.per_product[j].evaluate(x[j]);
        return s;
    }
    if (!cost.joint_evaluate)
        throw std::invalid_argument("producer_cost_value: missing joint evaluate oracle");
    return cost.joint_evaluate(x);
}

/// Vector-case dual objective with prices as an m-by-n matrix.
inline double dual_value(const VectorInstance& inst, const Matrix& p) {
    detail::require_dimension(p.size(), inst.products, "dual_value");
    const std::size_t n = inst.size();
    double total = 0.0;
    std::vector<double> col(inst.products);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t j = 0; j < inst.products; ++j) col[j] = p[j][k];
        const auto x = best_response_vector(inst, k, col);
        double px = 0.0;
        for (std::size_t j = 0; j < inst.products; ++j) px += col[j] * x[j];
        total += px - producer_cost_value(inst.costs[k], x);
    }
    for (std::size_t j = 0; j < inst.products; ++j) {
        double pmin = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < n; ++k) pmin = std::min(pmin, p[j][k]);
        total -= inst.demands[j] * pmin;
    }
    return total;
}

/// Primal objective sum_k f_k(x_k).
inline double primal_value(const ScalarInstance& inst, std::span<const double> x) {
    detail::require_dimension(x.size(), inst.size(), "primal_value");
    double s = 0.0;
    for (std::size_t k = 0; k < inst.size(); ++k) s += inst.costs[k].evaluate(x[k]);
    return s;
}

/// Vector-case primal objective with volumes as an m-by-n matrix.
inline double primal_value(const VectorInstance& inst, const Matrix& x) {
    detail::require_dimension(x.size(), inst.products, "primal_value");
    const std::size_t n = inst.size();
    double s = 0.0;
    std::vector<double> col(inst.products);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t j = 0; j < inst.products; ++j) {
            detail::require_dimension(x[j].size(), n, "primal_value");
            col[j] = x[j][k];
        }
        s += producer_cost_value(inst.costs[k], col);
    }
    return s;
}

struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

namespace detail {

/// Sample grid for checking cost monotonicity and strong convexity:
/// zero plus log-spaced points up to x_max (the range the methods visit).
inline std::vector<double> validation_grid(double x_max, std::size_t count = 64) {
    std::vector<double> xs;
    xs.reserve(count);
    xs.push_back(0.0);
    if (!(x_max > 0.0) || !std::isfinite(x_max)) x_max = 1.0;
    const double lo = x_max * 1e-6;
    for (std::size_t i = 0; i + 1 < count; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(count - 2);
        xs.push_back(lo * std::pow(x_max / lo, t));
    }
    return xs;
}

inline void validate_cost(const CostFunction& f, double x_max, const std::string& label,
                          std::vector<std::string>& out) {
    if (!(f.modulus > 0.0)) {
        out.push_back(label + ": modulus must be positive");
        return;
    }
    if (!f.evaluate || !f.derivative) {
        out.push_back(label + ": missing evaluate or derivative");
        return;
    }
    const auto xs = validation_grid(x_max);
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        const double x1 = xs[i], x2 = xs[i + 1];
        const double d1 = f.derivative(x1), d2 = f.derivative(x2);
        if (!(d1 <= d2 + 1e-12))
            out.push_back(label + ": derivative decreases between samples");
        if (!(d2 - d1 >= f.modulus * (x2 - x1) - 1e-9))
            out.push_back(label + ": strong convexity below stated modulus");
        if (!(f.evaluate(x2) >= f.evaluate(x1)))
            out.push_back(label + ": cost not increasing");
    }
}

}  // namespace detail

/// Checks the structural assumptions (positive demand, increasing
/// mu-strongly convex costs) by sampling. Never throws; reports violations.
inline ValidationReport validate(const ScalarInstance& inst) {
    ValidationReport r;
    if (inst.size() < 1) r.violations.push_back("instance: needs at least one producer");
    if (!(inst.demand > 0.0) || !std::isfinite(inst.demand))
        r.violations.push_back("instance: demand must be positive");
    const double x_max =
        inst.size() ? 4.0 * inst.demand / static_cast<double>(inst.size()) : 1.0;
    for (std::size_t k = 0; k < inst.size(); ++k)
        detail::validate_cost(inst.costs[k], x_max, "cost " + std::to_string(k),
                              r.violations);
    return r;
}

inline ValidationReport validate(const VectorInstance& inst) {
    ValidationReport r;
    if (inst.products < 1) r.violations.push_back("instance: needs at least one product");
    if (inst.size() < 1) r.violations.push_back("instance: needs at least one producer");
    if (inst.demands.size() != inst.products)
        r.violations.push_back("instance: demand vector size mismatch");
    for (std::size_t j = 0; j < inst.demands.size(); ++j)
        if (!(inst.demands[j] > 0.0) || !std::isfinite(inst.demands[j]))
            r.violations.push_back("instance: demand " + std::to_string(j) +
                                   " must be positive");
    for (std::size_t k = 0; k < inst.size(); ++k) {
        const auto& cost = inst.costs[k];
        if (cost.separable()) {
            if (cost.per_product.size() != inst.products) {
                r.violations.push_back("cost " + std::to_string(k) +
                                       ": per-product cost count mismatch");
                continue;
            }
            for (std::size_t j = 0; j < inst.products; ++j) {
                const double c = inst.demands.size() == inst.products ? inst.demands[j] : 1.0;
                const double x_max = 4.0 * c / static_cast<double>(inst.size());
                detail::validate_cost(cost.per_product[j], x_max,
                                      "cost " + std::to_string(k) + "," + std::to_string(j),
                                      r.violations);
            }
        } else {
            if (!cost.joint_best_response || !cost.joint_evaluate)
                r.violations.push_back("cost " + std::to_string(k) +
                                       ": non-separable cost without oracles");
            if (!(cost.joint_modulus > 0.0))
                r.violations.push_back("cost " + std::to_string(k) +
                                       ": modulus must be positive");
        }
    }
    return r;
}

}  // namespace resalloc
