#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "resalloc/bounds.hpp"
#include "resalloc/instance.hpp"
#include "resalloc/solvers.hpp"
#include "resalloc/water_fill.hpp"

namespace resalloc {

struct VectorSolverConfig {
    Method method = Method::composite;
    std::size_t iterations = 0;
    Matrix start;  // m-by-n, empty means all zeros
    std::optional<double> lipschitz_override;
    std::size_t record_cadence = 1;
};

struct VectorIterationRecord {
    std::size_t t = 0;
    Matrix price;
    Matrix response;
    Matrix price_avg;
    Matrix response_avg;
    double dual_value = 0.0;
    double dual_avg_value = 0.0;
    double primal_avg_value = 0.0;
    double duality_gap = 0.0;
    double infeasibility = 0.0;  // sum_j [c_j - sum_k avg_jk]_+
};

struct VectorRunResult {
    Method method = Method::composite;
    std::size_t iterations = 0;
    Matrix final_price;
    Matrix certificate_price;
    Matrix primal_average;
    double dual_final = 0.0;
    double dual_certificate = 0.0;
    double primal_average_value = 0.0;
    double duality_gap = 0.0;
    double infeasibility = 0.0;
    double max_price_norm = 0.0;  // max over t and product rows of the row norm
    std::vector<VectorIterationRecord> history;
};

namespace detail {

inline void require_valid(const VectorInstance& inst) {
    auto report = validate(inst);
    if (!report.ok())
        throw std::invalid_argument("invalid instance: " + report.violations.front());
}

inline Matrix zeros(std::size_t rows, std::size_t cols) {
    return Matrix(rows, std::vector<double>(cols, 0.0));
}

inline Matrix resolve_start(const Matrix& start, std::size_t m, std::size_t n,
                            double p_max) {
    if (start.empty()) return zeros(m, n);
    require_dimension(start.size(), m, "start point rows");
    for (const auto& row : start) {
        require_dimension(row.size(), n, "start point columns");
        for (double v : row)
            if (!(v >= 0.0) || v > p_max * (1.0 + 1e-12))
                throw std::invalid_argument("start point must lie in [0, p_max]");
    }
    return start;
}

/// Best responses of every producer, as an m-by-n matrix of volumes.
inline Matrix best_response_matrix(const VectorInstance& inst, const Matrix& p) {
    const std::size_t m = inst.products, n = inst.size();
    Matrix x = zeros(m, n);
    std::vector<double> col(m);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t j = 0; j < m; ++j) col[j] = p[j][k];
        const auto xk = best_response_vector(inst, k, col);
        for (std::size_t j = 0; j < m; ++j) x[j][k] = xk[j];
    }
    return x;
}

inline double dual_value_given_response(const VectorInstance& inst, const Matrix& p,
                                        const Matrix& x) {
    const std::size_t m = inst.products, n = inst.size();
    double total = 0.0;
    std::vector<double> col(m);
    for (std::size_t k = 0; k < n; ++k) {
        double px = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            px += p[j][k] * x[j][k];
            col[j] = x[j][k];
        }
        total += px - producer_cost_value(inst.costs[k], col);
    }
    for (std::size_t j = 0; j < m; ++j) {
        double pmin = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < n; ++k) pmin = std::min(pmin, p[j][k]);
        total -= inst.demands[j] * pmin;
    }
    return total;
}

inline double aggregate_infeasibility(const VectorInstance& inst, const Matrix& x) {
    double total = 0.0;
    for (std::size_t j = 0; j < inst.products; ++j) {
        double row = 0.0;
        for (double v : x[j]) row += v;
        total += positive_part(inst.demands[j] - row);
    }
    return total;
}

inline VectorIterationRecord make_record(const VectorInstance& inst, std::size_t t,
                                         Matrix p, Matrix x, Matrix cert, Matrix x_avg) {
    VectorIterationRecord rec;
    rec.t = t;
    rec.dual_value = dual_value_given_response(inst, p, x);
    rec.dual_avg_value = dual_value(inst, cert);
    rec.primal_avg_value = primal_value(inst, x_avg);
    rec.duality_gap = rec.primal_avg_value + rec.dual_avg_value;
    rec.infeasibility = aggregate_infeasibility(inst, x_avg);
    rec.price = std::move(p);
    rec.response = std::move(x);
    rec.price_avg = std::move(cert);
    rec.response_avg = std::move(x_avg);
    return rec;
}

inline Matrix scaled(const Matrix& mat, double s) {
    Matrix out(mat.size());
    for (std::size_t j = 0; j < mat.size(); ++j) out[j] = scaled(mat[j], s);
    return out;
}

inline void add_into(Matrix& acc, const Matrix& v) {
    for (std::size_t j = 0; j < acc.size(); ++j)
        for (std::size_t k = 0; k < acc[j].size(); ++k) acc[j][k] += v[j][k];
}

inline double max_row_norm(const Matrix& mat) {
    double best = 0.0;
    for (const auto& row : mat) best = std::max(best, norm2(row));
    return best;
}

}  // namespace detail

/// Vector-case composite gradient method: the step splits into one
/// water-fill per product with budget c_j / L.
inline VectorRunResult composite_solve(const VectorInstance& inst,
                                       const VectorSolverConfig& config) {
    detail::require_valid(inst);
    if (config.iterations < 1)
        throw std::invalid_argument("composite_solve: iterations must be positive");
    const std::size_t m = inst.products, n = inst.size();
    const std::size_t steps = config.iterations;
    const double lipschitz = config.lipschitz_override.value_or(inst.gradient_lipschitz());
    const double step_scale = 1.0 / lipschitz;
    const double p_max = p_max_bound(inst);
    const std::size_t cadence = std::max<std::size_t>(1, config.record_cadence);

    Matrix p = detail::resolve_start(config.start, m, n, p_max);
    Matrix x_sum = detail::zeros(m, n), p_sum = detail::zeros(m, n);
    VectorRunResult result;
    result.method = Method::composite;
    result.iterations = steps;
    result.max_price_norm = detail::max_row_norm(p);

    for (std::size_t t = 0; t < steps; ++t) {
        const auto x = detail::best_response_matrix(inst, p);
        if (t >= 1 && t % cadence == 0) {
            const double inv = 1.0 / static_cast<double>(t);
            result.history.push_back(detail::make_record(
                inst, t, p, x, detail::scaled(p_sum, inv), detail::scaled(x_sum, inv)));
        }
        detail::add_into(x_sum, x);
        for (std::size_t j = 0; j < m; ++j)
            p[j] = composite_step(inst.demands[j], p[j], x[j], step_scale).price;
        detail::add_into(p_sum, p);
        result.max_price_norm = std::max(result.max_price_norm, detail::max_row_norm(p));
    }

    const double inv = 1.0 / static_cast<double>(steps);
    result.final_price = p;
    result.certificate_price = detail::scaled(p_sum, inv);
    result.primal_average = detail::scaled(x_sum, inv);
    result.history.push_back(detail::make_record(inst, steps, p,
                                                 detail::best_response_matrix(inst, p),
                                                 result.certificate_price,
                                                 result.primal_average));
    const auto& last = result.history.back();
    result.dual_final = last.dual_value;
    result.dual_certificate = last.dual_avg_value;
    result.primal_average_value = last.primal_avg_value;
    result.duality_gap = last.duality_gap;
    result.infeasibility = last.infeasibility;
    return result;
}

/// Vector-case accelerated method: one alpha/A schedule shared by all
/// products, per-product prox with budget c_j * alpha_{t+1}.
inline VectorRunResult accelerated_solve(const VectorInstance& inst,
                                         const VectorSolverConfig& config) {
    detail::require_valid(inst);
    if (config.iterations < 1)
        throw std::invalid_argument("accelerated_solve: iterations must be positive");
    const std::size_t m = inst.products, n = inst.size();
    const std::size_t steps = config.iterations;
    const double lipschitz = config.lipschitz_override.value_or(inst.gradient_lipschitz());
    const double p_max = p_max_bound(inst);
    const std::size_t cadence = std::max<std::size_t>(1, config.record_cadence);

    Matrix p = detail::resolve_start(config.start, m, n, p_max);
    Matrix y = p, w = p;
    Matrix x_bar = detail::zeros(m, n);
    std::vector<double> y_tilde(n);
    double accum = 0.0;
    VectorRunResult result;
    result.method = Method::accelerated;
    result.iterations = steps;
    result.max_price_norm = detail::max_row_norm(p);

    for (std::size_t t = 0; t < steps; ++t) {
        const double alpha = accel_next_alpha(lipschitz, accum);
        const double accum_next = accum + alpha;
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t k = 0; k < n; ++k)
                p[j][k] = (alpha * y[j][k] + accum * w[j][k]) / accum_next;
        const auto x = detail::best_response_matrix(inst, p);
        for (std::size_t j = 0; j < m; ++j) {
            for (std::size_t k = 0; k < n; ++k) y_tilde[k] = y[j][k] - alpha * x[j][k];
            y[j] = water_fill(y_tilde, inst.demands[j] * alpha).p_out;
        }
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t k = 0; k < n; ++k) {
                w[j][k] = (alpha * y[j][k] + accum * w[j][k]) / accum_next;
                x_bar[j][k] = (alpha * x[j][k] + accum * x_bar[j][k]) / accum_next;
            }
        accum = accum_next;
        result.max_price_norm =
            std::max({result.max_price_norm, detail::max_row_norm(p),
                      detail::max_row_norm(y), detail::max_row_norm(w)});
        const std::size_t done = t + 1;
        if (done % cadence == 0 || done == steps)
            result.history.push_back(detail::make_record(inst, done, p, x, w, x_bar));
    }

    result.final_price = p;
    result.certificate_price = w;
    result.primal_average = x_bar;
    const auto& last = result.history.back();
    result.dual_final = last.dual_value;
    result.dual_certificate = last.dual_avg_value;
    result.primal_average_value = last.primal_avg_value;
    result.duality_gap = last.duality_gap;
    result.infeasibility = last.infeasibility;
    return result;
}

inline VectorRunResult solve(const VectorInstance& inst, const VectorSolverConfig& config) {
    switch (config.method) {
        case Method::composite: return composite_solve(inst, config);
        case Method::accelerated: return accelerated_solve(inst, config);
        case Method::subgradient: break;
    }
    throw std::invalid_argument("solve: method not available for vector instances");
}

}  // namespace resalloc
