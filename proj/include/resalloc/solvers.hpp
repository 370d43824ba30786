#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "resalloc/bounds.hpp"
#include "resalloc/instance.hpp"
#include "resalloc/water_fill.hpp"

namespace resalloc {

enum class Method { subgradient, composite, accelerated };

inline const char* method_name(Method m) {
    switch (m) {
        case Method::subgradient: return "subgradient";
        case Method::composite: return "composite";
        case Method::accelerated: return "accelerated";
    }
    return "?";
}

inline std::optional<Method> method_from_name(const std::string& s) {
    if (s == "subgradient") return Method::subgradient;
    if (s == "composite") return Method::composite;
    if (s == "accelerated") return Method::accelerated;
    return std::nullopt;
}

struct SolverConfig {
    Method method = Method::composite;
    std::size_t iterations = 0;      // N; for subgradient an optional cap on the required count
    double epsilon = 0.0;            // subgradient target accuracy
    PriceVector start;               // p0, empty means all zeros
    std::optional<double> lipschitz_override;
    std::size_t record_cadence = 1;
    std::size_t iteration_cap = 10'000'000;  // hard cap on the subgradient iteration count
};

/// Snapshot after iteration t: the iterate, its best response, the running
/// certificate pair (dual point and primal average) and the derived metrics.
struct IterationRecord {
    std::size_t t = 0;
    PriceVector price;                  // p^t
    std::vector<double> response;       // x(p^t)
    PriceVector price_avg;              // dual certificate point at t
    std::vector<double> response_avg;   // running primal average
    double dual_value = 0.0;            // phi(p^t)
    double dual_avg_value = 0.0;        // phi(certificate point)
    double primal_avg_value = 0.0;      // f of the primal average
    double duality_gap = 0.0;           // f(avg) + phi(cert)
    double infeasibility = 0.0;         // [C - sum avg]_+
};

struct RunResult {
    Method method = Method::composite;
    std::size_t iterations = 0;
    PriceVector final_price;            // p^N
    PriceVector certificate_price;      // averaged prices, or w^N when accelerated
    std::vector<double> primal_average; // x^N
    double dual_final = 0.0;
    double dual_certificate = 0.0;
    double primal_average_value = 0.0;
    double duality_gap = 0.0;
    double infeasibility = 0.0;
    double max_price_norm = 0.0;        // max over t of ||p^t||_2 (and y,w when accelerated)
    bool cap_exceeded = false;
    double required_iterations = 0.0;    // subgradient: N demanded by the accuracy target
    double stepsize = 0.0;              // subgradient: h
    double epsilon = 0.0;               // subgradient: target accuracy
    std::vector<IterationRecord> history;
};

namespace detail {

inline void require_valid(const ScalarInstance& inst) {
    auto report = validate(inst);
    if (!report.ok())
        throw std::invalid_argument("invalid instance: " + report.violations.front());
}

inline PriceVector resolve_start(const PriceVector& start, std::size_t n, double p_max) {
    PriceVector p0 = start.empty() ? PriceVector(n, 0.0) : start;
    require_dimension(p0.size(), n, "start point");
    for (double v : p0)
        if (!(v >= 0.0) || v > p_max * (1.0 + 1e-12))
            throw std::invalid_argument("start point must lie in [0, p_max]");
    return p0;
}

inline double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

inline double dual_value_given_response(const ScalarInstance& inst,
                                        std::span<const double> p,
                                        std::span<const double> x) {
    double total = 0.0;
    double pmin = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < inst.size(); ++k) {
        total += p[k] * x[k] - inst.costs[k].evaluate(x[k]);
        pmin = std::min(pmin, p[k]);
    }
    return total - inst.demand * pmin;
}

inline double positive_part(double v) { return v > 0.0 ? v : 0.0; }

inline IterationRecord make_record(const ScalarInstance& inst, std::size_t t,
                                   PriceVector p, std::vector<double> x,
                                   PriceVector cert, std::vector<double> x_avg) {
    IterationRecord rec;
    rec.t = t;
    rec.dual_value = dual_value_given_response(inst, p, x);
    rec.dual_avg_value = dual_value(inst, cert);
    rec.primal_avg_value = primal_value(inst, x_avg);
    rec.duality_gap = rec.primal_avg_value + rec.dual_avg_value;
    double total = 0.0;
    for (double v : x_avg) total += v;
    rec.infeasibility = positive_part(inst.demand - total);
    rec.price = std::move(p);
    rec.response = std::move(x);
    rec.price_avg = std::move(cert);
    rec.response_avg = std::move(x_avg);
    return rec;
}

inline std::vector<double> scaled(const std::vector<double>& v, double s) {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] * s;
    return out;
}

}  // namespace detail

/// Purchase shares of the Center at prices p: uniform over the producers
/// whose price is within tol of the minimum, zero elsewhere.
inline std::vector<double> subgradient_lambda(std::span<const double> p, double tol) {
    double pmin = std::numeric_limits<double>::infinity();
    for (double v : p) pmin = std::min(pmin, v);
    std::size_t count = 0;
    for (double v : p)
        if (v <= pmin + tol) ++count;
    std::vector<double> lambda(p.size(), 0.0);
    for (std::size_t k = 0; k < p.size(); ++k)
        if (p[k] <= pmin + tol) lambda[k] = 1.0 / static_cast<double>(count);
    return lambda;
}

/// Projected subgradient iteration with a caller-chosen stepsize and length.
/// The certificate pair averages the visited iterates p^0..p^{N-1} and their
/// best responses.
inline RunResult subgradient_run(const ScalarInstance& inst, const SolverConfig& config,
                                 double stepsize, std::size_t steps) {
    detail::require_valid(inst);
    if (steps < 1) throw std::invalid_argument("subgradient_run: need at least one step");
    if (!(stepsize >= 0.0) || !std::isfinite(stepsize))
        throw std::invalid_argument("subgradient_run: bad stepsize");
    const std::size_t n = inst.size();
    const double p_max = p_max_bound(inst);
    const std::size_t cadence = std::max<std::size_t>(1, config.record_cadence);

    PriceVector p = detail::resolve_start(config.start, n, p_max);
    std::vector<double> x_sum(n, 0.0), p_sum(n, 0.0);
    RunResult result;
    result.method = Method::subgradient;
    result.iterations = steps;
    result.stepsize = stepsize;
    result.max_price_norm = detail::norm2(p);

    for (std::size_t t = 0; t < steps; ++t) {
        const auto x = best_response(inst, p);
        if (t >= 1 && t % cadence == 0) {
            const double inv = 1.0 / static_cast<double>(t);
            result.history.push_back(detail::make_record(
                inst, t, p, x, detail::scaled(p_sum, inv), detail::scaled(x_sum, inv)));
        }
        for (std::size_t k = 0; k < n; ++k) {
            x_sum[k] += x[k];
            p_sum[k] += p[k];
        }
        const double tol = 1e-9 * std::max(1.0, *std::min_element(p.begin(), p.end()));
        const auto lambda = subgradient_lambda(p, tol);
        for (std::size_t k = 0; k < n; ++k)
            p[k] = detail::positive_part(p[k] - stepsize * (x[k] - inst.demand * lambda[k]));
        result.max_price_norm = std::max(result.max_price_norm, detail::norm2(p));
    }

    const double inv = 1.0 / static_cast<double>(steps);
    result.final_price = p;
    result.certificate_price = detail::scaled(p_sum, inv);
    result.primal_average = detail::scaled(x_sum, inv);
    result.history.push_back(detail::make_record(inst, steps, p, best_response(inst, p),
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

/// Subgradient method driven by a target accuracy: stepsize h = eps/(n C^2),
/// run for N = ceil(164 (C n p_max)^2 / eps^2) steps, truncated at the
/// configured cap (reported via cap_exceeded, never an exception).
inline RunResult subgradient_solve(const ScalarInstance& inst, const SolverConfig& config) {
    if (!(config.epsilon > 0.0) || !std::isfinite(config.epsilon))
        throw std::invalid_argument("subgradient_solve: epsilon must be positive");
    detail::require_valid(inst);
    const auto req = subgradient_requirements(inst, config.epsilon);
    const double h = req.stepsize;
    const double required_n = req.iterations;

    std::size_t steps;
    bool capped = false;
    std::size_t cap = config.iteration_cap ? config.iteration_cap
                                           : std::numeric_limits<std::size_t>::max();
    if (config.iterations > 0) cap = std::min(cap, config.iterations);
    if (required_n > static_cast<double>(cap)) {
        steps = cap;
        capped = true;
    } else {
        steps = static_cast<std::size_t>(required_n);
    }

    auto result = subgradient_run(inst, config, h, steps);
    result.cap_exceeded = capped;
    result.required_iterations = required_n;
    result.epsilon = config.epsilon;
    return result;
}

/// Composite gradient method: prediction p - (1/L) x(p) followed by the exact
/// prox. Certificates average p^1..p^N against x(p^0)..x(p^{N-1}).
inline RunResult composite_solve(const ScalarInstance& inst, const SolverConfig& config) {
    detail::require_valid(inst);
    if (config.iterations < 1)
        throw std::invalid_argument("composite_solve: iterations must be positive");
    const std::size_t n = inst.size();
    const std::size_t steps = config.iterations;
    const double lipschitz = config.lipschitz_override.value_or(inst.gradient_lipschitz());
    const double step_scale = 1.0 / lipschitz;
    const double p_max = p_max_bound(inst);
    const std::size_t cadence = std::max<std::size_t>(1, config.record_cadence);

    PriceVector p = detail::resolve_start(config.start, n, p_max);
    std::vector<double> x_sum(n, 0.0), p_sum(n, 0.0);
    RunResult result;
    result.method = Method::composite;
    result.iterations = steps;
    result.max_price_norm = detail::norm2(p);

    for (std::size_t t = 0; t < steps; ++t) {
        const auto x = best_response(inst, p);
        if (t >= 1 && t % cadence == 0) {
            const double inv = 1.0 / static_cast<double>(t);
            result.history.push_back(detail::make_record(
                inst, t, p, x, detail::scaled(p_sum, inv), detail::scaled(x_sum, inv)));
        }
        for (std::size_t k = 0; k < n; ++k) x_sum[k] += x[k];
        p = composite_step(inst.demand, p, x, step_scale).price;
        for (std::size_t k = 0; k < n; ++k) p_sum[k] += p[k];
        result.max_price_norm = std::max(result.max_price_norm, detail::norm2(p));
    }

    const double inv = 1.0 / static_cast<double>(steps);
    result.final_price = p;
    result.certificate_price = detail::scaled(p_sum, inv);
    result.primal_average = detail::scaled(x_sum, inv);
    result.history.push_back(detail::make_record(inst, steps, p, best_response(inst, p),
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

/// Stepsize schedule of the accelerated method: alpha_{t+1} is the largest
/// root of L a^2 = A_t + a and A_{t+1} = A_t + alpha_{t+1}. Computed with
/// extended precision so the quadratic identity holds to a few ulps.
struct AccelSchedule {
    std::vector<double> alpha;  // alpha_0 = 0
    std::vector<double> accum;  // A_t, accum[0] = 0
};

inline double accel_next_alpha(double lipschitz, double accum) {
    const long double L = lipschitz;
    const long double A = accum;
    const long double s = sqrtl(1.0L + 4.0L * L * A);
    return static_cast<double>((1.0L + s) / (2.0L * L));
}

inline AccelSchedule accel_schedule(double lipschitz, std::size_t steps) {
    AccelSchedule sched;
    sched.alpha.reserve(steps + 1);
    sched.accum.reserve(steps + 1);
    sched.alpha.push_back(0.0);
    sched.accum.push_back(0.0);
    double A = 0.0;
    for (std::size_t t = 0; t < steps; ++t) {
        const double a = accel_next_alpha(lipschitz, A);
        A += a;
        sched.alpha.push_back(a);
        sched.accum.push_back(A);
    }
    return sched;
}

/// Accelerated composite gradient method. The dual certificate point is the
/// historical average w^N; the primal certificate is the alpha-weighted
/// average of the best responses.
inline RunResult accelerated_solve(const ScalarInstance& inst, const SolverConfig& config) {
    detail::require_valid(inst);
    if (config.iterations < 1)
        throw std::invalid_argument("accelerated_solve: iterations must be positive");
    const std::size_t n = inst.size();
    const std::size_t steps = config.iterations;
    const double lipschitz = config.lipschitz_override.value_or(inst.gradient_lipschitz());
    const double p_max = p_max_bound(inst);
    const std::size_t cadence = std::max<std::size_t>(1, config.record_cadence);

    PriceVector p = detail::resolve_start(config.start, n, p_max);
    PriceVector y = p, w = p;
    std::vector<double> x_bar(n, 0.0), y_tilde(n);
    double accum = 0.0;
    RunResult result;
    result.method = Method::accelerated;
    result.iterations = steps;
    result.max_price_norm = detail::norm2(p);

    for (std::size_t t = 0; t < steps; ++t) {
        const double alpha = accel_next_alpha(lipschitz, accum);
        const double accum_next = accum + alpha;
        for (std::size_t k = 0; k < n; ++k)
            p[k] = (alpha * y[k] + accum * w[k]) / accum_next;
        const auto x = best_response(inst, p);
        for (std::size_t k = 0; k < n; ++k) y_tilde[k] = y[k] - alpha * x[k];
        y = water_fill(y_tilde, inst.demand * alpha).p_out;
        for (std::size_t k = 0; k < n; ++k) {
            w[k] = (alpha * y[k] + accum * w[k]) / accum_next;
            x_bar[k] = (alpha * x[k] + accum * x_bar[k]) / accum_next;
        }
        accum = accum_next;
        result.max_price_norm = std::max({result.max_price_norm, detail::norm2(p),
                                          detail::norm2(y), detail::norm2(w)});
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

/// Entry point dispatching on config.method.
inline RunResult solve(const ScalarInstance& inst, const SolverConfig& config) {
    switch (config.method) {
        case Method::subgradient: return subgradient_solve(inst, config);
        case Method::composite: return composite_solve(inst, config);
        case Method::accelerated: return accelerated_solve(inst, config);
    }
    throw std::invalid_argument("solve: unknown method");
}

}  // namespace resalloc
