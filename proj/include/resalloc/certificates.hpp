#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>

#include "resalloc/bounds.hpp"
#include "resalloc/solvers.hpp"
#include "resalloc/vector_solvers.hpp"

namespace resalloc {

struct TheoremBounds {
    double gap_bound = 0.0;
    double infeas_bound = 0.0;
};

/// Composite-method guarantees after N steps:
/// gap <= 82 p_max^2 n^2 / (N mu), infeasibility <= 82 p_max n^2 / (3 N mu).
inline TheoremBounds composite_bounds(const ScalarInstance& inst, std::size_t iterations) {
    if (iterations < 1) throw std::invalid_argument("composite_bounds: N >= 1 required");
    const double n = static_cast<double>(inst.size());
    const double mu = inst.modulus();
    const double p_max = p_max_bound(inst);
    const double N = static_cast<double>(iterations);
    return {82.0 * p_max * p_max * n * n / (N * mu),
            82.0 * p_max * n * n / (3.0 * N * mu)};
}

/// Accelerated-method guarantees after N steps:
/// gap <= 148 n^2 p_max^2 / ((N+1)^2 mu). The infeasibility constant comes
/// from 37 R sqrt(n) / (15 A_N) with the growth estimate A_N >= (N+1)^2/(4L),
/// which gives 148 n^2 p_max / (5 (N+1)^2 mu).
inline TheoremBounds accelerated_bounds(const ScalarInstance& inst, std::size_t iterations) {
    if (iterations < 1) throw std::invalid_argument("accelerated_bounds: N >= 1 required");
    const double n = static_cast<double>(inst.size());
    const double mu = inst.modulus();
    const double p_max = p_max_bound(inst);
    const double Np1 = static_cast<double>(iterations) + 1.0;
    return {148.0 * n * n * p_max * p_max / (Np1 * Np1 * mu),
            148.0 * n * n * p_max / (5.0 * Np1 * Np1 * mu)};
}

/// Variant of the accelerated infeasibility bound carrying an extra radius
/// factor; emitted in certificates alongside the dimensionally consistent one.
inline double accelerated_infeas_bound_radius_scaled(const ScalarInstance& inst,
                                                     std::size_t iterations) {
    const double n = static_cast<double>(inst.size());
    const double mu = inst.modulus();
    const double p_max = p_max_bound(inst);
    const double R = iterate_radius(p_max, inst.size());
    const double Np1 = static_cast<double>(iterations) + 1.0;
    return 148.0 * n * n * R * p_max / (5.0 * Np1 * Np1 * mu);
}

/// Vector-case guarantees: the scalar bounds times m, with the vector price
/// bound in place of p_max.
inline TheoremBounds vector_bounds(const VectorInstance& inst, std::size_t iterations,
                                   Method method) {
    if (iterations < 1) throw std::invalid_argument("vector_bounds: N >= 1 required");
    const double n = static_cast<double>(inst.size());
    const double m = static_cast<double>(inst.products);
    const double mu = inst.modulus();
    const double p_max = p_max_bound(inst);
    const double N = static_cast<double>(iterations);
    switch (method) {
        case Method::composite:
            return {82.0 * p_max * p_max * n * n * m / (N * mu),
                    82.0 * p_max * n * n * m / (3.0 * N * mu)};
        case Method::accelerated: {
            const double Np1 = N + 1.0;
            return {148.0 * p_max * p_max * n * n * m / (Np1 * Np1 * mu),
                    148.0 * p_max * m * n * n / (5.0 * Np1 * Np1 * mu)};
        }
        case Method::subgradient: break;
    }
    throw std::invalid_argument("vector_bounds: method has no vector-case bound");
}

/// Machine-checkable record of one run: a-priori constants, theorem bounds,
/// measured certificate values and pass flags.
struct Certificate {
    Method method = Method::composite;
    std::size_t iterations = 0;
    double p_max = 0.0;
    double radius = 0.0;       // R = 3 p_max sqrt(n)
    double lipschitz = 0.0;    // n / mu
    double mu = 0.0;
    double gap_bound = 0.0;
    double measured_gap = 0.0;
    double infeas_bound = 0.0;
    double measured_infeas = 0.0;
    double infeas_bound_radius_scaled = 0.0;  // accelerated only, zero otherwise
    double epsilon = 0.0;                 // subgradient only
    bool bound_applicable = true;       // false when a subgradient run was capped
    bool pass_gap = false;
    bool pass_infeas = false;
};

/// Evaluates the matching theorem bound against a finished run.
inline Certificate measure(const ScalarInstance& inst, const RunResult& run) {
    if (run.iterations < 1) throw std::invalid_argument("measure: empty run");
    Certificate cert;
    cert.method = run.method;
    cert.iterations = run.iterations;
    cert.p_max = p_max_bound(inst);
    cert.radius = iterate_radius(cert.p_max, inst.size());
    cert.mu = inst.modulus();
    cert.lipschitz = inst.gradient_lipschitz();
    cert.measured_gap = run.duality_gap;
    cert.measured_infeas = run.infeasibility;
    switch (run.method) {
        case Method::subgradient: {
            cert.epsilon = run.epsilon;
            cert.gap_bound = run.epsilon;
            cert.infeas_bound = run.epsilon > 0.0 ? run.epsilon / (3.0 * cert.p_max) : 0.0;
            cert.bound_applicable = !run.cap_exceeded && run.epsilon > 0.0;
            break;
        }
        case Method::composite: {
            const auto b = composite_bounds(inst, run.iterations);
            cert.gap_bound = b.gap_bound;
            cert.infeas_bound = b.infeas_bound;
            break;
        }
        case Method::accelerated: {
            const auto b = accelerated_bounds(inst, run.iterations);
            cert.gap_bound = b.gap_bound;
            cert.infeas_bound = b.infeas_bound;
            cert.infeas_bound_radius_scaled =
                accelerated_infeas_bound_radius_scaled(inst, run.iterations);
            break;
        }
    }
    cert.pass_gap = cert.measured_gap <= cert.gap_bound;
    cert.pass_infeas = cert.measured_infeas <= cert.infeas_bound;
    return cert;
}

inline Certificate measure(const VectorInstance& inst, const VectorRunResult& run) {
    if (run.iterations < 1) throw std::invalid_argument("measure: empty run");
    Certificate cert;
    cert.method = run.method;
    cert.iterations = run.iterations;
    cert.p_max = p_max_bound(inst);
    cert.radius = iterate_radius(cert.p_max, inst.size());
    cert.mu = inst.modulus();
    cert.lipschitz = inst.gradient_lipschitz();
    cert.measured_gap = run.duality_gap;
    cert.measured_infeas = run.infeasibility;
    const auto b = vector_bounds(inst, run.iterations, run.method);
    cert.gap_bound = b.gap_bound;
    cert.infeas_bound = b.infeas_bound;
    cert.pass_gap = cert.measured_gap <= cert.gap_bound;
    cert.pass_infeas = cert.measured_infeas <= cert.infeas_bound;
    return cert;
}

}  // namespace resalloc
