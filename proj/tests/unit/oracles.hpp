#pragma once

// Independent reference computations for the tests. Everything here avoids
// the library's solution paths: best responses by grid search, optima by
// bisection on the stationarity condition, prox minima by grid enumeration.

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "resalloc/instance.hpp"

namespace oracles {

/// Brute-force argmax of p*x - f(x) over a uniform grid on [0, x_hi].
inline double grid_best_response(const std::function<double(double)>& f, double p,
                                 double x_hi, double step) {
    const auto levels = static_cast<std::size_t>(std::llround(x_hi / step));
    double best_x = 0.0, best_v = -f(0.0);
    for (std::size_t i = 1; i <= levels; ++i) {
        const double x = static_cast<double>(i) * step;
        const double v = p * x - f(x);
        if (v > best_v) {
            best_v = v;
            best_x = x;
        }
    }
    return best_x;
}

struct AnalyticOptimum {
    double price = 0.0;              // uniform optimal dual price
    std::vector<double> volumes;     // x*
    double cost = 0.0;               // f(x*)
};

/// Closed-form optimum of a quadratic instance, found by bisecting the
/// stationarity condition sum_k max(0, (p - alpha_k)/mu_k) = C.
inline AnalyticOptimum analytic_optimum(const resalloc::ScalarInstance& inst) {
    std::vector<double> alpha(inst.size()), mu(inst.size());
    for (std::size_t k = 0; k < inst.size(); ++k) {
        alpha[k] = inst.costs[k].quadratic->alpha;
        mu[k] = inst.costs[k].quadratic->mu;
    }
    auto supply = [&](double p) {
        double s = 0.0;
        for (std::size_t k = 0; k < inst.size(); ++k)
            s += std::max(0.0, (p - alpha[k]) / mu[k]);
        return s;
    };
    double hi = 1.0;
    while (supply(hi) < inst.demand) hi *= 2.0;
    double lo = 0.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (supply(mid) < inst.demand ? lo : hi) = mid;
    }
    AnalyticOptimum opt;
    opt.price = 0.5 * (lo + hi);
    opt.volumes.resize(inst.size());
    for (std::size_t k = 0; k < inst.size(); ++k)
        opt.volumes[k] = std::max(0.0, (opt.price - alpha[k]) / mu[k]);
    opt.cost = resalloc::primal_value(inst, opt.volumes);
    return opt;
}

/// The composite-step objective gamma*max_k(-p_k) + 0.5*||p - p_tilde||^2.
inline double prox_objective(std::span<const double> p, std::span<const double> p_tilde,
                             double gamma) {
    double worst = -p[0];
    double dist = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        worst = std::max(worst, -p[k]);
        dist += (p[k] - p_tilde[k]) * (p[k] - p_tilde[k]);
    }
    return gamma * worst + 0.5 * dist;
}

/// Exact minimum of the prox objective over the grid {0, step, ..., hi}^n,
/// computed by conditioning on the value of the smallest coordinate: for a
/// fixed minimum m the objective separates, so the best grid point rounds
/// each coordinate toward p_tilde_k within [m, hi] and forces the cheapest
/// coordinate down to m if none landed there.
inline double grid_prox_minimum(std::span<const double> p_tilde, double gamma, double hi,
                                double step) {
    const auto levels = static_cast<std::size_t>(std::llround(hi / step));
    const double top = static_cast<double>(levels) * step;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t mi = 0; mi <= levels; ++mi) {
        const double m = static_cast<double>(mi) * step;
        double total = -gamma * m;
        double cheapest_force = std::numeric_limits<double>::infinity();
        bool attained = false;
        for (double pt : p_tilde) {
            double g = std::round(pt / step) * step;
            g = std::min(std::max(g, m), top);
            total += 0.5 * (g - pt) * (g - pt);
            if (g == m) attained = true;
            cheapest_force =
                std::min(cheapest_force, 0.5 * (m - pt) * (m - pt) - 0.5 * (g - pt) * (g - pt));
        }
        if (!attained) total += cheapest_force;
        best = std::min(best, total);
    }
    return best;
}

/// Direct enumeration over the full grid; only feasible for n <= 2. Used to
/// cross-check grid_prox_minimum.
inline double grid_prox_minimum_direct(std::span<const double> p_tilde, double gamma,
                                       double hi, double step) {
    const auto levels = static_cast<std::size_t>(std::llround(hi / step));
    std::vector<double> p(p_tilde.size());
    double best = std::numeric_limits<double>::infinity();
    if (p_tilde.size() == 1) {
        for (std::size_t i = 0; i <= levels; ++i) {
            p[0] = static_cast<double>(i) * step;
            best = std::min(best, prox_objective(p, p_tilde, gamma));
        }
        return best;
    }
    for (std::size_t i = 0; i <= levels; ++i)
        for (std::size_t j = 0; j <= levels; ++j) {
            p[0] = static_cast<double>(i) * step;
            p[1] = static_cast<double>(j) * step;
            best = std::min(best, prox_objective(p, p_tilde, gamma));
        }
    return best;
}

}  // namespace oracles
