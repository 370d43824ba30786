#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"
#include "resalloc/cost.hpp"
#include "resalloc/rng.hpp"

using namespace resalloc;

TEST_CASE("quadratic best response matches the profit grid search") {
    auto f = make_quadratic_cost(100.0, 2.0);
    const double x = best_response(f, 300.0);
    CHECK(x == Catch::Approx(100.0).epsilon(1e-12));
    const double grid = oracles::grid_best_response(f.evaluate, 300.0, 200.0, 1e-3);
    CHECK(std::abs(grid - x) <= 1e-3);
}

TEST_CASE("best response is zero when the price is below the marginal cost at zero") {
    auto f = make_quadratic_cost(100.0, 2.0);
    CHECK(best_response(f, 50.0) == 0.0);
    CHECK(best_response(f, 0.0) == 0.0);
    auto g = make_quadratic_cost(0.0, 1.0);
    CHECK(best_response(g, 0.0) == 0.0);
}

TEST_CASE("best response rejects non-finite prices") {
    auto f = make_quadratic_cost(1.0, 1.0);
    CHECK_THROWS_AS(best_response(f, std::nan("")), std::invalid_argument);
    CHECK_THROWS_AS(best_response(f, std::numeric_limits<double>::infinity()),
                    std::invalid_argument);
    CHECK_THROWS_AS(best_response(f, -1.0), std::invalid_argument);
}

namespace {

// Non-quadratic strongly convex increasing cost, exercises the bisection path.
CostFunction quartic_cost(double alpha, double mu) {
    CostFunction f;
    f.evaluate = [=](double x) { return alpha * x + 0.5 * mu * x * x + 0.25 * x * x * x * x; };
    f.derivative = [=](double x) { return alpha + mu * x + x * x * x; };
    f.modulus = mu;
    return f;
}

}  // namespace

TEST_CASE("bisection best response satisfies the first-order condition") {
    auto f = quartic_cost(0.5, 2.0);
    SplitMix64 rng{42};
    for (int i = 0; i < 50; ++i) {
        const double p = 100.0 * rng.next_unit();
        const double x = best_response(f, p);
        if (x > 0.0) {
            CHECK(std::abs(f.derivative(x) - p) <= 1e-9 * std::max(1.0, p));
        } else {
            CHECK(f.derivative(0.0) >= p);
        }
    }
}

TEST_CASE("best response is non-decreasing and 1/mu-Lipschitz in the price") {
    SplitMix64 rng{7};
    for (int trial = 0; trial < 20; ++trial) {
        const double mu = 0.5 + 2.0 * rng.next_unit();
        auto quad = make_quadratic_cost(3.0 * rng.next_unit(), mu);
        auto quart = quartic_cost(3.0 * rng.next_unit(), mu);
        for (const auto& f : {quad, quart}) {
            double p1 = 10.0 * rng.next_unit();
            double p2 = 10.0 * rng.next_unit();
            if (p1 > p2) std::swap(p1, p2);
            const double x1 = best_response(f, p1);
            const double x2 = best_response(f, p2);
            CHECK(x2 >= x1 - 1e-12);
            CHECK(x2 - x1 <= (p2 - p1) / f.modulus + 1e-9);
        }
    }
}
