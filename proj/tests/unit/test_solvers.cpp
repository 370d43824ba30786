#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"
#include "resalloc/certificates.hpp"
#include "resalloc/rng.hpp"
#include "resalloc/solvers.hpp"

using namespace resalloc;

namespace {

ScalarInstance quadratic_instance(std::vector<double> alphas, double mu, double demand) {
    ScalarInstance inst;
    inst.demand = demand;
    for (double a : alphas) inst.costs.push_back(make_quadratic_cost(a, mu));
    return inst;
}

}  // namespace

TEST_CASE("purchase shares concentrate on the cheapest producers") {
    CHECK(subgradient_lambda(std::vector<double>{1.0, 2.0}, 1e-9) ==
          std::vector<double>{1.0, 0.0});
    CHECK(subgradient_lambda(std::vector<double>{1.0, 1.0}, 1e-9) ==
          std::vector<double>{0.5, 0.5});
    CHECK(subgradient_lambda(std::vector<double>{2.0, 1.0, 1.0}, 1e-9) ==
          std::vector<double>{0.0, 0.5, 0.5});
}

TEST_CASE("one subgradient step from zero prices splits the demand uniformly") {
    auto inst = quadratic_instance({0.0, 0.0}, 1.0, 3.0);
    SolverConfig config;
    const double h = 0.25;
    const auto run = subgradient_run(inst, config, h, 1);
    // x(0) = 0 and lambda = (1/2, 1/2), so p^1 = h*C/n in every coordinate.
    const double expect = h * inst.demand / 2.0;
    CHECK(run.final_price == std::vector<double>{expect, expect});
}

TEST_CASE("zero stepsize freezes the iterates") {
    auto inst = quadratic_instance({0.5}, 1.0, 1.0);
    SolverConfig config;
    config.start = {0.75};
    const auto run = subgradient_run(inst, config, 0.0, 5);
    CHECK(run.final_price == std::vector<double>{0.75});
    for (const auto& rec : run.history) CHECK(rec.price == std::vector<double>{0.75});
}

TEST_CASE("subgradient accuracy target is met at the derived iteration count") {
    auto inst = quadratic_instance({0.0}, 1.0, 1.0);
    SolverConfig config;
    config.epsilon = 0.5;
    config.record_cadence = 1000;
    const auto run = subgradient_solve(inst, config);
    CHECK_FALSE(run.cap_exceeded);
    CHECK(run.iterations == 2624);  // ceil(164 * (1*1*2)^2 / 0.25)
    CHECK(run.stepsize == Catch::Approx(0.5));

    const auto opt = oracles::analytic_optimum(inst);
    CHECK(opt.price == Catch::Approx(1.0));
    CHECK(opt.cost == Catch::Approx(0.5));
    const double f_avg = primal_value(inst, run.primal_average);
    CHECK(f_avg - opt.cost <= 0.5 + 1e-12);
    double produced = 0.0;
    for (double v : run.primal_average) produced += v;
    const double p_max = p_max_bound(inst);
    CHECK(inst.demand - produced <= 0.5 / (3.0 * p_max) + 1e-12);
}

TEST_CASE("subgradient runs get truncated at the configured cap") {
    auto inst = quadratic_instance({0.0}, 1.0, 1.0);
    SolverConfig config;
    config.epsilon = 1e-4;  // required count is 164*(2/1e-4)^2 = 6.56e10
    config.iterations = 50;
    const auto run = subgradient_solve(inst, config);
    CHECK(run.cap_exceeded);
    CHECK(run.iterations == 50);
    CHECK(run.required_iterations == 6.56e10);
    const auto cert = measure(inst, run);
    CHECK_FALSE(cert.bound_applicable);
}

TEST_CASE("subgradient epsilon must be positive") {
    auto inst = quadratic_instance({0.0}, 1.0, 1.0);
    SolverConfig config;
    CHECK_THROWS_AS(subgradient_solve(inst, config), std::invalid_argument);
}

TEST_CASE("composite iteration is a fixed point at the dual optimum") {
    auto inst = quadratic_instance({0.0}, 1.0, 1.0);  // p* = 1, x* = 1, L = 1
    const std::vector<double> p_star{1.0};
    const auto x_star = best_response(inst, p_star);
    const auto step = composite_step(inst.demand, p_star, x_star, 1.0);
    CHECK(step.price == p_star);
}

TEST_CASE("composite converges to the known optimum of the unit instance") {
    auto inst = quadratic_instance({0.0}, 1.0, 1.0);
    SolverConfig config;
    config.iterations = 500;
    const auto run = composite_solve(inst, config);
    CHECK(std::abs(run.primal_average[0] - 1.0) <= 1e-2);
    CHECK(std::abs(run.certificate_price[0] - 1.0) <= 1e-2);
    CHECK(std::abs(run.final_price[0] - 1.0) <= 1e-3);  // p* = 1 exactly
    // gap approaches the strong-duality value zero as N grows
    SolverConfig longer = config;
    longer.iterations = 5000;
    CHECK(std::abs(composite_solve(inst, longer).duality_gap) <
          std::abs(run.duality_gap));
}

TEST_CASE("composite dual values never increase") {
    SplitMix64 rng{23};
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<double> alphas(4);
        for (auto& a : alphas) a = 5.0 * rng.next_unit();
        auto inst = quadratic_instance(alphas, 0.5 + rng.next_unit(), 2.0);
        SolverConfig config;
        config.iterations = 120;
        const auto run = composite_solve(inst, config);
        for (std::size_t i = 1; i < run.history.size(); ++i) {
            const double prev = run.history[i - 1].dual_value;
            CHECK(run.history[i].dual_value <= prev + 1e-9 * std::max(1.0, std::abs(prev)));
        }
    }
}

TEST_CASE("iterates stay nonnegative and inside the radius bound") {
    auto inst = quadratic_instance({1.0, 3.0, 0.2}, 2.0, 4.0);
    const double two_r = 2.0 * iterate_radius(p_max_bound(inst), inst.size());
    for (Method method : {Method::composite, Method::accelerated}) {
        SolverConfig config;
        config.method = method;
        config.iterations = 200;
        const auto run = solve(inst, config);
        for (const auto& rec : run.history)
            for (double v : rec.price) CHECK(v >= 0.0);
        CHECK(run.max_price_norm <= two_r);
    }
    SolverConfig sub;
    sub.epsilon = 1.0;
    sub.record_cadence = 100000;  // the derived subgradient count is ~1.4e7 here
    const auto run = subgradient_solve(inst, sub);
    for (const auto& rec : run.history)
        for (double v : rec.price) CHECK(v >= 0.0);
    CHECK(run.max_price_norm <= two_r);
}

TEST_CASE("accelerated schedule starts at 1/L and follows the quadratic recursion") {
    const double L = 2.5;
    const auto sched = accel_schedule(L, 10);
    CHECK(sched.alpha[1] == Catch::Approx(1.0 / L).epsilon(1e-15));
    CHECK(sched.accum[1] == Catch::Approx(1.0 / L).epsilon(1e-15));
    CHECK(sched.alpha[2] == Catch::Approx((1.0 + std::sqrt(5.0)) / (2.0 * L)).epsilon(1e-15));
    for (std::size_t t = 1; t < sched.accum.size(); ++t) {
        CHECK(sched.accum[t] == sched.accum[t - 1] + sched.alpha[t]);  // exact
        const double lhs = L * sched.alpha[t] * sched.alpha[t];
        CHECK(std::abs(lhs - sched.accum[t]) <=
              4.0 * std::ldexp(1.0, std::ilogb(sched.accum[t]) - 52));
        const double tt = static_cast<double>(t);
        CHECK(sched.accum[t] >= (tt + 1.0) * (tt + 1.0) / (4.0 * L));
    }
}

TEST_CASE("accelerated beats composite on the unit instance at equal budgets") {
    auto inst = quadratic_instance({0.0}, 1.0, 1.0);
    SolverConfig config;
    config.iterations = 100;
    const auto comp = composite_solve(inst, config);
    config.method = Method::accelerated;
    const auto acc = accelerated_solve(inst, config);
    CHECK(std::abs(acc.duality_gap) < std::abs(comp.duality_gap));
}

TEST_CASE("start points outside [0, p_max] are rejected") {
    auto inst = quadratic_instance({0.0}, 1.0, 1.0);  // p_max = 2
    SolverConfig config;
    config.iterations = 5;
    config.start = {3.0};
    CHECK_THROWS_AS(composite_solve(inst, config), std::invalid_argument);
    config.start = {-0.5};
    CHECK_THROWS_AS(composite_solve(inst, config), std::invalid_argument);
    config.start = {1.5};
    CHECK_NOTHROW(composite_solve(inst, config));
}

TEST_CASE("zero-iteration runs are rejected") {
    auto inst = quadratic_instance({0.0}, 1.0, 1.0);
    SolverConfig config;
    CHECK_THROWS_AS(composite_solve(inst, config), std::invalid_argument);
    CHECK_THROWS_AS(accelerated_solve(inst, config), std::invalid_argument);
}

TEST_CASE("record cadence thins the history but keeps the final point") {
    auto inst = quadratic_instance({0.0, 1.0}, 1.0, 2.0);
    SolverConfig config;
    config.iterations = 25;
    config.record_cadence = 10;
    for (Method method : {Method::composite, Method::accelerated}) {
        config.method = method;
        const auto run = solve(inst, config);
        std::vector<std::size_t> ts;
        for (const auto& rec : run.history) ts.push_back(rec.t);
        CHECK(ts == std::vector<std::size_t>{10, 20, 25});
    }
}

TEST_CASE("history records carry consistent running averages") {
    auto inst = quadratic_instance({0.5, 1.5}, 1.0, 2.0);
    SolverConfig config;
    config.iterations = 30;
    const auto run = composite_solve(inst, config);
    const auto& rec = run.history[9];  // t = 10
    REQUIRE(rec.t == 10);
    CHECK(rec.duality_gap ==
          Catch::Approx(rec.primal_avg_value + rec.dual_avg_value).margin(1e-12));
    double total = 0.0;
    for (double v : rec.response_avg) total += v;
    CHECK(rec.infeasibility == Catch::Approx(std::max(0.0, inst.demand - total)));
    CHECK(rec.dual_value == Catch::Approx(dual_value(inst, rec.price)));
}
