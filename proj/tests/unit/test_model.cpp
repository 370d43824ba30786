#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"
#include "resalloc/instance.hpp"
#include "resalloc/rng.hpp"

using namespace resalloc;

namespace {

ScalarInstance unit_instance(std::size_t n, double demand) {
    ScalarInstance inst;
    inst.demand = demand;
    for (std::size_t k = 0; k < n; ++k) inst.costs.push_back(make_quadratic_cost(0.0, 1.0));
    return inst;
}

}  // namespace

TEST_CASE("dual value on hand-evaluated cases") {
    auto one = unit_instance(1, 1.0);
    // x(1) = 1, phi = (1*1 - 0.5) - 1*1 = -0.5
    CHECK(dual_value(one, std::vector<double>{1.0}) == Catch::Approx(-0.5).margin(1e-12));
    CHECK(dual_value(one, std::vector<double>{0.0}) == 0.0);

    auto two = unit_instance(2, 1.0);
    CHECK(dual_value(two, std::vector<double>{1.0, 2.0}) ==
          Catch::Approx(1.5).margin(1e-12));
    // cross-check against independent scalar computations
    double expect = 0.0;
    for (double p : {1.0, 2.0}) expect += p * p - 0.5 * p * p;
    expect -= 1.0 * 1.0;
    CHECK(dual_value(two, std::vector<double>{1.0, 2.0}) == Catch::Approx(expect));
}

TEST_CASE("primal value accumulates costs") {
    auto two = unit_instance(2, 1.0);
    CHECK(primal_value(two, std::vector<double>{0.0, 0.0}) == 0.0);
    CHECK(primal_value(two, std::vector<double>{1.0, 2.0}) == Catch::Approx(2.5));
    ScalarInstance inst;
    inst.demand = 10.0;
    inst.costs.push_back(make_quadratic_cost(100.0, 2.0));
    CHECK(primal_value(inst, std::vector<double>{10.0}) == Catch::Approx(1100.0));
    CHECK_THROWS_AS(primal_value(inst, std::vector<double>{1.0, 2.0}),
                    std::invalid_argument);
}

TEST_CASE("weak duality against constructed feasible points") {
    SplitMix64 rng{11};
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 1 + rng.next() % 4;
        ScalarInstance inst;
        inst.demand = 0.5 + 4.0 * rng.next_unit();
        for (std::size_t k = 0; k < n; ++k)
            inst.costs.push_back(
                make_quadratic_cost(2.0 * rng.next_unit(), 0.5 + rng.next_unit()));
        // feasible point: uniform split plus random non-negative slack
        std::vector<double> x(n);
        for (auto& v : x)
            v = inst.demand / static_cast<double>(n) + rng.next_unit();
        std::vector<double> p(n);
        for (auto& v : p) v = 5.0 * rng.next_unit();
        CHECK(dual_value(inst, p) >= -primal_value(inst, x) - 1e-9);
    }
}

TEST_CASE("validation reports structural violations") {
    ScalarInstance bad;
    bad.demand = 1.0;
    bad.costs.push_back(make_quadratic_cost(1.0, 0.0));
    auto r = validate(bad);
    REQUIRE_FALSE(r.ok());
    CHECK(r.violations.front().find("modulus must be positive") != std::string::npos);

    ScalarInstance neg = unit_instance(1, -1.0);
    auto r2 = validate(neg);
    REQUIRE_FALSE(r2.ok());
    CHECK(r2.violations.front().find("demand must be positive") != std::string::npos);

    CHECK(validate(unit_instance(3, 2.0)).ok());
}

TEST_CASE("validation catches a falsely-stated modulus") {
    ScalarInstance inst;
    inst.demand = 1.0;
    CostFunction f;
    f.evaluate = [](double x) { return x; };     // linear: not strongly convex
    f.derivative = [](double) { return 1.0; };
    f.modulus = 1.0;
    inst.costs.push_back(f);
    CHECK_FALSE(validate(inst).ok());
}

TEST_CASE("separable vector best response equals concatenated scalar responses") {
    VectorInstance inst;
    inst.products = 2;
    inst.demands = {1.0, 1.0};
    ProducerCost pc;
    pc.per_product.push_back(make_quadratic_cost(0.0, 1.0));
    pc.per_product.push_back(make_quadratic_cost(0.0, 1.0));
    inst.costs.push_back(pc);

    const auto x = best_response_vector(inst, 0, std::vector<double>{1.0, 2.0});
    REQUIRE(x.size() == 2);
    CHECK(x[0] == best_response(pc.per_product[0], 1.0));
    CHECK(x[1] == best_response(pc.per_product[1], 2.0));
    CHECK(x[0] == 1.0);
    CHECK(x[1] == 2.0);

    const auto zero = best_response_vector(inst, 0, std::vector<double>{0.0, 0.0});
    CHECK(zero == std::vector<double>{0.0, 0.0});
}

TEST_CASE("one-product vector case reduces to the scalar best response") {
    VectorInstance inst;
    inst.products = 1;
    inst.demands = {1.0};
    ProducerCost pc;
    pc.per_product.push_back(make_quadratic_cost(0.5, 2.0));
    inst.costs.push_back(pc);
    for (double p : {0.0, 0.3, 1.0, 7.5}) {
        const auto x = best_response_vector(inst, 0, std::vector<double>{p});
        CHECK(x[0] == best_response(pc.per_product[0], p));
    }
}

TEST_CASE("non-separable cost without an oracle is rejected") {
    VectorInstance inst;
    inst.products = 2;
    inst.demands = {1.0, 1.0};
    ProducerCost pc;
    pc.joint_evaluate = [](std::span<const double> x) { return x[0] * x[0] + x[1] * x[1]; };
    pc.joint_modulus = 2.0;
    inst.costs.push_back(pc);
    CHECK_THROWS_AS(best_response_vector(inst, 0, std::vector<double>{1.0, 1.0}),
                    std::invalid_argument);
    CHECK_FALSE(validate(inst).ok());
}

TEST_CASE("a supplied joint oracle stands in for separable costs") {
    // the joint oracle mirrors a separable quadratic pair, so both forms of
    // the instance must agree everywhere
    VectorInstance sep;
    sep.products = 2;
    sep.demands = {1.0, 2.0};
    ProducerCost pc;
    pc.per_product.push_back(make_quadratic_cost(0.3, 1.0));
    pc.per_product.push_back(make_quadratic_cost(0.1, 2.0));
    sep.costs.push_back(pc);

    VectorInstance joint = sep;
    ProducerCost oracle;
    oracle.joint_evaluate = [](std::span<const double> x) {
        return 0.3 * x[0] + 0.5 * x[0] * x[0] + 0.1 * x[1] + x[1] * x[1];
    };
    oracle.joint_best_response = [](std::span<const double> p) {
        return std::vector<double>{std::max(0.0, p[0] - 0.3),
                                   std::max(0.0, (p[1] - 0.1) / 2.0)};
    };
    oracle.joint_modulus = 1.0;
    joint.costs[0] = oracle;
    CHECK(validate(joint).ok());

    const std::vector<double> prices{0.9, 1.7};
    CHECK(best_response_vector(joint, 0, prices) == best_response_vector(sep, 0, prices));
    const Matrix p{{0.9}, {1.7}};
    CHECK(dual_value(joint, p) == Catch::Approx(dual_value(sep, p)));
    const Matrix x{{0.4}, {0.8}};
    CHECK(primal_value(joint, x) == Catch::Approx(primal_value(sep, x)));
}

TEST_CASE("vector validation accepts a well-formed instance") {
    VectorInstance inst;
    inst.products = 2;
    inst.demands = {1.0, 2.0};
    for (int k = 0; k < 3; ++k) {
        ProducerCost pc;
        pc.per_product.push_back(make_quadratic_cost(0.1, 1.0));
        pc.per_product.push_back(make_quadratic_cost(0.2, 2.0));
        inst.costs.push_back(pc);
    }
    CHECK(validate(inst).ok());
    CHECK(inst.modulus() == 1.0);
    CHECK(inst.gradient_lipschitz() == 3.0);
}
