#include "mdimpute/error.hpp"
#include "mdimpute/preset.hpp"
#include "mdimpute/simulate.hpp"
#include "mdimpute/stats.hpp"

#include "support/oracles.hpp"

#include <doctest.h>

#include <numeric>

using namespace mdi;

TEST_CASE("implied moments of example 1") {
    const auto p = builtin_preset(1);
    const auto m = implied_moments(p.sem, p.graph);
    REQUIRE(m.names == std::vector<NodeId>{"X", "Y"});
    CHECK(m.mean.isZero());
    CHECK(m.covariance(0, 0) == doctest::Approx(1.0));
    CHECK(m.covariance(0, 1) == doctest::Approx(1.0));
    CHECK(m.covariance(1, 1) == doctest::Approx(2.0));
}

TEST_CASE("implied moments with intercepts follow the path rules") {
    const auto g = parse_graph("nodes:\n A observed\n B observed\n C observed\nedges:\n A -> B\n B -> C\n A -> C\n");
    SemSpec sem;
    sem.set("A", {1.0, {}, 2.0});
    sem.set("B", {-1.0, {{"A", 0.5}}, 1.0});
    sem.set("C", {0.0, {{"A", 1.0}, {"B", -2.0}}, 0.5});
    const auto m = implied_moments(sem, g);
    // Hand-derived: Var A = 4, Var B = 0.25·4 + 1 = 2, Cov(A,B) = 2,
    // C = A - 2B + e: Var = 4 + 4·2 - 4·2 + 0.25 = 4.25, Cov(A,C) = 4 - 4 = 0.
    CHECK(m.mean(0) == doctest::Approx(1.0));
    CHECK(m.mean(1) == doctest::Approx(-0.5));
    CHECK(m.mean(2) == doctest::Approx(2.0));
    CHECK(m.covariance(1, 1) == doctest::Approx(2.0));
    CHECK(m.covariance(0, 1) == doctest::Approx(2.0));
    CHECK(m.covariance(2, 2) == doctest::Approx(4.25));
    CHECK(m.covariance(0, 2) == doctest::Approx(0.0));
}

TEST_CASE("simulated sample moments approach the implied moments") {
    const auto p = builtin_preset(4);
    const auto sample = simulate_complete(p.sem, p.graph, 100000, 11);
    const auto stats = standard_statistics(p.graph.substantive());
    const auto est = summarize(sample, stats);
    const auto truth = analytic_truth(p, stats);
    for (const auto& s : stats) CHECK(std::abs(est.at(s) - truth.at(s)) < 0.02);
}

TEST_CASE("simulation is deterministic per seed") {
    const auto a = builtin_example(2, 500, 42);
    const auto b = builtin_example(2, 500, 42);
    const auto c = builtin_example(2, 500, 43);
    CHECK(a.complete == b.complete);
    CHECK(a.data == b.data);
    CHECK_FALSE(a.complete == c.complete);
}

TEST_CASE("mask invariant: NA exactly where the indicator is 0") {
    for (int id = 1; id <= 4; ++id) {
        const auto ex = builtin_example(id, 2000, 5);
        for (const auto& v : ex.data.variables()) {
            if (!ex.data.is_partial(v)) continue;
            const auto& proxy = ex.data.proxy(v);
            const auto& r = ex.data.indicator(v);
            const auto truth = ex.complete.col(v);
            for (std::size_t i = 0; i < proxy.size(); ++i) {
                REQUIRE(proxy[i].has_value() == (r[i] == 1));
                if (proxy[i]) REQUIRE(*proxy[i] == truth(static_cast<Eigen::Index>(i)));
            }
        }
    }
}

TEST_CASE("constant response probability is respected") {
    const auto ex = builtin_example(1, 100000, 8);
    const auto& r = ex.data.indicator("X");
    const double rate = std::accumulate(r.begin(), r.end(), 0.0) / static_cast<double>(r.size());
    CHECK(rate == doctest::Approx(0.7).epsilon(0.01));
}

TEST_CASE("logistic response matches the quadrature oracle") {
    // P(R_Y = 1) = E[σ(X)] = 1/2, and E[X | R_Y = 1] = E[Xσ(X)] / E[σ(X)].
    const double p1 = oracle::gaussian_expectation([](double x) { return sigmoid(x); });
    const double m1 = oracle::gaussian_expectation([](double x) { return x * sigmoid(x); }) / p1;
    CHECK(p1 == doctest::Approx(0.5));

    const auto ex = builtin_example(1, 200000, 21);
    const auto& r = ex.data.indicator("Y");
    const auto x = ex.complete.col("X");
    double count = 0, sum = 0;
    for (std::size_t i = 0; i < r.size(); ++i)
        if (r[i]) {
            ++count;
            sum += x(static_cast<Eigen::Index>(i));
        }
    CHECK(count / static_cast<double>(r.size()) == doctest::Approx(p1).epsilon(0.01));
    CHECK(sum / count == doctest::Approx(m1).epsilon(0.03));
}

TEST_CASE("specification errors") {
    SemSpec sem;
    CHECK_THROWS_AS(sem.set("X", {0.0, {}, 0.0}), SpecError);
    CHECK_THROWS_AS(sem.set("X", {0.0, {}, -1.0}), SpecError);
    CHECK_THROWS_AS(sem.set("X", {0.0, {}, std::nan("")}), SpecError);

    const auto g = parse_graph(builtin_fixture("fig1a.graph"));
    SemSpec bad;
    bad.set("X", {0.0, {{"Y", 1.0}}, 1.0});
    bad.set("Y", {0.0, {}, 1.0});
    CHECK_THROWS_AS(bad.validate(g), SpecError);

    ResponseSpec resp;
    CHECK_THROWS_AS(resp.set("R_X", ConstantProb{0.0}), SpecError);
    CHECK_THROWS_AS(resp.set("R_X", ConstantProb{1.0}), SpecError);
    resp.set("R_X", ConstantProb{0.5});
    resp.set("R_Y", Logistic{{{1.0, {"Y"}}}});  // Y is not a parent of R_Y
    CHECK_THROWS_AS(resp.validate(g), SpecError);

    const auto p = builtin_preset(1);
    CHECK_THROWS(simulate_complete(p.sem, p.graph, 0, 1));
}
