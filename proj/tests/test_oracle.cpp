#include <doctest.h>

#include <cmath>
#include <random>

#include "isosparse/oracle.hpp"
#include "isosparse/threshold.hpp"
#include "support.hpp"

using namespace isosparse;
using namespace isosparse::oracle;
using testing_support::max_abs_diff;
using testing_support::pairwise_cost;

TEST_CASE("oracle: single survivor group") {
    const std::vector<double> z{5, 2, 1};
    const auto r = brute_force_prox(z, pairwise_cost(z, 1.0, 0.5));
    CHECK(max_abs_diff(r.minimizer, std::vector<double>{4, 0, 0}) < 1e-6);
}

TEST_CASE("oracle: zero input maps to zero") {
    const std::vector<double> z{0, 0, 0};
    const auto r = brute_force_prox(z, pairwise_cost(z, 0.7, 0.9));
    CHECK(max_abs_diff(r.minimizer, z) < 1e-9);
    CHECK(r.cost == doctest::Approx(0.0));
}

TEST_CASE("oracle: l1 cost gives the soft threshold") {
    const std::vector<double> z{2, -0.3};
    const auto r = brute_force_prox(z, pairwise_cost(z, 0.5, 0.0));
    CHECK(max_abs_diff(r.minimizer, std::vector<double>{1.5, 0}) < 1e-9);
}

TEST_CASE("oracle: two survivors with hand-computed values") {
    const std::vector<double> z{3, 2, 0.1};
    const auto r = brute_force_prox(z, pairwise_cost(z, 1.0, 0.1));
    CHECK(max_abs_diff(r.minimizer, std::vector<double>{190.0 / 99, 80.0 / 99, 0}) < 1e-9);
}

TEST_CASE("oracle: rejects oversized and non-finite input") {
    std::vector<double> big(9, 1.0);
    CHECK_THROWS_AS(brute_force_prox(big, pairwise_cost(big, 1, 0)), std::invalid_argument);
    std::vector<double> bad{1.0, NAN};
    CHECK_THROWS_AS(brute_force_prox(bad, pairwise_cost(bad, 1, 0)), std::invalid_argument);
    OracleConfig cfg;
    cfg.restarts = 0;
    std::vector<double> ok{1.0};
    CHECK_THROWS_AS(brute_force_prox(ok, pairwise_cost(ok, 1, 0), cfg), std::invalid_argument);
}

TEST_CASE("oracle: deterministic for a fixed seed") {
    const std::vector<double> z{1.3, -2.2, 0.7, 1.9};
    OracleConfig cfg;
    cfg.restarts = 3;
    const auto a = brute_force_prox(z, pairwise_cost(z, 0.8, 1.1), cfg);
    const auto b = brute_force_prox(z, pairwise_cost(z, 0.8, 1.1), cfg);
    CHECK(a.minimizer == b.minimizer);
    CHECK(a.cost == b.cost);
}

TEST_CASE("convexity probe") {
    SUBCASE("strongly regularized pairwise cost is convex") {
        const double lambda = 1.0, gamma = 0.5;
        auto g = [=](std::span<const double> x) {
            double q = 0;
            for (double v : x)
                q += v * v;
            return 0.5 * q + lambda * pairwise_penalty_naive(x, gamma);
        };
        CHECK(convexity_probe(g, 4, 2000).convex);
    }
    SUBCASE("the bare penalty with gamma = 2 is not convex") {
        auto p = [](std::span<const double> x) { return pairwise_penalty_naive(x, 2.0); };
        const auto report = convexity_probe(p, 2, 2000);
        CHECK_FALSE(report.convex);
        REQUIRE(report.witness.has_value());
        CHECK(report.witness->violation > 1e-9);
    }
    SUBCASE("affine function") {
        auto f = [](std::span<const double> x) { return 3 * x[0] - 2 * x[1] + 1; };
        CHECK(convexity_probe(f, 2, 500).convex);
    }
    CHECK_THROWS_AS(convexity_probe([](std::span<const double>) { return 0.0; }, 1, 10), std::invalid_argument);
}

TEST_CASE("naive pairwise penalty matches the linear-time form") {
    std::mt19937_64 rng(7);
    for (int t = 0; t < 200; ++t) {
        const auto u = testing_support::uniform_vector(rng, 1 + t % 9, -3, 3);
        const double gamma = 0.01 * t;
        CHECK(pairwise_group_penalty<double>(u, gamma) ==
              doctest::Approx(pairwise_penalty_naive(u, gamma)).epsilon(1e-12));
    }
}

TEST_CASE("oracle cost never undercuts the analytic threshold") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> lam(0.05, 2.0), prod(0.01, 0.99);
    for (int t = 0; t < 60; ++t) {
        const auto z = testing_support::uniform_vector(rng, 1 + t % 5, -3, 3);
        const double lambda = lam(rng);
        const double gamma = prod(rng) / lambda;
        const auto cost = pairwise_cost(z, lambda, gamma);
        const auto analytic = prox_single_group_linear(z, ThresholdParams(lambda, gamma));
        const auto r = brute_force_prox(z, cost);
        CHECK(std::abs(r.cost - cost(analytic.minimizer)) < 1e-9);
    }
}
