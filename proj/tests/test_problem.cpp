// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bsvrg/problem.hpp"
#include "bsvrg/rng.hpp"
#include "support/oracles.hpp"

using namespace bsvrg;

namespace {

// Fixed 4-sample dataset used across the logistic tests.
LogisticProblem fixed_logistic() {
    std::vector<Vec> rows = {{1.0, 0.5}, {-0.5, 1.0}, {0.25, -1.0}, {-1.0, -0.75}};
    std::vector<int> labels = {1, -1, 1, -1};
    return LogisticProblem(std::move(rows), std::move(labels), 0.1);
}

}  // namespace

TEST_CASE("quadratic gradient vanishes at the center") {
    const QuadraticProblem p(3, {1.0, -2.0, 0.5}, 1.0);
    const Vec g = p.full_gradient({1.0, -2.0, 0.5});
    CHECK(norm(g) == 0.0);
}

TEST_CASE("quadratic gradient with center 0 is the identity") {
    const QuadraticProblem p(2, {}, 1.0);
    const Vec g = p.full_gradient({1.0, 2.0});
    CHECK(g[0] == 1.0);
    CHECK(g[1] == 2.0);
}

TEST_CASE("quadratic objective values") {
    const QuadraticProblem p(2, {}, 1.0);
    CHECK(p.objective({0.0, 0.0}) == 0.0);
    CHECK(p.objective({3.0, 4.0}) == doctest::Approx(12.5).epsilon(1e-15));
}

TEST_CASE("logistic objective at zero is log 2") {
    const auto p = fixed_logistic();
    CHECK(p.objective({0.0, 0.0}) == doctest::Approx(0.6931471805599453).epsilon(1e-14));
}

TEST_CASE("logistic gradient matches the finite-difference oracle at zero") {
    const auto p = fixed_logistic();
    const Vec x = {0.0, 0.0};
    const Vec fd = oracles::finite_difference_gradient(p, x, 1e-6);
    CHECK(oracles::rel_error(p.full_gradient(x), fd) <= 1e-5);
}

TEST_CASE("dimension mismatch is a contract violation") {
    const QuadraticProblem p(3, {}, 1.0);
    CHECK_THROWS_AS(p.full_gradient({1.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(p.objective({1.0}), std::invalid_argument);
}

TEST_CASE("zero noise radius makes every sample gradient exact") {
    const QuadraticProblem p(4, {}, 0.0);
    RngStream rng(7);
    const Vec x = {0.3, -1.0, 2.0, 0.0};
    const Vec g = p.full_gradient(x);
    for (int i = 0; i < 20; ++i) {
        CHECK(distance(p.sample_gradient(x, rng), g) == 0.0);
    }
}

TEST_CASE("sphere noise: hard bound holds and the mean deviation shrinks") {
    const QuadraticProblem p(5, {}, 1.0);
    RngStream rng(42);
    const Vec x(5, 0.7);
    const Vec g = p.full_gradient(x);
    Vec mean_dev(5, 0.0);
    double max_dev = 0.0;
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) {
        const Vec s = p.sample_gradient(x, rng);
        max_dev = std::max(max_dev, distance(s, g));
        for (std::size_t j = 0; j < 5; ++j) mean_dev[j] += s[j] - g[j];
    }
    for (auto& v : mean_dev) v /= draws;
    CHECK(max_dev <= 1.0);
    CHECK(norm(mean_dev) <= 0.02);
}

TEST_CASE("logistic: averaging the full sample space reproduces the gradient") {
    const auto p = fixed_logistic();
    const Vec x = {0.4, -0.9};
    Vec mean(2, 0.0);
    for (std::size_t i = 0; i < p.sample_space_size(); ++i) {
        axpy(1.0, p.sample_gradient_at(x, p.sample_at(i)), mean);
    }
    for (auto& v : mean) v /= static_cast<double>(p.sample_space_size());
    CHECK(distance(mean, p.full_gradient(x)) <= 1e-12);
}

TEST_CASE("deviation bound: zero violations over 10^4 draws, both problems") {
    RngStream point_rng(3);
    {
        const QuadraticProblem p(6, {}, 2.5);
        for (int i = 0; i < 10000; ++i) {
            Vec x(6);
            point_rng.fill_normal(x);
            RngStream rng = derive_stream(100, StreamKind::trial, static_cast<std::uint64_t>(i));
            CHECK(distance(p.sample_gradient(x, rng), p.full_gradient(x)) <=
                  p.deviation_bound());
        }
    }
    {
        const auto p = LogisticProblem::generate(16, 4, 0.2, 0.1, 11);
        for (int i = 0; i < 10000; ++i) {
            Vec x(4);
            point_rng.fill_normal(x);
            RngStream rng = derive_stream(200, StreamKind::trial, static_cast<std::uint64_t>(i));
            CHECK(distance(p.sample_gradient(x, rng), p.full_gradient(x)) <=
                  p.deviation_bound());
        }
    }
}

TEST_CASE("smoothness probe: advertised L dominates 10^3 random secants") {
    RngStream rng(5);
    const auto check_problem = [&](const StochasticProblem& p) {
        for (int i = 0; i < 1000; ++i) {
            Vec x(p.dimension());
            Vec y(p.dimension());
            rng.fill_normal(x);
            rng.fill_normal(y);
            for (auto& v : x) v *= 3.0;
            for (auto& v : y) v *= 3.0;
            const double lhs = distance(p.full_gradient(x), p.full_gradient(y));
            CHECK(lhs <= p.smoothness() * distance(x, y) * (1.0 + 1e-12));
        }
    };
    check_problem(QuadraticProblem(5, {}, 1.0));
    check_problem(LogisticProblem::generate(24, 5, 0.15, 0.0, 9));
}

TEST_CASE("gradient consistency: finite differences at 100 random points") {
    RngStream rng(17);
    const auto check_problem = [&](const StochasticProblem& p) {
        for (int i = 0; i < 100; ++i) {
            Vec x(p.dimension());
            rng.fill_normal(x);
            const Vec fd = oracles::finite_difference_gradient(p, x, 1e-6);
            CHECK(oracles::rel_error(p.full_gradient(x), fd) <= 1e-5);
        }
    };
    check_problem(QuadraticProblem(4, {0.5, -1.0, 2.0, 0.0}, 1.0));
    check_problem(fixed_logistic());
}

TEST_CASE("unbiasedness: sphere noise is mean-zero to Monte Carlo tolerance") {
    const QuadraticProblem p(3, {}, 1.5);
    RngStream rng(23);
    const Vec x = {1.0, 2.0, -0.5};
    const Vec g = p.full_gradient(x);
    const int draws = 200000;
    Vec mean(3, 0.0);
    for (int i = 0; i < draws; ++i) axpy(1.0, p.sample_gradient(x, rng), mean);
    for (auto& v : mean) v /= draws;
    // Per-coordinate std of sphere noise is V/sqrt(d); 3 sigma on the norm.
    const double sigma = p.deviation_bound() / std::sqrt(3.0 * draws);
    CHECK(distance(mean, g) <= 3.0 * sigma * std::sqrt(3.0));
}

TEST_CASE("problem draws are reproducible for equal streams") {
    const auto p = LogisticProblem::generate(32, 6, 0.1, 0.05, 77);
    RngStream a(99);
    RngStream b(99);
    const Vec x(6, 0.25);
    for (int i = 0; i < 50; ++i) {
        CHECK(p.sample_gradient(x, a) == p.sample_gradient(x, b));
    }
}
