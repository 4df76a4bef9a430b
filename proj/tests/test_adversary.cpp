// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bsvrg/adversary.hpp"
#include "bsvrg/engine.hpp"
#include "bsvrg/filter.hpp"
#include "bsvrg/problem.hpp"
#include "support/oracles.hpp"

using namespace bsvrg;

TEST_CASE("honest report equals the full gradient when noise is zero") {
    const QuadraticProblem p(3, {}, 0.0);
    RngStream rng(1);
    const Vec x0 = {1.0, -2.0, 0.5};
    const auto r = honest_report(p, x0, 17, 4, rng);
    CHECK(r.worker_id == 4);
    CHECK(r.honest);
    CHECK(distance(r.vector, p.full_gradient(x0)) == 0.0);
}

TEST_CASE("honest report with B = 1 is a single draw") {
    const QuadraticProblem p(4, {}, 1.0);
    const Vec x0 = {0.0, 1.0, 2.0, 3.0};
    RngStream a(9);
    RngStream b(9);
    const auto r = honest_report(p, x0, 1, 0, a);
    CHECK(r.vector == p.sample_gradient(x0, b));
}

TEST_CASE("batch averaging variance: E||mu - grad f||^2 close to V^2/B") {
    const QuadraticProblem p(6, {}, 1.0);
    const Vec x0(6, 0.5);
    const Vec g = p.full_gradient(x0);
    const int trials = 10000;
    const int batch = 64;
    double sum = 0.0;
    double sum_sq = 0.0;
    for (int i = 0; i < trials; ++i) {
        RngStream rng = derive_stream(21, StreamKind::trial, static_cast<std::uint64_t>(i));
        const auto r = honest_report(p, x0, batch, 0, rng);
        const double d2 = norm_sq(sub(r.vector, g));
        sum += d2;
        sum_sq += d2 * d2;
    }
    const double mean = sum / trials;
    const double var = std::max(0.0, sum_sq / trials - mean * mean);
    const double sigma = std::sqrt(var / trials);
    CHECK(std::abs(mean - 1.0 / batch) <= 3.0 * sigma);
}

TEST_CASE("zero_vector attack emits zeros") {
    const Vec x0 = {1.0, 2.0};
    EpochContext ctx;
    ctx.x0 = &x0;
    RngStream rng(3);
    const auto r = forge_report({AttackStrategy::zero_vector, 0.0, AttackKnowledge::blind},
                                ctx, 7, rng);
    CHECK_FALSE(r.honest);
    CHECK(r.vector == Vec{0.0, 0.0});
}

TEST_CASE("sign_flip scales the true gradient by -magnitude") {
    const QuadraticProblem p(2, {}, 1.0);
    const Vec x0 = {1.0, 0.0};
    const Vec g = p.full_gradient(x0);
    EpochContext ctx;
    ctx.x0 = &x0;
    ctx.true_gradient = &g;
    RngStream rng(3);
    const auto r = forge_report({AttackStrategy::sign_flip, 10.0, AttackKnowledge::blind},
                                ctx, 0, rng);
    CHECK(r.vector == Vec{-10.0, 0.0});
}

TEST_CASE("gaussian_blast lands at exactly `magnitude` from the true gradient") {
    const QuadraticProblem p(8, {}, 1.0);
    const Vec x0(8, 2.0);
    const Vec g = p.full_gradient(x0);
    EpochContext ctx;
    ctx.x0 = &x0;
    ctx.true_gradient = &g;
    RngStream rng(5);
    const auto r = forge_report({AttackStrategy::gaussian_blast, 250.0, AttackKnowledge::blind},
                                ctx, 1, rng);
    CHECK(distance(r.vector, g) == doctest::Approx(250.0).epsilon(1e-12));
}

TEST_CASE("drift attack sits at 0.99 * 2 T_mu from the honest mean and passes rule 1") {
    // delta = 2K e^-5 gives C = 10, so V=1, B=160 puts T_mu at exactly 0.5.
    const int k_total = 5;
    const double delta = 2.0 * k_total * std::exp(-5.0);
    const FilterParams params = compute_constants(k_total, delta, 1.0, 160, 0.2);
    REQUIRE(params.rule1_radius() == doctest::Approx(0.5).epsilon(1e-12));

    const Vec truth = {1.0, -1.0, 0.5};
    std::vector<WorkerReport> reports;
    for (int id = 0; id < 4; ++id) reports.push_back({id, truth, true});

    EpochContext ctx;
    const Vec x0 = truth;
    ctx.x0 = &x0;
    ctx.honest_mean = &truth;
    ctx.rule1_radius = params.rule1_radius();
    RngStream rng(11);
    auto forged = forge_report(
        {AttackStrategy::inside_threshold_drift, 0.0, AttackKnowledge::omniscient}, ctx, 4, rng);
    CHECK(distance(forged.vector, truth) == doctest::Approx(0.99).epsilon(1e-12));

    reports.push_back(forged);
    const auto outcome = filter_and_aggregate(reports, params);
    CHECK(outcome.rule_used == FilterRule::rule1);
    CHECK(std::find(outcome.accepted.begin(), outcome.accepted.end(), 4) !=
          outcome.accepted.end());
    // Brute-force recount around the chosen median confirms the membership.
    const Vec* median_vec = nullptr;
    for (const auto& r : reports) {
        if (r.worker_id == outcome.median_id) median_vec = &r.vector;
    }
    REQUIRE(median_vec != nullptr);
    const auto members =
        oracles::brute_force_members(reports, *median_vec, 2.0 * params.rule1_radius());
    CHECK(outcome.accepted == members);
}

TEST_CASE("median_copycat replays an honest report") {
    const Vec x0 = {0.0, 0.0};
    std::vector<WorkerReport> honest = {
        {0, {1.0, 0.0}, true}, {1, {1.05, 0.0}, true}, {2, {0.95, 0.0}, true}};
    EpochContext ctx;
    ctx.x0 = &x0;
    ctx.honest_reports = &honest;
    ctx.rule1_radius = 0.2;
    ctx.deviation_bound = 1.0;
    RngStream rng(2);
    const auto r = forge_report({AttackStrategy::median_copycat, 0.0, AttackKnowledge::omniscient},
                                ctx, 9, rng);
    CHECK(r.vector == honest[0].vector);  // smallest qualifying id
    CHECK_FALSE(r.honest);
}

TEST_CASE("omniscient-only strategies reject blind knowledge") {
    const Vec x0 = {0.0};
    EpochContext ctx;
    ctx.x0 = &x0;
    RngStream rng(1);
    CHECK_THROWS_AS(forge_report({AttackStrategy::inside_threshold_drift, 1.0,
                                  AttackKnowledge::blind},
                                 ctx, 0, rng),
                    std::invalid_argument);
    CHECK_THROWS_AS(forge_report({AttackStrategy::median_copycat, 0.0, AttackKnowledge::blind},
                                 ctx, 0, rng),
                    std::invalid_argument);
}

TEST_CASE("honest reports stay inside the V ball across 10^4 epochs") {
    const QuadraticProblem p(4, {}, 1.0);
    const FilterParams params = compute_constants(6, 1e-3, p.deviation_bound(), 8);
    const Vec x0(4, -0.3);
    const Vec g = p.full_gradient(x0);
    for (int epoch = 0; epoch < 10000; ++epoch) {
        const auto reports = collect_reports(p, x0, params, {}, nullptr, 31,
                                             static_cast<std::uint64_t>(epoch));
        for (const auto& r : reports) {
            CHECK(distance(r.vector, g) <= p.deviation_bound());
        }
    }
}

TEST_CASE("Byzantine count never exceeds floor(alpha K)") {
    for (int k_total : {1, 3, 10, 20, 33}) {
        for (const char* alpha : {"0", "0.1", "0.2", "0.29", "0.49"}) {
            const auto frac = DecimalFraction::parse(alpha).value();
            const auto ids = Engine::pick_byzantine_ids(k_total, frac, 5);
            CHECK(static_cast<std::int64_t>(ids.size()) == frac.floor_times(k_total));
            for (int id : ids) CHECK((id >= 0 && id < k_total));
        }
    }
    // Exact decimal arithmetic: floor(0.29 * 100) must be 29.
    CHECK(DecimalFraction::parse("0.29").value().floor_times(100) == 29);
}

TEST_CASE("report sequences replay bit-for-bit under a fixed seed") {
    const QuadraticProblem p(5, {}, 1.0);
    const FilterParams params = compute_constants(8, 1e-4, 1.0, 16, 0.25);
    const auto byz = Engine::pick_byzantine_ids(8, DecimalFraction::parse("0.25").value(), 42);
    const AttackSpec attack{AttackStrategy::gaussian_blast, 100.0, AttackKnowledge::blind};
    const Vec x0(5, 1.0);
    for (std::uint64_t epoch = 1; epoch <= 5; ++epoch) {
        const auto a = collect_reports(p, x0, params, byz, &attack, 42, epoch);
        const auto b = collect_reports(p, x0, params, byz, &attack, 42, epoch);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].worker_id == b[i].worker_id);
            CHECK(a[i].honest == b[i].honest);
            CHECK(a[i].vector == b[i].vector);
        }
        std::size_t byz_count = 0;
        for (const auto& r : a) {
            if (!r.honest) ++byz_count;
        }
        CHECK(byz_count == byz.size());
    }
}
