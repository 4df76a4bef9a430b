// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "bsvrg/filter.hpp"
#include "bsvrg/rng.hpp"
#include "support/oracles.hpp"

using namespace bsvrg;

namespace {

std::vector<WorkerReport> make_reports(const std::vector<Vec>& vectors) {
    std::vector<WorkerReport> out;
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        out.push_back({static_cast<int>(i), vectors[i], true});
    }
    return out;
}

bool contains(const std::vector<int>& ids, int id) {
    return std::find(ids.begin(), ids.end(), id) != ids.end();
}

}  // namespace

TEST_CASE("constants: 2K/delta = e gives C = 2") {
    const auto p = compute_constants(1, 2.0 / std::exp(1.0), 1.0, 32);
    CHECK(p.concentration() == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(p.rule1_radius() == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("constants: K=10, delta=6.25e-5, V=2, B=64") {
    const auto p = compute_constants(10, 6.25e-5, 2.0, 64);
    CHECK(p.concentration() == doctest::Approx(25.3521525495518).epsilon(1e-12));
    CHECK(p.rule1_radius() == doctest::Approx(2.51754605467069).epsilon(1e-12));
}

TEST_CASE("constants: out-of-range inputs are config errors") {
    CHECK_THROWS_AS(compute_constants(0, 0.1, 1.0, 8), std::invalid_argument);
    CHECK_THROWS_AS(compute_constants(4, 0.0, 1.0, 8), std::invalid_argument);
    CHECK_THROWS_AS(compute_constants(4, 1.0, 1.0, 8), std::invalid_argument);
    CHECK_THROWS_AS(compute_constants(4, 0.1, -1.0, 8), std::invalid_argument);
    CHECK_THROWS_AS(compute_constants(4, 0.1, 1.0, 0), std::invalid_argument);
    CHECK_THROWS_AS(compute_constants(4, 0.1, 1.0, 8, 0.5), std::invalid_argument);
}

TEST_CASE("median: identical reports pick id 0") {
    const auto reports = make_reports({{1.0, 1.0}, {1.0, 1.0}, {1.0, 1.0}, {1.0, 1.0}});
    CHECK(select_median(reports, 0.0) == 0);
}

TEST_CASE("median: K=3 two-point cluster") {
    const auto reports = make_reports({{0.0, 0.0}, {0.1, 0.0}, {10.0, 10.0}});
    CHECK(select_median(reports, 0.5) == 0);
    CHECK(oracles::brute_force_median(reports, 0.5) == 0);
}

TEST_CASE("median: strict majority fails for K=2 split") {
    const auto reports = make_reports({{0.0, 0.0}, {10.0, 0.0}});
    CHECK_FALSE(select_median(reports, 1.0).has_value());
    CHECK_FALSE(oracles::brute_force_median(reports, 1.0).has_value());
}

TEST_CASE("median soundness: counts recounted around every returned id") {
    RngStream rng(8);
    for (int iter = 0; iter < 200; ++iter) {
        const int k_total = 3 + static_cast<int>(rng.uniform_below(8));
        std::vector<Vec> vectors;
        for (int i = 0; i < k_total; ++i) {
            Vec v(3);
            rng.fill_normal(v);
            vectors.push_back(v);
        }
        const auto reports = make_reports(vectors);
        const double radius = 0.5 + 2.0 * rng.uniform01();
        const auto med = select_median(reports, radius);
        CHECK(med == oracles::brute_force_median(reports, radius));
        if (med) {
            const auto ball =
                oracles::brute_force_members(reports, vectors[static_cast<std::size_t>(*med)],
                                             radius);
            CHECK(2 * ball.size() > static_cast<std::size_t>(k_total));
        }
    }
}

TEST_CASE("all-honest noiseless epoch: rule 1 keeps everyone") {
    const Vec g = {2.0, -1.0};
    const auto reports = make_reports({g, g, g, g, g, g});
    const auto params = compute_constants(6, 1e-3, 0.0, 16, 0.0);
    const auto outcome = filter_and_aggregate(reports, params);
    CHECK(outcome.rule_used == FilterRule::rule1);
    CHECK(outcome.accepted.size() == 6);
    CHECK(outcome.aggregate == g);
}

TEST_CASE("two distant blast reports are excluded, aggregate stays near truth") {
    // K=10, alpha=0.2: 8 honest within V sqrt(C/B) of the truth, 2 blasts at
    // distance 100 T_mu.
    const auto params = compute_constants(10, 1e-4, 1.0, 64, 0.2);
    const double t_mu = params.rule1_radius();
    const double cluster = 0.5 * t_mu;

    RngStream rng(19);
    const std::size_t dim = 4;
    Vec truth(dim);
    rng.fill_normal(truth);

    std::vector<WorkerReport> reports;
    Vec honest_sum(dim, 0.0);
    for (int id = 0; id < 8; ++id) {
        Vec v = truth;
        axpy(cluster * rng.uniform01(), rng.unit_sphere(dim), v);
        honest_sum = add(honest_sum, v);
        reports.push_back({id, v, true});
    }
    for (int id = 8; id < 10; ++id) {
        Vec v = truth;
        axpy(100.0 * t_mu, rng.unit_sphere(dim), v);
        reports.push_back({id, v, false});
    }

    const auto outcome = filter_and_aggregate(reports, params);
    CHECK_FALSE(contains(outcome.accepted, 8));
    CHECK_FALSE(contains(outcome.accepted, 9));
    for (int id = 0; id < 8; ++id) CHECK(contains(outcome.accepted, id));
    const Vec honest_mean = scaled(honest_sum, 1.0 / 8.0);
    CHECK(distance(outcome.aggregate, honest_mean) <= 2.0 * t_mu);

    // Oracle recount of the whole outcome.
    const Vec* median_vec = nullptr;
    for (const auto& r : reports) {
        if (r.worker_id == outcome.median_id) median_vec = &r.vector;
    }
    REQUIRE(median_vec != nullptr);
    CHECK(outcome.accepted == oracles::brute_force_members(reports, *median_vec, 2.0 * t_mu));
}

TEST_CASE("adversarial spacing forces rule 2 and keeps every honest report") {
    // Honest reports within V of the truth but pairwise farther than T_mu
    // (B large makes T_mu tiny), so rule 1 has no majority ball.
    const auto params = compute_constants(5, 1e-3, 1.0, 1000000, 0.2);
    REQUIRE(params.rule1_radius() < 0.01);

    const Vec truth = {0.0, 0.0, 0.0};
    std::vector<Vec> vectors = {
        {0.5, 0.0, 0.0}, {-0.5, 0.0, 0.0}, {0.0, 0.5, 0.0}, {0.0, -0.5, 0.0}, {0.0, 0.0, 0.5}};
    const auto reports = make_reports(vectors);
    CHECK_FALSE(select_median(reports, params.rule1_radius()).has_value());

    const auto outcome = filter_and_aggregate(reports, params);
    CHECK(outcome.rule_used == FilterRule::rule2);
    CHECK(outcome.accepted.size() >= 4);  // ceil((1-0.2)*5)
    for (int id = 0; id < 5; ++id) CHECK(contains(outcome.accepted, id));
}

TEST_CASE("rule-2 trigger quota uses exact decimal arithmetic") {
    // K=5, alpha=0.2: quota is exactly 4 accepted reports.
    auto params = compute_constants(5, 1e-3, 1.0, 1000000, 0.2);
    params.alpha_exact = DecimalFraction::parse("0.2").value();

    const Vec truth = {0.0, 0.0};
    std::vector<WorkerReport> reports;
    for (int id = 0; id < 4; ++id) reports.push_back({id, truth, true});
    reports.push_back({4, {500.0, 0.0}, false});
    // 4 identical honest reports: rule-1 ball count 4 > 2.5, members 4 = quota.
    auto outcome = filter_and_aggregate(reports, params);
    CHECK(outcome.rule_used == FilterRule::rule1);
    CHECK(outcome.accepted.size() == 4);

    // Drop one honest report to 3 in-ball members: 3 < 4 fires rule 2.
    reports[3].vector = {500.0, 500.0};
    outcome = filter_and_aggregate(reports, params);
    CHECK(outcome.rule_used == FilterRule::rule2);
}

TEST_CASE("fallback guarantee: honest cluster within V, arbitrary Byzantine garbage") {
    RngStream rng(77);
    for (int iter = 0; iter < 300; ++iter) {
        const int k_total = 4 + static_cast<int>(rng.uniform_below(12));
        const char* alphas[] = {"0", "0.1", "0.2", "0.25", "0.3"};
        const auto alpha = DecimalFraction::parse(alphas[rng.uniform_below(5)]).value();
        const int byz_count = static_cast<int>(alpha.floor_times(k_total));
        const double v = 0.5 + rng.uniform01();

        // B <= C keeps T_mu >= 2V, the regime where rule 1 provably keeps
        // every honest report no matter where the Byzantine vectors sit.
        const double delta = 1e-3;
        auto params = compute_constants(k_total, delta, v, 8);
        params.alpha = alpha.value();
        params.alpha_exact = alpha;
        REQUIRE(params.rule1_radius() >= 2.0 * v);

        const std::size_t dim = 2 + rng.uniform_below(4);
        Vec truth(dim);
        rng.fill_normal(truth);

        std::vector<WorkerReport> reports;
        for (int id = 0; id < k_total - byz_count; ++id) {
            Vec x = truth;
            axpy(v * rng.uniform01(), rng.unit_sphere(dim), x);
            reports.push_back({id, x, true});
        }
        for (int id = k_total - byz_count; id < k_total; ++id) {
            Vec x(dim);
            const auto mode = rng.uniform_below(4);
            if (mode == 0) {
                rng.fill_normal(x);
                for (auto& c : x) c *= 1e6;
            } else if (mode == 1) {
                x.assign(dim, std::numeric_limits<double>::quiet_NaN());
            } else if (mode == 2) {
                x.assign(dim, 0.0);
            } else {
                x = truth;
                axpy(1.9 * v, rng.unit_sphere(dim), x);  // lurking just outside V
            }
            reports.push_back({id, x, false});
        }

        const auto outcome = filter_and_aggregate(reports, params);
        const std::int64_t quota =
            static_cast<std::int64_t>(std::ceil((1.0 - alpha.value()) * k_total) - 1e-9);
        CHECK(static_cast<std::int64_t>(outcome.accepted.size()) >= quota);
        for (const auto& r : reports) {
            if (r.honest) CHECK(contains(outcome.accepted, r.worker_id));
        }
        // No non-finite report is ever accepted or chosen as median.
        for (const auto& r : reports) {
            if (!all_finite(r.vector)) {
                CHECK_FALSE(contains(outcome.accepted, r.worker_id));
                CHECK(outcome.median_id != r.worker_id);
            }
        }
        CHECK(all_finite(outcome.aggregate));
    }
}

TEST_CASE("rule-2 outcomes always keep the honest set under honest majority") {
    // Tiny T_mu pushes every draw through rule 2; honest reports within V of
    // a common point always land within 4V of any qualifying median.
    RngStream rng(123);
    for (int iter = 0; iter < 200; ++iter) {
        const int k_total = 5 + static_cast<int>(rng.uniform_below(10));
        const auto alpha = DecimalFraction::parse("0.3").value();
        const int byz_count = static_cast<int>(alpha.floor_times(k_total));
        auto params = compute_constants(k_total, 1e-3, 1.0, 4000000);
        params.alpha = alpha.value();
        params.alpha_exact = alpha;

        const std::size_t dim = 3;
        Vec truth(dim);
        rng.fill_normal(truth);
        std::vector<WorkerReport> reports;
        for (int id = 0; id < k_total - byz_count; ++id) {
            Vec x = truth;
            axpy(rng.uniform01(), rng.unit_sphere(dim), x);
            reports.push_back({id, x, true});
        }
        for (int id = k_total - byz_count; id < k_total; ++id) {
            Vec x(dim);
            rng.fill_normal(x);
            for (auto& c : x) c *= 50.0;
            reports.push_back({id, x, false});
        }
        const auto outcome = filter_and_aggregate(reports, params);
        if (outcome.rule_used == FilterRule::rule2) {
            for (const auto& r : reports) {
                if (r.honest) CHECK(contains(outcome.accepted, r.worker_id));
            }
        }
    }
}

TEST_CASE("arrival order does not change the outcome, bit for bit") {
    RngStream rng(55);
    const auto params = compute_constants(7, 1e-3, 1.0, 16, 0.2);
    std::vector<WorkerReport> reports;
    for (int id = 0; id < 7; ++id) {
        Vec x(3);
        rng.fill_normal(x);
        reports.push_back({id, x, true});
    }
    const auto baseline = filter_and_aggregate(reports, params);

    std::vector<WorkerReport> shuffled = {reports[3], reports[6], reports[0], reports[5],
                                          reports[1], reports[4], reports[2]};
    const auto outcome = filter_and_aggregate(shuffled, params);
    CHECK(outcome.accepted == baseline.accepted);
    CHECK(outcome.median_id == baseline.median_id);
    CHECK(outcome.aggregate == baseline.aggregate);  // exact, same summation order
}

TEST_CASE("relabeling workers permutes the accepted set") {
    RngStream rng(56);
    const auto params = compute_constants(6, 1e-3, 1.0, 16, 0.2);
    std::vector<WorkerReport> reports;
    for (int id = 0; id < 6; ++id) {
        Vec x(2);
        rng.fill_normal(x);
        reports.push_back({id, x, true});
    }
    const auto baseline = filter_and_aggregate(reports, params);

    const int perm[] = {2, 0, 5, 1, 4, 3};  // new id of old worker i
    std::vector<WorkerReport> relabeled = reports;
    for (std::size_t i = 0; i < relabeled.size(); ++i) relabeled[i].worker_id = perm[i];
    const auto outcome = filter_and_aggregate(relabeled, params);

    std::vector<int> expected;
    for (int old_id : baseline.accepted) expected.push_back(perm[old_id]);
    std::sort(expected.begin(), expected.end());
    CHECK(outcome.accepted == expected);
    CHECK(distance(outcome.aggregate, baseline.aggregate) <= 1e-12);
}

TEST_CASE("zero-padding the dimension changes nothing about acceptance") {
    RngStream rng(57);
    const auto params = compute_constants(8, 1e-3, 1.0, 32, 0.25);
    std::vector<WorkerReport> narrow;
    std::vector<WorkerReport> wide;
    for (int id = 0; id < 8; ++id) {
        Vec x(5);
        rng.fill_normal(x);
        Vec padded = x;
        padded.resize(10, 0.0);
        narrow.push_back({id, x, true});
        wide.push_back({id, padded, true});
    }
    const auto a = filter_and_aggregate(narrow, params);
    const auto b = filter_and_aggregate(wide, params);
    CHECK(a.accepted == b.accepted);
    CHECK(a.median_id == b.median_id);
    CHECK(a.rule_used == b.rule_used);
}

TEST_CASE("every report non-finite: honest-majority violation") {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double inf = std::numeric_limits<double>::infinity();
    const auto params = compute_constants(3, 1e-3, 1.0, 16);
    const auto reports = make_reports({{nan, 0.0}, {inf, 1.0}, {0.0, nan}});
    CHECK_THROWS_AS(filter_and_aggregate(reports, params), HonestMajorityViolation);
}

TEST_CASE("naive mean averages everything, including garbage") {
    const auto reports = make_reports({{0.0, 0.0}, {3.0, 0.0}, {0.0, 6.0}});
    const auto outcome = naive_mean_aggregate(reports);
    CHECK(outcome.accepted.size() == 3);
    CHECK(outcome.aggregate == Vec{1.0, 2.0});
}
