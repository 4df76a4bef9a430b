// SPDX-License-Identifier: Apache-2.0
#include "bsvrg/verification.hpp"

#include <cmath>
#include <stdexcept>

#include "bsvrg/engine.hpp"
#include "bsvrg/filter.hpp"
#include "bsvrg/parallel.hpp"
#include "bsvrg/tuning.hpp"

namespace bsvrg {

std::string lemma_name(LemmaId id) {
    switch (id) {
        case LemmaId::concentration_T_mu: return "concentration_T_mu";
        case LemmaId::error_moment_bound: return "error_moment_bound";
        case LemmaId::geom_telescope: return "geom_telescope";
        case LemmaId::pinelis: return "pinelis";
    }
    return "unknown";
}

nlohmann::json lemma_report_json(const LemmaCheckReport& r) {
    nlohmann::json j;
    j["lemma"] = lemma_name(r.lemma_id);
    j["trials"] = r.trials;
    j["empirical_value"] = r.empirical_value;
    j["bound_value"] = r.bound_value;
    j["pass"] = r.pass;
    j["confidence_note"] = r.confidence_note;
    return j;
}

LemmaCheckReport check_concentration(const StochasticProblem& problem, const Vec& x,
                                     int worker_count, int batch_size, double delta,
                                     std::int64_t trials, std::uint64_t seed) {
    if (trials < 1) throw std::invalid_argument("concentration: trials must be >= 1");
    const FilterParams params =
        compute_constants(worker_count, delta, problem.deviation_bound(), batch_size);
    // Deviation threshold of the concentration event: V sqrt(C/B).
    const double threshold =
        problem.deviation_bound() * std::sqrt(params.concentration() / batch_size);
    const Vec true_gradient = problem.full_gradient(x);

    std::int64_t failures = 0;
    parallel_trials<int>(
        trials,
        [&](std::int64_t trial) -> int {
            for (int k = 0; k < worker_count; ++k) {
                RngStream rng = derive_stream(seed, StreamKind::trial,
                                              static_cast<std::uint64_t>(trial),
                                              static_cast<std::uint64_t>(k));
                const WorkerReport r = honest_report(problem, x, batch_size, k, rng);
                if (distance(r.vector, true_gradient) > threshold) return 1;
            }
            return 0;
        },
        [&](int failed) { failures += failed; });

    LemmaCheckReport report;
    report.lemma_id = LemmaId::concentration_T_mu;
    report.trials = trials;
    report.empirical_value = static_cast<double>(failures) / static_cast<double>(trials);
    report.bound_value = delta;
    report.pass = report.empirical_value <= 2.0 * delta;
    report.confidence_note = "pass if empirical failure fraction <= 2*delta (Monte Carlo slack 2x)";
    return report;
}

LemmaCheckReport check_error_moment(const ErrorMomentScenario& scenario, std::int64_t trials,
                                    std::uint64_t seed) {
    if (scenario.problem == nullptr) throw std::invalid_argument("error moment: missing problem");
    if (trials < 1) throw std::invalid_argument("error moment: trials must be >= 1");
    const auto& problem = *scenario.problem;

    const ConstraintReport feasibility =
        validate(scenario.worker_count, scenario.batch_size, scenario.delta);
    if (!feasibility.all_ok()) {
        std::string names;
        for (const auto& v : feasibility.violations()) names += (names.empty() ? "" : "; ") + v;
        throw std::invalid_argument("error moment: infeasible (delta, B): " + names);
    }

    FilterParams params = compute_constants(scenario.worker_count, scenario.delta,
                                            problem.deviation_bound(), scenario.batch_size,
                                            scenario.alpha);
    const DecimalFraction alpha_exact = DecimalFraction::from_double(scenario.alpha);
    params.alpha_exact = alpha_exact;
    const std::vector<int> byz_ids =
        Engine::pick_byzantine_ids(scenario.worker_count, alpha_exact, seed);
    const AttackSpec* attack = scenario.attack ? &*scenario.attack : nullptr;
    if (!byz_ids.empty() && attack == nullptr)
        throw std::invalid_argument("error moment: Byzantine workers but no attack");

    const Vec true_gradient = problem.full_gradient(scenario.x);
    CompensatedSum sum;
    parallel_trials<double>(
        trials,
        [&](std::int64_t trial) -> double {
            // One independent report collection + filter pass at fixed x.
            const auto reports =
                collect_reports(problem, scenario.x, params, byz_ids, attack,
                                derive_seed(seed, StreamKind::trial,
                                            static_cast<std::uint64_t>(trial)),
                                1);
            const FilterOutcome outcome = scenario.naive_mean
                                              ? naive_mean_aggregate(reports)
                                              : filter_and_aggregate(reports, params);
            const double d = distance(outcome.aggregate, true_gradient);
            return d * d;
        },
        [&](double v) { sum.add(v); });

    const double v2 = problem.deviation_bound() * problem.deviation_bound();
    const double one_minus_a = 1.0 - scenario.alpha;
    const double bound =
        4.0 * v2 / (one_minus_a * one_minus_a * scenario.worker_count * scenario.batch_size) +
        272.0 * scenario.alpha * scenario.alpha * v2 * params.concentration() /
            (one_minus_a * one_minus_a * scenario.batch_size);

    LemmaCheckReport report;
    report.lemma_id = LemmaId::error_moment_bound;
    report.trials = trials;
    report.empirical_value = sum.value() / static_cast<double>(trials);
    report.bound_value = bound;
    report.pass = report.empirical_value <= bound;
    report.confidence_note = "pass if empirical mean ||e_t||^2 <= bound (no slack)";
    return report;
}

double SequenceSpec::at(std::int64_t n) const {
    switch (kind) {
        case Kind::geometric: return std::pow(ratio, static_cast<double>(n));
        case Kind::harmonic: return 1.0 / static_cast<double>(n + 1);
        case Kind::constant: return constant;
    }
    return 0.0;
}

LemmaCheckReport check_geom_telescope(int batch_size, const SequenceSpec& seq,
                                      std::int64_t trials, std::uint64_t seed) {
    if (batch_size < 1) throw std::invalid_argument("telescope: B must be >= 1");
    if (trials < 2) throw std::invalid_argument("telescope: trials must be >= 2");
    if (seq.kind == SequenceSpec::Kind::geometric && !(seq.ratio > 0.0 && seq.ratio < 1.0))
        throw std::invalid_argument("telescope: unbounded sequence spec refused (ratio not in (0,1))");

    const double gamma = static_cast<double>(batch_size) / (batch_size + 1.0);
    const double factor = 1.0 / gamma - 1.0;
    const double d0 = seq.at(0);

    // Per draw: W = (D_N - D_{N+1}) - factor * (D_0 - D_N); the identity says
    // E[W] = 0, so test |mean W| <= 4 stderr(W).
    CompensatedSum sum_w;
    CompensatedSum sum_w2;
    parallel_trials<double>(
        trials,
        [&](std::int64_t trial) -> double {
            RngStream rng =
                derive_stream(seed, StreamKind::trial, static_cast<std::uint64_t>(trial));
            const std::int64_t n = sample_inner_length(batch_size, rng);
            const double dn = seq.at(n);
            return (dn - seq.at(n + 1)) - factor * (d0 - dn);
        },
        [&](double w) {
            sum_w.add(w);
            sum_w2.add(w * w);
        });

    const double mean = sum_w.value() / static_cast<double>(trials);
    const double var =
        std::max(0.0, sum_w2.value() / static_cast<double>(trials) - mean * mean);
    const double stderr_w = std::sqrt(var / static_cast<double>(trials));

    LemmaCheckReport report;
    report.lemma_id = LemmaId::geom_telescope;
    report.trials = trials;
    report.empirical_value = std::abs(mean);
    report.bound_value = 4.0 * stderr_w;
    report.pass = report.empirical_value <= report.bound_value ||
                  (var == 0.0 && report.empirical_value == 0.0);
    report.confidence_note = "pass if |lhs - rhs| <= 4*stderr of the Monte Carlo difference";
    return report;
}

LemmaCheckReport check_pinelis(double bound_m, int steps, int dimension, double delta,
                               std::int64_t trials, std::uint64_t seed) {
    if (bound_m < 0.0) throw std::invalid_argument("pinelis: M must be >= 0");
    if (steps < 1 || dimension < 1) throw std::invalid_argument("pinelis: N and d must be >= 1");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("pinelis: delta in (0,1)");
    if (trials < 1) throw std::invalid_argument("pinelis: trials must be >= 1");

    const double threshold = 2.0 * std::log(2.0 / delta) * bound_m * bound_m * steps;
    std::int64_t failures = 0;
    parallel_trials<int>(
        trials,
        [&](std::int64_t trial) -> int {
            RngStream rng =
                derive_stream(seed, StreamKind::trial, static_cast<std::uint64_t>(trial));
            Vec sum(static_cast<std::size_t>(dimension), 0.0);
            for (int i = 0; i < steps; ++i) {
                const Vec step = rng.unit_sphere(static_cast<std::size_t>(dimension));
                axpy(bound_m, step, sum);
            }
            return norm_sq(sum) > threshold ? 1 : 0;
        },
        [&](int failed) { failures += failed; });

    LemmaCheckReport report;
    report.lemma_id = LemmaId::pinelis;
    report.trials = trials;
    report.empirical_value = static_cast<double>(failures) / static_cast<double>(trials);
    report.bound_value = delta;
    report.pass = report.empirical_value <= 2.0 * delta;
    report.confidence_note = "pass if empirical failure fraction <= 2*delta (Monte Carlo slack 2x)";
    return report;
}

}  // namespace bsvrg
