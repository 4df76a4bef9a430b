// SPDX-License-Identifier: Apache-2.0
#include "bsvrg/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace bsvrg {

std::int64_t sample_inner_length(int batch_size, RngStream& rng) {
    if (batch_size < 1) throw std::invalid_argument("inner length: B must be >= 1");
    // P[N >= n] = (B/(B+1))^n; invert the tail.
    const double u = rng.uniform_pos();
    const double log_ratio = -std::log1p(1.0 / static_cast<double>(batch_size));
    const double n = std::floor(std::log(u) / log_ratio);
    return n <= 0.0 ? 0 : static_cast<std::int64_t>(n);
}

InnerStep inner_update(const Vec& x_n, const Vec& x0, const Vec& mu,
                       const StochasticProblem& problem, double eta, RngStream& rng) {
    if (!(eta > 0.0)) throw std::invalid_argument("inner update: eta must be > 0");
    check_dimension(x_n, problem.dimension(), "inner update x_n");
    check_dimension(x0, problem.dimension(), "inner update x0");
    check_dimension(mu, problem.dimension(), "inner update mu");

    const Sample xi = problem.draw(rng);
    const Vec g_n = problem.sample_gradient_at(x_n, xi);
    const Vec g_0 = problem.sample_gradient_at(x0, xi);

    InnerStep step;
    step.x_next.resize(x_n.size());
    for (std::size_t i = 0; i < x_n.size(); ++i) {
        const double v = g_n[i] - g_0[i] + mu[i];
        step.x_next[i] = x_n[i] - eta * v;
    }
    step.samples_used = 1;
    step.finite = all_finite(step.x_next);
    return step;
}

std::vector<WorkerReport> collect_reports(const StochasticProblem& problem, const Vec& x0,
                                          const FilterParams& params,
                                          const std::vector<int>& byzantine_ids,
                                          const AttackSpec* attack, std::uint64_t root_seed,
                                          std::uint64_t epoch_index) {
    const int k_total = params.worker_count;
    auto is_byzantine = [&](int id) {
        return std::binary_search(byzantine_ids.begin(), byzantine_ids.end(), id);
    };

    std::vector<WorkerReport> honest;
    honest.reserve(k_total);
    for (int k = 0; k < k_total; ++k) {
        if (is_byzantine(k)) continue;
        RngStream rng = derive_stream(root_seed, StreamKind::worker_reports,
                                      static_cast<std::uint64_t>(k), epoch_index);
        honest.push_back(honest_report(problem, x0, params.batch_size, k, rng));
    }
    if (byzantine_ids.empty()) return honest;
    if (attack == nullptr)
        throw std::invalid_argument("collect_reports: Byzantine workers but no attack configured");

    const Vec true_gradient = problem.full_gradient(x0);
    Vec honest_mean(problem.dimension(), 0.0);
    for (const auto& r : honest) axpy(1.0, r.vector, honest_mean);
    if (!honest.empty()) {
        const double inv = 1.0 / static_cast<double>(honest.size());
        for (auto& v : honest_mean) v *= inv;
    }
    EpochContext ctx;
    ctx.x0 = &x0;
    ctx.true_gradient = &true_gradient;
    ctx.honest_mean = &honest_mean;
    ctx.honest_reports = &honest;
    ctx.rule1_radius = params.rule1_radius();
    ctx.deviation_bound = params.deviation_bound;

    std::vector<WorkerReport> reports = std::move(honest);
    for (int id : byzantine_ids) {
        RngStream rng = derive_stream(root_seed, StreamKind::worker_reports,
                                      static_cast<std::uint64_t>(id), epoch_index);
        reports.push_back(forge_report(*attack, ctx, id, rng));
    }
    std::sort(reports.begin(), reports.end(),
              [](const WorkerReport& a, const WorkerReport& b) { return a.worker_id < b.worker_id; });
    return reports;
}

std::string run_status_name(RunStatus s) {
    switch (s) {
        case RunStatus::ok: return "ok";
        case RunStatus::diverged: return "diverged";
        case RunStatus::honest_majority_violation: return "honest_majority_violation";
    }
    return "unknown";
}

std::vector<int> Engine::pick_byzantine_ids(int worker_count, const DecimalFraction& alpha,
                                            std::uint64_t seed) {
    const auto count = alpha.floor_times(worker_count);
    std::vector<int> ids(worker_count);
    std::iota(ids.begin(), ids.end(), 0);
    RngStream rng = derive_stream(seed, StreamKind::byzantine_ids);
    for (std::int64_t i = 0; i < count; ++i) {
        const auto j = i + static_cast<std::int64_t>(
                               rng.uniform_below(static_cast<std::uint64_t>(worker_count - i)));
        std::swap(ids[i], ids[j]);
    }
    ids.resize(count);
    std::sort(ids.begin(), ids.end());
    return ids;
}

Engine::Engine(const RunConfig& cfg, const StochasticProblem& problem, EngineOptions opts)
    : cfg_(cfg), problem_(problem), opts_(opts) {
    params_ = compute_constants(cfg.worker_count, cfg.delta, problem.deviation_bound(),
                                cfg.batch_size, cfg.alpha);
    params_.alpha_exact = cfg.alpha_exact;
    eta_ = resolved_eta(cfg, problem);
    byzantine_ids_ = pick_byzantine_ids(cfg.worker_count, cfg.alpha_exact, cfg.seed);
    if (!byzantine_ids_.empty() && !cfg.attack.has_value())
        throw std::invalid_argument("engine: floor(alpha K) >= 1 but no attack configured");
}

RunResult Engine::run() {
    RunResult result;
    Vec x = cfg_.initial_point.empty() ? Vec(problem_.dimension(), 1.0) : cfg_.initial_point;
    check_dimension(x, problem_.dimension(), "initial point");

    result.initial_grad_norm_sq = norm_sq(problem_.full_gradient(x));

    RngStream length_stream = derive_stream(cfg_.seed, StreamKind::inner_lengths);
    RngStream output_stream = derive_stream(cfg_.seed, StreamKind::output_selection);
    // Drawn up front: the selection is independent of the trajectory.
    const int selected =
        1 + static_cast<int>(output_stream.uniform_below(static_cast<std::uint64_t>(cfg_.epoch_count)));

    const std::int64_t cap = cfg_.effective_inner_cap();
    const AttackSpec* attack = cfg_.attack ? &*cfg_.attack : nullptr;
    std::int64_t server_cum = 0;
    std::int64_t worker_cum = 0;
    double wall_cum_ms = 0.0;
    double min_grad = std::numeric_limits<double>::infinity();
    bool early_stop = false;

    for (int t = 1; t <= cfg_.epoch_count && !early_stop; ++t) {
        const auto epoch_start = std::chrono::steady_clock::now();
        EpochRecord rec;
        rec.t = t;

        const auto reports = collect_reports(problem_, x, params_, byzantine_ids_, attack,
                                             cfg_.seed, static_cast<std::uint64_t>(t));
        FilterOutcome outcome;
        if (cfg_.baseline == BaselineMode::naive_mean) {
            outcome = naive_mean_aggregate(reports);
            rec.rule = 0;
        } else {
            try {
                outcome = filter_and_aggregate(reports, params_);
            } catch (const HonestMajorityViolation& e) {
                result.status = RunStatus::honest_majority_violation;
                result.diagnostic = e.what();
                break;
            }
            rec.rule = outcome.rule_used == FilterRule::rule1 ? 1 : 2;
            if (outcome.rule_used == FilterRule::rule2) ++result.rule2_count;
        }
        rec.accepted_count = static_cast<int>(outcome.accepted.size());
        rec.accept_bits.assign(cfg_.worker_count, false);
        for (int id : outcome.accepted) rec.accept_bits[id] = true;
        worker_cum += cfg_.batch_size;

        std::int64_t n_t = opts_.forced_inner_length ? *opts_.forced_inner_length
                                                     : sample_inner_length(cfg_.batch_size, length_stream);
        if (n_t > cap) {
            n_t = cap;
            rec.capped = true;
            ++result.capped_epochs;
        }

        RngStream inner_stream =
            derive_stream(cfg_.seed, StreamKind::inner_loop, static_cast<std::uint64_t>(t));
        const Vec anchor = x;
        std::int64_t executed = 0;
        for (std::int64_t n = 0; n < n_t; ++n) {
            InnerStep step = inner_update(x, anchor, outcome.aggregate, problem_, eta_, inner_stream);
            ++executed;
            x = std::move(step.x_next);
            if (!step.finite) {
                result.status = RunStatus::diverged;
                result.diagnostic = "non-finite iterate at epoch " + std::to_string(t) +
                                    ", inner step " + std::to_string(n + 1);
                early_stop = true;
                break;
            }
        }
        server_cum += executed;
        result.total_gradient_evals_server += 2 * executed;
        rec.inner_length = executed;
        rec.server_samples_cum = server_cum;
        rec.worker_samples_cum = worker_cum;

        if (all_finite(x)) {
            rec.grad_norm_sq = norm_sq(problem_.full_gradient(x));
            rec.f_value = problem_.objective(x);
        } else {
            rec.grad_norm_sq = std::numeric_limits<double>::quiet_NaN();
            rec.f_value = std::numeric_limits<double>::quiet_NaN();
        }
        min_grad = std::min(min_grad, rec.grad_norm_sq);

        if (cfg_.record_wall_time) {
            wall_cum_ms += std::chrono::duration<double, std::milli>(
                               std::chrono::steady_clock::now() - epoch_start)
                               .count();
            rec.wall_ms = wall_cum_ms;
        }
        result.trace.records.push_back(std::move(rec));

        if (!early_stop && result.status == RunStatus::ok && norm(x) > kDivergenceNormGuard) {
            result.status = RunStatus::diverged;
            result.diagnostic =
                "iterate norm exceeded " + std::to_string(kDivergenceNormGuard) + " at epoch " +
                std::to_string(t);
            early_stop = true;
        }
        if (t == selected) result.output = x;
    }

    result.total_server_samples = server_cum;
    result.total_worker_samples = worker_cum;
    const bool complete = static_cast<int>(result.trace.records.size()) == cfg_.epoch_count &&
                          result.status == RunStatus::ok;
    result.selected_epoch = complete ? selected : static_cast<int>(result.trace.records.size());
    if (!complete) result.output = x;

    if (!result.trace.records.empty()) {
        result.min_grad_norm_sq = min_grad;
        result.final_grad_norm_sq = result.trace.records.back().grad_norm_sq;
    } else {
        result.min_grad_norm_sq = result.initial_grad_norm_sq;
        result.final_grad_norm_sq = result.initial_grad_norm_sq;
    }

    // No-progress detector: the run never brought the exact gradient below
    // a large multiple of its starting value (and sits above the noise
    // scale), which is how a bounded attack shows up under the naive mean.
    if (result.status == RunStatus::ok) {
        const double v = problem_.deviation_bound();
        const double floor_sq = std::max(100.0 * result.initial_grad_norm_sq, 10.0 * v * v);
        if (!(result.min_grad_norm_sq <= floor_sq) && floor_sq > 0.0) {
            result.status = RunStatus::diverged;
            result.diagnostic = "no progress: min ||grad f||^2 stayed above " +
                                std::to_string(floor_sq);
        }
    }
    return result;
}

}  // namespace bsvrg
