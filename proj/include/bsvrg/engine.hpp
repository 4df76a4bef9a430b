// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bsvrg/adversary.hpp"
#include "bsvrg/config.hpp"
#include "bsvrg/filter.hpp"
#include "bsvrg/problem.hpp"
#include "bsvrg/rng.hpp"
#include "bsvrg/vec.hpp"

namespace bsvrg {

// Number of inner iterations: P[N = n] = (1/(B+1)) (B/(B+1))^n for n >= 0,
// so E[N] = B.  Sampled by inversion.
std::int64_t sample_inner_length(int batch_size, RngStream& rng);

struct InnerStep {
    Vec x_next;
    int samples_used = 1;
    bool finite = true;
};

// One variance-reduced step: draws a single fresh xi, evaluates the
// stochastic gradient at x_n and at the anchor x0 under that same xi, and
// moves against v = grad(x_n; xi) - grad(x0; xi) + mu.
InnerStep inner_update(const Vec& x_n, const Vec& x0, const Vec& mu,
                       const StochasticProblem& problem, double eta, RngStream& rng);

// The K per-epoch worker reports at the anchor x0.  Honest workers average B
// fresh stochastic gradients; Byzantine workers run the configured attack.
// Each worker draws from its own (seed, worker, epoch) stream, so the result
// is independent of generation order.
std::vector<WorkerReport> collect_reports(const StochasticProblem& problem, const Vec& x0,
                                          const FilterParams& params,
                                          const std::vector<int>& byzantine_ids,
                                          const AttackSpec* attack, std::uint64_t root_seed,
                                          std::uint64_t epoch_index);

struct EpochRecord {
    int t = 0;
    double grad_norm_sq = 0.0;  // ||grad f(x~_t)||^2, exact full gradient
    double f_value = 0.0;
    std::int64_t inner_length = 0;  // N_t actually executed
    int rule = 0;                   // 1 or 2; 0 in the naive-mean baseline
    int accepted_count = 0;
    std::vector<bool> accept_bits;  // bit k = worker k accepted
    std::int64_t server_samples_cum = 0;
    std::int64_t worker_samples_cum = 0;  // per honest worker
    double wall_ms = 0.0;           // 0 unless wall-time recording is enabled
    bool capped = false;            // N_t draw hit the inner-length cap
};

struct RunTrace {
    std::vector<EpochRecord> records;
};

enum class RunStatus { ok, diverged, honest_majority_violation };

std::string run_status_name(RunStatus s);

struct RunResult {
    RunStatus status = RunStatus::ok;
    std::string diagnostic;
    Vec output;              // x~_a on clean completion, else the last iterate
    int selected_epoch = 0;  // a
    RunTrace trace;
    std::int64_t total_server_samples = 0;
    std::int64_t total_worker_samples = 0;  // per honest worker = T * B
    std::int64_t total_gradient_evals_server = 0;  // raw evaluations, 2 per inner step
    int rule2_count = 0;
    int capped_epochs = 0;
    double initial_grad_norm_sq = 0.0;
    double min_grad_norm_sq = 0.0;
    double final_grad_norm_sq = 0.0;
};

struct EngineOptions {
    // Test hook: pin N_t instead of drawing it.
    std::optional<std::int64_t> forced_inner_length;
};

// Iterate norm beyond which a run is declared diverged.
inline constexpr double kDivergenceNormGuard = 1e6;

class Engine {
public:
    Engine(const RunConfig& cfg, const StochasticProblem& problem, EngineOptions opts = {});

    RunResult run();

    const std::vector<int>& byzantine_ids() const { return byzantine_ids_; }
    const FilterParams& filter_params() const { return params_; }
    double eta() const { return eta_; }

    // floor(alpha K) distinct ids, fixed for the whole run, drawn from the
    // root seed.
    static std::vector<int> pick_byzantine_ids(int worker_count, const DecimalFraction& alpha,
                                               std::uint64_t seed);

private:
    const RunConfig& cfg_;
    const StochasticProblem& problem_;
    EngineOptions opts_;
    FilterParams params_;
    double eta_;
    std::vector<int> byzantine_ids_;
};

}  // namespace bsvrg
