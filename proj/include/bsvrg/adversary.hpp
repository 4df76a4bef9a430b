// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bsvrg/problem.hpp"
#include "bsvrg/rng.hpp"
#include "bsvrg/vec.hpp"

namespace bsvrg {

// One worker's per-epoch report.  `honest` is ground truth visible to the
// harness and verification code only; the filter never reads it.
struct WorkerReport {
    int worker_id = 0;
    Vec vector;
    bool honest = true;
};

enum class AttackStrategy {
    gaussian_blast,          // true gradient + magnitude * random unit direction
    sign_flip,               // -magnitude * true gradient
    inside_threshold_drift,  // honest mean + 0.99 * (2 T_mu) * u, colluding evasion
    zero_vector,
    median_copycat,          // replay the median the filter would pick among honest reports
};

enum class AttackKnowledge { blind, omniscient };

struct AttackSpec {
    AttackStrategy strategy = AttackStrategy::zero_vector;
    double magnitude = 0.0;
    AttackKnowledge knowledge = AttackKnowledge::blind;
};

// Strategies that read honest traffic or the true gradient beyond x0.
bool requires_omniscient(AttackStrategy s);

std::string attack_strategy_name(AttackStrategy s);
std::optional<AttackStrategy> parse_attack_strategy(const std::string& name);

// What an attacker may observe in the current epoch.  Blind strategies read
// only x0; the omniscient fields are populated by the harness regardless and
// guarded by the knowledge check in forge_report.
struct EpochContext {
    const Vec* x0 = nullptr;
    const Vec* true_gradient = nullptr;                     // omniscient
    const Vec* honest_mean = nullptr;                       // omniscient
    const std::vector<WorkerReport>* honest_reports = nullptr;  // omniscient
    double rule1_radius = 0.0;                              // T_mu, a public filter constant
    double deviation_bound = 0.0;                           // V, a public filter constant
};

// Mean of B fresh stochastic gradients at x0 (the report an honest worker
// pushes to the server).
WorkerReport honest_report(const StochasticProblem& problem, const Vec& x0, int batch_size,
                           int worker_id, RngStream& rng);

WorkerReport forge_report(const AttackSpec& attack, const EpochContext& ctx, int worker_id,
                          RngStream& rng);

}  // namespace bsvrg
