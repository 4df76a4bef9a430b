// SPDX-License-Identifier: Apache-2.0
#include "bsvrg/adversary.hpp"

#include <cmath>
#include <stdexcept>

#include "bsvrg/filter.hpp"

namespace bsvrg {

bool requires_omniscient(AttackStrategy s) {
    return s == AttackStrategy::inside_threshold_drift || s == AttackStrategy::median_copycat;
}

std::string attack_strategy_name(AttackStrategy s) {
    switch (s) {
        case AttackStrategy::gaussian_blast: return "gaussian_blast";
        case AttackStrategy::sign_flip: return "sign_flip";
        case AttackStrategy::inside_threshold_drift: return "inside_threshold_drift";
        case AttackStrategy::zero_vector: return "zero_vector";
        case AttackStrategy::median_copycat: return "median_copycat";
    }
    return "unknown";
}

std::optional<AttackStrategy> parse_attack_strategy(const std::string& name) {
    if (name == "gaussian_blast") return AttackStrategy::gaussian_blast;
    if (name == "sign_flip") return AttackStrategy::sign_flip;
    if (name == "inside_threshold_drift") return AttackStrategy::inside_threshold_drift;
    if (name == "zero_vector") return AttackStrategy::zero_vector;
    if (name == "median_copycat") return AttackStrategy::median_copycat;
    return std::nullopt;
}

WorkerReport honest_report(const StochasticProblem& problem, const Vec& x0, int batch_size,
                           int worker_id, RngStream& rng) {
    if (batch_size < 1) throw std::invalid_argument("honest_report: B must be >= 1");
    check_dimension(x0, problem.dimension(), "honest_report");
    Vec sum(problem.dimension(), 0.0);
    for (int i = 0; i < batch_size; ++i) {
        axpy(1.0, problem.sample_gradient(x0, rng), sum);
    }
    const double inv = 1.0 / static_cast<double>(batch_size);
    for (auto& v : sum) v *= inv;
    return WorkerReport{worker_id, std::move(sum), true};
}

namespace {

// All colluding drift attackers share this direction.
Vec drift_direction(std::size_t d) {
    Vec u(d, 0.0);
    u[0] = 1.0;
    return u;
}

}  // namespace

WorkerReport forge_report(const AttackSpec& attack, const EpochContext& ctx, int worker_id,
                          RngStream& rng) {
    if (attack.magnitude < 0.0) throw std::invalid_argument("attack: magnitude must be >= 0");
    if (requires_omniscient(attack.strategy) && attack.knowledge != AttackKnowledge::omniscient) {
        throw std::invalid_argument("attack: " + attack_strategy_name(attack.strategy) +
                                    " requires knowledge = omniscient");
    }
    if (ctx.x0 == nullptr) throw std::invalid_argument("attack: missing epoch context");
    const std::size_t d = ctx.x0->size();

    Vec v;
    switch (attack.strategy) {
        case AttackStrategy::gaussian_blast: {
            v = *ctx.true_gradient;
            const Vec g = rng.unit_sphere(d);
            axpy(attack.magnitude, g, v);
            break;
        }
        case AttackStrategy::sign_flip: {
            v = scaled(*ctx.true_gradient, -attack.magnitude);
            break;
        }
        case AttackStrategy::inside_threshold_drift: {
            // Just inside the rule-1 membership radius: 1% under 2 T_mu.
            v = *ctx.honest_mean;
            axpy(0.99 * 2.0 * ctx.rule1_radius, drift_direction(d), v);
            break;
        }
        case AttackStrategy::zero_vector: {
            v.assign(d, 0.0);
            break;
        }
        case AttackStrategy::median_copycat: {
            const auto& honest = *ctx.honest_reports;
            if (honest.empty()) throw std::invalid_argument("attack: no honest reports to copy");
            auto med = select_median(honest, ctx.rule1_radius);
            if (!med) med = select_median(honest, 2.0 * ctx.deviation_bound);
            const int id = med.value_or(honest.front().worker_id);
            for (const auto& r : honest) {
                if (r.worker_id == id) {
                    v = r.vector;
                    break;
                }
            }
            break;
        }
    }
    return WorkerReport{worker_id, std::move(v), false};
}

}  // namespace bsvrg
