// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "bsvrg/adversary.hpp"
#include "bsvrg/config.hpp"
#include "bsvrg/problem.hpp"
#include "bsvrg/vec.hpp"

namespace bsvrg {

// Monte Carlo checks of the testable concentration and moment bounds behind
// the filtering rule.  Slack policy, fixed and printed with every report:
// probability bounds pass at empirical <= 2 * bound, moment identities pass
// at |lhs - rhs| <= 4 * stderr, and moment bounds pass with no slack (their
// constants are already loose).
enum class LemmaId { concentration_T_mu, error_moment_bound, geom_telescope, pinelis };

std::string lemma_name(LemmaId id);

struct LemmaCheckReport {
    LemmaId lemma_id = LemmaId::concentration_T_mu;
    std::int64_t trials = 0;
    double empirical_value = 0.0;
    double bound_value = 0.0;
    bool pass = false;
    std::string confidence_note;
};

nlohmann::json lemma_report_json(const LemmaCheckReport& report);

// Fraction of trials in which any of the K honest batch means lands farther
// than V sqrt(C/B) from the true gradient; must stay below 2 delta.
LemmaCheckReport check_concentration(const StochasticProblem& problem, const Vec& x,
                                     int worker_count, int batch_size, double delta,
                                     std::int64_t trials, std::uint64_t seed);

// Scenario for the aggregation-error second-moment bound: reports are
// collected at a fixed point and filtered exactly as the engine would.
struct ErrorMomentScenario {
    const StochasticProblem* problem = nullptr;
    Vec x;
    int worker_count = 0;
    double alpha = 0.0;
    std::optional<AttackSpec> attack;
    int batch_size = 0;
    double delta = 0.0;
    bool naive_mean = false;  // power check: replace the filter by the plain mean
};

// Empirical E||mu_t - grad f(x)||^2 against
// 4 V^2 / ((1-a)^2 K B) + 272 a^2 V^2 C / ((1-a)^2 B); refuses infeasible
// (delta, B) pairs.
LemmaCheckReport check_error_moment(const ErrorMomentScenario& scenario, std::int64_t trials,
                                    std::uint64_t seed);

// Bounded deterministic sequences for the geometric telescoping identity.
struct SequenceSpec {
    enum class Kind { geometric, harmonic, constant } kind = Kind::geometric;
    double ratio = 0.5;     // geometric: D_n = ratio^n, requires ratio in (0,1)
    double constant = 1.0;  // constant: D_n = constant

    double at(std::int64_t n) const;
};

// E[D_N - D_{N+1}] versus (1/Gamma - 1)(D_0 - E[D_N]) with
// Gamma = B/(B+1), both sides estimated from the same draws.
LemmaCheckReport check_geom_telescope(int batch_size, const SequenceSpec& seq,
                                      std::int64_t trials, std::uint64_t seed);

// P[||X_1+...+X_N||^2 > 2 log(2/delta) M^2 N] <= delta for iid mean-zero
// vectors bounded by M (uniform on the radius-M sphere here).
LemmaCheckReport check_pinelis(double bound_m, int steps, int dimension, double delta,
                               std::int64_t trials, std::uint64_t seed);

}  // namespace bsvrg
