// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "bsvrg/adversary.hpp"
#include "bsvrg/decimal.hpp"
#include "bsvrg/vec.hpp"

namespace bsvrg {

// Constants of the filtering step.  C and the rule-1 radius are recomputed
// from their definitions on every access, never stored separately.
struct FilterParams {
    int worker_count = 1;            // K
    double alpha = 0.0;              // Byzantine fraction bound, in [0, 1/2)
    DecimalFraction alpha_exact{0, 1};
    double deviation_bound = 0.0;    // V
    int batch_size = 1;              // B
    double delta = 0.5;              // confidence parameter, in (0,1)

    double concentration() const;    // C = 2 log(2K / delta)
    double rule1_radius() const;     // T_mu = 2 V sqrt(C / B)
};

// Validates ranges and fills the derived constants.
FilterParams compute_constants(int worker_count, double delta, double deviation_bound,
                               int batch_size, double alpha = 0.0);

enum class FilterRule { rule1, rule2 };

struct FilterOutcome {
    std::vector<int> accepted;   // G_t, ascending worker ids
    int median_id = -1;
    FilterRule rule_used = FilterRule::rule1;
    Vec aggregate;               // mu_t, mean over accepted reports
};

// Raised when even the rule-2 fallback cannot find a majority ball; under the
// model assumptions (honest majority, deviations bounded by V) this cannot
// happen.
struct HonestMajorityViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Smallest worker id whose radius-`radius` ball contains strictly more than
// half of all reports (itself included); nullopt when no such id exists.
// Reports with non-finite entries never qualify and are never counted.
std::optional<int> select_median(const std::vector<WorkerReport>& reports, double radius);

// The full filtering step: rule-1 median at radius T_mu with membership at
// 2 T_mu; if that yields no median or fewer than (1-alpha)K members, rule 2
// retries with radii 2V / 4V.  The aggregate is the mean of the accepted
// reports, summed in ascending worker-id order.
FilterOutcome filter_and_aggregate(const std::vector<WorkerReport>& reports,
                                   const FilterParams& params);

// Baseline aggregate with filtering disabled: the mean of all K reports.
FilterOutcome naive_mean_aggregate(const std::vector<WorkerReport>& reports);

}  // namespace bsvrg
