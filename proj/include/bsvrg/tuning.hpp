// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

namespace bsvrg {

// Per-constraint verdicts for the (K, B, delta) feasibility window
//   e^{delta B / (2(1-2delta))} <= 2K/delta <= e^{B/2}   and   delta <= 1/(25KB),
// all evaluated in log space.
struct ConstraintReport {
    bool window_lower = false;  // delta B / (2(1-2delta)) <= log(2K/delta)
    bool window_upper = false;  // log(2K/delta) <= B/2
    bool delta_cap = false;     // delta <= 1/(25KB)

    double lower_exponent = 0.0;  // delta B / (2(1-2delta)); +inf when delta >= 1/2
    double log_ratio = 0.0;       // log(2K/delta)
    double half_batch = 0.0;      // B/2
    double delta_limit = 0.0;     // 1/(25KB)

    bool all_ok() const { return window_lower && window_upper && delta_cap; }
    std::vector<std::string> violations() const;
};

ConstraintReport validate(int worker_count, int batch_size, double delta);

// eta = 1 / (3 L B^{2/3})
double default_step_size(double smoothness, int batch_size);

// A full schedule sized from a target accuracy; `violations` empty iff the
// schedule satisfies every constraint (including B >= 16 and the delta window).
struct HyperParams {
    int worker_count = 0;
    double alpha = 0.0;
    int batch_size = 0;
    int epoch_count = 0;
    double eta = 0.0;
    bool eta_overridden = false;
    double delta = 0.0;
    double concentration = 0.0;  // C = 2 log(2K/delta)
    double rule1_radius = 0.0;   // T_mu
    double epsilon_target = 0.0;
    double bound_value = 0.0;    // convergence bound evaluated at these parameters
    std::vector<std::string> violations;

    bool feasible() const { return violations.empty(); }
};

// Right-hand side of the convergence bound:
//   12 L f_gap / (T B^{1/3}) + 32 V^2 / ((1-a)^2 K B) + 2176 a^2 V^2 C / ((1-a)^2 B)
double convergence_bound(double smoothness, double f_gap, int epoch_count, int batch_size,
                         double deviation_bound, int worker_count, double alpha,
                         double concentration);

// Sizes B and T so each bound term is at most epsilon/3, then closes the
// C-B circular dependency by iterating the (delta, C, B) fixed point.
HyperParams suggest_schedule(double epsilon, int worker_count, double alpha, double smoothness,
                             double deviation_bound, double f_gap_estimate);

}  // namespace bsvrg
