// SPDX-License-Identifier: Apache-2.0
#include "bsvrg/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bsvrg {

std::vector<std::string> ConstraintReport::violations() const {
    std::vector<std::string> v;
    if (!window_lower) v.push_back("window_lower: delta*B/(2(1-2delta)) > log(2K/delta)");
    if (!window_upper) v.push_back("window_upper: log(2K/delta) > B/2");
    if (!delta_cap) v.push_back("delta_cap: delta > 1/(25KB)");
    return v;
}

ConstraintReport validate(int worker_count, int batch_size, double delta) {
    if (worker_count < 1) throw std::invalid_argument("validate: K must be >= 1");
    if (batch_size < 1) throw std::invalid_argument("validate: B must be >= 1");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("validate: delta must be in (0,1)");

    ConstraintReport r;
    r.log_ratio = std::log(2.0 * static_cast<double>(worker_count) / delta);
    r.half_batch = 0.5 * static_cast<double>(batch_size);
    r.delta_limit = 1.0 / (25.0 * static_cast<double>(worker_count) * static_cast<double>(batch_size));
    if (delta < 0.5) {
        r.lower_exponent = delta * static_cast<double>(batch_size) / (2.0 * (1.0 - 2.0 * delta));
        r.window_lower = r.lower_exponent <= r.log_ratio;
    } else {
        // Denominator non-positive: the constraint cannot hold.
        r.lower_exponent = std::numeric_limits<double>::infinity();
        r.window_lower = false;
    }
    r.window_upper = r.log_ratio <= r.half_batch;
    r.delta_cap = delta <= r.delta_limit;
    return r;
}

double default_step_size(double smoothness, int batch_size) {
    if (!(smoothness > 0.0)) throw std::invalid_argument("step size: L must be > 0");
    if (batch_size < 1) throw std::invalid_argument("step size: B must be >= 1");
    return 1.0 / (3.0 * smoothness * std::pow(static_cast<double>(batch_size), 2.0 / 3.0));
}

double convergence_bound(double smoothness, double f_gap, int epoch_count, int batch_size,
                         double deviation_bound, int worker_count, double alpha,
                         double concentration) {
    const double b = static_cast<double>(batch_size);
    const double one_minus_a = 1.0 - alpha;
    const double v2 = deviation_bound * deviation_bound;
    const double term1 = 12.0 * smoothness * f_gap /
                         (static_cast<double>(epoch_count) * std::cbrt(b));
    const double term2 = 32.0 * v2 / (one_minus_a * one_minus_a * static_cast<double>(worker_count) * b);
    const double term3 = 2176.0 * alpha * alpha * v2 * concentration / (one_minus_a * one_minus_a * b);
    return term1 + term2 + term3;
}

namespace {

// Largest delta in (0, 1/2) with delta*B/(2(1-2delta)) <= log(2K/delta).
// The gap is strictly decreasing in delta, so bisection applies.
double largest_window_delta(int worker_count, int batch_size) {
    auto gap = [&](double delta) {
        return std::log(2.0 * static_cast<double>(worker_count) / delta) -
               delta * static_cast<double>(batch_size) / (2.0 * (1.0 - 2.0 * delta));
    };
    double lo = 1e-12;
    double hi = 0.5 - 1e-12;
    if (gap(lo) < 0.0) return 0.0;  // empty window
    if (gap(hi) >= 0.0) return hi;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (gap(mid) >= 0.0 ? lo : hi) = mid;
    }
    return lo;
}

int ceil_positive(double x) {
    if (x <= 0.0) return 0;
    if (x > 2e9) throw std::invalid_argument("schedule: size overflow; epsilon too small");
    return static_cast<int>(std::ceil(x));
}

}  // namespace

HyperParams suggest_schedule(double epsilon, int worker_count, double alpha, double smoothness,
                             double deviation_bound, double f_gap_estimate) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("schedule: epsilon must be > 0");
    if (worker_count < 1) throw std::invalid_argument("schedule: K must be >= 1");
    if (!(alpha >= 0.0 && alpha < 0.5)) throw std::invalid_argument("schedule: alpha in [0, 1/2)");
    if (!(smoothness > 0.0)) throw std::invalid_argument("schedule: L must be > 0");
    if (deviation_bound < 0.0) throw std::invalid_argument("schedule: V must be >= 0");
    if (f_gap_estimate < 0.0) throw std::invalid_argument("schedule: f_gap must be >= 0");

    const double k = static_cast<double>(worker_count);
    const double one_minus_a_sq = (1.0 - alpha) * (1.0 - alpha);
    const double v2 = deviation_bound * deviation_bound;

    // C depends on delta <= 1/(25KB) and B depends on C; iterate the fixed
    // point from the B = 16 floor.  C grows logarithmically in B, so the
    // iteration is monotone and settles within a few passes.
    double c = 2.0 * std::log(50.0 * k * k * 16.0);
    int batch = 16;
    double delta = 0.0;
    for (int pass = 0; pass < 16; ++pass) {
        const int b_mean = ceil_positive(96.0 * v2 / (one_minus_a_sq * k * epsilon));
        const int b_byz = ceil_positive(6528.0 * alpha * alpha * v2 * c / (one_minus_a_sq * epsilon));
        const int next = std::max({16, b_mean, b_byz});
        delta = std::min(1.0 / (25.0 * k * static_cast<double>(next)),
                         largest_window_delta(worker_count, next));
        if (delta <= 0.0) delta = 1.0 / (25.0 * k * static_cast<double>(next));
        c = 2.0 * std::log(2.0 * k / delta);
        if (next == batch && pass > 0) break;
        batch = next;
    }

    HyperParams h;
    h.worker_count = worker_count;
    h.alpha = alpha;
    h.batch_size = batch;
    h.epoch_count = std::max(
        1, ceil_positive(36.0 * smoothness * f_gap_estimate /
                         (epsilon * std::cbrt(static_cast<double>(batch)))));
    h.eta = default_step_size(smoothness, batch);
    h.delta = delta;
    h.concentration = c;
    h.rule1_radius = 2.0 * deviation_bound * std::sqrt(c / static_cast<double>(batch));
    h.epsilon_target = epsilon;
    h.bound_value = convergence_bound(smoothness, f_gap_estimate, h.epoch_count, batch,
                                      deviation_bound, worker_count, alpha, c);

    const ConstraintReport cr = validate(worker_count, batch, delta);
    h.violations = cr.violations();
    if (batch < 16) h.violations.push_back("batch_floor: B < 16");
    return h;
}

}  // namespace bsvrg
