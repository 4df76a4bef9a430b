// SPDX-License-Identifier: Apache-2.0
#include "bsvrg/filter.hpp"

#include <algorithm>
#include <cmath>

namespace bsvrg {

double FilterParams::concentration() const {
    return 2.0 * std::log(2.0 * static_cast<double>(worker_count) / delta);
}

double FilterParams::rule1_radius() const {
    return 2.0 * deviation_bound * std::sqrt(concentration() / static_cast<double>(batch_size));
}

FilterParams compute_constants(int worker_count, double delta, double deviation_bound,
                               int batch_size, double alpha) {
    if (worker_count < 1) throw std::invalid_argument("filter: K must be >= 1");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("filter: delta must be in (0,1)");
    if (deviation_bound < 0.0) throw std::invalid_argument("filter: V must be >= 0");
    if (batch_size < 1) throw std::invalid_argument("filter: B must be >= 1");
    if (!(alpha >= 0.0 && alpha < 0.5)) throw std::invalid_argument("filter: alpha must be in [0, 1/2)");
    FilterParams p;
    p.worker_count = worker_count;
    p.alpha = alpha;
    p.alpha_exact = DecimalFraction::from_double(alpha);
    p.deviation_bound = deviation_bound;
    p.batch_size = batch_size;
    p.delta = delta;
    return p;
}

namespace {

// Sorted copy: the outcome must not depend on arrival order.
std::vector<const WorkerReport*> by_worker_id(const std::vector<WorkerReport>& reports) {
    std::vector<const WorkerReport*> out;
    out.reserve(reports.size());
    for (const auto& r : reports) out.push_back(&r);
    std::sort(out.begin(), out.end(),
              [](const WorkerReport* a, const WorkerReport* b) { return a->worker_id < b->worker_id; });
    return out;
}

std::optional<int> median_of(const std::vector<const WorkerReport*>& sorted, double radius) {
    const std::size_t k_total = sorted.size();
    for (const auto* candidate : sorted) {
        if (!all_finite(candidate->vector)) continue;
        std::size_t count = 0;
        for (const auto* other : sorted) {
            // NaN distances compare false, so non-finite reports never count.
            if (distance(other->vector, candidate->vector) <= radius) ++count;
        }
        if (2 * count > k_total) return candidate->worker_id;
    }
    return std::nullopt;
}

Vec mean_of_accepted(const std::vector<const WorkerReport*>& sorted,
                     const std::vector<int>& accepted) {
    Vec sum(sorted.front()->vector.size(), 0.0);
    std::size_t i = 0;
    for (const auto* r : sorted) {  // ascending worker-id order, bit-reproducible
        if (i < accepted.size() && r->worker_id == accepted[i]) {
            axpy(1.0, r->vector, sum);
            ++i;
        }
    }
    const double inv = 1.0 / static_cast<double>(accepted.size());
    for (auto& v : sum) v *= inv;
    return sum;
}

}  // namespace

std::optional<int> select_median(const std::vector<WorkerReport>& reports, double radius) {
    if (reports.empty()) return std::nullopt;
    return median_of(by_worker_id(reports), radius);
}

FilterOutcome filter_and_aggregate(const std::vector<WorkerReport>& reports,
                                   const FilterParams& params) {
    if (static_cast<int>(reports.size()) != params.worker_count)
        throw std::invalid_argument("filter: report count does not match K");
    const auto sorted = by_worker_id(reports);
    const Vec* median_vec = nullptr;

    auto members_within = [&](const Vec& center, double radius) {
        std::vector<int> ids;
        for (const auto* r : sorted) {
            if (distance(r->vector, center) <= radius) ids.push_back(r->worker_id);
        }
        return ids;
    };
    auto vector_of = [&](int id) -> const Vec& {
        for (const auto* r : sorted) {
            if (r->worker_id == id) return r->vector;
        }
        throw std::logic_error("filter: median id not found");
    };

    FilterOutcome out;
    const double t_mu = params.rule1_radius();
    if (auto med = median_of(sorted, t_mu)) {
        out.median_id = *med;
        out.rule_used = FilterRule::rule1;
        out.accepted = members_within(vector_of(*med), 2.0 * t_mu);
        median_vec = &vector_of(*med);
    }

    const bool quota_ok =
        median_vec != nullptr &&
        params.alpha_exact.quota_met(static_cast<std::int64_t>(out.accepted.size()),
                                     params.worker_count);
    if (!quota_ok) {
        const double v = params.deviation_bound;
        auto med = median_of(sorted, 2.0 * v);
        if (!med) {
            throw HonestMajorityViolation(
                "no majority ball at radius 2V: honest-majority assumption violated");
        }
        out.median_id = *med;
        out.rule_used = FilterRule::rule2;
        out.accepted = members_within(vector_of(*med), 4.0 * v);
    }

    out.aggregate = mean_of_accepted(sorted, out.accepted);
    return out;
}

FilterOutcome naive_mean_aggregate(const std::vector<WorkerReport>& reports) {
    if (reports.empty()) throw std::invalid_argument("naive mean: no reports");
    const auto sorted = by_worker_id(reports);
    FilterOutcome out;
    out.median_id = sorted.front()->worker_id;
    out.rule_used = FilterRule::rule1;
    for (const auto* r : sorted) out.accepted.push_back(r->worker_id);
    out.aggregate = mean_of_accepted(sorted, out.accepted);
    return out;
}

}  // namespace bsvrg
