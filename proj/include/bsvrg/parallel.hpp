// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <thread>
#include <vector>

namespace bsvrg {

// Runs fn(trial_index) for trial_index in [0, trials) across threads and
// hands the per-trial results to `combine` in strict index order, so the
// aggregate is bit-identical no matter how many threads run.  Each trial must
// derive its own RNG stream from its index.
template <typename Result, typename Fn, typename Combine>
void parallel_trials(std::int64_t trials, Fn fn, Combine combine, unsigned threads = 0) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    const auto n_threads = static_cast<std::int64_t>(threads);
    const std::int64_t block = std::max<std::int64_t>(1, (trials + n_threads - 1) / n_threads);

    std::vector<std::future<std::vector<Result>>> futures;
    for (std::int64_t begin = 0; begin < trials; begin += block) {
        const std::int64_t end = std::min(trials, begin + block);
        futures.push_back(std::async(std::launch::async, [begin, end, &fn] {
            std::vector<Result> out;
            out.reserve(static_cast<std::size_t>(end - begin));
            for (std::int64_t i = begin; i < end; ++i) out.push_back(fn(i));
            return out;
        }));
    }
    for (auto& f : futures) {
        for (auto& r : f.get()) combine(r);
    }
}

// Order-independent compensated accumulator (Kahan-Babuska).
struct CompensatedSum {
    double sum = 0.0;
    double c = 0.0;

    void add(double x) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x)) {
            c += (sum - t) + x;
        } else {
            c += (x - t) + sum;
        }
        sum = t;
    }
    double value() const { return sum + c; }
};

}  // namespace bsvrg
