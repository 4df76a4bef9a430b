// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

#include "bsvrg/vec.hpp"

namespace bsvrg {

// Deterministic counter-free PRNG stream (xoshiro256** seeded via splitmix64).
// Distributions are hand-rolled so draw sequences are identical across
// platforms and standard-library versions.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed);

    std::uint64_t next_u64();

    // Uniform on [0, 1), 53-bit resolution.
    double uniform01();
    // Uniform on (0, 1]; safe as a log() argument.
    double uniform_pos();
    // Uniform integer in [0, n).
    std::uint64_t uniform_below(std::uint64_t n);

    // Standard normal (Box-Muller, second value cached).
    double normal();
    void fill_normal(Vec& out);

    // Uniform direction on the unit sphere in R^d.
    Vec unit_sphere(std::size_t d);

private:
    std::uint64_t state_[4];
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// Independent named streams derived from one root seed.  Every source of
// randomness in a run gets its own (kind, a, b) coordinate so statistical
// independence between e.g. worker batches and inner-loop lengths is
// structural, not an accident of draw ordering.
enum class StreamKind : std::uint64_t {
    worker_reports = 1,   // a = worker id, b = epoch
    inner_loop = 2,       // a = epoch
    inner_lengths = 3,    // N_t draws
    output_selection = 4, // uniform choice of the reported epoch
    byzantine_ids = 5,    // which workers are Byzantine
    dataset = 6,          // synthetic dataset generation
    trial = 7,            // a = Monte Carlo trial index (verification)
};

std::uint64_t derive_seed(std::uint64_t root, StreamKind kind, std::uint64_t a = 0,
                          std::uint64_t b = 0);

inline RngStream derive_stream(std::uint64_t root, StreamKind kind, std::uint64_t a = 0,
                               std::uint64_t b = 0) {
    return RngStream(derive_seed(root, kind, a, b));
}

}  // namespace bsvrg
