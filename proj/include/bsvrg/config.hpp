// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bsvrg/adversary.hpp"
#include "bsvrg/decimal.hpp"
#include "bsvrg/problem.hpp"
#include "bsvrg/vec.hpp"

namespace bsvrg {

enum class ProblemKind { quadratic, logistic };
enum class BaselineMode { filtered, naive_mean };

struct ProblemSpec {
    ProblemKind kind = ProblemKind::quadratic;
    std::size_t dimension = 10;
    // quadratic
    double noise_bound = 1.0;
    Vec center;                // empty = origin
    // logistic
    std::size_t sample_count = 32;   // m
    double lambda = 0.1;
    double label_noise = 0.0;
    std::uint64_t dataset_seed = 1;
};

struct RunConfig {
    ProblemSpec problem;
    int worker_count = 0;            // K
    double alpha = 0.0;
    DecimalFraction alpha_exact{0, 1};
    std::optional<AttackSpec> attack;  // required when floor(alpha*K) >= 1
    int batch_size = 0;              // B
    int epoch_count = 0;             // T
    std::optional<double> eta_override;
    double delta = 0.0;
    std::optional<double> epsilon_target;
    std::uint64_t seed = 0;
    std::optional<std::int64_t> inner_length_cap;  // default 50*B
    BaselineMode baseline = BaselineMode::filtered;
    bool record_wall_time = false;
    std::string output_dir;          // empty: BSVRG_OUT env var, else "."
    std::string run_name = "run";

    Vec initial_point;               // empty = all-ones

    std::int64_t effective_inner_cap() const {
        return inner_length_cap ? *inner_length_cap : 50LL * batch_size;
    }
};

struct ParseResult {
    std::optional<RunConfig> config;
    std::vector<std::string> errors;  // all errors, not just the first

    bool ok() const { return errors.empty() && config.has_value(); }
};

// Parses the flat key = value run-config format (see README for the schema).
// Collects every error instead of stopping at the first; unknown and
// duplicate keys are rejected.
ParseResult parse_config(const std::string& text);
ParseResult parse_config_file(const std::string& path);

std::unique_ptr<StochasticProblem> make_problem(const ProblemSpec& spec);

// Resolved step size: the override if present, else 1/(3 L B^{2/3}).
double resolved_eta(const RunConfig& cfg, const StochasticProblem& problem);

// Canonical "key = value" serialization of the resolved config; the sweep
// row hash is FNV-1a64 of this string.
std::string canonical_config(const RunConfig& cfg);
std::uint64_t config_hash(const RunConfig& cfg);

}  // namespace bsvrg
