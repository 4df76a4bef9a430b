// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bsvrg/config.hpp"
#include "bsvrg/engine.hpp"

namespace bsvrg {

// A grid file is an ordinary run config in which alpha, B, K, seed and
// byzantine_strategy may carry comma-separated value lists; the sweep runs
// the cartesian product.
struct GridExpansion {
    std::vector<std::string> config_texts;
    std::vector<std::string> errors;
};
GridExpansion expand_grid(const std::string& grid_text);

struct SweepRow {
    std::string config_hash;  // hex
    double alpha = 0.0;
    int batch_size = 0;
    int worker_count = 0;
    std::uint64_t seed = 0;
    std::string attack = "none";
    std::string status;       // ok/diverged/... or error:<what>
    double min_grad_norm_sq = 0.0;
    std::int64_t samples_to_target = -1;  // -1: not reached / no target
    int rule2_count = 0;
};

inline constexpr const char* kSweepCsvHeader =
    "config_hash,alpha,B,K,seed,attack,status,min_grad_norm_sq,samples_to_target,rule2_count";

// Runs every expanded config (failures become per-row status entries) and
// returns rows sorted by config hash, so file content does not depend on
// scheduling.
std::vector<SweepRow> run_sweep(const std::string& grid_text, unsigned threads = 0);

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

SweepRow row_from_result(const RunConfig& cfg, const RunResult& result);

}  // namespace bsvrg
