// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <ostream>
#include <string>

#include <json.hpp>

#include "bsvrg/config.hpp"
#include "bsvrg/engine.hpp"

namespace bsvrg {

inline constexpr const char* kVersion = "bsvrg 0.1.0";

// Pinned column set; golden-file tested.
inline constexpr const char* kTraceCsvHeader =
    "t,grad_norm_sq,f_value,N_t,rule,accepted_count,accept_bitmap,"
    "server_samples_cum,worker_samples_cum,wall_ms";

// Shortest round-trip decimal form; identical bytes for identical doubles.
std::string format_double(double v);

// Per-worker accept bits as hex, worker 0 in the least significant bit.
std::string accept_bitmap_hex(const std::vector<bool>& bits);

void write_trace_csv(std::ostream& out, const RunTrace& trace);

// Run summary with the fully resolved config and version string embedded.
nlohmann::json summary_json(const RunConfig& cfg, const RunResult& result);

// Writes <run_name>_trace.csv and <run_name>_summary.json under dir.
struct RunArtifacts {
    std::string trace_path;
    std::string summary_path;
};
RunArtifacts persist_run(const std::string& dir, const RunConfig& cfg, const RunResult& result);

// Default output directory: config value, else $BSVRG_OUT, else ".".
std::string resolve_output_dir(const RunConfig& cfg);

}  // namespace bsvrg
