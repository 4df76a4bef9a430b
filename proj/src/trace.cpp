// SPDX-License-Identifier: Apache-2.0
#include "bsvrg/trace.hpp"

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace bsvrg {

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) return "nan";
    return std::string(buf, ptr);
}

std::string accept_bitmap_hex(const std::vector<bool>& bits) {
    static const char* digits = "0123456789abcdef";
    const std::size_t nibbles = (bits.size() + 3) / 4;
    std::string out;
    out.reserve(nibbles);
    for (std::size_t n = nibbles; n-- > 0;) {
        int v = 0;
        for (int j = 3; j >= 0; --j) {
            const std::size_t bit = n * 4 + static_cast<std::size_t>(j);
            v <<= 1;
            if (bit < bits.size() && bits[bit]) v |= 1;
        }
        out.push_back(digits[v]);
    }
    return out.empty() ? "0" : out;
}

void write_trace_csv(std::ostream& out, const RunTrace& trace) {
    out << kTraceCsvHeader << "\n";
    for (const auto& r : trace.records) {
        out << r.t << ',' << format_double(r.grad_norm_sq) << ',' << format_double(r.f_value)
            << ',' << r.inner_length << ',' << r.rule << ',' << r.accepted_count << ','
            << accept_bitmap_hex(r.accept_bits) << ',' << r.server_samples_cum << ','
            << r.worker_samples_cum << ',' << format_double(r.wall_ms) << "\n";
    }
}

nlohmann::json summary_json(const RunConfig& cfg, const RunResult& result) {
    nlohmann::json j;
    j["version"] = kVersion;
    j["status"] = run_status_name(result.status);
    if (!result.diagnostic.empty()) j["diagnostic"] = result.diagnostic;
    j["config"] = canonical_config(cfg);
    j["config_hash"] = config_hash(cfg);
    j["selected_epoch"] = result.selected_epoch;
    j["epochs_completed"] = result.trace.records.size();
    j["total_server_samples"] = result.total_server_samples;
    j["total_worker_samples"] = result.total_worker_samples;
    j["total_gradient_evals_server"] = result.total_gradient_evals_server;
    j["rule2_count"] = result.rule2_count;
    j["capped_epochs"] = result.capped_epochs;
    j["initial_grad_norm_sq"] = result.initial_grad_norm_sq;
    j["min_grad_norm_sq"] = result.min_grad_norm_sq;
    j["final_grad_norm_sq"] = result.final_grad_norm_sq;
    j["output_point"] = result.output;
    if (cfg.epsilon_target) {
        j["epsilon_target"] = *cfg.epsilon_target;
        bool reached = false;
        std::int64_t samples = 0;
        for (const auto& r : result.trace.records) {
            if (r.grad_norm_sq <= *cfg.epsilon_target) {
                reached = true;
                // Per-node gradient computations up to this epoch: B per epoch
                // on the workers plus the executed inner steps on the server.
                samples = r.worker_samples_cum + r.server_samples_cum;
                break;
            }
        }
        j["target_reached"] = reached;
        if (reached) j["samples_to_target"] = samples;
    }
    return j;
}

std::string resolve_output_dir(const RunConfig& cfg) {
    if (!cfg.output_dir.empty()) return cfg.output_dir;
    if (const char* env = std::getenv("BSVRG_OUT"); env != nullptr && *env != '\0') return env;
    return ".";
}

RunArtifacts persist_run(const std::string& dir, const RunConfig& cfg, const RunResult& result) {
    std::filesystem::create_directories(dir);
    RunArtifacts paths;
    paths.trace_path = dir + "/" + cfg.run_name + "_trace.csv";
    paths.summary_path = dir + "/" + cfg.run_name + "_summary.json";

    std::ofstream trace_out(paths.trace_path, std::ios::binary);
    if (!trace_out) throw std::runtime_error("cannot write trace file: " + paths.trace_path);
    write_trace_csv(trace_out, result.trace);

    std::ofstream summary_out(paths.summary_path, std::ios::binary);
    if (!summary_out) throw std::runtime_error("cannot write summary file: " + paths.summary_path);
    summary_out << summary_json(cfg, result).dump(2) << "\n";
    return paths;
}

}  // namespace bsvrg
