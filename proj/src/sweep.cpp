// SPDX-License-Identifier: Apache-2.0
#include "bsvrg/sweep.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>

#include "bsvrg/parallel.hpp"
#include "bsvrg/trace.hpp"

namespace bsvrg {
namespace {

const std::vector<std::string>& sweepable_keys() {
    static const std::vector<std::string> keys = {"alpha", "B", "K", "seed", "byzantine_strategy"};
    return keys;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

}  // namespace

GridExpansion expand_grid(const std::string& grid_text) {
    GridExpansion out;
    struct Line {
        std::vector<std::string> variants;
    };
    std::vector<Line> lines;
    std::stringstream ss(grid_text);
    std::string raw;
    std::size_t combinations = 1;
    while (std::getline(ss, raw)) {
        Line line;
        std::string stripped = raw;
        const auto hash = stripped.find('#');
        if (hash != std::string::npos) stripped = stripped.substr(0, hash);
        const auto eq = stripped.find('=');
        bool expanded = false;
        if (eq != std::string::npos) {
            const std::string key = trim(stripped.substr(0, eq));
            const std::string value = trim(stripped.substr(eq + 1));
            const auto& keys = sweepable_keys();
            if (std::find(keys.begin(), keys.end(), key) != keys.end() &&
                value.find(',') != std::string::npos) {
                std::stringstream vs(value);
                std::string item;
                while (std::getline(vs, item, ',')) {
                    item = trim(item);
                    if (!item.empty()) line.variants.push_back(key + " = " + item);
                }
                expanded = !line.variants.empty();
            }
        }
        if (!expanded) line.variants.push_back(raw);
        combinations *= line.variants.size();
        if (combinations > 100000) {
            out.errors.push_back("grid expands to more than 100000 runs");
            return out;
        }
        lines.push_back(std::move(line));
    }

    std::vector<std::size_t> index(lines.size(), 0);
    while (true) {
        std::string text;
        for (std::size_t i = 0; i < lines.size(); ++i) {
            text += lines[i].variants[index[i]];
            text += "\n";
        }
        out.config_texts.push_back(std::move(text));
        std::size_t i = lines.size();
        while (i > 0) {
            --i;
            if (++index[i] < lines[i].variants.size()) break;
            index[i] = 0;
            if (i == 0) return out;
        }
        if (lines.empty()) return out;
    }
}

SweepRow row_from_result(const RunConfig& cfg, const RunResult& result) {
    SweepRow row;
    row.config_hash = hex64(config_hash(cfg));
    row.alpha = cfg.alpha;
    row.batch_size = cfg.batch_size;
    row.worker_count = cfg.worker_count;
    row.seed = cfg.seed;
    row.attack = cfg.attack ? attack_strategy_name(cfg.attack->strategy) : "none";
    row.status = run_status_name(result.status);
    row.min_grad_norm_sq = result.min_grad_norm_sq;
    row.rule2_count = result.rule2_count;
    row.samples_to_target = -1;
    if (cfg.epsilon_target) {
        for (const auto& r : result.trace.records) {
            if (r.grad_norm_sq <= *cfg.epsilon_target) {
                row.samples_to_target = r.worker_samples_cum + r.server_samples_cum;
                break;
            }
        }
    }
    return row;
}

std::vector<SweepRow> run_sweep(const std::string& grid_text, unsigned threads) {
    const GridExpansion grid = expand_grid(grid_text);
    std::vector<SweepRow> rows;
    for (const auto& e : grid.errors) {
        SweepRow row;
        row.status = "error: " + e;
        rows.push_back(row);
    }
    if (!grid.errors.empty()) return rows;

    parallel_trials<SweepRow>(
        static_cast<std::int64_t>(grid.config_texts.size()),
        [&](std::int64_t i) -> SweepRow {
            const ParseResult parsed = parse_config(grid.config_texts[static_cast<std::size_t>(i)]);
            if (!parsed.ok()) {
                SweepRow row;
                std::string what;
                for (const auto& e : parsed.errors) what += (what.empty() ? "" : "; ") + e;
                row.status = "error: " + what;
                return row;
            }
            try {
                const auto problem = make_problem(parsed.config->problem);
                Engine engine(*parsed.config, *problem);
                return row_from_result(*parsed.config, engine.run());
            } catch (const std::exception& e) {
                SweepRow row = row_from_result(*parsed.config, RunResult{});
                row.status = std::string("error: ") + e.what();
                return row;
            }
        },
        [&](SweepRow row) { rows.push_back(std::move(row)); },
        threads);

    std::sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
        return a.config_hash < b.config_hash;
    });
    return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    out << kSweepCsvHeader << "\n";
    for (const auto& r : rows) {
        // Status strings may carry commas; RFC-style quote them.
        std::string status = r.status;
        if (status.find_first_of(",\"\n") != std::string::npos) {
            std::string quoted = "\"";
            for (char c : status) {
                if (c == '"') quoted += '"';
                quoted += c;
            }
            quoted += '"';
            status = quoted;
        }
        out << r.config_hash << ',' << format_double(r.alpha) << ',' << r.batch_size << ','
            << r.worker_count << ',' << r.seed << ',' << r.attack << ',' << status << ','
            << format_double(r.min_grad_norm_sq) << ',';
        if (r.samples_to_target >= 0) {
            out << r.samples_to_target;
        } else {
            out << "not_reached";
        }
        out << ',' << r.rule2_count << "\n";
    }
}

}  // namespace bsvrg
