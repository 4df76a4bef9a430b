// SPDX-License-Identifier: Apache-2.0
#include "bsvrg/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "bsvrg/tuning.hpp"

namespace bsvrg {
namespace {

struct RawEntry {
    std::string value;
    int line = 0;
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

const std::vector<std::string>& known_keys() {
    static const std::vector<std::string> keys = {
        "problem", "d", "noise_bound", "center", "x0", "m", "lambda", "label_noise",
        "dataset_seed", "K", "alpha", "byzantine_strategy", "attack_magnitude",
        "attack_knowledge", "B", "T", "eta", "delta", "epsilon_target", "seed", "n_max",
        "baseline_mode", "record_wall_time", "output_dir", "run_name",
    };
    return keys;
}

class Reader {
public:
    Reader(std::map<std::string, RawEntry> entries, std::vector<std::string>& errors)
        : entries_(std::move(entries)), errors_(errors) {}

    bool has(const std::string& key) const { return entries_.count(key) > 0; }

    std::optional<std::string> raw(const std::string& key) {
        auto it = entries_.find(key);
        if (it == entries_.end()) return std::nullopt;
        return it->second.value;
    }

    template <typename T>
    std::optional<T> integer(const std::string& key) {
        auto r = raw(key);
        if (!r) return std::nullopt;
        T out{};
        const char* begin = r->c_str();
        const char* end = begin + r->size();
        auto [ptr, ec] = std::from_chars(begin, end, out);
        if (ec != std::errc() || ptr != end) {
            fail(key, "expected an integer, got '" + *r + "'");
            return std::nullopt;
        }
        return out;
    }

    std::optional<double> real(const std::string& key) {
        auto r = raw(key);
        if (!r) return std::nullopt;
        char* endp = nullptr;
        const double v = std::strtod(r->c_str(), &endp);
        if (endp != r->c_str() + r->size() || r->empty() || !std::isfinite(v)) {
            fail(key, "expected a finite number, got '" + *r + "'");
            return std::nullopt;
        }
        return v;
    }

    std::optional<bool> boolean(const std::string& key) {
        auto r = raw(key);
        if (!r) return std::nullopt;
        if (*r == "true") return true;
        if (*r == "false") return false;
        fail(key, "expected true or false, got '" + *r + "'");
        return std::nullopt;
    }

    // Scalar broadcast or comma-separated list of exactly `dim` entries.
    std::optional<Vec> point(const std::string& key, std::size_t dim) {
        auto r = raw(key);
        if (!r) return std::nullopt;
        Vec out;
        std::stringstream ss(*r);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            char* endp = nullptr;
            const double v = std::strtod(item.c_str(), &endp);
            if (item.empty() || endp != item.c_str() + item.size() || !std::isfinite(v)) {
                fail(key, "expected a number or comma list, got '" + *r + "'");
                return std::nullopt;
            }
            out.push_back(v);
        }
        if (out.size() == 1) out.assign(dim, out[0]);
        if (out.size() != dim) {
            fail(key, "expected 1 or " + std::to_string(dim) + " entries");
            return std::nullopt;
        }
        return out;
    }

    void fail(const std::string& key, const std::string& message) {
        errors_.push_back(key + ": " + message);
    }
    void fail(const std::string& message) { errors_.push_back(message); }

private:
    std::map<std::string, RawEntry> entries_;
    std::vector<std::string>& errors_;
};

}  // namespace

ParseResult parse_config(const std::string& text) {
    ParseResult result;
    std::map<std::string, RawEntry> entries;

    std::stringstream ss(text);
    std::string line;
    int line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            result.errors.push_back("line " + std::to_string(line_no) + ": expected 'key = value'");
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            result.errors.push_back("line " + std::to_string(line_no) + ": empty key or value");
            continue;
        }
        const auto& keys = known_keys();
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
            result.errors.push_back("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
            continue;
        }
        auto [it, inserted] = entries.emplace(key, RawEntry{value, line_no});
        if (!inserted) {
            result.errors.push_back("duplicate key '" + key + "' at lines " +
                                    std::to_string(it->second.line) + " and " +
                                    std::to_string(line_no));
        }
    }

    Reader reader(std::move(entries), result.errors);
    RunConfig cfg;

    for (const char* required : {"problem", "d", "K", "alpha", "B", "T", "delta", "seed"}) {
        if (!reader.has(required))
            result.errors.push_back(std::string("missing required key '") + required + "'");
    }

    if (auto p = reader.raw("problem")) {
        if (*p == "quadratic") {
            cfg.problem.kind = ProblemKind::quadratic;
        } else if (*p == "logistic") {
            cfg.problem.kind = ProblemKind::logistic;
        } else {
            reader.fail("problem", "must be quadratic or logistic, got '" + *p + "'");
        }
    }
    if (auto d = reader.integer<long long>("d")) {
        if (*d < 1) reader.fail("d", "must be >= 1");
        else cfg.problem.dimension = static_cast<std::size_t>(*d);
    }
    if (auto v = reader.real("noise_bound")) {
        if (*v < 0.0) reader.fail("noise_bound", "must be >= 0");
        else cfg.problem.noise_bound = *v;
    }
    if (auto c = reader.point("center", cfg.problem.dimension)) cfg.problem.center = *c;
    if (auto x = reader.point("x0", cfg.problem.dimension)) cfg.initial_point = *x;
    if (auto m = reader.integer<long long>("m")) {
        if (*m < 1) reader.fail("m", "must be >= 1");
        else cfg.problem.sample_count = static_cast<std::size_t>(*m);
    }
    if (auto l = reader.real("lambda")) {
        if (*l < 0.0) reader.fail("lambda", "must be >= 0");
        else cfg.problem.lambda = *l;
    }
    if (auto n = reader.real("label_noise")) {
        if (*n < 0.0 || *n > 1.0) reader.fail("label_noise", "must be in [0,1]");
        else cfg.problem.label_noise = *n;
    }
    if (auto s = reader.integer<std::uint64_t>("dataset_seed")) cfg.problem.dataset_seed = *s;

    if (auto k = reader.integer<int>("K")) {
        if (*k < 1) reader.fail("K", "must be >= 1");
        else cfg.worker_count = *k;
    }
    if (auto raw_alpha = reader.raw("alpha")) {
        auto frac = DecimalFraction::parse(*raw_alpha);
        if (!frac) {
            reader.fail("alpha", "must be a plain decimal, got '" + *raw_alpha + "'");
        } else {
            cfg.alpha_exact = *frac;
            cfg.alpha = frac->value();
            if (!(cfg.alpha >= 0.0 && cfg.alpha < 0.5)) reader.fail("alpha", "alpha must be < 1/2");
        }
    }
    if (auto b = reader.integer<int>("B")) {
        if (*b < 1) reader.fail("B", "must be >= 1");
        else cfg.batch_size = *b;
    }
    if (auto t = reader.integer<int>("T")) {
        if (*t < 1) reader.fail("T", "must be >= 1");
        else cfg.epoch_count = *t;
    }
    if (auto e = reader.real("eta")) {
        if (!(*e > 0.0)) reader.fail("eta", "must be > 0");
        else cfg.eta_override = *e;
    }
    if (auto d = reader.real("delta")) {
        if (!(*d > 0.0 && *d < 1.0)) reader.fail("delta", "must be in (0,1)");
        else cfg.delta = *d;
    }
    if (auto e = reader.real("epsilon_target")) {
        if (!(*e > 0.0)) reader.fail("epsilon_target", "must be > 0");
        else cfg.epsilon_target = *e;
    }
    if (auto s = reader.integer<std::uint64_t>("seed")) cfg.seed = *s;
    if (auto n = reader.integer<std::int64_t>("n_max")) {
        if (*n < 0) reader.fail("n_max", "must be >= 0");
        else cfg.inner_length_cap = *n;
    }
    if (auto m = reader.raw("baseline_mode")) {
        if (*m == "filtered") cfg.baseline = BaselineMode::filtered;
        else if (*m == "naive_mean") cfg.baseline = BaselineMode::naive_mean;
        else reader.fail("baseline_mode", "must be filtered or naive_mean");
    }
    if (auto w = reader.boolean("record_wall_time")) cfg.record_wall_time = *w;
    if (auto o = reader.raw("output_dir")) cfg.output_dir = *o;
    if (auto n = reader.raw("run_name")) cfg.run_name = *n;

    // Attack block: required exactly when the run has Byzantine workers.
    const bool has_byzantine =
        cfg.worker_count > 0 && cfg.alpha_exact.floor_times(cfg.worker_count) >= 1;
    if (auto s = reader.raw("byzantine_strategy")) {
        if (*s != "none") {
            AttackSpec spec;
            auto strat = parse_attack_strategy(*s);
            if (!strat) {
                reader.fail("byzantine_strategy", "unknown strategy '" + *s + "'");
            } else {
                spec.strategy = *strat;
                if (auto m = reader.real("attack_magnitude")) {
                    if (*m < 0.0) reader.fail("attack_magnitude", "must be >= 0");
                    else spec.magnitude = *m;
                }
                if (auto k = reader.raw("attack_knowledge")) {
                    if (*k == "blind") spec.knowledge = AttackKnowledge::blind;
                    else if (*k == "omniscient") spec.knowledge = AttackKnowledge::omniscient;
                    else reader.fail("attack_knowledge", "must be blind or omniscient");
                }
                if (requires_omniscient(spec.strategy) &&
                    spec.knowledge != AttackKnowledge::omniscient) {
                    reader.fail("byzantine_strategy",
                                attack_strategy_name(spec.strategy) +
                                    " requires attack_knowledge = omniscient");
                }
                cfg.attack = spec;
            }
        }
    }
    if (has_byzantine && !cfg.attack.has_value()) {
        reader.fail("byzantine_strategy",
                    "floor(alpha*K) >= 1 Byzantine workers but no attack strategy configured");
    }

    if (!result.errors.empty()) return result;
    result.config = std::move(cfg);
    return result;
}

ParseResult parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        ParseResult r;
        r.errors.push_back("cannot open config file: " + path);
        return r;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::unique_ptr<StochasticProblem> make_problem(const ProblemSpec& spec) {
    switch (spec.kind) {
        case ProblemKind::quadratic:
            return std::make_unique<QuadraticProblem>(spec.dimension, spec.center,
                                                      spec.noise_bound);
        case ProblemKind::logistic:
            return std::make_unique<LogisticProblem>(LogisticProblem::generate(
                spec.sample_count, spec.dimension, spec.lambda, spec.label_noise,
                spec.dataset_seed));
    }
    throw std::invalid_argument("unknown problem kind");
}

double resolved_eta(const RunConfig& cfg, const StochasticProblem& problem) {
    if (cfg.eta_override) return *cfg.eta_override;
    return default_step_size(problem.smoothness(), cfg.batch_size);
}

namespace {

std::string fmt_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return ec == std::errc() ? std::string(buf, ptr) : "nan";
}

std::string fmt_point(const Vec& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += fmt_double(v[i]);
    }
    return s;
}

}  // namespace

std::string canonical_config(const RunConfig& cfg) {
    std::map<std::string, std::string> kv;
    kv["problem"] = cfg.problem.kind == ProblemKind::quadratic ? "quadratic" : "logistic";
    kv["d"] = std::to_string(cfg.problem.dimension);
    if (cfg.problem.kind == ProblemKind::quadratic) {
        kv["noise_bound"] = fmt_double(cfg.problem.noise_bound);
        kv["center"] = cfg.problem.center.empty() ? "0" : fmt_point(cfg.problem.center);
    } else {
        kv["m"] = std::to_string(cfg.problem.sample_count);
        kv["lambda"] = fmt_double(cfg.problem.lambda);
        kv["label_noise"] = fmt_double(cfg.problem.label_noise);
        kv["dataset_seed"] = std::to_string(cfg.problem.dataset_seed);
    }
    kv["x0"] = cfg.initial_point.empty() ? "1" : fmt_point(cfg.initial_point);
    kv["K"] = std::to_string(cfg.worker_count);
    kv["alpha"] = std::to_string(cfg.alpha_exact.num) + "/" + std::to_string(cfg.alpha_exact.den);
    kv["B"] = std::to_string(cfg.batch_size);
    kv["T"] = std::to_string(cfg.epoch_count);
    kv["delta"] = fmt_double(cfg.delta);
    if (cfg.eta_override) kv["eta"] = fmt_double(*cfg.eta_override);
    if (cfg.epsilon_target) kv["epsilon_target"] = fmt_double(*cfg.epsilon_target);
    kv["seed"] = std::to_string(cfg.seed);
    kv["n_max"] = std::to_string(cfg.effective_inner_cap());
    kv["baseline_mode"] = cfg.baseline == BaselineMode::filtered ? "filtered" : "naive_mean";
    if (cfg.attack) {
        kv["byzantine_strategy"] = attack_strategy_name(cfg.attack->strategy);
        kv["attack_magnitude"] = fmt_double(cfg.attack->magnitude);
        kv["attack_knowledge"] =
            cfg.attack->knowledge == AttackKnowledge::blind ? "blind" : "omniscient";
    } else {
        kv["byzantine_strategy"] = "none";
    }
    std::string out;
    for (const auto& [k, v] : kv) {
        out += k;
        out += " = ";
        out += v;
        out += "\n";
    }
    return out;
}

std::uint64_t config_hash(const RunConfig& cfg) {
    const std::string s = canonical_config(cfg);
    std::uint64_t h = 1469598103934665603ULL;  // FNV-1a 64
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace bsvrg
