#include "qphase/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "qphase/entangled.hpp"
#include "qphase/error.hpp"
#include "qphase/measurements.hpp"
#include "qphase/metrics.hpp"

namespace qphase {

namespace {

bool is_two_step(Strategy s) {
    return s == Strategy::two_step || s == Strategy::two_step_fixed_center;
}

[[noreturn]] void config_error(const std::string& message) {
    throw Error(ErrorCode::ConfigError, message);
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_list(std::string_view s) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto comma = s.find(',', start);
        parts.push_back(trim(s.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return parts;
}

double parse_real(std::string_view text, std::string_view key) {
    const std::string s(trim(text));
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v)) {
        config_error("invalid number '" + s + "' for " + std::string(key));
    }
    return v;
}

std::uint64_t parse_unsigned(std::string_view text, std::string_view key) {
    const std::string_view s = trim(text);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
        config_error("invalid unsigned integer '" + std::string(s) + "' for " + std::string(key));
    }
    return v;
}

Vec3 parse_vec3(std::string_view text, std::string_view key) {
    const auto parts = split_list(text);
    if (parts.size() != 3) config_error(std::string(key) + " needs three comma separated components");
    return {parse_real(parts[0], key), parse_real(parts[1], key), parse_real(parts[2], key)};
}

bool parse_bool(std::string_view text, std::string_view key) {
    const std::string_view s = trim(text);
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    config_error("invalid boolean '" + std::string(s) + "' for " + std::string(key));
}

std::ofstream open_output(const std::filesystem::path& path) {
    errno = 0;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorCode::IoError,
                    "cannot open " + path.string() + ": " + std::strerror(errno ? errno : EIO));
    }
    return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out = open_output(path);
    out << content;
    out.flush();
    if (!out) {
        throw Error(ErrorCode::IoError,
                    "cannot write " + path.string() + ": " + std::strerror(errno ? errno : EIO));
    }
}

unsigned worker_count(const ScenarioConfig& cfg, std::size_t jobs) {
    unsigned w = cfg.workers != 0 ? cfg.workers : std::max(1u, std::thread::hardware_concurrency());
    return static_cast<unsigned>(std::min<std::size_t>(w, std::max<std::size_t>(jobs, 1)));
}

/// One repetition's outcome.
struct RepOutcome {
    Angle estimate;
    bool bad_ci = false;
};

RepOutcome run_one(const ScenarioConfig& cfg, const ProbeConfig& probe, std::size_t n_probes,
                   std::size_t n1, RngStream& rng) {
    switch (cfg.strategy) {
        case Strategy::covariant:
            return {covariant_run(rng, probe, cfg.theta_true, n_probes).estimate, false};
        case Strategy::aqse:
            return {aqse_run(rng, probe, cfg.theta_true, n_probes, cfg.g0,
                             CircularInterval::full_circle())
                        .estimate,
                    false};
        case Strategy::restricted_aqse:
            return {aqse_run(rng, probe, cfg.theta_true, n_probes, cfg.g0, *cfg.restricted_domain)
                        .estimate,
                    false};
        case Strategy::two_step:
        case Strategy::two_step_fixed_center: {
            if (n_probes < n1) {
                // The whole budget fits in the covariant stage.
                return {covariant_run(rng, probe, cfg.theta_true, n_probes).estimate, false};
            }
            const EstimationTrace trace =
                two_step_run(rng, probe, cfg.theta_true, n_probes, cfg.c_level, cfg.half_width_E,
                             cfg.strategy == Strategy::two_step);
            return {trace.estimate, trace.bad_ci};
        }
        case Strategy::entangled:
            break;
    }
    config_error("the entangled strategy has no simulated repetitions");
}

}  // namespace

std::string_view to_string(Strategy s) {
    switch (s) {
        case Strategy::covariant: return "covariant";
        case Strategy::aqse: return "aqse";
        case Strategy::restricted_aqse: return "restricted_aqse";
        case Strategy::two_step: return "two_step";
        case Strategy::two_step_fixed_center: return "two_step_fixed_center";
        case Strategy::entangled: return "entangled";
    }
    return "unknown";
}

Strategy parse_strategy(std::string_view name) {
    std::string s(trim(name));
    std::replace(s.begin(), s.end(), '-', '_');
    for (Strategy v : {Strategy::covariant, Strategy::aqse, Strategy::restricted_aqse,
                       Strategy::two_step, Strategy::two_step_fixed_center, Strategy::entangled}) {
        if (s == to_string(v)) return v;
    }
    config_error("unknown strategy '" + std::string(name) + "'");
}

void validate(const ScenarioConfig& cfg) {
    (void)make_probe(cfg.a, cfg.n);
    if (cfg.probe_counts.empty()) config_error("probe_counts is empty");
    for (std::size_t i = 0; i < cfg.probe_counts.size(); ++i) {
        if (cfg.probe_counts[i] == 0) config_error("probe counts must be positive");
        if (i > 0 && cfg.probe_counts[i] <= cfg.probe_counts[i - 1]) {
            config_error("probe_counts must be strictly increasing");
        }
        if (cfg.probe_counts[i] > 0xffffffffULL) config_error("probe count exceeds 2^32");
    }
    if (cfg.strategy != Strategy::entangled) {
        if (cfg.n_boot == 0) config_error("n_boot must be positive");
        if (cfg.n_boot > 0xffffffffULL) config_error("n_boot exceeds 2^32");
    }
    if ((cfg.strategy == Strategy::restricted_aqse) != cfg.restricted_domain.has_value()) {
        config_error("restricted_domain is required for, and only for, restricted_aqse");
    }
    if (is_two_step(cfg.strategy)) {
        if (!(cfg.c_level > 0.0 && cfg.c_level < 1.0)) config_error("c_level must lie in (0, 1)");
        if (!(cfg.half_width_E > 0.0 && cfg.half_width_E < kPi)) {
            config_error("half_width_E must lie in (0, pi)");
        }
    }
}

CircularInterval default_restricted_domain(Angle theta_true) {
    return CircularInterval(theta_true, kPi / 2.0);
}

ScenarioConfig parse_config(std::string_view text, ScenarioConfig base) {
    ScenarioConfig cfg = std::move(base);
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto nl = text.find('\n', start);
        std::string_view line = text.substr(start, nl == std::string_view::npos ? nl : nl - start);
        start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            config_error("line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string_view key = trim(line.substr(0, eq));
        const std::string_view value = trim(line.substr(eq + 1));

        if (key == "a") cfg.a = parse_vec3(value, key);
        else if (key == "n") cfg.n = parse_vec3(value, key);
        else if (key == "theta_true") cfg.theta_true = Angle(parse_real(value, key));
        else if (key == "strategy") cfg.strategy = parse_strategy(value);
        else if (key == "probe_counts") {
            cfg.probe_counts.clear();
            for (std::string_view part : split_list(value)) {
                cfg.probe_counts.push_back(static_cast<std::size_t>(parse_unsigned(part, key)));
            }
        } else if (key == "n_boot") cfg.n_boot = static_cast<std::size_t>(parse_unsigned(value, key));
        else if (key == "c_level") cfg.c_level = parse_real(value, key);
        else if (key == "half_width_E") cfg.half_width_E = parse_real(value, key);
        else if (key == "restricted_domain") {
            if (value == "none" || value.empty()) {
                cfg.restricted_domain.reset();
            } else {
                const auto parts = split_list(value);
                if (parts.size() != 2) config_error("restricted_domain needs lo,hi");
                cfg.restricted_domain =
                    CircularInterval::from_bounds(parse_real(parts[0], key), parse_real(parts[1], key));
            }
        } else if (key == "g0") cfg.g0 = Angle(parse_real(value, key));
        else if (key == "master_seed") cfg.master_seed = parse_unsigned(value, key);
        else if (key == "workers") cfg.workers = static_cast<unsigned>(parse_unsigned(value, key));
        else if (key == "record_timing") cfg.record_timing = parse_bool(value, key);
        else {
            config_error("line " + std::to_string(line_no) + ": unknown key '" + std::string(key) + "'");
        }
    }
    return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path, ScenarioConfig base) {
    errno = 0;
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::IoError,
                    "cannot read " + path.string() + ": " + std::strerror(errno ? errno : ENOENT));
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str(), std::move(base));
}

RepetitionSet run_repetitions(const ScenarioConfig& cfg, std::size_t n_probes) {
    validate(cfg);
    const ProbeConfig probe = make_probe(cfg.a, cfg.n);
    const std::size_t n1 =
        is_two_step(cfg.strategy) ? plan_two_step(probe, cfg.c_level, cfg.half_width_E).n1 : 0;
    const RngStream master(cfg.master_seed, 0);

    const std::size_t reps = cfg.n_boot;
    RepetitionSet set;
    set.estimates.assign(reps, Angle(0.0));
    set.bad_ci.assign(reps, 0);

    std::atomic<std::size_t> next{0};
    std::mutex failure_mutex;
    std::size_t failed_rep = reps;
    std::optional<Error> failure;

    auto worker = [&] {
        while (true) {
            const std::size_t rep = next.fetch_add(1);
            if (rep >= reps) return;
            {
                std::lock_guard lock(failure_mutex);
                if (failure && failed_rep < rep) return;
            }
            RngStream rng = split(master, repetition_stream(n_probes, rep));
            try {
                const RepOutcome r = run_one(cfg, probe, n_probes, n1, rng);
                set.estimates[rep] = r.estimate;
                set.bad_ci[rep] = r.bad_ci ? 1 : 0;
            } catch (const Error& e) {
                std::lock_guard lock(failure_mutex);
                if (rep < failed_rep) {
                    failed_rep = rep;
                    failure = Error(e.code(), e.detail() + " (N=" + std::to_string(n_probes) +
                                                  ", rep=" + std::to_string(rep) +
                                                  ", seed=" + std::to_string(cfg.master_seed) + ")");
                }
            }
        }
    };

    const unsigned workers = worker_count(cfg, reps);
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned i = 0; i < workers; ++i) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }
    if (failure) throw *failure;
    return set;
}

std::vector<BootstrapResult> run_scenario(const ScenarioConfig& cfg) {
    validate(cfg);
    const ProbeConfig probe = make_probe(cfg.a, cfg.n);
    const std::size_t n1 =
        is_two_step(cfg.strategy) ? plan_two_step(probe, cfg.c_level, cfg.half_width_E).n1 : 0;

    std::vector<BootstrapResult> results;
    for (std::size_t n_probes : cfg.probe_counts) {
        BootstrapResult r;
        r.n_probes = n_probes;
        r.strategy = cfg.strategy;
        r.seed = cfg.master_seed;
        const auto start = std::chrono::steady_clock::now();
        if (cfg.strategy == Strategy::entangled) {
            r.holevo_variance = ent_holevo_variance(probe, n_probes);
            r.mu = 1.0 / std::sqrt(r.holevo_variance + 1.0);
            r.reps = 0;
        } else {
            const RepetitionSet set = run_repetitions(cfg, n_probes);
            const CircularSummary s = summarize(set.estimates, cfg.theta_true);
            r.holevo_variance = s.holevo_variance;
            r.mu = s.mu;
            r.holevo_stderr = s.holevo_stderr;
            r.reps = set.estimates.size();
            if (is_two_step(cfg.strategy) && n_probes >= n1) {
                r.bad_ci_count = std::count(set.bad_ci.begin(), set.bad_ci.end(), 1);
            }
        }
        if (cfg.record_timing) {
            r.wall_seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        }
        results.push_back(r);
    }
    return results;
}

std::vector<BadCiRow> count_bad_cis(const ScenarioConfig& cfg,
                                    const std::vector<std::size_t>& aqse_steps) {
    if (!is_two_step(cfg.strategy)) config_error("bad-CI counting needs a two-step strategy");
    const ProbeConfig probe = make_probe(cfg.a, cfg.n);
    const std::size_t n1 = plan_two_step(probe, cfg.c_level, cfg.half_width_E).n1;

    std::vector<BadCiRow> rows;
    for (std::size_t steps : aqse_steps) {
        ScenarioConfig point = cfg;
        point.probe_counts = {n1 + steps};
        const RepetitionSet set = run_repetitions(point, n1 + steps);
        BadCiRow row;
        row.aqse_steps = steps;
        row.n_probes = n1 + steps;
        row.bad_ci_count = static_cast<std::size_t>(std::count(set.bad_ci.begin(), set.bad_ci.end(), 1));
        row.reps = set.bad_ci.size();
        rows.push_back(row);
    }
    return rows;
}

std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string format_csv(std::vector<BootstrapResult> results) {
    std::stable_sort(results.begin(), results.end(), [](const BootstrapResult& x, const BootstrapResult& y) {
        const std::string_view sx = to_string(x.strategy);
        const std::string_view sy = to_string(y.strategy);
        if (sx != sy) return sx < sy;
        return x.n_probes < y.n_probes;
    });
    std::string out(kResultsHeader);
    out += '\n';
    for (const BootstrapResult& r : results) {
        out += std::to_string(r.n_probes);
        out += ',';
        out += to_string(r.strategy);
        out += ',';
        out += format_double(r.holevo_variance);
        out += ',';
        out += format_double(r.mu);
        out += ',';
        out += std::to_string(r.bad_ci_count);
        out += ',';
        out += std::to_string(r.reps);
        out += ',';
        out += std::to_string(r.seed);
        out += ',';
        out += format_double(r.wall_seconds);
        out += '\n';
    }
    return out;
}

void emit_csv(std::vector<BootstrapResult> results, const std::filesystem::path& path) {
    write_file(path, format_csv(std::move(results)));
}

std::string format_reference_curves(const ScenarioConfig& cfg) {
    const ProbeConfig probe = make_probe(cfg.a, cfg.n);
    const std::size_t n1 = plan_two_step(probe, cfg.c_level, cfg.half_width_E).n1;
    const double fisher_star = covariant_fisher_closed(probe);

    std::string out(kCurvesHeader);
    out += '\n';
    for (std::size_t n_probes : cfg.probe_counts) {
        const std::size_t first = std::min(n1, n_probes);
        const std::size_t second = n_probes - first;
        out += std::to_string(n_probes);
        out += ',';
        out += format_double(qcrb(probe, n_probes));
        out += ',';
        out += format_double(delta1_bound(probe, first, second));
        out += ',';
        out += format_double(two_step_lower_bound(probe, first, second, cfg.c_level, cfg.half_width_E));
        out += ',';
        out += format_double(1.0 / (static_cast<double>(n_probes) * fisher_star));
        out += '\n';
    }
    return out;
}

void emit_reference_curves(const ScenarioConfig& cfg, const std::filesystem::path& path) {
    write_file(path, format_reference_curves(cfg));
}

void emit_bad_ci_csv(const std::vector<BadCiRow>& rows, std::uint64_t seed,
                     const std::filesystem::path& path) {
    std::string out(kBadCiHeader);
    out += '\n';
    for (const BadCiRow& r : rows) {
        out += std::to_string(r.aqse_steps) + ',' + std::to_string(r.n_probes) + ',' +
               std::to_string(r.bad_ci_count) + ',' + std::to_string(r.reps) + ',' +
               std::to_string(seed) + '\n';
    }
    write_file(path, out);
}

}  // namespace qphase
