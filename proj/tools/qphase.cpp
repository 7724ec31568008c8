#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <string>
#include <utility>
#include <vector>

#include "qphase/error.hpp"
#include "qphase/harness.hpp"

using namespace qphase;

namespace {

enum ExitCode { kOk = 0, kConfig = 2, kRuntime = 3, kIo = 4 };

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::ConfigError:
        case ErrorCode::InvalidVector:
        case ErrorCode::DegenerateProbe:
        case ErrorCode::InvalidDirection:
        case ErrorCode::MixedProbe:
        case ErrorCode::InsufficientBudget:
        case ErrorCode::EmptyDomain:
            return kConfig;
        case ErrorCode::IoError:
            return kIo;
        default:
            return kRuntime;
    }
}

// Each flag maps onto one config key. Flags left at their default still seed
// the config, but a config file overrides them and explicit flags win last.
struct Binding {
    CLI::Option* option;
    std::string key;
    std::string* value;
};

struct Flags {
    std::string theta = "3.141592653589793";
    std::string a = "1,0,0";
    std::string n = "0,0,1";
    std::string probes = "1,2,4,8,16,32,64,128";
    std::string boot = "2000";
    std::string seed = "0";
    std::string clevel = "0.99";
    std::string margin = "0.7853981633974483";
    std::string domain;
    std::string g0 = "0";
    std::string strategy = "covariant";
    std::string steps = "0,8,16,24,32,40,48";
    std::string out;
    bool fixed_center = false;
};

struct Command {
    CLI::App* app;
    std::vector<Binding> bindings;
};

CLI::Option* bind_flag(Command& cmd, const std::string& flag, const std::string& key, std::string& value,
                       const std::string& help) {
    CLI::Option* opt = cmd.app->add_option(flag, value, help)->capture_default_str();
    cmd.bindings.push_back({opt, key, &value});
    return opt;
}

void bind_probe(Command& cmd, Flags& f) {
    bind_flag(cmd, "--a", "a", f.a, "probe Bloch vector x,y,z");
    bind_flag(cmd, "--n", "n", f.n, "rotation axis x,y,z");
}

void bind_run(Command& cmd, Flags& f) {
    bind_flag(cmd, "--theta", "theta_true", f.theta, "true phase in radians");
    bind_probe(cmd, f);
    bind_flag(cmd, "--probes", "probe_counts", f.probes, "comma separated probe counts");
    bind_flag(cmd, "--boot", "n_boot", f.boot, "bootstrap repetitions per probe count");
    bind_flag(cmd, "--seed", "master_seed", f.seed, "master RNG seed");
}

void bind_interval(Command& cmd, Flags& f) {
    bind_flag(cmd, "--clevel", "c_level", f.clevel, "confidence level of the first-stage interval");
    bind_flag(cmd, "--margin", "half_width_E", f.margin, "interval half-width E in radians");
}

ScenarioConfig build_config(const Command& cmd, const std::string& config_path, unsigned workers,
                            bool no_timing, const std::string& strategy) {
    std::string defaults;
    std::string explicit_lines;
    for (const Binding& b : cmd.bindings) {
        if (b.value->empty()) continue;
        const std::string line = b.key + " = " + *b.value + "\n";
        defaults += line;
        if (b.option->count() > 0) explicit_lines += line;
    }
    if (!strategy.empty()) explicit_lines += "strategy = " + strategy + "\n";
    ScenarioConfig cfg = parse_config(defaults);
    if (!config_path.empty()) cfg = load_config(config_path, cfg);
    cfg = parse_config(explicit_lines, cfg);
    cfg.workers = workers;
    if (no_timing) cfg.record_timing = false;
    if (cfg.strategy == Strategy::restricted_aqse && !cfg.restricted_domain) {
        cfg.restricted_domain = default_restricted_domain(cfg.theta_true);
    }
    validate(cfg);
    return cfg;
}

std::vector<std::size_t> parse_steps(const std::string& text) {
    std::vector<std::size_t> steps;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t comma = std::min(text.find(',', start), text.size());
        const std::string item = text.substr(start, comma - start);
        try {
            std::size_t used = 0;
            const unsigned long long v = std::stoull(item, &used);
            if (used != item.size()) throw std::invalid_argument(item);
            steps.push_back(static_cast<std::size_t>(v));
        } catch (const std::exception&) {
            throw Error(ErrorCode::ConfigError, "bad step count '" + item + "'");
        }
        start = comma + 1;
    }
    return steps;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte Carlo comparison of qubit phase estimation strategies"};
    app.require_subcommand(1);

    std::string config_path;
    unsigned workers = 0;
    bool no_timing = false;
    app.add_option("--config", config_path, "key = value file applied before explicit flags")
        ->check(CLI::ExistingFile);
    app.add_option("--workers", workers, "worker threads, 0 for hardware concurrency")->capture_default_str();
    app.add_flag("--no-timing", no_timing, "report wall_seconds as 0 for byte-stable output");

    Flags f;

    Command hvar{app.add_subcommand("hvar", "Holevo variance of a single-stage strategy"), {}};
    bind_run(hvar, f);
    bind_flag(hvar, "--strategy", "strategy", f.strategy, "covariant, aqse or restricted-aqse")
        ->check(CLI::IsMember({"covariant", "aqse", "restricted-aqse"}));
    bind_flag(hvar, "--domain", "restricted_domain", f.domain,
              "restricted-aqse domain lo,hi (default: theta +/- pi/2)");
    bind_flag(hvar, "--g0", "g0", f.g0, "first adaptive measurement angle");
    hvar.app->add_option("--out", f.out, "output CSV")->required();

    Command eci{app.add_subcommand("eci-hvar", "Holevo variance of the two-step interval scheme"), {}};
    bind_run(eci, f);
    bind_interval(eci, f);
    eci.app->add_flag("--fixed-center", f.fixed_center, "keep the first-stage interval center");
    eci.app->add_option("--out", f.out, "output CSV")->required();

    Command ent{app.add_subcommand("ent-hvar", "analytic Holevo variance of the entangled measurement"), {}};
    bind_probe(ent, f);
    bind_flag(ent, "--probes", "probe_counts", f.probes, "comma separated probe counts");
    ent.app->add_option("--out", f.out, "output CSV")->required();

    Command bad{app.add_subcommand("bad-ci", "bad confidence interval counts per adaptive step count"), {}};
    bind_run(bad, f);
    bind_interval(bad, f);
    bad.app->add_option("--steps", f.steps, "comma separated adaptive step counts")->capture_default_str();
    bad.app->add_option("--out", f.out, "output CSV")->required();

    Command bounds{app.add_subcommand("bounds", "reference variance curves"), {}};
    bind_probe(bounds, f);
    bind_flag(bounds, "--probes", "probe_counts", f.probes, "comma separated probe counts");
    bind_interval(bounds, f);
    bounds.app->add_option("--out", f.out, "output CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfig;
    }

    try {
        if (hvar.app->parsed()) {
            const ScenarioConfig cfg = build_config(hvar, config_path, workers, no_timing, "");
            emit_csv(run_scenario(cfg), f.out);
        } else if (eci.app->parsed()) {
            const std::string s = f.fixed_center ? "two_step_fixed_center" : "two_step";
            emit_csv(run_scenario(build_config(eci, config_path, workers, no_timing, s)), f.out);
        } else if (ent.app->parsed()) {
            emit_csv(run_scenario(build_config(ent, config_path, workers, no_timing, "entangled")), f.out);
        } else if (bad.app->parsed()) {
            const ScenarioConfig cfg = build_config(bad, config_path, workers, no_timing, "two_step");
            emit_bad_ci_csv(count_bad_cis(cfg, parse_steps(f.steps)), cfg.master_seed, f.out);
        } else if (bounds.app->parsed()) {
            ScenarioConfig cfg = build_config(bounds, config_path, workers, no_timing, "two_step");
            emit_reference_curves(cfg, f.out);
        }
    } catch (const Error& e) {
        std::fprintf(stderr, "qphase: %s\n", e.what());
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "qphase: %s\n", e.what());
        return kRuntime;
    }
    return kOk;
}
