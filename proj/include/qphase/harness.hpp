#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qphase/angle.hpp"
#include "qphase/bloch.hpp"
#include "qphase/estimators.hpp"

namespace qphase {

enum class Strategy {
    covariant,
    aqse,
    restricted_aqse,
    two_step,
    two_step_fixed_center,
    entangled,
};

std::string_view to_string(Strategy s);
/// Accepts the snake_case names and the CLI's dashed spellings.
Strategy parse_strategy(std::string_view name);

/// Full description of one bootstrap experiment.
struct ScenarioConfig {
    Vec3 a{1.0, 0.0, 0.0};
    Vec3 n{0.0, 0.0, 1.0};
    Angle theta_true{kPi};
    Strategy strategy = Strategy::covariant;
    std::vector<std::size_t> probe_counts{1};
    std::size_t n_boot = 2000;
    double c_level = 0.99;
    double half_width_E = kPi / 4.0;
    std::optional<CircularInterval> restricted_domain;
    Angle g0{0.0};
    std::uint64_t master_seed = 0;
    /// Worker threads for repetitions; 0 picks the hardware concurrency.
    unsigned workers = 0;
    /// When false, wall_seconds is reported as 0 so output is byte-stable.
    bool record_timing = true;
};

/// Throws Error(ConfigError) on inconsistent fields; probe errors propagate.
void validate(const ScenarioConfig& cfg);

/// Arc of half-width pi/2 centered on theta_true.
CircularInterval default_restricted_domain(Angle theta_true);

/// Applies `key = value` lines (# comments, blank lines ignored) on top of
/// `base`. Keys are the ScenarioConfig field names; vectors are comma
/// separated triples, probe_counts a comma separated list and
/// restricted_domain a `lo,hi` pair.
ScenarioConfig parse_config(std::string_view text, ScenarioConfig base = {});
ScenarioConfig load_config(const std::filesystem::path& path, ScenarioConfig base = {});

/// Aggregate for one (strategy, N) point.
struct BootstrapResult {
    std::size_t n_probes = 0;
    Strategy strategy = Strategy::covariant;
    double holevo_variance = 0.0;
    double mu = 0.0;
    /// -1 when the strategy has no confidence interval.
    long long bad_ci_count = -1;
    std::size_t reps = 0;
    std::uint64_t seed = 0;
    double wall_seconds = 0.0;
    double holevo_stderr = 0.0;
};

/// Stream id of repetition `rep` at probe count `n_probes`.
constexpr std::uint64_t repetition_stream(std::size_t n_probes, std::size_t rep) {
    return (static_cast<std::uint64_t>(n_probes) << 32) + static_cast<std::uint64_t>(rep);
}

/// Final estimate of every repetition at probe count n_probes, in rep order.
struct RepetitionSet {
    std::vector<Angle> estimates;
    std::vector<char> bad_ci;
};

RepetitionSet run_repetitions(const ScenarioConfig& cfg, std::size_t n_probes);

/// One BootstrapResult per probe count, sorted by n_probes.
std::vector<BootstrapResult> run_scenario(const ScenarioConfig& cfg);

struct BadCiRow {
    std::size_t aqse_steps = 0;
    std::size_t n_probes = 0;
    std::size_t bad_ci_count = 0;
    std::size_t reps = 0;
};

/// Bad confidence intervals after each number of adaptive steps.
/// Requires a two-step strategy.
std::vector<BadCiRow> count_bad_cis(const ScenarioConfig& cfg,
                                    const std::vector<std::size_t>& aqse_steps);

inline constexpr std::string_view kResultsHeader =
    "n_probes,strategy,holevo_variance,mu,bad_ci_count,reps,seed,wall_seconds";
inline constexpr std::string_view kCurvesHeader =
    "n_probes,qcrb,delta1_bound,two_step_bound,covariant_crb";
inline constexpr std::string_view kBadCiHeader = "aqse_steps,n_probes,bad_ci_count,reps,seed";

/// Rows are written ordered by (strategy, n_probes). Throws Error(IoError).
void emit_csv(std::vector<BootstrapResult> results, const std::filesystem::path& path);
std::string format_csv(std::vector<BootstrapResult> results);

void emit_reference_curves(const ScenarioConfig& cfg, const std::filesystem::path& path);
std::string format_reference_curves(const ScenarioConfig& cfg);

void emit_bad_ci_csv(const std::vector<BadCiRow>& rows, std::uint64_t seed,
                     const std::filesystem::path& path);

/// printf "%.17g" rendering used for every float column.
std::string format_double(double x);

}  // namespace qphase
