#include "qphase/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/distributions/normal.hpp>

#include "qphase/error.hpp"
#include "qphase/sampling.hpp"

namespace qphase {

namespace {

constexpr std::size_t kGridSize = CircularLogLikelihood::kGridSize;
constexpr double kGridStep = kTwoPi / static_cast<double>(kGridSize);
constexpr double kRefineTolerance = 1e-10;
constexpr double kBoundarySnap = 1e-9;
constexpr double kTieTolerance = 1e-12;
// Grid maxima further than this below the best grid value are not refined.
constexpr double kCandidateMargin = 2.0;
constexpr std::size_t kMaxCandidates = 32;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

bool nearly_equal(double a, double b) {
    if (a == b) return true;
    if (!std::isfinite(a) || !std::isfinite(b)) return false;
    return std::abs(a - b) <= kTieTolerance * std::max(1.0, std::abs(a));
}

/// Points examined by the coarse scan, parameterized by the offset t from
/// `base`; theta = base + t.
struct Scan {
    double base = 0.0;
    double span = kTwoPi;  // restricted domains: 2 * half_width
    bool circular = true;
    std::vector<double> offsets;
    std::vector<long> grid_index;  // -1 for the domain endpoints
    std::vector<double> values;
};

Scan make_scan(const CircularInterval& domain) {
    Scan scan;
    if (domain.is_full()) {
        scan.offsets.resize(kGridSize);
        scan.grid_index.resize(kGridSize);
        for (std::size_t j = 0; j < kGridSize; ++j) {
            scan.offsets[j] = CircularLogLikelihood::grid_angle(j);
            scan.grid_index[j] = static_cast<long>(j);
        }
        return scan;
    }
    scan.circular = false;
    scan.span = 2.0 * domain.half_width();
    const double lo = domain.lower().value();
    scan.base = lo;
    scan.offsets.push_back(0.0);
    scan.grid_index.push_back(-1);
    const auto first = static_cast<std::size_t>(std::floor(lo / kGridStep));
    for (std::size_t k = first; k <= first + kGridSize; ++k) {
        const double t = CircularLogLikelihood::grid_angle(k) - lo;
        if (t <= 0.0) continue;
        if (t >= scan.span) break;
        scan.offsets.push_back(t);
        scan.grid_index.push_back(static_cast<long>(k % kGridSize));
    }
    scan.offsets.push_back(scan.span);
    scan.grid_index.push_back(-1);
    return scan;
}

/// Index of the first point of every run of equal values that is a local
/// maximum (both neighbouring runs strictly lower).
std::vector<std::size_t> plateau_maxima(const std::vector<double>& v, bool circular) {
    struct Run {
        std::size_t start;
        double value;
    };
    std::vector<Run> runs;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (runs.empty() || !nearly_equal(runs.back().value, v[i])) runs.push_back({i, v[i]});
    }
    if (runs.empty()) return {};
    if (circular && runs.size() > 1 && nearly_equal(runs.front().value, runs.back().value)) {
        runs.front().start = runs.back().start;
        runs.pop_back();
    }
    if (runs.size() == 1) return {runs.front().start};

    std::vector<std::size_t> maxima;
    const std::size_t m = runs.size();
    for (std::size_t r = 0; r < m; ++r) {
        const bool has_prev = circular || r > 0;
        const bool has_next = circular || r + 1 < m;
        const double here = runs[r].value;
        const bool above_prev = !has_prev || here > runs[(r + m - 1) % m].value;
        const bool above_next = !has_next || here > runs[(r + 1) % m].value;
        if (above_prev && above_next) maxima.push_back(runs[r].start);
    }
    return maxima;
}

/// Maximizes f on [left, right] by golden-section search.
template <class F>
double golden_section_max(const F& f, double left, double right) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = left;
    double b = right;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    while (b - a > kRefineTolerance) {
        if (f1 >= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    return f1 >= f2 ? x1 : x2;
}

struct Candidate {
    double offset;
    double value;
};

/// Bracket of the scan point i: its neighbours along the scan.
std::pair<double, double> bracket_of(const Scan& scan, std::size_t i) {
    const std::size_t m = scan.offsets.size();
    if (scan.circular) return {scan.offsets[i] - kGridStep, scan.offsets[i] + kGridStep};
    const double left = i == 0 ? scan.offsets[0] : scan.offsets[i - 1];
    const double right = i + 1 == m ? scan.offsets[m - 1] : scan.offsets[i + 1];
    return {left, right};
}

std::vector<std::size_t> select_candidates(const Scan& scan) {
    std::vector<std::size_t> maxima = plateau_maxima(scan.values, scan.circular);
    if (maxima.empty()) return maxima;
    double best = kNegInf;
    for (std::size_t i : maxima) best = std::max(best, scan.values[i]);
    if (best == kNegInf) return {maxima.front()};
    std::erase_if(maxima, [&](std::size_t i) { return scan.values[i] < best - kCandidateMargin; });
    std::stable_sort(maxima.begin(), maxima.end(),
                     [&](std::size_t x, std::size_t y) { return scan.values[x] > scan.values[y]; });
    if (maxima.size() > kMaxCandidates) maxima.resize(kMaxCandidates);
    return maxima;
}

/// Snaps an offset onto a restricted domain's closed edge.
double snap(const Scan& scan, double t, bool& boundary) {
    boundary = false;
    if (scan.circular) return t;
    if (t <= kBoundarySnap) {
        boundary = true;
        return 0.0;
    }
    if (scan.span - t <= kBoundarySnap) {
        boundary = true;
        return scan.span;
    }
    return t;
}

template <class ValueAt, class Refine>
MleResult maximize(const Scan& scan, const ValueAt& value_at, const Refine& refine) {
    const std::vector<std::size_t> candidates = select_candidates(scan);

    std::vector<MleResult> refined;
    refined.reserve(candidates.size());
    for (std::size_t i : candidates) {
        const auto [left, right] = bracket_of(scan, i);
        double t = refine(scan.offsets[i], std::max(left, scan.circular ? left : 0.0),
                          std::min(right, scan.circular ? right : scan.span));
        bool boundary = false;
        t = snap(scan, t, boundary);
        double v = value_at(t);
        if (!(v >= scan.values[i])) {
            // Refinement never loses to its own starting point.
            t = scan.offsets[i];
            v = scan.values[i];
            t = snap(scan, t, boundary);
        }
        refined.push_back({Angle(scan.base + t), v, boundary});
    }

    std::sort(refined.begin(), refined.end(), [](const MleResult& x, const MleResult& y) {
        return x.estimate.value() < y.estimate.value();
    });
    MleResult best = refined.front();
    for (const MleResult& r : refined) {
        if (r.log_likelihood > best.log_likelihood && !nearly_equal(r.log_likelihood, best.log_likelihood)) {
            best = r;
        }
    }
    return best;
}

template <class F>
std::size_t count_maxima(const Scan& scan, const F& /*unused*/, double rel_tol) {
    const std::vector<std::size_t> maxima = plateau_maxima(scan.values, scan.circular);
    double best = kNegInf;
    for (double v : scan.values) best = std::max(best, v);
    if (best == kNegInf) return maxima.size();
    std::size_t count = 0;
    for (std::size_t i : maxima) {
        if (std::exp(scan.values[i] - best) >= 1.0 - rel_tol) ++count;
    }
    return count;
}

Scan scan_callable(const LogLikelihoodFn& f, const CircularInterval& domain) {
    Scan scan = make_scan(domain);
    scan.values.resize(scan.offsets.size());
    for (std::size_t i = 0; i < scan.offsets.size(); ++i) {
        scan.values[i] = f(Angle(scan.base + scan.offsets[i]));
    }
    return scan;
}

Scan scan_likelihood(const CircularLogLikelihood& f, const CircularInterval& domain) {
    Scan scan = make_scan(domain);
    scan.values.resize(scan.offsets.size());
    const std::span<const double> grid = f.grid();
    for (std::size_t i = 0; i < scan.offsets.size(); ++i) {
        const long j = scan.grid_index[i];
        scan.values[i] = j >= 0 ? grid[static_cast<std::size_t>(j)] : f.value(scan.base + scan.offsets[i]);
    }
    return scan;
}

void require_positive(std::size_t n, const char* what) {
    if (n == 0) throw Error(ErrorCode::ConfigError, std::string(what) + " must be at least 1");
}

}  // namespace

CircularInterval::CircularInterval(Angle center, double half_width) : center_(center) {
    if (!(half_width > 0.0)) {
        throw Error(ErrorCode::EmptyDomain, "interval half-width must be positive");
    }
    half_width_ = std::min(half_width, kPi);
}

CircularInterval CircularInterval::from_bounds(double lo, double hi) {
    if (!(hi > lo)) throw Error(ErrorCode::EmptyDomain, "interval upper bound must exceed lower bound");
    return CircularInterval(Angle(0.5 * (lo + hi)), 0.5 * (hi - lo));
}

bool CircularInterval::contains(Angle x) const {
    return circular_distance(x, center_) <= half_width_ + 1e-12;
}

MleResult mle_circular(const LogLikelihoodFn& log_likelihood, const CircularInterval& domain) {
    const Scan scan = scan_callable(log_likelihood, domain);
    auto value_at = [&](double t) { return log_likelihood(Angle(scan.base + t)); };
    auto refine = [&](double /*start*/, double left, double right) {
        return golden_section_max(value_at, left, right);
    };
    return maximize(scan, value_at, refine);
}

MleResult mle_circular(const CircularLogLikelihood& log_likelihood, const CircularInterval& domain) {
    if (!log_likelihood.tracks_grid()) {
        return mle_circular(LogLikelihoodFn([&](Angle t) { return log_likelihood(t); }), domain);
    }
    const Scan scan = scan_likelihood(log_likelihood, domain);
    auto value_at = [&](double t) { return log_likelihood.value(scan.base + t); };
    auto refine = [&](double start, double left, double right) {
        // Bracketed Newton on the score; the bracket must straddle a sign
        // change from + to -, otherwise fall back to golden section.
        const auto dl = log_likelihood.derivatives(scan.base + left);
        const auto dr = log_likelihood.derivatives(scan.base + right);
        if (!scan.circular && right == scan.span && dr.score >= 0.0 && dr.score <= std::abs(dl.score)) {
            if (dl.score >= 0.0) return right;
        }
        if (!scan.circular && left == 0.0 && dl.score <= 0.0 && dr.score <= 0.0) return left;
        if (!std::isfinite(dl.score) || !std::isfinite(dr.score) || dl.score < 0.0 || dr.score > 0.0) {
            return golden_section_max(value_at, left, right);
        }
        double a = left;
        double b = right;
        double x = start;
        for (int iter = 0; iter < 100; ++iter) {
            const auto d = log_likelihood.derivatives(scan.base + x);
            if (!std::isfinite(d.score) || !std::isfinite(d.curvature)) {
                return golden_section_max(value_at, left, right);
            }
            if (d.score == 0.0) return x;
            if (d.score > 0.0) a = x; else b = x;
            double next = d.curvature < 0.0 ? x - d.score / d.curvature : std::nan("");
            if (!(next > a && next < b)) next = 0.5 * (a + b);
            const double step = std::abs(next - x);
            x = next;
            if (step < 0.01 * kRefineTolerance || b - a < kRefineTolerance) break;
        }
        return x;
    };
    return maximize(scan, value_at, refine);
}

std::pair<Angle, Angle> mle_two_outcome(std::size_t zeros, std::size_t total, Angle g, double fq) {
    require_positive(total, "total outcome count");
    if (zeros > total) throw Error(ErrorCode::ConfigError, "more zeros than outcomes");
    if (!(fq > 0.0 && fq <= 1.0)) throw Error(ErrorCode::ConfigError, "fq must lie in (0, 1]");
    const double ratio = static_cast<double>(zeros) / static_cast<double>(total);
    const double s = std::clamp((1.0 - 2.0 * ratio) / std::sqrt(fq), -1.0, 1.0);
    const double shift = std::asin(s);
    return {g + shift, g + (kPi - shift)};
}

std::size_t count_local_maxima(const LogLikelihoodFn& log_likelihood,
                               const CircularInterval& domain, double rel_tol) {
    return count_maxima(scan_callable(log_likelihood, domain), log_likelihood, rel_tol);
}

std::size_t count_local_maxima(const CircularLogLikelihood& log_likelihood,
                               const CircularInterval& domain, double rel_tol) {
    if (!log_likelihood.tracks_grid()) {
        return count_local_maxima(LogLikelihoodFn([&](Angle t) { return log_likelihood(t); }),
                                  domain, rel_tol);
    }
    return count_maxima(scan_likelihood(log_likelihood, domain), log_likelihood, rel_tol);
}

double critical_value(double c_level) {
    if (!(c_level > 0.0 && c_level < 1.0)) {
        throw Error(ErrorCode::ConfigError, "confidence level must lie in (0, 1)");
    }
    if (std::abs(c_level - 0.95) < 1e-12) return 1.96;
    if (std::abs(c_level - 0.99) < 1e-12) return 2.58;
    const boost::math::normal_distribution<double> standard;
    return boost::math::quantile(standard, 1.0 - 0.5 * (1.0 - c_level));
}

CircularInterval confidence_interval(Angle estimate, std::size_t n1, double fisher, double c) {
    require_positive(n1, "sample size");
    if (!(fisher > 0.0)) throw Error(ErrorCode::ConfigError, "Fisher information must be positive");
    if (!(c >= 0.0)) throw Error(ErrorCode::ConfigError, "critical value must be non-negative");
    const double half_width = c / std::sqrt(static_cast<double>(n1) * fisher);
    return CircularInterval(estimate, std::clamp(half_width, 1e-6, kPi));
}

std::size_t min_sample_size(double c, double fisher, double half_width_target) {
    if (!(c > 0.0 && fisher > 0.0 && half_width_target > 0.0)) {
        throw Error(ErrorCode::ConfigError, "sample size inputs must be positive");
    }
    const double bound = c * c / (fisher * half_width_target * half_width_target);
    const double n = std::ceil(bound * (1.0 - 1e-12));
    return std::max<std::size_t>(1, static_cast<std::size_t>(n));
}

EstimationTrace covariant_run(RngStream& rng, const ProbeConfig& probe, Angle theta_true,
                              std::size_t n) {
    require_positive(n, "probe count");
    EstimationTrace trace;
    trace.outcomes.reserve(n);
    CircularLogLikelihood likelihood;
    for (std::size_t i = 0; i < n; ++i) {
        const Angle draw = sample_covariant(rng, probe, theta_true);
        trace.outcomes.emplace_back(CovariantDraw{draw});
        likelihood.add_covariant(probe, draw);
    }
    trace.estimate = mle_circular(likelihood, CircularInterval::full_circle()).estimate;
    return trace;
}

EstimationTrace aqse_run(RngStream& rng, const ProbeConfig& probe, Angle theta_true, std::size_t n,
                         Angle g0, const CircularInterval& domain) {
    require_positive(n, "probe count");
    EstimationTrace trace;
    trace.outcomes.reserve(n);
    trace.guesses.reserve(n);
    CircularLogLikelihood likelihood;
    Angle guess = g0;
    for (std::size_t k = 0; k < n; ++k) {
        const TwoOutcomePovm povm{probe, guess};
        const int bit = sample_two_outcome(rng, povm, theta_true);
        trace.outcomes.emplace_back(AdaptiveOutcome{bit, guess});
        trace.guesses.push_back(guess);
        likelihood.add_two_outcome(povm, bit);
        const MleResult mle = mle_circular(likelihood, domain);
        guess = mle.estimate;
        trace.boundary_hit = mle.boundary_hit;
    }
    trace.estimate = guess;
    return trace;
}

TwoStepPlan plan_two_step(const ProbeConfig& probe, double c_level, double half_width) {
    if (!(half_width > 0.0 && half_width <= kPi)) {
        throw Error(ErrorCode::ConfigError, "marginal error must lie in (0, pi]");
    }
    TwoStepPlan plan{};
    plan.c = critical_value(c_level);
    plan.fisher = covariant_fisher_closed(probe);
    plan.n1 = min_sample_size(plan.c, plan.fisher, half_width);
    const double width = confidence_interval(Angle(0.0), plan.n1, plan.fisher, plan.c).half_width();
    plan.ci_half_width = std::min(width, half_width);
    return plan;
}

EstimationTrace two_step_run(RngStream& rng, const ProbeConfig& probe, Angle theta_true,
                             std::size_t n, double c_level, double half_width,
                             bool update_centers) {
    const TwoStepPlan plan = plan_two_step(probe, c_level, half_width);
    if (n < plan.n1) {
        throw Error(ErrorCode::InsufficientBudget,
                    "budget of " + std::to_string(n) + " probes is below the " +
                        std::to_string(plan.n1) + " covariant draws required");
    }

    EstimationTrace trace;
    trace.outcomes.reserve(n);
    trace.guesses.reserve(n - plan.n1);
    CircularLogLikelihood likelihood;
    for (std::size_t i = 0; i < plan.n1; ++i) {
        const Angle draw = sample_covariant(rng, probe, theta_true);
        trace.outcomes.emplace_back(CovariantDraw{draw});
        likelihood.add_covariant(probe, draw);
    }
    Angle estimate = mle_circular(likelihood, CircularInterval::full_circle()).estimate;
    CircularInterval ci(estimate, plan.ci_half_width);
    trace.ci_history.push_back(ci);

    for (std::size_t k = plan.n1; k < n; ++k) {
        const TwoOutcomePovm povm{probe, estimate};
        const int bit = sample_two_outcome(rng, povm, theta_true);
        trace.outcomes.emplace_back(AdaptiveOutcome{bit, estimate});
        trace.guesses.push_back(estimate);
        likelihood.add_two_outcome(povm, bit);
        const MleResult mle = mle_circular(likelihood, ci);
        estimate = mle.estimate;
        trace.boundary_hit = mle.boundary_hit;
        if (update_centers) {
            ci = CircularInterval(estimate, half_width);
            trace.ci_history.push_back(ci);
        }
    }
    trace.estimate = estimate;
    trace.bad_ci = !ci.contains(theta_true);
    return trace;
}

}  // namespace qphase
