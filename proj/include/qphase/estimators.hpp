#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <variant>
#include <vector>

#include "qphase/angle.hpp"
#include "qphase/bloch.hpp"
#include "qphase/likelihood.hpp"
#include "qphase/measurements.hpp"
#include "qphase/rng.hpp"

namespace qphase {

/// Closed arc {x : circular_distance(x, center) <= half_width}.
/// half_width is clamped to pi (the full circle); non-positive widths throw
/// Error(EmptyDomain).
class CircularInterval {
public:
    CircularInterval(Angle center, double half_width);

    static CircularInterval full_circle() { return CircularInterval(Angle(0.0), kPi); }
    /// Arc running counter-clockwise from lo to hi (hi > lo as real numbers).
    static CircularInterval from_bounds(double lo, double hi);

    Angle center() const { return center_; }
    double half_width() const { return half_width_; }
    bool is_full() const { return half_width_ >= kPi; }
    Angle lower() const { return center_ - half_width_; }
    Angle upper() const { return center_ + half_width_; }

    bool contains(Angle x) const;

private:
    Angle center_;
    double half_width_;
};

struct MleResult {
    Angle estimate;
    double log_likelihood = 0.0;
    bool boundary_hit = false;
};

using LogLikelihoodFn = std::function<double(Angle)>;

/// Global maximizer over `domain`: 720-point scan of the circle restricted
/// to the domain (plus its endpoints), then golden-section refinement of
/// every competitive grid maximum to 1e-10. Ties within 1e-12 go to the
/// smallest canonical angle. Maxima at a restricted domain's edge are
/// snapped to the edge and reported through boundary_hit.
MleResult mle_circular(const LogLikelihoodFn& log_likelihood, const CircularInterval& domain);

/// Same contract; uses the likelihood's cached grid and refines with a
/// bracketed Newton iteration on the analytic score (golden-section
/// fallback when the bracket is not clean).
MleResult mle_circular(const CircularLogLikelihood& log_likelihood, const CircularInterval& domain);

/// Both arcsin solutions of the two-outcome likelihood equation. When the
/// clamped argument is +/-1 the pair holds one value twice.
std::pair<Angle, Angle> mle_two_outcome(std::size_t zeros, std::size_t total, Angle g, double fq);

/// Number of local maxima on the 720-point scan whose likelihood (not
/// log-likelihood) is within rel_tol of the global maximum. Runs of equal
/// values count once.
std::size_t count_local_maxima(const LogLikelihoodFn& log_likelihood,
                               const CircularInterval& domain, double rel_tol);
std::size_t count_local_maxima(const CircularLogLikelihood& log_likelihood,
                               const CircularInterval& domain, double rel_tol);

/// Two-sided standard normal critical value for a confidence level.
/// 0.95 and 0.99 map to 1.96 and 2.58; anything else uses the normal
/// quantile. Levels outside (0, 1) have no finite value and throw ConfigError.
double critical_value(double c_level);

/// Arc centered on the estimate with half-width c / sqrt(n1 F), clamped to
/// [1e-6, pi].
CircularInterval confidence_interval(Angle estimate, std::size_t n1, double fisher, double c);

/// ceil(c^2 / (F E^2)).
std::size_t min_sample_size(double c, double fisher, double half_width_target);

struct CovariantDraw {
    Angle outcome;
};

struct AdaptiveOutcome {
    int bit;
    Angle guess;
};

using Observation = std::variant<CovariantDraw, AdaptiveOutcome>;

struct EstimationTrace {
    std::vector<Observation> outcomes;
    /// Orientation used for each adaptive outcome, in order.
    std::vector<Angle> guesses;
    std::vector<CircularInterval> ci_history;
    Angle estimate;
    bool bad_ci = false;
    bool boundary_hit = false;
};

/// n independent M* draws, MLE over the full circle.
EstimationTrace covariant_run(RngStream& rng, const ProbeConfig& probe, Angle theta_true,
                              std::size_t n);

/// Adaptive scheme: measure with M_{g_{k-1}}, then set g_k to the MLE of the
/// accumulated likelihood over `domain` (full circle = unrestricted).
EstimationTrace aqse_run(RngStream& rng, const ProbeConfig& probe, Angle theta_true, std::size_t n,
                         Angle g0, const CircularInterval& domain);

/// Stage-1 parameters of the two-step scheme.
struct TwoStepPlan {
    double c;
    double fisher;              // 1 - sqrt(1 - F_Q)
    std::size_t n1;             // covariant draws
    double ci_half_width;       // min(c / sqrt(n1 F), E)
};

TwoStepPlan plan_two_step(const ProbeConfig& probe, double c_level, double half_width);

/// Covariant stage producing a confidence interval, then adaptive steps
/// restricted to that interval on the joint likelihood. With
/// update_centers the interval follows each new estimate with half-width
/// `half_width`. Throws Error(InsufficientBudget) when n < n1.
EstimationTrace two_step_run(RngStream& rng, const ProbeConfig& probe, Angle theta_true,
                             std::size_t n, double c_level, double half_width,
                             bool update_centers);

}  // namespace qphase
