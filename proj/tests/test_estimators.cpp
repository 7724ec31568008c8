#include <cmath>
#include <variant>
#include <vector>

#include <gtest/gtest.h>

#include "qphase/error.hpp"
#include "qphase/estimators.hpp"
#include "qphase/sampling.hpp"

using namespace qphase;

namespace {

ProbeConfig probe_with_axial(double axial) {
    return make_probe({std::sqrt(1.0 - axial * axial), 0.0, axial}, {0, 0, 1});
}

LogLikelihoodFn as_function(const CircularLogLikelihood& l) {
    return [&l](Angle t) { return l(t); };
}

// Dense brute-force maximizer used as an oracle.
double brute_force_argmax(const LogLikelihoodFn& f, double lo, double hi, int points) {
    double best_t = lo;
    double best = f(Angle(lo));
    for (int i = 1; i <= points; ++i) {
        const double t = lo + (hi - lo) * i / points;
        const double v = f(Angle(t));
        if (v > best) {
            best = v;
            best_t = t;
        }
    }
    return best_t;
}

CircularLogLikelihood two_outcome_likelihood(const ProbeConfig& p, Angle g, int zeros, int total) {
    CircularLogLikelihood l;
    for (int i = 0; i < total; ++i) l.add_two_outcome({p, g}, i < zeros ? 0 : 1);
    return l;
}

CircularLogLikelihood replay(const ProbeConfig& p, const EstimationTrace& trace) {
    CircularLogLikelihood l;
    for (const Observation& o : trace.outcomes) {
        if (const auto* draw = std::get_if<CovariantDraw>(&o)) {
            l.add_covariant(p, draw->outcome);
        } else {
            const auto& bit = std::get<AdaptiveOutcome>(o);
            l.add_two_outcome({p, bit.guess}, bit.bit);
        }
    }
    return l;
}

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorCode::IoError;
}

}  // namespace

TEST(CircularInterval, Membership) {
    const CircularInterval ci(Angle(0.1), 0.5);
    EXPECT_TRUE(ci.contains(Angle(kTwoPi - 0.3)));
    EXPECT_TRUE(ci.contains(Angle(0.6)));
    EXPECT_FALSE(ci.contains(Angle(0.7)));
    EXPECT_FALSE(ci.contains(Angle(kTwoPi - 0.5)));
    EXPECT_NEAR(ci.lower().value(), kTwoPi - 0.4, 1e-15);
    EXPECT_TRUE(CircularInterval(Angle(1.0), 10.0).is_full());
    EXPECT_TRUE(CircularInterval::full_circle().contains(Angle(3.0)));
    EXPECT_EQ(code_of([] { CircularInterval(Angle(0.0), 0.0); }), ErrorCode::EmptyDomain);
    EXPECT_EQ(code_of([] { CircularInterval(Angle(0.0), -1.0); }), ErrorCode::EmptyDomain);

    const CircularInterval b = CircularInterval::from_bounds(kPi / 2, 3 * kPi / 2);
    EXPECT_NEAR(b.center().value(), kPi, 1e-15);
    EXPECT_NEAR(b.half_width(), kPi / 2, 1e-15);
}

TEST(MleTwoOutcome, Examples) {
    auto [a, b] = mle_two_outcome(32, 64, Angle(1.5), 0.75);
    EXPECT_NEAR(a.value(), 1.5, 1e-12);
    EXPECT_NEAR(b.value(), 1.5 + kPi, 1e-12);

    auto [c, d] = mle_two_outcome(0, 10, Angle(0.4), 1.0);
    EXPECT_EQ(c, d);
    EXPECT_NEAR(c.value(), 0.4 + kPi / 2, 1e-12);

    auto [e, f] = mle_two_outcome(75, 100, Angle(0.0), 1.0);
    EXPECT_NEAR(e.value(), kTwoPi - kPi / 6, 1e-12);
    EXPECT_NEAR(f.value(), kPi + kPi / 6, 1e-12);

    // Brute-force maximization of the likelihood agrees with the pair.
    const ProbeConfig p = probe_with_axial(0.0);
    const CircularLogLikelihood l = two_outcome_likelihood(p, Angle(0.0), 75, 100);
    const double t = brute_force_argmax(as_function(l), 0.0, kTwoPi, 200000);
    EXPECT_LT(std::min(circular_distance(Angle(t), e), circular_distance(Angle(t), f)), 1e-4);
}

TEST(MleTwoOutcome, SolutionsSatisfyEquation) {
    for (int m = 0; m <= 40; ++m) {
        for (double fq : {0.3, 0.75, 1.0}) {
            const double s = std::clamp((1.0 - 2.0 * m / 40.0) / std::sqrt(fq), -1.0, 1.0);
            auto [a, b] = mle_two_outcome(m, 40, Angle(2.2), fq);
            EXPECT_LT(std::abs(std::sin(a.value() - 2.2) - s), 1e-12);
            EXPECT_LT(std::abs(std::sin(b.value() - 2.2) - s), 1e-12);
        }
    }
}

TEST(MleCircular, SingleCovariantDraw) {
    const ProbeConfig p = probe_with_axial(0.3);
    for (double x : {0.0, 1.234, 3.0, 6.2}) {
        CircularLogLikelihood l;
        l.add_covariant(p, Angle(x));
        EXPECT_LT(circular_distance(mle_circular(l, CircularInterval::full_circle()).estimate, Angle(x)), 1e-9);
        // Value comparisons alone pin a smooth maximum to about sqrt(epsilon).
        EXPECT_LT(circular_distance(mle_circular(as_function(l), CircularInterval::full_circle()).estimate,
                                    Angle(x)),
                  1e-6);
    }
}

TEST(MleCircular, LargeCovariantSampleIsConsistent) {
    const ProbeConfig p = probe_with_axial(0.0);
    RngStream rng(5, 0);
    CircularLogLikelihood l;
    for (int i = 0; i < 10000; ++i) l.add_covariant(p, sample_covariant(rng, p, Angle(2.0)));
    EXPECT_LT(circular_distance(mle_circular(l, CircularInterval::full_circle()).estimate, Angle(2.0)), 0.05);
}

TEST(MleCircular, BimodalTieGoesToSmallestAngle) {
    const ProbeConfig p = probe_with_axial(0.5);
    const CircularLogLikelihood l = two_outcome_likelihood(p, Angle(1.5), 32, 64);
    EXPECT_NEAR(mle_circular(l, CircularInterval::full_circle()).estimate.value(), 1.5, 1e-9);
    EXPECT_NEAR(mle_circular(as_function(l), CircularInterval::full_circle()).estimate.value(), 1.5, 1e-6);
}

TEST(MleCircular, MatchesBruteForceOnRandomLikelihoods) {
    const ProbeConfig p = probe_with_axial(0.4);
    RngStream rng(77, 0);
    for (int trial = 0; trial < 30; ++trial) {
        CircularLogLikelihood l;
        const Angle theta(rng.uniform() * kTwoPi);
        for (int i = 0; i < 5; ++i) l.add_covariant(p, sample_covariant(rng, p, theta));
        Angle g(rng.uniform() * kTwoPi);
        for (int i = 0; i < 10; ++i) {
            const TwoOutcomePovm povm{p, g};
            l.add_two_outcome(povm, sample_two_outcome(rng, povm, theta));
            g = g + 0.3;
        }
        const MleResult fast = mle_circular(l, CircularInterval::full_circle());
        const MleResult generic = mle_circular(as_function(l), CircularInterval::full_circle());
        const double oracle = brute_force_argmax(as_function(l), 0.0, kTwoPi, 400000);
        EXPECT_LT(circular_distance(fast.estimate, Angle(oracle)), 3e-5) << trial;
        EXPECT_LT(circular_distance(fast.estimate, generic.estimate), 1e-6) << trial;
        EXPECT_NEAR(fast.log_likelihood, generic.log_likelihood, 1e-9);
    }
}

TEST(MleCircular, Equivariance) {
    const ProbeConfig p = probe_with_axial(0.2);
    RngStream rng(8, 0);
    std::vector<Angle> draws;
    for (int i = 0; i < 40; ++i) draws.push_back(sample_covariant(rng, p, Angle(1.0)));
    CircularLogLikelihood base;
    for (Angle x : draws) base.add_covariant(p, x);
    const Angle estimate = mle_circular(base, CircularInterval::full_circle()).estimate;
    for (double delta : {0.37, 2.0, 5.5}) {
        CircularLogLikelihood shifted;
        for (Angle x : draws) shifted.add_covariant(p, x + delta);
        const Angle moved = mle_circular(shifted, CircularInterval::full_circle()).estimate;
        EXPECT_LT(circular_distance(moved, estimate + delta), 1e-9);
    }
}

TEST(MleCircular, BoundaryMaximumSnapsToEdge) {
    const ProbeConfig p = probe_with_axial(0.0);
    CircularLogLikelihood l;
    l.add_two_outcome({p, Angle(0.0)}, 0);  // maximized at 3pi/2
    const CircularInterval domain(Angle(kPi), kPi / 2);
    const MleResult r = mle_circular(l, domain);
    EXPECT_TRUE(r.boundary_hit);
    EXPECT_NEAR(r.estimate.value(), 3 * kPi / 2, 1e-12);

    const CircularInterval narrow(Angle(kPi), 0.3);
    const MleResult n = mle_circular(as_function(l), narrow);
    EXPECT_TRUE(n.boundary_hit);
    EXPECT_NEAR(n.estimate.value(), kPi + 0.3, 1e-12);
}

TEST(MleCircular, InteriorMaximumInRestrictedDomain) {
    const ProbeConfig p = probe_with_axial(0.0);
    CircularLogLikelihood l;
    l.add_covariant(p, Angle(0.05));
    // Domain straddles the 0 / 2pi seam.
    const MleResult r = mle_circular(l, CircularInterval(Angle(kTwoPi - 0.2), 0.5));
    EXPECT_FALSE(r.boundary_hit);
    EXPECT_NEAR(r.estimate.value(), 0.05, 1e-9);
}

TEST(Aqse, FirstStepFromForcedOutcome) {
    const ProbeConfig p = probe_with_axial(0.0);
    RngStream rng(1, 0);
    const EstimationTrace t = aqse_run(rng, p, Angle(0.5 + kPi / 2), 1, Angle(0.5), CircularInterval::full_circle());
    ASSERT_EQ(t.outcomes.size(), 1u);
    EXPECT_EQ(std::get<AdaptiveOutcome>(t.outcomes[0]).bit, 1);
    EXPECT_NEAR(t.estimate.value(), 0.5 + kPi / 2, 1e-9);
    EXPECT_TRUE(t.ci_history.empty());
    EXPECT_EQ(t.guesses.size(), 1u);
}

TEST(Aqse, RestrictedEstimateStaysInDomain) {
    const CircularInterval domain(Angle(kPi), kPi / 2);
    for (double axial : {0.0, 0.5}) {
        const ProbeConfig p = probe_with_axial(axial);
        for (std::uint64_t i = 0; i < 100; ++i) {
            RngStream rng(3, i);
            const EstimationTrace t = aqse_run(rng, p, Angle(kPi), 30, Angle(0.0), domain);
            EXPECT_TRUE(domain.contains(t.estimate));
            for (std::size_t k = 1; k < t.guesses.size(); ++k) EXPECT_TRUE(domain.contains(t.guesses[k]));
        }
    }
}

TEST(CountLocalMaxima, Examples) {
    const ProbeConfig tilted = probe_with_axial(0.5);
    const CircularLogLikelihood bimodal = two_outcome_likelihood(tilted, Angle(1.5), 32, 64);
    EXPECT_EQ(count_local_maxima(bimodal, CircularInterval::full_circle(), 0.01), 2u);
    EXPECT_EQ(count_local_maxima(as_function(bimodal), CircularInterval::full_circle(), 0.01), 2u);

    const ProbeConfig pure = probe_with_axial(0.0);
    RngStream rng(2, 0);
    CircularLogLikelihood cov;
    for (int i = 0; i < 64; ++i) cov.add_covariant(pure, sample_covariant(rng, pure, Angle(2.0)));
    EXPECT_EQ(count_local_maxima(cov, CircularInterval::full_circle(), 0.01), 1u);

    const LogLikelihoodFn flat = [](Angle) { return -3.0; };
    EXPECT_EQ(count_local_maxima(flat, CircularInterval::full_circle(), 0.01), 1u);
    EXPECT_EQ(count_local_maxima(flat, CircularInterval(Angle(1.0), 0.5), 0.01), 1u);
}

TEST(CountLocalMaxima, RestrictedDomainSeesInteriorPeaks) {
    // Maxima at 1.5 and 1.5 + pi.
    const CircularLogLikelihood bimodal = two_outcome_likelihood(probe_with_axial(0.5), Angle(1.5), 32, 64);
    for (double lo : {1.0, 1.1, 1.234567}) {
        const CircularInterval both = CircularInterval::from_bounds(lo, lo + 4.0);
        EXPECT_EQ(count_local_maxima(bimodal, both, 0.01), 2u) << lo;
        EXPECT_EQ(count_local_maxima(as_function(bimodal), both, 0.01), 2u) << lo;
        const CircularInterval one = CircularInterval::from_bounds(lo, lo + 1.5);
        EXPECT_EQ(count_local_maxima(bimodal, one, 0.01), 1u) << lo;
    }
}

TEST(CountLocalMaxima, ToleranceFiltersLowerPeaks) {
    // Two peaks, the second 20% lower in likelihood.
    const LogLikelihoodFn f = [](Angle t) {
        const double x = t.value();
        return std::log(std::exp(-20 * (1 - std::cos(x - 1.0))) + 0.8 * std::exp(-20 * (1 - std::cos(x - 4.0))));
    };
    EXPECT_EQ(count_local_maxima(f, CircularInterval::full_circle(), 0.1), 1u);
    EXPECT_EQ(count_local_maxima(f, CircularInterval::full_circle(), 0.3), 2u);
}

TEST(ConfidenceLevel, CriticalValues) {
    EXPECT_EQ(critical_value(0.95), 1.96);
    EXPECT_EQ(critical_value(0.99), 2.58);
    EXPECT_NEAR(critical_value(0.9), 1.6448536269514722, 1e-8);
    EXPECT_EQ(code_of([] { critical_value(1.0); }), ErrorCode::ConfigError);
    EXPECT_EQ(code_of([] { critical_value(0.0); }), ErrorCode::ConfigError);
}

TEST(ConfidenceLevel, IntervalAndSampleSize) {
    EXPECT_NEAR(confidence_interval(Angle(1.0), 11, 1.0, 2.58).half_width(), 2.58 / std::sqrt(11.0), 1e-15);
    EXPECT_NEAR(confidence_interval(Angle(1.0), 22, 0.5, 2.58).half_width(), 2.58 / std::sqrt(11.0), 1e-15);
    EXPECT_EQ(confidence_interval(Angle(1.0), 11, 1.0, 0.0).half_width(), 1e-6);
    EXPECT_EQ(confidence_interval(Angle(1.0), 1, 0.01, 5.0).half_width(), kPi);

    EXPECT_EQ(min_sample_size(2.58, 1.0, kPi / 4), 11u);
    EXPECT_EQ(min_sample_size(2.58, 0.5, kPi / 4), 22u);
    EXPECT_EQ(min_sample_size(1.96, 1.0, kPi / 4), 7u);
}

TEST(TwoStep, PlanAnchors) {
    const TwoStepPlan a = plan_two_step(probe_with_axial(0.0), 0.99, kPi / 4);
    EXPECT_EQ(a.n1, 11u);
    EXPECT_NEAR(a.ci_half_width, 2.58 / std::sqrt(11.0), 1e-15);
    const TwoStepPlan b = plan_two_step(probe_with_axial(0.5), 0.99, kPi / 4);
    EXPECT_EQ(b.n1, 22u);
    EXPECT_NEAR(b.fisher, 0.5, 1e-12);
}

TEST(TwoStep, BudgetEqualToCovariantStage) {
    const ProbeConfig p = probe_with_axial(0.0);
    RngStream rng(4, 0);
    const EstimationTrace t = two_step_run(rng, p, Angle(kPi), 11, 0.99, kPi / 4, true);
    EXPECT_EQ(t.ci_history.size(), 1u);
    EXPECT_EQ(t.outcomes.size(), 11u);
    EXPECT_TRUE(t.guesses.empty());
    for (const Observation& o : t.outcomes) EXPECT_TRUE(std::holds_alternative<CovariantDraw>(o));
    EXPECT_EQ(t.ci_history.front().center(), t.estimate);
}

TEST(TwoStep, InsufficientBudget) {
    RngStream rng(4, 0);
    EXPECT_EQ(code_of([&] { two_step_run(rng, probe_with_axial(0.0), Angle(kPi), 10, 0.99, kPi / 4, true); }),
              ErrorCode::InsufficientBudget);
}

TEST(TwoStep, TraceInvariants) {
    const ProbeConfig p = probe_with_axial(0.5);
    for (bool update : {true, false}) {
        for (std::uint64_t i = 0; i < 50; ++i) {
            RngStream rng(6, i);
            const EstimationTrace t = two_step_run(rng, p, Angle(kPi), 40, 0.99, kPi / 4, update);
            EXPECT_EQ(t.outcomes.size(), 40u);
            EXPECT_EQ(t.guesses.size(), 18u);
            EXPECT_EQ(t.ci_history.size(), update ? 19u : 1u);
            EXPECT_TRUE(t.ci_history.back().contains(t.estimate));
            EXPECT_EQ(t.bad_ci, !t.ci_history.back().contains(Angle(kPi)));
        }
    }
}

TEST(TwoStep, FixedCenterEstimateInsideStageOneInterval) {
    const ProbeConfig p = probe_with_axial(0.0);
    for (std::uint64_t i = 0; i < 100; ++i) {
        RngStream rng(12, i);
        const EstimationTrace t = two_step_run(rng, p, Angle(1.0), 30, 0.99, kPi / 4, false);
        EXPECT_TRUE(t.ci_history.front().contains(t.estimate));
    }
}

TEST(TwoStep, WideIntervalAtHighConfidence) {
    const ProbeConfig p = probe_with_axial(0.0);
    RngStream rng(13, 0);
    const EstimationTrace t = two_step_run(rng, p, Angle(2.0), 20, 0.9999, kPi, false);
    // z(0.99995) = 3.8905918864, N1 = 4, Fisher 1/2
    EXPECT_NEAR(t.ci_history.front().half_width(), 3.8905918864 / std::sqrt(2.0), 1e-9);
    EXPECT_FALSE(t.bad_ci);
    EXPECT_FALSE(t.boundary_hit);
}

TEST(TwoStep, JointLikelihoodUnimodalInsideInterval) {
    const ProbeConfig p = probe_with_axial(0.0);
    int unimodal = 0;
    int considered = 0;
    for (std::uint64_t i = 0; i < 1000; ++i) {
        RngStream rng(21, i);
        const EstimationTrace t = two_step_run(rng, p, Angle(kPi), 31, 0.99, kPi / 4, false);
        const CircularInterval& ci = t.ci_history.front();
        if (!ci.contains(Angle(kPi))) continue;
        ++considered;
        unimodal += count_local_maxima(replay(p, t), ci, 0.01) == 1;
    }
    EXPECT_GE(unimodal, 0.99 * considered);
}
