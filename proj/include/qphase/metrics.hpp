#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>

#include "qphase/angle.hpp"
#include "qphase/bloch.hpp"

namespace qphase {

struct CircularSummary {
    std::complex<double> moment;
    /// |moment|, or mean cos(x - theta) when a true phase was supplied.
    double mu = 0.0;
    double holevo_variance = 0.0;
    /// Monte Carlo standard error of holevo_variance (delta method).
    double holevo_stderr = 0.0;
    std::size_t count = 0;
};

/// Empirical E[exp(i x)]. Throws Error(EmptySample).
std::complex<double> circular_first_moment(std::span<const Angle> samples);

/// mu^-2 - 1 with mu = |first moment| (theta_true absent) or the mean of
/// cos(x - theta_true). Throws Error(UndefinedVariance) for mu <= 1e-12.
double holevo_variance(std::span<const Angle> estimates,
                       std::optional<Angle> theta_true = std::nullopt);

CircularSummary summarize(std::span<const Angle> estimates,
                          std::optional<Angle> theta_true = std::nullopt);

/// 1 / (n F_Q).
double qcrb(const ProbeConfig& probe, std::size_t n);

/// 1 / (F_Q n2 + n1 F(M*)).
double delta1_bound(const ProbeConfig& probe, std::size_t n1, std::size_t n2);

/// delta1_bound + (1 - c_level) E^2.
double two_step_lower_bound(const ProbeConfig& probe, std::size_t n1, std::size_t n2,
                            double c_level, double half_width);

/// Probability that all n covariant draws land within eps of the antipode
/// theta + pi: ((eps - sqrt(F_Q) sin eps) / pi)^n, via logs.
double bad_ci_type1_prob(double fq, std::size_t n, double eps);
double bad_ci_type1_prob(const ProbeConfig& probe, std::size_t n, double eps);

}  // namespace qphase
