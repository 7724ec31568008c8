#include "qphase/metrics.hpp"

#include <cmath>
#include <limits>

#include "qphase/error.hpp"
#include "qphase/measurements.hpp"

namespace qphase {

namespace {

void require_nonempty(std::span<const Angle> samples) {
    if (samples.empty()) throw Error(ErrorCode::EmptySample, "no samples");
}

}  // namespace

std::complex<double> circular_first_moment(std::span<const Angle> samples) {
    require_nonempty(samples);
    double c = 0.0;
    double s = 0.0;
    for (const Angle& x : samples) {
        c += std::cos(x.value());
        s += std::sin(x.value());
    }
    const double n = static_cast<double>(samples.size());
    return {c / n, s / n};
}

CircularSummary summarize(std::span<const Angle> estimates, std::optional<Angle> theta_true) {
    require_nonempty(estimates);
    CircularSummary out;
    out.count = estimates.size();
    out.moment = circular_first_moment(estimates);
    const double n = static_cast<double>(out.count);

    // Spread of the per-sample projection whose mean is mu.
    double mean = 0.0;
    double sq = 0.0;
    if (theta_true) {
        for (const Angle& x : estimates) {
            const double v = std::cos(x.value() - theta_true->value());
            mean += v;
            sq += v * v;
        }
        mean /= n;
        out.mu = mean;
    } else {
        out.mu = std::abs(out.moment);
        const double phase = std::arg(out.moment);
        for (const Angle& x : estimates) {
            const double v = std::cos(x.value() - phase);
            mean += v;
            sq += v * v;
        }
        mean /= n;
    }
    if (!(out.mu > 1e-12)) {
        throw Error(ErrorCode::UndefinedVariance, "first moment too small for a Holevo variance");
    }
    out.holevo_variance = 1.0 / (out.mu * out.mu) - 1.0;
    const double var = out.count > 1 ? std::max(0.0, (sq - n * mean * mean) / (n - 1.0)) : 0.0;
    out.holevo_stderr = 2.0 / (out.mu * out.mu * out.mu) * std::sqrt(var / n);
    return out;
}

double holevo_variance(std::span<const Angle> estimates, std::optional<Angle> theta_true) {
    return summarize(estimates, theta_true).holevo_variance;
}

double qcrb(const ProbeConfig& probe, std::size_t n) {
    return 1.0 / (static_cast<double>(n) * probe.fq());
}

double delta1_bound(const ProbeConfig& probe, std::size_t n1, std::size_t n2) {
    return 1.0 / (probe.fq() * static_cast<double>(n2) +
                  static_cast<double>(n1) * covariant_fisher_closed(probe));
}

double two_step_lower_bound(const ProbeConfig& probe, std::size_t n1, std::size_t n2,
                            double c_level, double half_width) {
    return delta1_bound(probe, n1, n2) + (1.0 - c_level) * half_width * half_width;
}

double bad_ci_type1_prob(double fq, std::size_t n, double eps) {
    const double base = (eps - std::sqrt(std::max(fq, 0.0)) * std::sin(eps)) / kPi;
    if (!(base > 0.0)) return 0.0;
    return std::exp(static_cast<double>(n) * std::log(base));
}

double bad_ci_type1_prob(const ProbeConfig& probe, std::size_t n, double eps) {
    return bad_ci_type1_prob(probe.fq(), n, eps);
}

}  // namespace qphase
