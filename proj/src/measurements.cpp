#include "qphase/measurements.hpp"

#include <cmath>
#include <cstdio>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "qphase/error.hpp"

namespace qphase {

namespace {

constexpr double kDirectionTolerance = 1e-10;
constexpr double kSingularAngle = 1e-9;
constexpr double kPureTolerance = 1e-12;
constexpr double kFiniteDifferenceStep = 1e-5;
constexpr double kQuadratureTolerance = 1e-8;
constexpr double kQuadratureTarget = 1e-11;
constexpr double kDensityFloor = 1e-14;
constexpr unsigned kMaxDepth = 15;

double integrate(const std::function<double(double)>& f) {
    double error = 0.0;
    const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        f, 0.0, kTwoPi, kMaxDepth, kQuadratureTarget, &error);
    if (!std::isfinite(value) || error > kQuadratureTolerance) {
        char message[64];
        std::snprintf(message, sizeof message, "estimated error %.3g above tolerance", error);
        throw Error(ErrorCode::QuadratureFailure, message);
    }
    return value;
}

}  // namespace

double CovariantPovm::cos_coupling() const {
    return d_ ? dot(probe_.a(), *d_) : probe_.sqrt_fq();
}

double CovariantPovm::sin_coupling() const {
    return d_ ? dot(probe_.a(), cross(*d_, probe_.n())) : 0.0;
}

CovariantPovm make_covariant_povm(const ProbeConfig& probe, const Vec3& d) {
    if (std::abs(dot(d, probe.n())) > kDirectionTolerance) {
        throw Error(ErrorCode::InvalidDirection, "direction is not orthogonal to the rotation axis");
    }
    if (norm(d) > 1.0 + 1e-12) {
        throw Error(ErrorCode::InvalidDirection, "direction norm exceeds 1");
    }
    return CovariantPovm(probe, d);
}

double two_outcome_prob(const TwoOutcomePovm& povm, Angle theta, int x) {
    const double p1 = 0.5 * (1.0 + std::sin(theta.value() - povm.g.value()) * povm.probe.sqrt_fq());
    return x == 1 ? p1 : 1.0 - p1;
}

double two_outcome_fisher(const TwoOutcomePovm& povm, Angle theta) {
    const double fq = povm.probe.fq();
    const double c = std::cos(theta.value() - povm.g.value());
    const double denominator = (1.0 - fq) + fq * c * c;
    if (1.0 - fq <= kPureTolerance && std::abs(c) <= kSingularAngle) {
        throw Error(ErrorCode::SingularFisher, "measurement orientation is a quarter turn from theta");
    }
    return fq * c * c / denominator;
}

double two_outcome_fisher_limit(const TwoOutcomePovm& povm, Angle theta) {
    const double fq = povm.probe.fq();
    const double c = std::cos(theta.value() - povm.g.value());
    const double denominator = (1.0 - fq) + fq * c * c;
    // F_Q = 1: the information is 1 everywhere off the singular point.
    if (denominator <= 0.0) return 1.0;
    return fq * c * c / denominator;
}

double covariant_density(const ProbeConfig& probe, Angle theta, Angle that_) {
    return (1.0 + probe.sqrt_fq() * std::cos(that_.value() - theta.value())) / kTwoPi;
}

double covariant_fisher_closed(const ProbeConfig& probe) {
    return 1.0 - std::sqrt(1.0 - probe.fq());
}

double general_covariant_density(const CovariantPovm& povm, Angle theta, Angle that_) {
    if (!povm.direction()) {
        throw Error(ErrorCode::InvalidDirection, "general covariant density needs a direction");
    }
    const double delta = that_.value() - theta.value();
    return (1.0 + povm.cos_coupling() * std::cos(delta) - povm.sin_coupling() * std::sin(delta)) /
           kTwoPi;
}

double fisher_by_quadrature(const CircularDensity& density, Angle theta,
                            const CircularDensity& derivative) {
    const double t = theta.value();
    auto integrand = [&](double x) {
        const Angle outcome(x);
        const double p = density(theta, outcome);
        if (p < kDensityFloor) return 0.0;
        double dp;
        if (derivative) {
            dp = derivative(theta, outcome);
        } else {
            dp = (density(Angle(t + kFiniteDifferenceStep), outcome) -
                  density(Angle(t - kFiniteDifferenceStep), outcome)) /
                 (2.0 * kFiniteDifferenceStep);
        }
        return dp * dp / p;
    };
    return integrate(integrand);
}

double integrate_density(const CircularDensity& density, Angle theta) {
    return integrate([&](double x) { return density(theta, Angle(x)); });
}

}  // namespace qphase
