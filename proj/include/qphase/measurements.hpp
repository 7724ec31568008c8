#pragma once

#include <functional>
#include <optional>

#include "qphase/angle.hpp"
#include "qphase/bloch.hpp"

namespace qphase {

/// Locally optimal two-outcome measurement aimed at orientation g.
struct TwoOutcomePovm {
    ProbeConfig probe;
    Angle g;
};

/// Covariant measurement. Without a direction it is the optimal M*; with
/// one it is the general covariant element built from d (d orthogonal to n,
/// |d| <= 1). Build the general form through make_covariant_povm().
class CovariantPovm {
public:
    explicit CovariantPovm(const ProbeConfig& probe) : probe_(probe) {}

    const ProbeConfig& probe() const { return probe_; }
    const std::optional<Vec3>& direction() const { return d_; }

    /// cos and sin couplings of the induced density: a.d and a.(d x n).
    double cos_coupling() const;
    double sin_coupling() const;

private:
    friend CovariantPovm make_covariant_povm(const ProbeConfig& probe, const Vec3& d);
    CovariantPovm(const ProbeConfig& probe, const Vec3& d) : probe_(probe), d_(d) {}

    ProbeConfig probe_;
    std::optional<Vec3> d_;
};

/// Throws Error(InvalidDirection) when |d.n| > 1e-10 or |d| > 1.
CovariantPovm make_covariant_povm(const ProbeConfig& probe, const Vec3& d);

/// p(x | theta; g) = (1 +/- sin(theta - g) sqrt(F_Q)) / 2, x in {0, 1}.
double two_outcome_prob(const TwoOutcomePovm& povm, Angle theta, int x);

/// Classical Fisher information of M_g at theta.
/// Throws Error(SingularFisher) for F_Q = 1 with theta - g within 1e-9 of
/// +/- pi/2, where the expression is 0/0.
double two_outcome_fisher(const TwoOutcomePovm& povm, Angle theta);

/// Same quantity, but returns the limit along theta at the singular point.
double two_outcome_fisher_limit(const TwoOutcomePovm& povm, Angle theta);

/// Density (per radian) of the M* outcome that_ given theta.
double covariant_density(const ProbeConfig& probe, Angle theta, Angle that_);

/// 1 - sqrt(1 - F_Q).
double covariant_fisher_closed(const ProbeConfig& probe);

/// Density of the general covariant family. Requires a direction.
double general_covariant_density(const CovariantPovm& povm, Angle theta, Angle that_);

using CircularDensity = std::function<double(Angle theta, Angle that_)>;

/// Fisher information E[(d/dtheta log p)^2] by adaptive Gauss-Kronrod
/// quadrature over that_ in [0, 2pi). Without `derivative` the theta
/// derivative is a central difference with step 1e-5.
/// Throws Error(QuadratureFailure) when the 1e-9 absolute tolerance is missed.
double fisher_by_quadrature(const CircularDensity& density, Angle theta,
                            const CircularDensity& derivative = {});

/// Integral of density(theta, .) over [0, 2pi), same quadrature rule.
double integrate_density(const CircularDensity& density, Angle theta);

}  // namespace qphase
