#include "qphase/sampling.hpp"

#include <cmath>

#include "qphase/error.hpp"

namespace qphase {

namespace {

// Uniform proposal on [0, 2pi) against the density
// (1 + cos_c cos(x - theta) - sin_c sin(x - theta)) / 2pi, whose maximum is
// (1 + sqrt(cos_c^2 + sin_c^2)) / 2pi.
Angle rejection_sample(RngStream& rng, double theta, double cos_c, double sin_c,
                       RejectionStats* stats) {
    const double envelope = 1.0 + std::hypot(cos_c, sin_c);
    for (;;) {
        const double x = kTwoPi * rng.uniform();
        const double u = rng.uniform();
        const double delta = x - theta;
        const double height = 1.0 + cos_c * std::cos(delta) - sin_c * std::sin(delta);
        if (stats) ++stats->proposals;
        if (u * envelope < height) {
            if (stats) ++stats->accepted;
            return Angle(x);
        }
    }
}

}  // namespace

int sample_two_outcome(RngStream& rng, const TwoOutcomePovm& povm, Angle theta) {
    return rng.uniform() < two_outcome_prob(povm, theta, 1) ? 1 : 0;
}

Angle sample_covariant(RngStream& rng, const ProbeConfig& probe, Angle theta,
                       RejectionStats* stats) {
    return rejection_sample(rng, theta.value(), probe.sqrt_fq(), 0.0, stats);
}

Angle sample_general_covariant(RngStream& rng, const CovariantPovm& povm, Angle theta,
                               RejectionStats* stats) {
    if (!povm.direction()) {
        throw Error(ErrorCode::InvalidDirection, "general covariant sampler needs a direction");
    }
    return rejection_sample(rng, theta.value(), povm.cos_coupling(), povm.sin_coupling(), stats);
}

}  // namespace qphase
