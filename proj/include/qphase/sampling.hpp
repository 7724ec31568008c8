#pragma once

#include <cstdint>

#include "qphase/angle.hpp"
#include "qphase/measurements.hpp"
#include "qphase/rng.hpp"

namespace qphase {

/// Proposal/acceptance tally for the rejection samplers.
struct RejectionStats {
    std::uint64_t proposals = 0;
    std::uint64_t accepted = 0;
};

int sample_two_outcome(RngStream& rng, const TwoOutcomePovm& povm, Angle theta);

/// Draw from the M* density by rejection against a uniform proposal.
Angle sample_covariant(RngStream& rng, const ProbeConfig& probe, Angle theta,
                       RejectionStats* stats = nullptr);

/// Draw from the general covariant density. Throws Error(InvalidDirection)
/// if the povm has no direction.
Angle sample_general_covariant(RngStream& rng, const CovariantPovm& povm, Angle theta,
                               RejectionStats* stats = nullptr);

}  // namespace qphase
