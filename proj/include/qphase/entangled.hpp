#pragma once

#include <cstddef>
#include <vector>

#include "qphase/bloch.hpp"

namespace qphase {

/// Weights of the N-copy probe on the eigenspaces of the collective
/// generator: q[k] belongs to eigenvalue N/2 - k.
struct SpectralWeights {
    std::size_t n = 0;
    std::vector<double> q;
};

/// Binomial weights C(N,k) alpha^(N-k) beta^k, alpha = (1 + a.n)/2,
/// evaluated in log space. Throws Error(MixedProbe) unless |a| = 1.
SpectralWeights eigen_weights(const ProbeConfig& probe, std::size_t n);

/// Holevo variance of the optimal joint covariant measurement on n copies:
/// mu = sum_k sqrt(q_k q_{k+1}), V = mu^-2 - 1. Analytic, no sampling.
double ent_holevo_variance(const ProbeConfig& probe, std::size_t n);

}  // namespace qphase
