#include "qphase/entangled.hpp"

#include <cmath>

#include "qphase/error.hpp"

namespace qphase {

SpectralWeights eigen_weights(const ProbeConfig& probe, std::size_t n) {
    if (n == 0) throw Error(ErrorCode::ConfigError, "probe count must be at least 1");
    if (norm(probe.a()) < 1.0 - 1e-9) {
        throw Error(ErrorCode::MixedProbe, "entangled benchmark requires a pure probe (|a| = 1)");
    }
    const double axial = probe.axial();
    const double alpha = 0.5 * (1.0 + axial);
    const double beta = 0.5 * (1.0 - axial);
    const double log_alpha = std::log(alpha);
    const double log_beta = std::log(beta);
    const double nn = static_cast<double>(n);

    SpectralWeights w;
    w.n = n;
    w.q.resize(n + 1);
    auto scaled = [](double count, double log_p) { return count == 0.0 ? 0.0 : count * log_p; };
    double total = 0.0;
    for (std::size_t k = 0; k <= n; ++k) {
        const double kk = static_cast<double>(k);
        const double log_binom = std::lgamma(nn + 1.0) - std::lgamma(kk + 1.0) - std::lgamma(nn - kk + 1.0);
        w.q[k] = std::exp(log_binom + scaled(nn - kk, log_alpha) + scaled(kk, log_beta));
        total += w.q[k];
    }
    // lgamma rounding leaves the sum a few ulps per term away from 1.
    for (double& q : w.q) q /= total;
    return w;
}

double ent_holevo_variance(const ProbeConfig& probe, std::size_t n) {
    const SpectralWeights w = eigen_weights(probe, n);
    double mu = 0.0;
    for (std::size_t k = 0; k < n; ++k) mu += std::sqrt(w.q[k] * w.q[k + 1]);
    if (mu < 1e-300) throw Error(ErrorCode::DegenerateMoment, "first moment vanishes");
    return 1.0 / (mu * mu) - 1.0;
}

}  // namespace qphase
