#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "qphase/angle.hpp"
#include "qphase/measurements.hpp"

namespace qphase {

/// Log-likelihood of a phase built from independent observations.
///
/// Every observation model used here contributes a term of the form
///     log(1 + A cos(theta) + B sin(theta)) + const,
/// so the likelihood is stored as coefficient pairs. This gives the value,
/// score and curvature in closed form, and lets a 720-point grid of values
/// be maintained incrementally as observations arrive.
class CircularLogLikelihood {
public:
    static constexpr std::size_t kGridSize = 720;

    struct Derivatives {
        double value;
        double score;      // d/dtheta
        double curvature;  // d^2/dtheta^2
    };

    explicit CircularLogLikelihood(bool track_grid = true);

    /// M* outcome `draw`: log((1 + sqrt(F_Q) cos(draw - theta)) / 2pi).
    void add_covariant(const ProbeConfig& probe, Angle draw);
    /// Two-outcome result x of M_g: log p(x | theta; g).
    void add_two_outcome(const TwoOutcomePovm& povm, int x);
    void add_term(double cos_coeff, double sin_coeff, double constant);

    double operator()(Angle theta) const { return value(theta.value()); }
    double value(double theta) const;
    Derivatives derivatives(double theta) const;

    std::size_t size() const { return cos_coeff_.size(); }
    bool tracks_grid() const { return track_grid_; }
    /// Values at grid_angle(j), j = 0..719. Empty unless grid tracking is on.
    std::span<const double> grid() const;

    static double grid_angle(std::size_t j);

private:
    bool track_grid_;
    double constant_ = 0.0;
    std::vector<double> cos_coeff_;
    std::vector<double> sin_coeff_;
    std::vector<double> grid_;
};

}  // namespace qphase
