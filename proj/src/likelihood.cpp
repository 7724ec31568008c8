#include "qphase/likelihood.hpp"

#include <cmath>
#include <limits>

namespace qphase {

namespace {

struct GridTable {
    std::array<double, CircularLogLikelihood::kGridSize> cos;
    std::array<double, CircularLogLikelihood::kGridSize> sin;

    GridTable() {
        for (std::size_t j = 0; j < CircularLogLikelihood::kGridSize; ++j) {
            const double t = CircularLogLikelihood::grid_angle(j);
            cos[j] = std::cos(t);
            sin[j] = std::sin(t);
        }
    }
};

const GridTable& grid_table() {
    static const GridTable table;
    return table;
}

// Rounding can push a vanishing factor slightly negative.
inline double safe_log(double u) {
    return u > 0.0 ? std::log(u) : -std::numeric_limits<double>::infinity();
}

}  // namespace

CircularLogLikelihood::CircularLogLikelihood(bool track_grid) : track_grid_(track_grid) {
    if (track_grid_) grid_.assign(kGridSize, 0.0);
}

double CircularLogLikelihood::grid_angle(std::size_t j) {
    return kTwoPi * static_cast<double>(j) / static_cast<double>(kGridSize);
}

void CircularLogLikelihood::add_covariant(const ProbeConfig& probe, Angle draw) {
    // 1 + r cos(x - t) = 1 + (r cos x) cos t + (r sin x) sin t
    const double r = probe.sqrt_fq();
    add_term(r * std::cos(draw.value()), r * std::sin(draw.value()), -std::log(kTwoPi));
}

void CircularLogLikelihood::add_two_outcome(const TwoOutcomePovm& povm, int x) {
    // 1 + b sin(t - g) = 1 + (-b sin g) cos t + (b cos g) sin t, b = +/- sqrt(F_Q)
    const double b = (x == 1 ? 1.0 : -1.0) * povm.probe.sqrt_fq();
    const double g = povm.g.value();
    add_term(-b * std::sin(g), b * std::cos(g), std::log(0.5));
}

void CircularLogLikelihood::add_term(double cos_coeff, double sin_coeff, double constant) {
    cos_coeff_.push_back(cos_coeff);
    sin_coeff_.push_back(sin_coeff);
    constant_ += constant;
    if (track_grid_) {
        const GridTable& table = grid_table();
        for (std::size_t j = 0; j < kGridSize; ++j) {
            grid_[j] += safe_log(1.0 + cos_coeff * table.cos[j] + sin_coeff * table.sin[j]) + constant;
        }
    }
}

double CircularLogLikelihood::value(double theta) const {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    double total = constant_;
    for (std::size_t i = 0; i < cos_coeff_.size(); ++i) {
        total += safe_log(1.0 + cos_coeff_[i] * c + sin_coeff_[i] * s);
    }
    return total;
}

CircularLogLikelihood::Derivatives CircularLogLikelihood::derivatives(double theta) const {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    Derivatives out{constant_, 0.0, 0.0};
    for (std::size_t i = 0; i < cos_coeff_.size(); ++i) {
        const double u = 1.0 + cos_coeff_[i] * c + sin_coeff_[i] * s;
        const double du = -cos_coeff_[i] * s + sin_coeff_[i] * c;
        const double ratio = du / u;
        out.value += safe_log(u);
        out.score += ratio;
        // u'' = 1 - u
        out.curvature += (1.0 - u) / u - ratio * ratio;
    }
    return out;
}

std::span<const double> CircularLogLikelihood::grid() const { return grid_; }

}  // namespace qphase
