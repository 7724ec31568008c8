#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qphase {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Reduces x to [0, 2pi).
inline double canonical_angle(double x) {
    double r = std::fmod(x, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    // fmod of a tiny negative number plus 2pi can round up to 2pi.
    if (r >= kTwoPi) r = 0.0;
    return r;
}

/// Phase value on the circle, always stored in [0, 2pi).
class Angle {
public:
    constexpr Angle() = default;
    explicit Angle(double radians) : value_(canonical_angle(radians)) {}

    double value() const { return value_; }

    friend Angle operator+(Angle a, Angle b) { return Angle(a.value_ + b.value_); }
    friend Angle operator-(Angle a, Angle b) { return Angle(a.value_ - b.value_); }
    friend Angle operator+(Angle a, double d) { return Angle(a.value_ + d); }
    friend Angle operator-(Angle a, double d) { return Angle(a.value_ - d); }
    friend bool operator==(Angle a, Angle b) = default;

private:
    double value_ = 0.0;
};

/// Shortest arc length between two angles, in [0, pi].
inline double circular_distance(Angle x, Angle y) {
    const double d = std::abs(x.value() - y.value());
    return std::min(d, kTwoPi - d);
}

/// Signed shortest offset y - x, in [-pi, pi).
inline double signed_offset(Angle from, Angle to) {
    double d = to.value() - from.value();
    if (d >= kPi) d -= kTwoPi;
    if (d < -kPi) d += kTwoPi;
    return d;
}

}  // namespace qphase
