#include "qphase/bloch.hpp"

#include <cmath>
#include <sstream>

#include "qphase/error.hpp"

namespace qphase {

namespace {

constexpr double kNormTolerance = 1e-9;
constexpr double kMinFisher = 1e-12;

std::string describe(const Vec3& v) {
    std::ostringstream os;
    os << '(' << v.x << ", " << v.y << ", " << v.z << ')';
    return os.str();
}

}  // namespace

ProbeConfig make_probe(const Vec3& a, const Vec3& n) {
    for (double c : {a.x, a.y, a.z, n.x, n.y, n.z}) {
        if (!std::isfinite(c)) throw Error(ErrorCode::InvalidVector, "non-finite component");
    }
    const double n_norm = norm(n);
    if (std::abs(n_norm - 1.0) > kNormTolerance) {
        throw Error(ErrorCode::InvalidVector, "rotation axis " + describe(n) + " is not a unit vector");
    }
    const Vec3 axis = (1.0 / n_norm) * n;

    Vec3 bloch = a;
    const double a_norm = norm(a);
    if (a_norm > 1.0 + kNormTolerance) {
        throw Error(ErrorCode::InvalidVector, "Bloch vector " + describe(a) + " lies outside the sphere");
    }
    if (a_norm > 1.0) bloch = (1.0 / a_norm) * a;

    const double axial = dot(bloch, axis);
    const double fq = dot(bloch, bloch) - axial * axial;
    if (!(fq > kMinFisher)) {
        throw Error(ErrorCode::DegenerateProbe,
                    "Bloch vector " + describe(a) + " carries no phase information about axis " +
                        describe(n));
    }
    return ProbeConfig(bloch, axis, fq);
}

Vec3 rotate_bloch(const ProbeConfig& probe, Angle theta) {
    const double t = theta.value();
    const Vec3& a = probe.a();
    const Vec3& n = probe.n();
    const double half = std::sin(0.5 * t);
    return std::cos(t) * a + std::sin(t) * cross(n, a) + (2.0 * dot(n, a) * half * half) * n;
}

}  // namespace qphase
