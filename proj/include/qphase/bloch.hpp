#pragma once

#include <cmath>

#include "qphase/angle.hpp"

namespace qphase {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend Vec3 operator*(double s, const Vec3& v) { return {s * v.x, s * v.y, s * v.z}; }
    friend bool operator==(const Vec3&, const Vec3&) = default;
};

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

/// Probe qubit (Bloch vector a) together with the rotation axis n that
/// encodes the phase. Immutable once built; use make_probe().
class ProbeConfig {
public:
    const Vec3& a() const { return a_; }
    const Vec3& n() const { return n_; }
    /// Quantum Fisher information |a|^2 - (a.n)^2, constant in theta.
    double fq() const { return fq_; }
    double sqrt_fq() const { return sqrt_fq_; }
    /// Axial component a.n.
    double axial() const { return dot(a_, n_); }

private:
    friend ProbeConfig make_probe(const Vec3& a, const Vec3& n);
    ProbeConfig(const Vec3& a, const Vec3& n, double fq)
        : a_(a), n_(n), fq_(fq), sqrt_fq_(std::sqrt(fq)) {}

    Vec3 a_;
    Vec3 n_;
    double fq_;
    double sqrt_fq_;
};

/// Validates and normalizes a probe. |n| within 1e-9 of 1 is renormalized;
/// |a| up to 1 + 1e-9 is clamped to the sphere.
///
/// Throws Error(InvalidVector) for out-of-tolerance norms and
/// Error(DegenerateProbe) when the probe carries no phase information.
ProbeConfig make_probe(const Vec3& a, const Vec3& n);

/// Bloch vector after rotation by theta about the probe axis.
Vec3 rotate_bloch(const ProbeConfig& probe, Angle theta);

inline double quantum_fisher_information(const ProbeConfig& probe) { return probe.fq(); }

}  // namespace qphase
