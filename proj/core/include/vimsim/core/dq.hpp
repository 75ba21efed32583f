#pragma once

#include <cmath>

namespace vimsim {

// Two-component signal in a synchronously rotating frame, per-unit.
struct DqVector {
    double d = 0.0;
    double q = 0.0;

    double norm() const { return std::hypot(d, q); }
    double norm2() const { return d * d + q * q; }

    DqVector operator+(const DqVector& o) const { return {d + o.d, q + o.q}; }
    DqVector operator-(const DqVector& o) const { return {d - o.d, q - o.q}; }
    DqVector operator-() const { return {-d, -q}; }
    DqVector operator*(double s) const { return {d * s, q * s}; }
    DqVector operator/(double s) const { return {d / s, q / s}; }
    DqVector& operator+=(const DqVector& o) { d += o.d; q += o.q; return *this; }
    DqVector& operator-=(const DqVector& o) { d -= o.d; q -= o.q; return *this; }
};

inline DqVector operator*(double s, const DqVector& v) { return v * s; }

inline double dot(const DqVector& a, const DqVector& b) {
    return a.d * b.d + a.q * b.q;
}

// The 90-degree rotation matrix [[0,-1],[1,0]] applied to v.
inline DqVector rotate90(const DqVector& v) { return {-v.q, v.d}; }

// Rotation by an arbitrary angle (counter-clockwise, same convention as
// rotate90 at theta = pi/2).
inline DqVector rotate(const DqVector& v, double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    return {c * v.d - s * v.q, s * v.d + c * v.q};
}

struct PowerPq {
    double p = 0.0;
    double q = 0.0;
};

// Instantaneous active and reactive power in the amplitude-invariant
// per-unit convention (the three-phase 3/2 factor is absorbed by the bases).
inline PowerPq instantaneous_power(const DqVector& v_f, const DqVector& i_g) {
    return {dot(v_f, i_g), dot(v_f, rotate90(i_g))};
}

}  // namespace vimsim
