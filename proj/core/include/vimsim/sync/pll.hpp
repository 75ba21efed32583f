#pragma once

#include "vimsim/core/dq.hpp"

namespace vimsim::sync {

// Type-2 SRF-PLL gains.
struct PllParams {
    double k_p = 0.5;    // pu frequency per pu voltage
    double k_i = 20.0;   // same, per second
    double omega0 = 1.0; // pu nominal frequency

    bool valid() const { return k_p > 0.0 && k_i > 0.0; }
};

struct PllState {
    double epsilon = 0.0;  // integrator state [pu s]
    double theta_s = 0.0;  // rad, wrapped to [-pi, pi)
};

struct PllDerivatives {
    double d_epsilon = 0.0;
    double d_theta_s = 0.0;  // rad/s
};

// v_f is expressed in the PLL's own SRF at angle theta_s; the raw q-component
// drives the loop.
double pll_frequency(const PllState& state, const DqVector& v_f, const PllParams& params);

PllDerivatives pll_derivatives(const PllState& state, const DqVector& v_f,
                               const PllParams& params, double omega_b);

double wrap_angle(double theta);

}  // namespace vimsim::sync
