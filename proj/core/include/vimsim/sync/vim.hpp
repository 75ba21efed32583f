#pragma once

#include <array>
#include <complex>

#include "vimsim/core/dq.hpp"

namespace vimsim::sync {

// Parameters of the virtual induction machine synchronization unit.
// All electrical quantities per-unit, h_inertia in seconds.
struct VimParams {
    double h_inertia = 5.0;      // normalized inertia constant H [s]
    double d_damping = 0.658;    // pu torque per pu speed deviation
    double r_r = 0.0005;         // rotor resistance [pu]
    double l_r = 0.05;           // rotor inductance [pu]
    double l_m = 0.6;            // mutual inductance [pu]
    double omega0_star = 1.0;    // initial rotor speed setpoint [pu]
    double k_nu_d = 0.001;       // derivative gain of the slip PD controller
    double slip_min = -0.05;     // lower slip saturation limit [pu]
    double slip_max = 0.05;      // upper slip saturation limit [pu]
    double eps_div = 0.05;       // current floor regularizing i_g^q / i_g^d [pu]

    bool valid() const {
        return h_inertia > 0.0 && r_r > 0.0 && l_r > 0.0 && l_m > 0.0 &&
               d_damping >= 0.0 && slip_min < 0.0 && 0.0 < slip_max && eps_div > 0.0;
    }
};

// Differential states of the VIM: electrical torque and rotor speed deviation.
struct VimState {
    double tau_e = 0.0;          // pu electrical torque
    double delta_omega_r = 0.0;  // pu rotor speed deviation
};

// Algebraic outputs of the VIM at a converged step.
struct VimAlgebraic {
    double phi = 0.0;             // d/dt of the current quotient [1/s]
    double phi_d = 0.0;           // d-axis current derivative [pu/s]
    double phi_q = 0.0;           // q-axis current derivative [pu/s]
    double omega_nu_tilde = 0.0;  // unsaturated slip [pu]
    double omega_nu = 0.0;        // saturated slip [pu]
    double omega_s = 0.0;         // synchronous frequency estimate [pu]
};

// Rotor-flux transfer function psi_r^d(s) = R_r L_m / (R_r + s L_r).
std::complex<double> k_psi_eval(std::complex<double> s, const VimParams& params);

// Torque transfer function K_e(s) = k_pf (L_m / L_r) K_psi(s).
// k_pf = 1 in the per-unit convention; 3/2 reproduces the SI form and is
// used by the oracle tests only.
std::complex<double> k_e_eval(std::complex<double> s, const VimParams& params,
                              double k_pf = 1.0);

// Nested min/max slip saturation, written exactly as the closed-form
// composition of max with the lower limit followed by min with the upper one.
double saturate_slip(double omega_nu_tilde, double slip_min, double slip_max);

// Sign-preserving denominator regularization for the current quotient.
double regularized_d_current(double i_g_d, double eps_div);

struct VimDerivatives {
    double d_tau_e = 0.0;          // pu/s
    double d_delta_omega_r = 0.0;  // pu/s
};

// Differential part of the VIM DAE block. omega_b converts pu-time dynamics
// of the torque lag to seconds; the swing equation is already in seconds via H.
VimDerivatives vim_derivatives(const VimState& state, const DqVector& v_f,
                               const DqVector& i_g, const VimParams& params,
                               double omega_b);

// Transformer branch parameters seen by the slip estimator.
struct VimNetworkParams {
    double r_t = 0.01;  // pu
    double l_t = 0.05;  // pu
};

// The six algebraic residuals whose simultaneous zero defines
// (phi_d, phi_q, phi, omega_nu_tilde, omega_nu, omega_s).
std::array<double, 6> vim_algebraic_residuals(const VimState& state,
                                              const VimAlgebraic& alg,
                                              const DqVector& v_f, const DqVector& i_g,
                                              const DqVector& v_t,
                                              const VimNetworkParams& net,
                                              const VimParams& params, double omega_b);

}  // namespace vimsim::sync
