#pragma once

#include "vimsim/core/dq.hpp"

namespace vimsim::converter {

// Grid-following outer power loop (P-f and Q-V droop with integral control).
struct FollowingOuterParams {
    double k_i_p = 10.0;   // integral gain on active power error [1/s]
    double k_i_q = 10.0;   // integral gain on reactive power error [1/s]
    double r_p = 0.0;      // P-f droop gain [pu power / pu frequency]
    double r_q = 0.0;      // Q-V droop gain [pu power / pu voltage]
    double p_set = 0.0;    // pu
    double q_set = 0.0;    // pu
    double v_set = 1.0;    // pu
    double omega_set = 1.0;  // pu

    bool valid() const {
        return k_i_p >= 0.0 && k_i_q >= 0.0 && r_p >= 0.0 && r_q >= 0.0 && v_set > 0.0;
    }
};

struct FollowingOuterState {
    double p_tilde = 0.0;
    double q_tilde = 0.0;
};

struct OuterMeasurements {
    double p_c = 0.0;
    double q_c = 0.0;
    double v_mag = 0.0;
    double omega_s = 0.0;
};

struct FollowingOuterDerivatives {
    double dp_tilde = 0.0;
    double dq_tilde = 0.0;
};

FollowingOuterDerivatives following_outer_derivatives(const FollowingOuterState& state,
                                                      const OuterMeasurements& meas,
                                                      const FollowingOuterParams& params);

// Internal power references mapped to a current reference that keeps the
// converter power output constant. Degenerate voltage is handled by a
// per-unit floor on the magnitude; *degenerate is set when the floor engages.
DqVector current_reference(double p_tilde, double q_tilde, const DqVector& v_f,
                           double eps_v, bool* degenerate = nullptr);

// Droop-controlled grid-forming outer loop.
struct FormingParams {
    double r_p = 0.01;       // pu frequency per pu power
    double r_q = 0.02;       // pu voltage per pu power
    double omega_z = 31.4159;  // low-pass cut-off [rad/s]
    double p_set = 0.0;
    double q_set = 0.0;
    double v_set = 1.0;
    double omega_set = 1.0;

    bool valid() const { return omega_z > 0.0 && r_p >= 0.0 && r_q >= 0.0; }
};

struct FormingDroopOutput {
    double dp_filt = 0.0;
    double dq_filt = 0.0;
    double omega_c = 0.0;  // pu internal frequency
    double v_c_d = 0.0;    // pu d-axis voltage reference (v_c_q = 0)
};

FormingDroopOutput forming_droop_derivatives(double p_filt, double q_filt, double p_c,
                                             double q_c, const FormingParams& params);

}  // namespace vimsim::converter
