#include "vimsim/converter/outer.hpp"

#include <algorithm>

namespace vimsim::converter {

FollowingOuterDerivatives following_outer_derivatives(const FollowingOuterState& state,
                                                      const OuterMeasurements& meas,
                                                      const FollowingOuterParams& params) {
    (void)state;  // pure integrators; the states appear only through the reference map
    FollowingOuterDerivatives d;
    d.dp_tilde = params.k_i_p * (params.p_set - meas.p_c -
                                 params.r_p * (meas.omega_s - params.omega_set));
    d.dq_tilde = params.k_i_q *
                 (params.q_set - meas.q_c - params.r_q * (meas.v_mag - params.v_set));
    return d;
}

DqVector current_reference(double p_tilde, double q_tilde, const DqVector& v_f,
                           double eps_v, bool* degenerate) {
    const double vm = v_f.norm();
    if (degenerate) *degenerate = vm < eps_v;
    const double den = std::max(vm, eps_v);
    return {(v_f.d * p_tilde + v_f.q * q_tilde) / den,
            (v_f.q * p_tilde - v_f.d * q_tilde) / den};
}

FormingDroopOutput forming_droop_derivatives(double p_filt, double q_filt, double p_c,
                                             double q_c, const FormingParams& params) {
    FormingDroopOutput out;
    out.dp_filt = params.omega_z * (p_c - p_filt);
    out.dq_filt = params.omega_z * (q_c - q_filt);
    out.omega_c = params.omega_set + params.r_p * (params.p_set - p_filt);
    out.v_c_d = params.v_set + params.r_q * (params.q_set - q_filt);
    return out;
}

}  // namespace vimsim::converter
