#include "vimsim/converter/device.hpp"

#include <algorithm>

namespace vimsim::converter {

CurrentControllerOutput current_controller(const DqVector& i_ref, const DqVector& i_f,
                                           const DqVector& v_f, const DqVector& xi,
                                           double omega, double v_dc,
                                           const DeviceParams& params) {
    CurrentControllerOutput out;
    const DqVector e = i_ref - i_f;
    const DqVector decouple = params.l_f * omega * rotate90(i_f);
    const DqVector v_unsat =
        v_f + params.k_p_c * e + params.k_i_c * xi + decouple;
    const double v_lim = params.m_max * std::max(v_dc, 0.0);
    const double mag = v_unsat.norm();
    DqVector v_sw = v_unsat;
    if (mag > v_lim && mag > 0.0) {
        v_sw = v_unsat * (v_lim / mag);
        out.saturated = true;
    }
    // back-calculation anti-windup; identical to dxi = e while unsaturated
    out.dxi = e + (v_sw - v_unsat) / params.k_p_c;
    out.v_sw_ref = v_sw;
    return out;
}

DcLinkDerivatives dc_link_derivatives(double v_dc, double chi_dc, double p_ac,
                                      double p_c_meas, const DeviceParams& params) {
    DcLinkDerivatives d;
    const double v = std::max(v_dc, 1e-6);
    d.i_dc_command = p_c_meas / v + params.k_p_dc * (params.v_dc_set - v_dc) +
                     params.k_i_dc * chi_dc;
    d.dchi_dc = params.v_dc_set - v_dc;
    d.dv_dc = (d.i_dc_command - p_ac / v) / params.c_dc;
    return d;
}

FilterDerivatives filter_derivatives(const FilterState& filt, const DqVector& v_sw,
                                     const DqVector& i_g, double omega,
                                     const DeviceParams& params, double omega_b) {
    FilterDerivatives d;
    d.di_f = rl_branch_derivative(filt.i_f, v_sw, filt.v_f, params.r_f, params.l_f,
                                  omega, omega_b);
    d.dv_f = (omega_b / params.c_f) * (filt.i_f - i_g) -
             omega_b * omega * rotate90(filt.v_f);
    return d;
}

DqVector rl_branch_derivative(const DqVector& i, const DqVector& v_from,
                              const DqVector& v_to, double r, double l, double omega,
                              double omega_b) {
    return (omega_b / l) * (v_from - v_to) - (r / l) * omega_b * i -
           omega_b * omega * rotate90(i);
}

}  // namespace vimsim::converter
