#pragma once

#include "vimsim/core/dq.hpp"

namespace vimsim::converter {

// Device-level gains and electrical interface parameters, per-unit on the
// converter base. Defaults follow the documented artifact configuration.
struct DeviceParams {
    // current PI (SRF with decoupling)
    double k_p_c = 0.74;
    double k_i_c = 373.8;  // [1/s]
    // voltage PI (forming cascade only)
    double k_p_v = 0.52;
    double k_i_v = 150.0;  // [1/s]
    // DC link
    double c_dc = 0.1;      // energy time constant [s]
    double k_p_dc = 10.0;
    double k_i_dc = 300.0;  // [1/s]
    double v_dc_set = 1.0;
    double v_dc_fault = 0.3;  // collapse threshold [pu]
    // LC filter
    double r_f = 0.003;
    double l_f = 0.08;
    double c_f = 0.074;
    // output transformer
    double r_t = 0.01;
    double l_t = 0.05;
    // reference filter on i* (following mode)
    double omega_ref_filt = 628.3;  // [rad/s]
    // limits
    double i_max = 1.2;    // current reference magnitude clamp [pu]
    double eps_v = 0.01;   // voltage floor in the current reference map [pu]
    double m_max = 1.3;    // modulation bound, |v_sw| <= m_max * v_dc

    bool valid() const {
        return k_p_c > 0.0 && k_i_c > 0.0 && c_dc > 0.0 && l_f > 0.0 && c_f > 0.0 &&
               l_t > 0.0 && i_max > 0.0 && eps_v > 0.0;
    }
};

struct CurrentControllerOutput {
    DqVector v_sw_ref;  // limited switch-voltage reference
    DqVector dxi;       // integrator derivatives (with anti-windup back-calculation)
    bool saturated = false;
};

CurrentControllerOutput current_controller(const DqVector& i_ref, const DqVector& i_f,
                                           const DqVector& v_f, const DqVector& xi,
                                           double omega, double v_dc,
                                           const DeviceParams& params);

struct DcLinkDerivatives {
    double dv_dc = 0.0;
    double dchi_dc = 0.0;
    double i_dc_command = 0.0;
};

// Capacitor balance with a PI-regulated controllable DC source. p_ac is the
// switch-side power drawn from the capacitor; p_c_meas is the terminal power
// measurement feeding forward into the source command.
DcLinkDerivatives dc_link_derivatives(double v_dc, double chi_dc, double p_ac,
                                      double p_c_meas, const DeviceParams& params);

struct FilterState {
    DqVector i_f;  // switch-side inductor current
    DqVector v_f;  // filter capacitor voltage
};

struct FilterDerivatives {
    DqVector di_f;
    DqVector dv_f;
};

// Standard SRF LC dynamics in a frame rotating at omega (pu).
FilterDerivatives filter_derivatives(const FilterState& filt, const DqVector& v_sw,
                                     const DqVector& i_g, double omega,
                                     const DeviceParams& params, double omega_b);

// Series R-L branch derivative in a rotating frame; shared by the converter
// transformer and the network branches.
DqVector rl_branch_derivative(const DqVector& i, const DqVector& v_from,
                              const DqVector& v_to, double r, double l, double omega,
                              double omega_b);

}  // namespace vimsim::converter
