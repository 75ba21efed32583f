#include "vimsim/sync/vim.hpp"

#include <cmath>
#include <stdexcept>

namespace vimsim::sync {

std::complex<double> k_psi_eval(std::complex<double> s, const VimParams& params) {
    const std::complex<double> den = params.r_r + s * params.l_r;
    if (std::abs(den) == 0.0) {
        throw std::domain_error("k_psi_eval: evaluated at the pole s = -R_r/L_r");
    }
    return params.r_r * params.l_m / den;
}

std::complex<double> k_e_eval(std::complex<double> s, const VimParams& params,
                              double k_pf) {
    return k_pf * (params.l_m / params.l_r) * k_psi_eval(s, params);
}

double saturate_slip(double omega_nu_tilde, double slip_min, double slip_max) {
    // nested composition: max with the lower limit, then min with the upper
    // one. Evaluated with exact min/max; the |.|-based half-sum form of the
    // same composition accumulates 2-ulp rounding and is kept to the tests.
    const double hat = std::max(omega_nu_tilde, slip_min);
    return std::min(hat, slip_max);
}

double regularized_d_current(double i_g_d, double eps_div) {
    const double sign = i_g_d < 0.0 ? -1.0 : 1.0;
    return sign * std::max(std::abs(i_g_d), eps_div);
}

VimDerivatives vim_derivatives(const VimState& state, const DqVector& v_f,
                               const DqVector& i_g, const VimParams& params,
                               double omega_b) {
    const double omega_r = params.omega0_star + state.delta_omega_r;
    if (!(omega_r > params.eps_div)) {
        throw std::domain_error("vim_derivatives: rotor speed collapsed below eps_div");
    }
    VimDerivatives d;
    const double rr_lr = params.r_r / params.l_r;
    d.d_tau_e = omega_b * (-rr_lr * state.tau_e +
                           (params.r_r * params.l_m * params.l_m) /
                               (params.l_r * params.l_r) * i_g.d * i_g.q);
    const double tau_m = dot(v_f, i_g) / omega_r;
    d.d_delta_omega_r = (tau_m - state.tau_e - params.d_damping * state.delta_omega_r) /
                        (2.0 * params.h_inertia);
    return d;
}

std::array<double, 6> vim_algebraic_residuals(const VimState& state,
                                              const VimAlgebraic& alg,
                                              const DqVector& v_f, const DqVector& i_g,
                                              const DqVector& v_t,
                                              const VimNetworkParams& net,
                                              const VimParams& params, double omega_b) {
    // Transformer current derivative in the unit's own rotating frame,
    // evaluated at the (algebraic) synchronous speed estimate.
    const DqVector di_g = (omega_b / net.l_t) * (v_f - v_t) -
                          (net.r_t / net.l_t) * omega_b * i_g -
                          omega_b * alg.omega_s * rotate90(i_g);

    const double id_reg = regularized_d_current(i_g.d, params.eps_div);
    const double quotient = i_g.q / id_reg;

    std::array<double, 6> r;
    r[0] = alg.phi_d - di_g.d;
    r[1] = alg.phi_q - di_g.q;
    // Quotient rule for d/dt(i_g^q / i_g^d).
    r[2] = alg.phi - (alg.phi_q / id_reg - i_g.q / (id_reg * id_reg) * alg.phi_d);
    // Slip PD: proportional gain R_r/L_r on the quotient, derivative action
    // k_nu_d on its derivative expressed in pu time (phi is 1/s).
    r[3] = alg.omega_nu_tilde -
           ((params.r_r / params.l_r) * quotient + params.k_nu_d * alg.phi / omega_b);
    r[4] = alg.omega_nu -
           saturate_slip(alg.omega_nu_tilde, params.slip_min, params.slip_max);
    r[5] = alg.omega_s - (params.omega0_star + state.delta_omega_r + alg.omega_nu);
    return r;
}

}  // namespace vimsim::sync
