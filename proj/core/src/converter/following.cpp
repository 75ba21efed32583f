#include "vimsim/converter/following.hpp"

#include <algorithm>
#include <cmath>

namespace vimsim::converter {

namespace {
DqVector from_complex(std::complex<double> z) { return {z.real(), z.imag()}; }
}  // namespace

FollowingConverter::FollowingConverter(SyncKind sync, FollowingOuterParams outer,
                                       DeviceParams device, sync::PllParams pll,
                                       sync::VimParams vim, double rating)
    : sync_(sync), outer_(outer), device_(device), pll_(pll), vim_(vim),
      rating_(rating) {}

std::vector<std::string> FollowingConverter::state_names() const {
    std::vector<std::string> n = {"i_f_d",  "i_f_q",  "v_f_d",   "v_f_q", "i_g_d",
                                  "i_g_q",  "xi_d",   "xi_q",    "v_dc",  "chi_dc",
                                  "p_tilde", "q_tilde", "i_ref_d", "i_ref_q"};
    if (sync_ == SyncKind::vim) {
        n.push_back("tau_e");
        n.push_back("delta_omega_r");
    } else {
        n.push_back("epsilon");
    }
    n.push_back("delta");
    return n;
}

std::vector<std::string> FollowingConverter::alg_names() const {
    if (sync_ == SyncKind::vim)
        return {"phi_d", "phi_q", "phi", "omega_nu_tilde", "omega_nu", "omega_s"};
    return {"omega_s"};
}

void FollowingConverter::eval(double omega_b, double omega_frame,
                              const DqVector& v_bus_global, const double* x,
                              const double* y, double* f, double* g,
                              ConverterIo* io) const {
    const DqVector i_f{x[IF_D], x[IF_Q]};
    const DqVector v_f{x[VF_D], x[VF_Q]};
    const DqVector i_g{x[IG_D], x[IG_Q]};
    const DqVector xi{x[XI_D], x[XI_Q]};
    const double v_dc = x[V_DC];
    const double chi_dc = x[CHI_DC];
    const DqVector i_ref_filt{x[IR_D], x[IR_Q]};
    const double delta = x[delta_index()];

    const DqVector v_t_loc = rotate(v_bus_global, -delta);

    // synchronization unit
    double omega_s = y[n_alg() - 1];  // omega_s is the last algebraic variable
    if (sync_ == SyncKind::pll) {
        sync::PllState ps{x[14], delta};
        g[0] = omega_s - sync::pll_frequency(ps, v_f, pll_);
        f[14] = sync::pll_derivatives(ps, v_f, pll_, omega_b).d_epsilon;
    } else {
        sync::VimState vs{x[14], x[15]};
        sync::VimAlgebraic va{y[2], y[0], y[1], y[3], y[4], y[5]};
        sync::VimNetworkParams net{device_.r_t, device_.l_t};
        const auto res =
            sync::vim_algebraic_residuals(vs, va, v_f, i_g, v_t_loc, net, vim_, omega_b);
        g[0] = res[0];
        g[1] = res[1];
        g[2] = res[2];
        g[3] = res[3];
        g[4] = res[4];
        g[5] = res[5];
        const auto vd = sync::vim_derivatives(vs, v_f, i_g, vim_, omega_b);
        f[14] = vd.d_tau_e;
        f[15] = vd.d_delta_omega_r;
    }

    // measurements
    const auto pq = instantaneous_power(v_f, i_g);
    const double v_mag = v_f.norm();

    // outer power loop
    OuterMeasurements meas{pq.p, pq.q, v_mag, omega_s};
    FollowingOuterState os{x[P_TILDE], x[Q_TILDE]};
    const auto od = following_outer_derivatives(os, meas, outer_);
    f[P_TILDE] = od.dp_tilde;
    f[Q_TILDE] = od.dq_tilde;

    // current reference with magnitude clamp and first-order filter
    DqVector i_star = current_reference(os.p_tilde, os.q_tilde, v_f, device_.eps_v);
    const double imag = i_star.norm();
    if (imag > device_.i_max) i_star = i_star * (device_.i_max / imag);
    f[IR_D] = device_.omega_ref_filt * (i_star.d - i_ref_filt.d);
    f[IR_Q] = device_.omega_ref_filt * (i_star.q - i_ref_filt.q);

    // device-level current control and electrical interface
    const auto cc =
        current_controller(i_ref_filt, i_f, v_f, xi, omega_s, v_dc, device_);
    f[XI_D] = cc.dxi.d;
    f[XI_Q] = cc.dxi.q;

    FilterState fs{i_f, v_f};
    const auto fd = filter_derivatives(fs, cc.v_sw_ref, i_g, omega_s, device_, omega_b);
    f[IF_D] = fd.di_f.d;
    f[IF_Q] = fd.di_f.q;
    f[VF_D] = fd.dv_f.d;
    f[VF_Q] = fd.dv_f.q;

    f[IG_D] = rl_branch_derivative(i_g, v_f, v_t_loc, device_.r_t, device_.l_t,
                                   omega_s, omega_b)
                  .d;
    f[IG_Q] = rl_branch_derivative(i_g, v_f, v_t_loc, device_.r_t, device_.l_t,
                                   omega_s, omega_b)
                  .q;

    const double p_ac = dot(cc.v_sw_ref, i_f);
    const auto dc = dc_link_derivatives(v_dc, chi_dc, p_ac, pq.p, device_);
    f[V_DC] = dc.dv_dc;
    f[CHI_DC] = dc.dchi_dc;

    f[delta_index()] = omega_b * (omega_s - omega_frame);

    if (io) {
        io->i_inj = rating_ * rotate(i_g, delta);
        io->p_c = pq.p;
        io->q_c = pq.q;
        io->v_mag = v_mag;
        io->omega = omega_s;
        io->v_dc = v_dc;
        io->saturated = cc.saturated;
    }
}

void FollowingConverter::init_from_terminal(std::complex<double> v_bus,
                                            std::complex<double> s_inj,
                                            double omega_grid, double omega_b,
                                            double* x, double* y) const {
    (void)omega_b;
    const std::complex<double> jj(0.0, 1.0);
    // device current injection at the bus (global frame, device base)
    const std::complex<double> i_inj = std::conj(s_inj / v_bus);
    // voltage behind the output transformer
    const std::complex<double> z_t(device_.r_t, omega_grid * device_.l_t);
    const std::complex<double> v_f = v_bus + z_t * i_inj;
    // filter capacitor current adds to the switch-side inductor current
    const std::complex<double> i_f = i_inj + jj * omega_grid * device_.c_f * v_f;
    const std::complex<double> z_f(device_.r_f, omega_grid * device_.l_f);
    const std::complex<double> v_sw = v_f + z_f * i_f;

    // local frame choice. For the PLL, align the d-axis with the filter
    // voltage (its converged orientation). The VIM frame is field-oriented:
    // its angle is free, and the torque balance K_e(0) i^d i^q = tau_m admits
    // two orientations; only the torque-dominant one (|i^q| > |i^d|) is a
    // stable operating point, so seed the angle there.
    double delta = std::arg(v_f);
    if (sync_ == SyncKind::vim && std::abs(i_inj) > 1e-6) {
        const double k_e0 = vim_.l_m * vim_.l_m / vim_.l_r;
        const double tau_m = s_inj.real() / omega_grid;
        const double i2 = std::norm(i_inj);
        double c = 2.0 * tau_m / (k_e0 * i2);
        c = std::clamp(c, -1.0, 1.0);
        const double gamma = (c < 0.0 ? -1.0 : 1.0) * 0.5 *
                             (M_PI - std::asin(std::abs(c)));
        delta = std::arg(i_inj) - gamma;
    }
    const auto loc = [&](std::complex<double> z) {
        return from_complex(z * std::exp(-jj * delta));
    };
    const DqVector i_f_l = loc(i_f);
    const DqVector v_f_l = loc(v_f);
    const DqVector i_g_l = loc(i_inj);
    const DqVector v_sw_l = loc(v_sw);

    x[IF_D] = i_f_l.d;
    x[IF_Q] = i_f_l.q;
    x[VF_D] = v_f_l.d;
    x[VF_Q] = v_f_l.q;
    x[IG_D] = i_g_l.d;
    x[IG_Q] = i_g_l.q;
    // integrator states that zero the remaining derivatives
    const DqVector decouple = device_.l_f * omega_grid * rotate90(i_f_l);
    const DqVector xi = (v_sw_l - v_f_l - decouple) / device_.k_i_c;
    x[XI_D] = xi.d;
    x[XI_Q] = xi.q;
    x[V_DC] = device_.v_dc_set;
    x[CHI_DC] = 0.0;
    const double vm = std::max(v_f_l.norm(), device_.eps_v);
    // invert the current-reference map at i* = i_f (filter equilibrium)
    x[P_TILDE] = dot(v_f_l, i_f_l) / vm;
    x[Q_TILDE] = (v_f_l.q * i_f_l.d - v_f_l.d * i_f_l.q) / vm;
    x[IR_D] = i_f_l.d;
    x[IR_Q] = i_f_l.q;

    if (sync_ == SyncKind::pll) {
        x[14] = (omega_grid - pll_.omega0) / pll_.k_i;  // epsilon
        x[15] = delta;
        y[0] = omega_grid;
    } else {
        // approximate VIM steady state; the global Newton polish finishes it
        const double k_e0 = vim_.l_m * vim_.l_m / vim_.l_r;
        x[14] = k_e0 * i_g_l.d * i_g_l.q;  // tau_e
        const double id_reg = sync::regularized_d_current(i_g_l.d, vim_.eps_div);
        const double slip = sync::saturate_slip(
            (vim_.r_r / vim_.l_r) * i_g_l.q / id_reg, vim_.slip_min, vim_.slip_max);
        x[15] = omega_grid - vim_.omega0_star - slip;  // delta_omega_r
        x[16] = delta;
        y[0] = 0.0;  // phi_d
        y[1] = 0.0;  // phi_q
        y[2] = 0.0;  // phi
        y[3] = slip;
        y[4] = slip;
        y[5] = omega_grid;
    }
}

void FollowingConverter::init_cold(double* x, double* y) const {
    for (int i = 0; i < n_states(); ++i) x[i] = 0.0;
    x[V_DC] = device_.v_dc_set;
    if (sync_ == SyncKind::pll) {
        y[0] = pll_.omega0;
    } else {
        y[0] = y[1] = y[2] = 0.0;
        y[3] = y[4] = 0.0;
        y[5] = vim_.omega0_star;
    }
}

}  // namespace vimsim::converter
