#include "vimsim/converter/forming.hpp"

#include <cmath>

namespace vimsim::converter {

FormingConverter::FormingConverter(FormingParams outer, DeviceParams device,
                                   double rating)
    : outer_(outer), device_(device), rating_(rating) {}

std::vector<std::string> FormingConverter::state_names() const {
    return {"i_f_d", "i_f_q", "v_f_d", "v_f_q", "i_g_d",  "i_g_q",  "xi_d",  "xi_q",
            "zeta_d", "zeta_q", "v_dc", "chi_dc", "p_filt", "q_filt", "delta"};
}

void FormingConverter::eval(double omega_b, double omega_frame,
                            const DqVector& v_bus_global, const double* x, double* f,
                            ConverterIo* io) const {
    const DqVector i_f{x[IF_D], x[IF_Q]};
    const DqVector v_f{x[VF_D], x[VF_Q]};
    const DqVector i_g{x[IG_D], x[IG_Q]};
    const DqVector xi{x[XI_D], x[XI_Q]};
    const DqVector zeta{x[ZETA_D], x[ZETA_Q]};
    const double v_dc = x[V_DC];
    const double delta = x[DELTA];

    const DqVector v_t_loc = rotate(v_bus_global, -delta);
    const auto pq = instantaneous_power(v_f, i_g);

    const auto droop =
        forming_droop_derivatives(x[P_FILT], x[Q_FILT], pq.p, pq.q, outer_);
    f[P_FILT] = droop.dp_filt;
    f[Q_FILT] = droop.dq_filt;
    const double omega_c = droop.omega_c;
    const DqVector v_ref{droop.v_c_d, 0.0};

    // voltage PI with capacitor-susceptance decoupling; no grid-current
    // feedforward (an instantaneous i_g term couples the control to the
    // near-synchronous series mode of the network and strips its damping)
    const DqVector ev = v_ref - v_f;
    DqVector i_ref = device_.k_p_v * ev + device_.k_i_v * zeta +
                     device_.c_f * omega_c * rotate90(v_f);
    DqVector dzeta = ev;
    const double im = i_ref.norm();
    if (im > device_.i_max) {
        const DqVector i_lim = i_ref * (device_.i_max / im);
        dzeta = ev + (i_lim - i_ref) / device_.k_p_v;  // back-calculation
        i_ref = i_lim;
    }
    f[ZETA_D] = dzeta.d;
    f[ZETA_Q] = dzeta.q;

    const auto cc = current_controller(i_ref, i_f, v_f, xi, omega_c, v_dc, device_);
    f[XI_D] = cc.dxi.d;
    f[XI_Q] = cc.dxi.q;

    FilterState fs{i_f, v_f};
    const auto fd = filter_derivatives(fs, cc.v_sw_ref, i_g, omega_c, device_, omega_b);
    f[IF_D] = fd.di_f.d;
    f[IF_Q] = fd.di_f.q;
    f[VF_D] = fd.dv_f.d;
    f[VF_Q] = fd.dv_f.q;

    const DqVector dig = rl_branch_derivative(i_g, v_f, v_t_loc, device_.r_t,
                                              device_.l_t, omega_c, omega_b);
    f[IG_D] = dig.d;
    f[IG_Q] = dig.q;

    const double p_ac = dot(cc.v_sw_ref, i_f);
    const auto dc = dc_link_derivatives(v_dc, x[CHI_DC], p_ac, pq.p, device_);
    f[V_DC] = dc.dv_dc;
    f[CHI_DC] = dc.dchi_dc;

    f[DELTA] = omega_b * (omega_c - omega_frame);

    if (io) {
        io->i_inj = rating_ * rotate(i_g, delta);
        io->p_c = pq.p;
        io->q_c = pq.q;
        io->v_mag = v_f.norm();
        io->omega = omega_c;
        io->v_dc = v_dc;
        io->saturated = cc.saturated;
    }
}

void FormingConverter::init_from_terminal(std::complex<double> v_bus,
                                          std::complex<double> s_inj,
                                          double omega_grid, double* x) const {
    const std::complex<double> jj(0.0, 1.0);
    const std::complex<double> i_inj = std::conj(s_inj / v_bus);
    const std::complex<double> z_t(device_.r_t, omega_grid * device_.l_t);
    const std::complex<double> v_f = v_bus + z_t * i_inj;
    const std::complex<double> i_f = i_inj + jj * omega_grid * device_.c_f * v_f;
    const std::complex<double> z_f(device_.r_f, omega_grid * device_.l_f);
    const std::complex<double> v_sw = v_f + z_f * i_f;

    const double delta = std::arg(v_f);  // v_c^q = 0 orientation
    const auto loc = [&](std::complex<double> z) {
        const std::complex<double> r = z * std::exp(-jj * delta);
        return DqVector{r.real(), r.imag()};
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
    const DqVector decouple = device_.l_f * omega_grid * rotate90(i_f_l);
    const DqVector xi = (v_sw_l - v_f_l - decouple) / device_.k_i_c;
    x[XI_D] = xi.d;
    x[XI_Q] = xi.q;
    const auto pq = instantaneous_power(v_f_l, i_g_l);
    x[P_FILT] = pq.p;
    x[Q_FILT] = pq.q;
    const double omega_c = outer_.omega_set + outer_.r_p * (outer_.p_set - pq.p);
    const DqVector v_ref{outer_.v_set + outer_.r_q * (outer_.q_set - pq.q), 0.0};
    const DqVector i_ref_needed = i_f_l;
    const DqVector zeta = (i_ref_needed -
                           device_.c_f * omega_c * rotate90(v_f_l) -
                           device_.k_p_v * (v_ref - v_f_l)) /
                          device_.k_i_v;
    x[ZETA_D] = zeta.d;
    x[ZETA_Q] = zeta.q;
    x[V_DC] = device_.v_dc_set;
    x[CHI_DC] = 0.0;
    x[DELTA] = delta;
}

}  // namespace vimsim::converter
