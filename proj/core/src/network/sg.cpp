#include "vimsim/network/sg.hpp"

#include <cmath>

namespace vimsim::network {

std::vector<std::string> SgModel::state_names() const {
    std::vector<std::string> n = {"delta", "d_omega", "tau_m"};
    if (p_.order == 6) {
        n.insert(n.end(), {"e_q_t", "e_d_t", "e_q_st", "e_d_st", "e_fd"});
    }
    return n;
}

DqVector sg_stator_currents(const DqVector& e_sub, const DqVector& v_loc,
                            const SgParams& p) {
    const double u = e_sub.d - v_loc.d;
    const double w = e_sub.q - v_loc.q;
    const double det = p.r_a * p.r_a + p.x_d_st * p.x_q_st;
    return {(p.r_a * u + p.x_q_st * w) / det, (p.r_a * w - p.x_d_st * u) / det};
}

void SgModel::eval(double omega_b, double omega_frame, const DqVector& v_bus_global,
                   const double* x, double* f, SgIo* io) const {
    const double delta = x[DELTA];
    const double d_omega = x[D_OMEGA];
    const double tau_m = x[TAU_M];

    const DqVector v_loc = rotate(v_bus_global, -delta);

    DqVector e_sub;
    SgParams eff = p_;
    if (p_.order == 2) {
        // classical model: constant EMF behind the transient d-axis reactance
        e_sub = {0.0, e_classical_};
        eff.x_d_st = p_.x_d_t;
        eff.x_q_st = p_.x_d_t;
    } else {
        e_sub = {x[ED_ST], x[EQ_ST]};
    }
    const DqVector i = sg_stator_currents(e_sub, v_loc, eff);
    const double tau_e =
        e_sub.d * i.d + e_sub.q * i.q + (eff.x_q_st - eff.x_d_st) * i.d * i.q;

    f[DELTA] = omega_b * (1.0 + d_omega - omega_frame);
    f[D_OMEGA] = (tau_m - tau_e - p_.d * d_omega) / (2.0 * p_.h);
    f[TAU_M] = (p_.p_set - d_omega / p_.r_gov - tau_m) / p_.t_gov;

    if (p_.order == 6) {
        const double e_fd = x[E_FD];
        f[EQ_T] = (e_fd - x[EQ_T] - (p_.x_d - p_.x_d_t) * i.d) / p_.t_d0_t;
        f[ED_T] = (-x[ED_T] + (p_.x_q - p_.x_q_t) * i.q) / p_.t_q0_t;
        f[EQ_ST] = (x[EQ_T] - x[EQ_ST] - (p_.x_d_t - p_.x_d_st) * i.d) / p_.t_d0_st;
        f[ED_ST] = (x[ED_T] - x[ED_ST] + (p_.x_q_t - p_.x_q_st) * i.q) / p_.t_q0_st;
        double de_fd = (p_.k_avr * (p_.v_set - v_bus_global.norm()) - e_fd) / p_.t_avr;
        // non-windup field limit
        if (e_fd >= p_.e_fd_max && de_fd > 0.0) de_fd = 0.0;
        if (e_fd <= -p_.e_fd_max && de_fd < 0.0) de_fd = 0.0;
        f[E_FD] = de_fd;
    }

    if (io) {
        io->i_inj = rating_ * rotate(i, delta);
        io->p_e = dot(v_loc, i);
        io->q_e = v_loc.q * i.d - v_loc.d * i.q;
        io->omega = 1.0 + d_omega;
        io->v_mag = v_bus_global.norm();
    }
}

void SgModel::init_from_terminal(std::complex<double> v_bus,
                                 std::complex<double> s_inj, double omega_grid,
                                 double* x) {
    (void)omega_grid;
    const std::complex<double> jj(0.0, 1.0);
    const std::complex<double> i = std::conj(s_inj / v_bus);
    // the phasor v + (r_a + j x_q) i lies along the rotor q-axis
    const std::complex<double> eq_phasor = v_bus + std::complex<double>(p_.r_a, p_.x_q) * i;
    const double delta = std::arg(eq_phasor) - M_PI / 2.0;
    const auto loc = [&](std::complex<double> z) {
        const std::complex<double> r = z * std::exp(-jj * delta);
        return DqVector{r.real(), r.imag()};
    };
    const DqVector v_l = loc(v_bus);
    const DqVector i_l = loc(i);

    x[DELTA] = delta;
    x[D_OMEGA] = 0.0;
    if (p_.order == 6) {
        x[EQ_T] = v_l.q + p_.r_a * i_l.q + p_.x_d_t * i_l.d;
        x[ED_T] = v_l.d + p_.r_a * i_l.d - p_.x_q_t * i_l.q;
        x[EQ_ST] = v_l.q + p_.r_a * i_l.q + p_.x_d_st * i_l.d;
        x[ED_ST] = v_l.d + p_.r_a * i_l.d - p_.x_q_st * i_l.q;
        x[E_FD] = x[EQ_T] + (p_.x_d - p_.x_d_t) * i_l.d;
        const double tau_e = x[ED_ST] * i_l.d + x[EQ_ST] * i_l.q +
                             (p_.x_q_st - p_.x_d_st) * i_l.d * i_l.q;
        x[TAU_M] = tau_e;
        // make the configured references consistent with the dispatched point
        p_.p_set = tau_e;
        p_.v_set = std::abs(v_bus) + x[E_FD] / p_.k_avr;
    } else {
        const DqVector e{v_l.d + p_.r_a * i_l.d - p_.x_d_t * i_l.q,
                         v_l.q + p_.r_a * i_l.q + p_.x_d_t * i_l.d};
        // classical EMF magnitude along q after re-aligning the frame
        e_classical_ = std::hypot(e.d, e.q);
        x[DELTA] = delta - std::atan2(e.d, e.q);
        const double tau_e = (v_bus * std::conj(i)).real() + p_.r_a * std::norm(i);
        x[TAU_M] = tau_e;
        p_.p_set = tau_e;
    }
}

}  // namespace vimsim::network
