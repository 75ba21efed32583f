#pragma once

#include <complex>
#include <string>
#include <vector>

#include "vimsim/core/dq.hpp"

namespace vimsim::network {

// Synchronous generator with selectable order: 2 (classical) or 6 (two-axis
// with subtransient EMFs), plus first-order governor and AVR.
// All electrical quantities per-unit on the machine base.
struct SgParams {
    int order = 6;  // 2 or 6
    double h = 5.0;       // inertia constant [s]
    double d = 1.0;       // pu damping
    double r_a = 0.0025;  // armature resistance
    double x_d = 1.8, x_q = 1.7;
    double x_d_t = 0.3, x_q_t = 0.55;    // transient
    double x_d_st = 0.25, x_q_st = 0.25; // subtransient
    double t_d0_t = 8.0, t_q0_t = 0.4;   // transient open-circuit [s]
    double t_d0_st = 0.03, t_q0_st = 0.05;
    double r_gov = 0.05;  // governor droop
    double t_gov = 0.5;   // governor time constant [s]
    double k_avr = 50.0;
    double t_avr = 0.05;  // [s]
    double e_fd_max = 5.0;
    double p_set = 0.0;
    double v_set = 1.0;

    bool valid() const {
        return (order == 2 || order == 6) && h > 0.0 && t_d0_t > 0.0 && t_q0_t > 0.0 &&
               t_d0_st > 0.0 && t_q0_st > 0.0 && t_gov > 0.0 && t_avr > 0.0 &&
               x_d_st > 0.0 && r_gov > 0.0;
    }
};

struct SgIo {
    DqVector i_inj;   // global frame, system base
    double p_e = 0.0; // air-gap power [machine pu]
    double q_e = 0.0;
    double omega = 0.0;  // pu rotor speed
    double v_mag = 0.0;
};

// Stator currents from the subtransient EMF and the terminal voltage, both in
// the rotor frame.
DqVector sg_stator_currents(const DqVector& e_sub, const DqVector& v_loc,
                            const SgParams& p);

class SgModel {
  public:
    SgModel(SgParams params, double rating = 1.0) : p_(params), rating_(rating) {}

    // order 2: delta, d_omega, tau_m   order 6: + e_q_t, e_d_t, e_q_st, e_d_st, e_fd
    int n_states() const { return p_.order == 2 ? 3 : 8; }
    std::vector<std::string> state_names() const;

    double rating() const { return rating_; }
    SgParams& params() { return p_; }
    const SgParams& params() const { return p_; }

    void eval(double omega_b, double omega_frame, const DqVector& v_bus_global,
              const double* x, double* f, SgIo* io) const;

    // Re-dispatches p_set / v_set so the supplied terminal point is an
    // equilibrium; for the classical model it also pins the constant EMF.
    void init_from_terminal(std::complex<double> v_bus, std::complex<double> s_inj,
                            double omega_grid, double* x);

    static constexpr int DELTA = 0, D_OMEGA = 1, TAU_M = 2, EQ_T = 3, ED_T = 4,
                         EQ_ST = 5, ED_ST = 6, E_FD = 7;

  private:
    SgParams p_;
    double rating_;
    double e_classical_ = 1.05;
};

}  // namespace vimsim::network
