#pragma once

#include <complex>
#include <string>
#include <vector>

#include "vimsim/converter/device.hpp"
#include "vimsim/converter/outer.hpp"
#include "vimsim/sync/pll.hpp"
#include "vimsim/sync/vim.hpp"

namespace vimsim::converter {

enum class SyncKind { pll, vim };

// Reporting channels shared by all converter models.
struct ConverterIo {
    DqVector i_inj;      // current injection at the network bus, global frame, system base
    double p_c = 0.0;    // terminal active power [device pu]
    double q_c = 0.0;    // terminal reactive power [device pu]
    double v_mag = 0.0;  // filter voltage magnitude [pu]
    double omega = 0.0;  // synchronization / internal frequency [pu]
    double v_dc = 0.0;
    bool saturated = false;
};

// Complete grid-following converter: LC filter, output transformer, current
// PI, DC link, droop-augmented outer power loop and a PLL or VIM
// synchronization unit. Internal electrical states live in the unit's own
// rotating frame at relative angle delta; the network bus voltage arrives in
// the global frame.
class FollowingConverter {
  public:
    FollowingConverter(SyncKind sync, FollowingOuterParams outer, DeviceParams device,
                       sync::PllParams pll, sync::VimParams vim, double rating = 1.0);

    SyncKind sync_kind() const { return sync_; }
    int n_states() const { return sync_ == SyncKind::vim ? 17 : 16; }
    int n_alg() const { return sync_ == SyncKind::vim ? 6 : 1; }
    std::vector<std::string> state_names() const;
    std::vector<std::string> alg_names() const;

    double rating() const { return rating_; }
    FollowingOuterParams& outer() { return outer_; }
    const FollowingOuterParams& outer() const { return outer_; }
    DeviceParams& device() { return device_; }
    const DeviceParams& device() const { return device_; }
    const sync::VimParams& vim() const { return vim_; }
    sync::VimParams& vim() { return vim_; }
    sync::PllParams& pll() { return pll_; }

    // f[n_states], g[n_alg]; io optional.
    void eval(double omega_b, double omega_frame, const DqVector& v_bus_global,
              const double* x, const double* y, double* f, double* g,
              ConverterIo* io) const;

    // Steady-state initialization from a terminal phasor solution:
    // v_bus (global-frame bus voltage) and s_inj (device-base injection at
    // that bus), with the grid at omega_grid pu.
    void init_from_terminal(std::complex<double> v_bus, std::complex<double> s_inj,
                            double omega_grid, double omega_b, double* x,
                            double* y) const;

    // Cold start: everything zeroed except the angle and DC link.
    void init_cold(double* x, double* y) const;

    // state layout offsets
    static constexpr int IF_D = 0, IF_Q = 1, VF_D = 2, VF_Q = 3, IG_D = 4, IG_Q = 5,
                         XI_D = 6, XI_Q = 7, V_DC = 8, CHI_DC = 9, P_TILDE = 10,
                         Q_TILDE = 11, IR_D = 12, IR_Q = 13;
    // PLL: [14]=epsilon, [15]=delta.  VIM: [14]=tau_e, [15]=delta_omega_r, [16]=delta.
    int delta_index() const { return sync_ == SyncKind::vim ? 16 : 15; }

  private:
    SyncKind sync_;
    FollowingOuterParams outer_;
    DeviceParams device_;
    sync::PllParams pll_;
    sync::VimParams vim_;
    double rating_;
};

}  // namespace vimsim::converter
