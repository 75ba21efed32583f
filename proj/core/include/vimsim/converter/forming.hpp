#pragma once

#include <complex>
#include <string>
#include <vector>

#include "vimsim/converter/device.hpp"
#include "vimsim/converter/following.hpp"
#include "vimsim/converter/outer.hpp"

namespace vimsim::converter {

// Droop-controlled grid-forming converter with a voltage/current cascade.
// No synchronization unit: the angle, frequency and voltage are internal
// states of the control.
class FormingConverter {
  public:
    FormingConverter(FormingParams outer, DeviceParams device, double rating = 1.0);

    int n_states() const { return 15; }
    int n_alg() const { return 0; }
    std::vector<std::string> state_names() const;

    double rating() const { return rating_; }
    FormingParams& outer() { return outer_; }
    const FormingParams& outer() const { return outer_; }
    DeviceParams& device() { return device_; }
    const DeviceParams& device() const { return device_; }

    void eval(double omega_b, double omega_frame, const DqVector& v_bus_global,
              const double* x, double* f, ConverterIo* io) const;

    void init_from_terminal(std::complex<double> v_bus, std::complex<double> s_inj,
                            double omega_grid, double* x) const;

    static constexpr int IF_D = 0, IF_Q = 1, VF_D = 2, VF_Q = 3, IG_D = 4, IG_Q = 5,
                         XI_D = 6, XI_Q = 7, ZETA_D = 8, ZETA_Q = 9, V_DC = 10,
                         CHI_DC = 11, P_FILT = 12, Q_FILT = 13, DELTA = 14;

  private:
    FormingParams outer_;
    DeviceParams device_;
    double rating_;
};

}  // namespace vimsim::converter
