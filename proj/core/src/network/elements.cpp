#include "vimsim/network/elements.hpp"

#include <cmath>

#include "vimsim/converter/device.hpp"

namespace vimsim::network {

RlLoadParams RlLoadParams::from_power(const std::string& name, const std::string& bus,
                                      double p, double q) {
    // series impedance drawing s = p + jq at 1 pu voltage: z = v^2 / conj(s)
    const std::complex<double> s(p, q);
    const std::complex<double> z = 1.0 / std::conj(s);
    RlLoadParams out;
    out.name = name;
    out.bus = bus;
    out.r = z.real();
    out.l = z.imag();
    return out;
}

StiffGridParams StiffGridParams::from_scr(const std::string& name,
                                          const std::string& bus, double mu,
                                          double x_over_r) {
    StiffGridParams out;
    out.name = name;
    out.bus = bus;
    const double zmag = 1.0 / mu;
    const double denom = std::sqrt(1.0 + x_over_r * x_over_r);
    out.r = zmag / denom;
    out.l = zmag * x_over_r / denom;
    return out;
}

DqVector series_current_derivative(const DqVector& i, const DqVector& v_from,
                                   const DqVector& v_to, double r, double l,
                                   double omega_frame, double omega_b) {
    return converter::rl_branch_derivative(i, v_from, v_to, r, l, omega_frame, omega_b);
}

}  // namespace vimsim::network
