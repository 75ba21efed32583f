#include "vimsim/sync/pll.hpp"

#include <cmath>

namespace vimsim::sync {

double pll_frequency(const PllState& state, const DqVector& v_f, const PllParams& params) {
    return params.omega0 + params.k_p * v_f.q + params.k_i * state.epsilon;
}

PllDerivatives pll_derivatives(const PllState& state, const DqVector& v_f,
                               const PllParams& params, double omega_b) {
    PllDerivatives d;
    d.d_epsilon = v_f.q;
    d.d_theta_s = omega_b * pll_frequency(state, v_f, params);
    return d;
}

double wrap_angle(double theta) {
    const double two_pi = 2.0 * M_PI;
    double w = std::fmod(theta + M_PI, two_pi);
    if (w < 0.0) w += two_pi;
    return w - M_PI;
}

}  // namespace vimsim::sync
