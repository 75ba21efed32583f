#include "vimsim/core/per_unit.hpp"

#include <cmath>

namespace vimsim {

PerUnitBase::PerUnitBase(double s_base_va, double v_base_v, double omega_base_rad_s)
    : s_base_(s_base_va), v_base_(v_base_v), omega_base_(omega_base_rad_s) {
    if (!(s_base_ > 0.0) || !(v_base_ > 0.0) || !(omega_base_ > 0.0)) {
        throw std::invalid_argument("PerUnitBase: all bases must be strictly positive");
    }
    i_base_ = s_base_ / (std::sqrt(3.0) * v_base_);
    t_base_ = s_base_ / omega_base_;
}

double PerUnitBase::inertia_h_from_j(double j_si) const {
    return 0.5 * j_si * omega_base_ * omega_base_ / s_base_;
}

double PerUnitBase::damping_pu_from_si(double d_si) const {
    // tau_d,pu = D * omega_b * dOmega_pu / (S_b / omega_b)
    return d_si * omega_base_ * omega_base_ / s_base_;
}

}  // namespace vimsim
