#pragma once

#include <stdexcept>

namespace vimsim {

// Base quantities for SI <-> per-unit conversion. i_base and t_base are
// derived from the three free bases and kept consistent with them.
class PerUnitBase {
  public:
    PerUnitBase(double s_base_va, double v_base_v, double omega_base_rad_s);

    double s_base() const { return s_base_; }
    double v_base() const { return v_base_; }
    double omega_base() const { return omega_base_; }
    double i_base() const { return i_base_; }
    double t_base() const { return t_base_; }
    double z_base() const { return v_base_ * v_base_ / s_base_; }

    // Inertia constant H [s] from an SI moment of inertia [kg m^2].
    double inertia_h_from_j(double j_si) const;
    // Per-unit damping torque coefficient from an SI one [N m s].
    double damping_pu_from_si(double d_si) const;

    double power_to_pu(double p_va) const { return p_va / s_base_; }
    double power_to_si(double p_pu) const { return p_pu * s_base_; }
    double omega_to_pu(double w_rad_s) const { return w_rad_s / omega_base_; }
    double omega_to_si(double w_pu) const { return w_pu * omega_base_; }
    double torque_to_pu(double t_nm) const { return t_nm / t_base_; }
    double torque_to_si(double t_pu) const { return t_pu * t_base_; }

  private:
    double s_base_;
    double v_base_;
    double omega_base_;
    double i_base_;
    double t_base_;
};

}  // namespace vimsim
