#pragma once

#include <complex>
#include <string>

#include "vimsim/core/dq.hpp"

namespace vimsim::network {

// Series R-L branch between two buses; dynamic pi-sections reuse this for the
// series element and contribute half the shunt capacitance to each end bus.
struct BranchParams {
    std::string name;
    std::string from_bus;
    std::string to_bus;
    double r = 0.0;      // pu series resistance
    double l = 0.0;      // pu series inductance
    double c = 0.0;      // pu total shunt capacitance (pi-section), 0 for plain branch

    bool valid() const { return l > 0.0 && r >= 0.0 && c >= 0.0; }
};

// Series R-L load sized to consume the rated power at nominal voltage.
struct RlLoadParams {
    std::string name;
    std::string bus;
    double r = 1.0;  // pu
    double l = 0.0;  // pu

    bool valid() const { return r > 0.0 && l >= 0.0; }

    // Sizing helper: impedance consuming (p, q) at |v| = 1 pu.
    static RlLoadParams from_power(const std::string& name, const std::string& bus,
                                   double p, double q);
    std::complex<double> impedance(double omega = 1.0) const { return {r, omega * l}; }
};

// Ideal source behind an optional series impedance (grid strength mu = SCR;
// series impedance 1/mu at the configured X/R ratio).
struct StiffGridParams {
    std::string name;
    std::string bus;
    double v_mag = 1.0;
    double theta0 = 0.0;       // rad, source angle in the global frame at t = 0
    double omega_grid = 1.0;   // pu
    double r = 1e-4;           // pu source impedance
    double l = 1e-3;           // pu

    bool valid() const { return v_mag > 0.0 && l > 0.0; }

    // Configure the series impedance from a short-circuit ratio.
    static StiffGridParams from_scr(const std::string& name, const std::string& bus,
                                    double mu, double x_over_r = 10.0);
};

// Current derivative of a series R-L element in the global frame.
DqVector series_current_derivative(const DqVector& i, const DqVector& v_from,
                                   const DqVector& v_to, double r, double l,
                                   double omega_frame, double omega_b);

}  // namespace vimsim::network
