#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace vimsim::dae {

// Phasor power-flow node. Injections are in system per-unit; constant-impedance
// elements belong in the admittance matrix, not here.
struct PfBus {
    enum class Type { slack, pv, pq };
    Type type = Type::pq;
    double p = 0.0;      // specified injection (pq, pv)
    double q = 0.0;      // specified injection (pq)
    double v = 1.0;      // specified magnitude (slack, pv); initial guess otherwise
    double theta = 0.0;  // specified angle (slack); initial guess otherwise
};

struct PfResult {
    bool converged = false;
    int iterations = 0;
    std::vector<std::complex<double>> v;  // node voltage phasors
    std::vector<std::complex<double>> s;  // realized net injections through ybus
};

// Newton-Raphson power flow in polar coordinates with a finite-difference
// Jacobian. Sized for the networks handled here (tens of nodes).
PfResult solve_powerflow(const Eigen::MatrixXcd& ybus, const std::vector<PfBus>& buses,
                         double tol = 1e-10, int max_iters = 60);

}  // namespace vimsim::dae
