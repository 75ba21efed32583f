#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vimsim/core/time_series.hpp"
#include "vimsim/dae/assemble.hpp"

namespace vimsim::dae {

// Solves 0 = g(t, x, y) for y with x held fixed. Returns false when the
// Newton iteration stalls (the system is then not index-1 consistent at x).
bool solve_algebraic(const AssembledSystem& sys, double t, const Eigen::VectorXd& x,
                     Eigen::VectorXd& y, double tol = 1e-12, int max_iters = 50);

struct EquilibriumResult {
    bool converged = false;
    double residual = 0.0;  // infinity-norm of [f; g] at the returned point
    int iterations = 0;
    Eigen::VectorXd x, y;
    double omega_frame = 1.0;
    double g_y_condition = 0.0;  // algebraic-Jacobian conditioning at the solution
};

// Full Newton solve of f = 0, g = 0 seeded by the phasor power flow. Without a
// connected stiff grid the frame speed joins the unknowns and one device angle
// is pinned. Falls back to a short time-march plus a second Newton attempt.
EquilibriumResult find_equilibrium(AssembledSystem& sys, double tol = 1e-8,
                                   int max_iters = 80);

struct SimulationResult {
    bool ok = false;
    std::string message;
    double t_final = 0.0;
    TimeSeries series;
    Eigen::VectorXd x_final, y_final;
};

// Trapezoidal integration with a simultaneous (x, y) Newton solve per step,
// finite-difference Jacobian reuse, event handling at exact event times and
// step halving (up to 4 times) on Newton failure.
SimulationResult simulate(AssembledSystem& sys, Eigen::VectorXd x, Eigen::VectorXd y,
                          double t_end, std::vector<Event> events,
                          const SolveOptions& opts);

// Build + initialize + simulate in one call; honors scenario events, solver
// options and the cold_start flag.
SimulationResult run_scenario(const Scenario& scn, double t_end);

}  // namespace vimsim::dae
