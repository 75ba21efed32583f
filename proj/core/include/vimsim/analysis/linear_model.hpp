#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vimsim/dae/assemble.hpp"

namespace vimsim::analysis {

// Residual evaluator f(x, y) -> (f, g) used by the generic linearizer.
using FgEval = std::function<void(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                  Eigen::VectorXd& f, Eigen::VectorXd& g)>;

struct LinearModel {
    Eigen::MatrixXd a;  // reduced state matrix over the differential states
    Eigen::MatrixXd f_x, f_y, g_x, g_y;
    std::vector<std::string> state_names;
    double g_y_condition = 0.0;  // 0 when there are no algebraic variables
};

// A = f_x - f_y * g_y^{-1} * g_x via central differences with relative step
// h_rel. Throws when (x0, y0) is not an equilibrium (residual reported) or
// when g_y is numerically singular (index violation).
LinearModel linearize_fd(const FgEval& eval, const Eigen::VectorXd& x0,
                         const Eigen::VectorXd& y0, double h_rel = 1e-6,
                         std::vector<std::string> state_names = {},
                         double equilibrium_tol = 1e-6);

LinearModel linearize(const dae::AssembledSystem& sys, const Eigen::VectorXd& x0,
                      const Eigen::VectorXd& y0, double h_rel = 1e-6);

struct ModalAnalysis {
    Eigen::VectorXcd eigenvalues;
    Eigen::MatrixXcd right;          // columns are right eigenvectors
    Eigen::MatrixXcd left;           // rows are left eigenvectors (rows of right^-1)
    Eigen::MatrixXd participation;   // (state k, mode i) = |l_ik * r_ki|, columns sum to 1
    std::vector<std::string> state_names;
    bool defective = false;          // participation columns are NaN when set
};

ModalAnalysis modal_analysis(const LinearModel& model);

struct StabilityResult {
    bool stable = false;
    bool ambiguous = false;  // more than one near-zero mode
    double max_re = 0.0;     // over retained modes
    int n_discarded = 0;     // rotational-symmetry zero modes removed (at most 1)
    std::complex<double> critical;  // eigenvalue attaining max_re
    int critical_index = -1;
};

// Stable iff max Re < -tol after discarding at most one |lambda| < zero_tol
// angle-reference mode.
StabilityResult classify(const ModalAnalysis& modal, double tol = 1e-6,
                         double zero_tol = 1e-7);

// Top participating states of one mode, largest first.
std::vector<std::pair<std::string, double>> top_participants(const ModalAnalysis& modal,
                                                             int mode, int count = 3);

// CSV: re, im, dominant_state, top-3 participation summary. Atomic write.
void write_eigenvalue_csv(const ModalAnalysis& modal, const std::string& path);

}  // namespace vimsim::analysis
