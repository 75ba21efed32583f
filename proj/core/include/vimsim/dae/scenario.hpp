#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vimsim/converter/following.hpp"
#include "vimsim/converter/forming.hpp"
#include "vimsim/network/elements.hpp"
#include "vimsim/network/sg.hpp"

namespace vimsim::dae {

// Scripted discontinuity applied during simulation.
struct Event {
    double time = 0.0;  // seconds, >= 0
    std::string kind;   // setpoint_step | breaker_open | breaker_close | load_step |
                        // three_phase_fault_on | fault_clear
    std::string target;
    std::map<std::string, double> payload;
};

struct SolveOptions {
    double dt = 1e-4;          // s
    double newton_tol = 1e-10; // infinity-norm of the combined residual
    int max_newton_iters = 25;
    int jacobian_max_age = 200;  // steps between forced Jacobian refreshes
    int output_stride = 10;      // record every n-th step
};

enum class ConverterKind { following_pll, following_vim, forming };

struct ConverterSpec {
    std::string name;
    std::string bus;
    ConverterKind kind = ConverterKind::following_vim;
    double rating = 1.0;  // device base as fraction of system base
    converter::FollowingOuterParams outer;
    converter::FormingParams forming;
    converter::DeviceParams device;
    sync::PllParams pll;
    sync::VimParams vim;
};

struct SgSpec {
    std::string name;
    std::string bus;
    double rating = 1.0;
    network::SgParams params;
};

// Network topology + device roster + scripted events + solver options.
struct Scenario {
    double s_base_va = 1.5e6;
    double v_base_v = 690.0;
    double f_base_hz = 50.0;

    std::vector<std::string> buses;
    std::vector<network::BranchParams> branches;
    std::vector<network::RlLoadParams> loads;
    std::vector<network::StiffGridParams> grids;
    std::vector<ConverterSpec> converters;
    std::vector<SgSpec> sgs;

    std::vector<Event> events;
    SolveOptions solver;
    std::vector<std::string> outputs;  // empty = all channels
    bool cold_start = false;           // skip the equilibrium pre-solve for converters

    double omega_base() const { return 2.0 * M_PI * f_base_hz; }

    // Structural validation; returns a list of problems (empty when valid).
    std::vector<std::string> validate() const;

    int bus_index(const std::string& name) const;
};

}  // namespace vimsim::dae
