#pragma once

#include <string>
#include <vector>

#include "vimsim/analysis/linear_model.hpp"
#include "vimsim/dae/scenario.hpp"

namespace vimsim::analysis {

using dae::Scenario;

struct PointVerdict {
    bool feasible = false;  // equilibrium + linearization succeeded
    bool stable = false;
    double max_re = std::numeric_limits<double>::quiet_NaN();
};

// Dense lattice of verdicts; points are stored row-major over the axis grids
// (last axis fastest) and merged deterministically by grid index.
struct SweepResult {
    std::vector<std::string> axis_names;
    std::vector<std::vector<double>> grids;
    std::vector<PointVerdict> points;
    std::string tag;  // optional constant column (e.g. converter mode)

    std::size_t index(const std::vector<std::size_t>& coord) const;
    std::vector<double> coordinates(std::size_t flat) const;

    // CSV: axes..., feasible, stable, max_re (+ mode when tag set). Atomic.
    void write_csv(const std::string& path) const;
};

// Equilibrium + linearize + classify; failures yield an infeasible verdict.
PointVerdict assess_scenario(const Scenario& scn);

// Worker count for sweep fan-out: VIMSIM_WORKERS, else hardware concurrency.
int worker_count();

// Switches every converter in the roster to the given mode, carrying the
// power/voltage setpoints across.
void set_converter_mode(Scenario& scn, dae::ConverterKind kind);

SweepResult sweep_droop_map(const Scenario& tmpl, const std::vector<double>& rp_grid,
                            const std::vector<double>& rq_grid,
                            dae::ConverterKind mode);

SweepResult sweep_scr(const Scenario& tmpl, const std::vector<double>& mu_grid,
                      dae::ConverterKind mode);

// Replaces SG capacity share eta by converter capacity; the max-Re trace is
// in the per-point verdicts.
SweepResult sweep_penetration(const Scenario& tmpl, const std::vector<double>& eta_grid,
                              dae::ConverterKind mode);

// Returns the linear model at one penetration point (for participation
// inspection of the critical mode).
struct PenetrationPoint {
    PointVerdict verdict;
    ModalAnalysis modal;
    StabilityResult stability;
};
PenetrationPoint assess_penetration_point(const Scenario& tmpl, double eta,
                                          dae::ConverterKind mode);

SweepResult sweep_rlm_surface(const Scenario& tmpl, const std::vector<double>& rr_grid,
                              const std::vector<double>& lr_grid,
                              const std::vector<double>& lm_grid);

// Generation-portfolio ladder: rows[r][g] selects SG (0) or converter (1) for
// generator g of the base roster; converters use the given synchronization.
std::vector<PointVerdict> scenario_table(const Scenario& base,
                                         const std::vector<std::vector<int>>& rows,
                                         dae::ConverterKind sync);

}  // namespace vimsim::analysis
