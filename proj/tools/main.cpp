#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "vimsim/analysis/linear_model.hpp"
#include "vimsim/analysis/sweeps.hpp"
#include "vimsim/config/config.hpp"
#include "vimsim/core/per_unit.hpp"
#include "vimsim/dae/integrator.hpp"
#include "vimsim/sync/vim.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;
constexpr int kExitAnalysis = 4;

using vimsim::dae::ConverterKind;

// "name=a:b:n" (linspace) or "name=v1,v2,..." (explicit list)
bool parse_axis(const std::string& spec, std::string& name, std::vector<double>& grid) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) return false;
    name = spec.substr(0, eq);
    const std::string body = spec.substr(eq + 1);
    grid.clear();
    if (body.find(':') != std::string::npos) {
        double a, b;
        int n;
        if (std::sscanf(body.c_str(), "%lf:%lf:%d", &a, &b, &n) != 3 || n < 1)
            return false;
        for (int i = 0; i < n; ++i)
            grid.push_back(n == 1 ? a : a + (b - a) * double(i) / double(n - 1));
        return true;
    }
    std::stringstream ss(body);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            grid.push_back(std::stod(tok));
        } catch (...) {
            return false;
        }
    }
    return !grid.empty();
}

std::vector<ConverterKind> parse_modes(const std::string& mode) {
    if (mode == "pll") return {ConverterKind::following_pll};
    if (mode == "vim") return {ConverterKind::following_vim};
    if (mode == "forming") return {ConverterKind::forming};
    if (mode == "all")
        return {ConverterKind::following_pll, ConverterKind::following_vim,
                ConverterKind::forming};
    return {};
}

std::string with_mode_suffix(const std::string& out, ConverterKind k, bool multi) {
    if (!multi) return out;
    const char* name = k == ConverterKind::following_pll ? "pll"
                       : k == ConverterKind::following_vim ? "vim"
                                                           : "forming";
    const auto dot = out.rfind('.');
    if (dot == std::string::npos) return out + "_" + name;
    return out.substr(0, dot) + "_" + name + out.substr(dot);
}

int cmd_simulate(const std::string& config, double t_end, const std::string& out,
                 double dt) {
    vimsim::dae::Scenario scn;
    try {
        scn = vimsim::config::load_scenario(config);
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    }
    if (dt > 0.0) scn.solver.dt = dt;
    try {
        auto res = vimsim::dae::run_scenario(scn, t_end);
        if (!res.ok) {
            std::cerr << "solver abort: " << res.message << " (reached t = "
                      << res.t_final << " s)\n";
            if (!out.empty()) res.series.write_csv(out);
            return kExitSolver;
        }
        if (!out.empty()) res.series.write_csv(out);
        std::cout << "simulated " << res.t_final << " s, " << res.series.size()
                  << " samples, " << res.series.channel_count() << " channels\n";
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return kExitSolver;
    }
}

int cmd_linearize(const std::string& config, const std::string& out) {
    vimsim::dae::Scenario scn;
    try {
        scn = vimsim::config::load_scenario(config);
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    }
    try {
        vimsim::dae::AssembledSystem sys(scn);
        const auto eq = vimsim::dae::find_equilibrium(sys);
        if (!eq.converged) {
            std::cerr << "equilibrium solve failed (residual " << eq.residual << ")\n";
            return kExitSolver;
        }
        std::cout << "algebraic Jacobian condition number: " << eq.g_y_condition
                  << "\n";
        const auto model = vimsim::analysis::linearize(sys, eq.x, eq.y);
        const auto modal = vimsim::analysis::modal_analysis(model);
        const auto verdict = vimsim::analysis::classify(modal);
        std::cout << "max Re(lambda) = " << verdict.max_re
                  << (verdict.stable ? "  (stable)" : "  (unstable)") << "\n";
        if (verdict.critical_index >= 0) {
            std::cout << "critical mode participants:";
            for (const auto& [name, p] :
                 vimsim::analysis::top_participants(modal, verdict.critical_index))
                std::cout << "  " << name << " " << p;
            std::cout << "\n";
        }
        if (!out.empty()) vimsim::analysis::write_eigenvalue_csv(modal, out);
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "analysis failure: " << e.what() << "\n";
        return kExitAnalysis;
    }
}

int cmd_sweep(const std::string& kind, const std::string& config,
              const std::string& out, const std::string& mode,
              const std::vector<std::string>& grid_specs) {
    vimsim::dae::Scenario scn;
    try {
        scn = vimsim::config::load_scenario(config);
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    }
    std::map<std::string, std::vector<double>> axes;
    for (const auto& spec : grid_specs) {
        std::string name;
        std::vector<double> g;
        if (!parse_axis(spec, name, g)) {
            std::cerr << "bad --grid spec: " << spec << "\n";
            return kExitUsage;
        }
        axes[name] = g;
    }
    auto axis = [&](const char* name, std::vector<double> fallback) {
        auto it = axes.find(name);
        return it == axes.end() ? fallback : it->second;
    };
    const auto modes = parse_modes(mode);
    if (modes.empty()) {
        std::cerr << "unknown --mode: " << mode << "\n";
        return kExitUsage;
    }
    try {
        if (kind == "rlm") {
            const auto res = vimsim::analysis::sweep_rlm_surface(
                scn, axis("r_r", {0.0002, 0.0005, 0.001, 0.002, 0.005}),
                axis("l_r", {0.02, 0.05, 0.1, 0.2}),
                axis("l_m", {0.2, 0.4, 0.6, 0.8, 1.0}));
            if (!out.empty()) res.write_csv(out);
            std::cout << "rlm surface: " << res.points.size() << " points\n";
            return kExitOk;
        }
        for (const auto m : modes) {
            vimsim::analysis::SweepResult res;
            if (kind == "droop") {
                res = vimsim::analysis::sweep_droop_map(
                    scn, axis("r_p", {0.0, 0.02, 0.05, 0.1, 0.2}),
                    axis("r_q", {0.0, 0.01, 0.02, 0.05, 0.1}), m);
            } else if (kind == "scr") {
                res = vimsim::analysis::sweep_scr(
                    scn, axis("mu", {0.5, 0.75, 1.0, 1.25, 1.5, 2.0, 3.0}), m);
            } else if (kind == "penetration") {
                res = vimsim::analysis::sweep_penetration(
                    scn, axis("eta", {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}),
                    m);
            } else {
                std::cerr << "unknown sweep kind: " << kind << "\n";
                return kExitUsage;
            }
            int stable = 0;
            for (const auto& p : res.points) stable += p.stable;
            std::cout << res.tag << ": " << stable << "/" << res.points.size()
                      << " stable\n";
            if (!out.empty())
                res.write_csv(with_mode_suffix(out, m, modes.size() > 1));
        }
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "analysis failure: " << e.what() << "\n";
        return kExitAnalysis;
    }
}

int cmd_table39(const std::string& config, const std::string& out,
                const std::string& mode) {
    vimsim::dae::Scenario scn;
    try {
        scn = vimsim::config::load_scenario(config);
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    }
    auto modes = parse_modes(mode == "both" ? "all" : mode);
    if (mode == "both")
        modes = {ConverterKind::following_pll, ConverterKind::following_vim};
    if (modes.empty()) {
        std::cerr << "unknown --mode: " << mode << "\n";
        return kExitUsage;
    }
    // progressive substitution ladder: row k converts the first k generators
    const std::size_t ng = scn.sgs.size();
    std::vector<std::vector<int>> rows;
    for (std::size_t k = 0; k <= ng; ++k) {
        std::vector<int> row(ng, 0);
        for (std::size_t g = 0; g < k; ++g) row[g] = 1;
        rows.push_back(row);
    }
    try {
        std::string csv = "row,n_converters";
        std::vector<std::vector<vimsim::analysis::PointVerdict>> results;
        for (const auto m : modes) {
            results.push_back(vimsim::analysis::scenario_table(scn, rows, m));
            csv += std::string(",") +
                   (m == ConverterKind::following_pll ? "pll" : "vim") + "_stable";
        }
        csv += "\n";
        for (std::size_t r = 0; r < rows.size(); ++r) {
            csv += std::to_string(r) + "," + std::to_string(r);
            for (const auto& res : results)
                csv += std::string(",") + (res[r].stable ? "1" : "0");
            csv += "\n";
            std::cout << "row " << r << ":";
            for (std::size_t mi = 0; mi < results.size(); ++mi)
                std::cout << " " << (results[mi][r].stable ? "stable" : "unstable");
            std::cout << "\n";
        }
        if (!out.empty()) {
            const std::string tmp = out + ".tmp";
            {
                std::ofstream os(tmp);
                os << csv;
            }
            if (std::rename(tmp.c_str(), out.c_str()) != 0)
                throw std::runtime_error("atomic rename failed for " + out);
        }
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "analysis failure: " << e.what() << "\n";
        return kExitAnalysis;
    }
}

int cmd_selftest() {
    int failures = 0;
    auto check = [&](const char* name, bool ok) {
        std::cout << (ok ? "PASS" : "FAIL") << "  " << name << "\n";
        if (!ok) ++failures;
    };

    {
        std::mt19937_64 rng(12345);
        std::uniform_real_distribution<double> u(-0.05, 0.05);
        bool ok = true;
        for (int i = 0; i < 10000 && ok; ++i) {
            const double w = u(rng);
            double lo = u(rng), hi = u(rng);
            if (lo > hi) std::swap(lo, hi);
            if (lo == hi) hi = lo + 1e-6;
            const double a = vimsim::sync::saturate_slip(w, lo, hi);
            const double b = std::clamp(w, lo, hi);
            ok = (a == b) ||
                 a == std::nextafter(b, std::numeric_limits<double>::infinity()) ||
                 a == std::nextafter(b, -std::numeric_limits<double>::infinity());
        }
        check("slip saturation equals clamp on 1e4 random triples", ok);
    }
    {
        vimsim::sync::VimParams p;
        const double pu = vimsim::sync::k_e_eval(0.0, p).real();
        const double si = vimsim::sync::k_e_eval(0.0, p, 1.5).real();
        check("static torque gain 7.2 pu / 10.8 scaled",
              std::abs(pu - 7.2) < 1e-12 && std::abs(si - 10.8) < 1e-12);
    }
    {
        const auto pq = vimsim::instantaneous_power({1.0, 0.0}, {0.0, 0.5});
        check("reactive power sign convention", pq.p == 0.0 && pq.q == -0.5);
    }
    {
        vimsim::PerUnitBase b(1.5e6, 690.0, 2.0 * M_PI * 50.0);
        check("inertia conversion 152.14 kg m^2 -> H ~ 5 s",
              std::abs(b.inertia_h_from_j(152.14) - 5.0) < 0.01);
    }
    {
        // trapezoidal convergence order on x' = -x over 1 s
        auto run = [](double dt) {
            double x = 1.0;
            const int n = int(std::lround(1.0 / dt));
            for (int i = 0; i < n; ++i) x *= (1.0 - dt / 2.0) / (1.0 + dt / 2.0);
            return std::abs(x - std::exp(-1.0));
        };
        const double order = std::log2(run(1e-2) / run(5e-3));
        check("trapezoidal rule is second order", order > 1.9);
    }
    {
        bool ok = false;
        try {
            vimsim::dae::Scenario scn;
            scn.buses = {"b1", "b2"};
            vimsim::network::BranchParams br;
            br.name = "l12";
            br.from_bus = "b1";
            br.to_bus = "b2";
            br.l = 0.1;
            br.r = 0.01;
            scn.branches.push_back(br);
            scn.grids.push_back(
                vimsim::network::StiffGridParams::from_scr("grid", "b2", 20.0));
            vimsim::dae::ConverterSpec c;
            c.name = "vsc";
            c.bus = "b1";
            c.outer.p_set = 0.5;
            scn.converters.push_back(c);
            const std::string once = vimsim::config::emit_scenario(scn);
            const auto back = vimsim::config::load_scenario_from_string(once);
            ok = vimsim::config::emit_scenario(back) == once;
        } catch (const std::exception&) {
            ok = false;
        }
        check("config round trip", ok);
    }
    return failures == 0 ? kExitOk : kExitAnalysis;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"VSC grid-synchronization simulation and small-signal workbench"};
    app.require_subcommand(1);

    std::string config, out, mode = "all", sweep_kind;
    double t_end = 3.0, dt = -1.0;
    std::vector<std::string> grid_specs;

    auto* sim = app.add_subcommand("simulate", "time-domain simulation to CSV");
    sim->add_option("--config", config)->required();
    sim->add_option("--t-end", t_end);
    sim->add_option("--out", out);
    sim->add_option("--dt", dt);

    auto* lin = app.add_subcommand("linearize", "equilibrium + eigenvalue CSV");
    lin->add_option("--config", config)->required();
    lin->add_option("--out", out);

    auto* swp = app.add_subcommand("sweep", "parameter sweep studies");
    swp->add_option("kind", sweep_kind, "droop | scr | penetration | rlm")->required();
    swp->add_option("--config", config)->required();
    swp->add_option("--out", out);
    swp->add_option("--mode", mode, "pll | vim | forming | all");
    swp->add_option("--grid", grid_specs, "axis spec name=a:b:n or name=v1,v2,...");

    auto* t39 = app.add_subcommand("table39", "generation-portfolio ladder verdicts");
    t39->add_option("--config", config)->required();
    t39->add_option("--out", out);
    std::string t39_mode = "both";
    t39->add_option("--mode", t39_mode, "pll | vim | both");

    app.add_subcommand("selftest", "run built-in invariant checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    if (sim->parsed()) return cmd_simulate(config, t_end, out, dt);
    if (lin->parsed()) return cmd_linearize(config, out);
    if (swp->parsed()) return cmd_sweep(sweep_kind, config, out, mode, grid_specs);
    if (t39->parsed()) return cmd_table39(config, out, t39_mode);
    return cmd_selftest();
}
