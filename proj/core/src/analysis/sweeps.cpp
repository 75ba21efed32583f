#include "vimsim/analysis/sweeps.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <thread>

#include "vimsim/dae/integrator.hpp"

namespace vimsim::analysis {

namespace {

template <typename F>
void parallel_for(std::size_t n, F&& fn) {
    std::size_t w = std::min<std::size_t>(std::size_t(worker_count()), n);
    if (w <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < w; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

Scenario with_mode(Scenario scn, dae::ConverterKind mode) {
    set_converter_mode(scn, mode);
    return scn;
}

Scenario build_penetration(const Scenario& tmpl, double eta, dae::ConverterKind mode) {
    Scenario scn = with_mode(tmpl, mode);
    double total = 0.0;
    for (const auto& s : scn.sgs) total += s.rating;
    for (const auto& c : scn.converters) total += c.rating;
    double conv_total = 0.0;
    for (const auto& c : scn.converters) conv_total += c.rating;
    const double sg_total = total - conv_total;

    if (eta <= 0.0) {
        scn.converters.clear();
    } else {
        for (auto& c : scn.converters)
            c.rating *= eta * total / std::max(conv_total, 1e-12);
    }
    if (eta >= 1.0) {
        scn.sgs.clear();
    } else {
        for (auto& s : scn.sgs)
            s.rating *= (1.0 - eta) * total / std::max(sg_total, 1e-12);
    }
    return scn;
}

}  // namespace

int worker_count() {
    if (const char* env = std::getenv("VIMSIM_WORKERS")) {
        const int w = std::atoi(env);
        if (w > 0) return w;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc ? int(hc) : 1;
}

void set_converter_mode(Scenario& scn, dae::ConverterKind kind) {
    for (auto& c : scn.converters) {
        if (c.kind == kind) continue;
        if (kind == dae::ConverterKind::forming) {
            c.forming.p_set = c.outer.p_set;
            c.forming.q_set = c.outer.q_set;
            c.forming.v_set = c.outer.v_set;
            c.forming.omega_set = c.outer.omega_set;
        } else if (c.kind == dae::ConverterKind::forming) {
            c.outer.p_set = c.forming.p_set;
            c.outer.q_set = c.forming.q_set;
            c.outer.v_set = c.forming.v_set;
            c.outer.omega_set = c.forming.omega_set;
        }
        c.kind = kind;
    }
}

PointVerdict assess_scenario(const Scenario& scn) {
    PointVerdict out;
    try {
        dae::AssembledSystem sys(scn);
        const auto eq = dae::find_equilibrium(sys);
        if (!eq.converged) return out;
        const auto model = linearize(sys, eq.x, eq.y);
        const auto modal = modal_analysis(model);
        const auto verdict = classify(modal);
        out.feasible = true;
        out.stable = verdict.stable;
        out.max_re = verdict.max_re;
    } catch (const std::exception&) {
        out = PointVerdict{};
    }
    return out;
}

std::size_t SweepResult::index(const std::vector<std::size_t>& coord) const {
    std::size_t flat = 0;
    for (std::size_t a = 0; a < grids.size(); ++a) flat = flat * grids[a].size() + coord[a];
    return flat;
}

std::vector<double> SweepResult::coordinates(std::size_t flat) const {
    std::vector<double> out(grids.size());
    for (std::size_t a = grids.size(); a-- > 0;) {
        out[a] = grids[a][flat % grids[a].size()];
        flat /= grids[a].size();
    }
    return out;
}

void SweepResult::write_csv(const std::string& path) const {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp);
        if (!os) throw std::runtime_error("cannot open for writing: " + tmp);
        for (const auto& a : axis_names) os << a << ",";
        os << "feasible,stable,max_re";
        if (!tag.empty()) os << ",mode";
        os << "\n";
        char buf[64];
        for (std::size_t i = 0; i < points.size(); ++i) {
            for (double c : coordinates(i)) {
                std::snprintf(buf, sizeof buf, "%.17g", c);
                os << buf << ",";
            }
            os << (points[i].feasible ? 1 : 0) << "," << (points[i].stable ? 1 : 0)
               << ",";
            std::snprintf(buf, sizeof buf, "%.17g", points[i].max_re);
            os << buf;
            if (!tag.empty()) os << "," << tag;
            os << "\n";
        }
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("atomic rename failed for " + path);
}

namespace {

SweepResult run_grid(std::vector<std::string> axes, std::vector<std::vector<double>> grids,
                     std::string tag,
                     const std::function<Scenario(const std::vector<double>&)>& make) {
    SweepResult out;
    out.axis_names = std::move(axes);
    out.grids = std::move(grids);
    out.tag = std::move(tag);
    std::size_t n = 1;
    for (const auto& g : out.grids) n *= g.size();
    out.points.resize(n);
    parallel_for(n, [&](std::size_t i) {
        out.points[i] = assess_scenario(make(out.coordinates(i)));
    });
    return out;
}

const char* mode_name(dae::ConverterKind k) {
    switch (k) {
        case dae::ConverterKind::following_pll: return "pll";
        case dae::ConverterKind::following_vim: return "vim";
        default: return "forming";
    }
}

}  // namespace

SweepResult sweep_droop_map(const Scenario& tmpl, const std::vector<double>& rp_grid,
                            const std::vector<double>& rq_grid,
                            dae::ConverterKind mode) {
    const Scenario base = with_mode(tmpl, mode);
    return run_grid({"r_p", "r_q"}, {rp_grid, rq_grid}, mode_name(mode),
                    [&](const std::vector<double>& c) {
                        Scenario scn = base;
                        for (auto& conv : scn.converters) {
                            if (conv.kind == dae::ConverterKind::forming) {
                                conv.forming.r_p = c[0];
                                conv.forming.r_q = c[1];
                            } else {
                                conv.outer.r_p = c[0];
                                conv.outer.r_q = c[1];
                            }
                        }
                        return scn;
                    });
}

SweepResult sweep_scr(const Scenario& tmpl, const std::vector<double>& mu_grid,
                      dae::ConverterKind mode) {
    const Scenario base = with_mode(tmpl, mode);
    return run_grid({"mu"}, {mu_grid}, mode_name(mode),
                    [&](const std::vector<double>& c) {
                        Scenario scn = base;
                        for (auto& g : scn.grids) {
                            const auto sized = network::StiffGridParams::from_scr(
                                g.name, g.bus, c[0]);
                            g.r = sized.r;
                            g.l = sized.l;
                        }
                        return scn;
                    });
}

SweepResult sweep_penetration(const Scenario& tmpl, const std::vector<double>& eta_grid,
                              dae::ConverterKind mode) {
    return run_grid({"eta"}, {eta_grid}, mode_name(mode),
                    [&](const std::vector<double>& c) {
                        return build_penetration(tmpl, c[0], mode);
                    });
}

PenetrationPoint assess_penetration_point(const Scenario& tmpl, double eta,
                                          dae::ConverterKind mode) {
    PenetrationPoint out;
    const Scenario scn = build_penetration(tmpl, eta, mode);
    dae::AssembledSystem sys(scn);
    const auto eq = dae::find_equilibrium(sys);
    if (!eq.converged) return out;
    const auto model = linearize(sys, eq.x, eq.y);
    out.modal = modal_analysis(model);
    out.stability = classify(out.modal);
    out.verdict.feasible = true;
    out.verdict.stable = out.stability.stable;
    out.verdict.max_re = out.stability.max_re;
    return out;
}

SweepResult sweep_rlm_surface(const Scenario& tmpl, const std::vector<double>& rr_grid,
                              const std::vector<double>& lr_grid,
                              const std::vector<double>& lm_grid) {
    const Scenario base = with_mode(tmpl, dae::ConverterKind::following_vim);
    return run_grid({"r_r", "l_r", "l_m"}, {rr_grid, lr_grid, lm_grid}, "vim",
                    [&](const std::vector<double>& c) {
                        Scenario scn = base;
                        for (auto& conv : scn.converters) {
                            conv.vim.r_r = c[0];
                            conv.vim.l_r = c[1];
                            conv.vim.l_m = c[2];
                        }
                        return scn;
                    });
}

std::vector<PointVerdict> scenario_table(const Scenario& base,
                                         const std::vector<std::vector<int>>& rows,
                                         dae::ConverterKind sync) {
    dae::ConverterSpec proto;
    if (!base.converters.empty()) proto = base.converters.front();

    std::vector<PointVerdict> out(rows.size());
    parallel_for(rows.size(), [&](std::size_t r) {
        Scenario scn = base;
        scn.converters.clear();
        scn.sgs.clear();
        for (std::size_t g = 0; g < base.sgs.size(); ++g) {
            const int pick = g < rows[r].size() ? rows[r][g] : 0;
            if (pick == 0) {
                scn.sgs.push_back(base.sgs[g]);
            } else {
                dae::ConverterSpec c = proto;
                c.name = base.sgs[g].name;
                c.bus = base.sgs[g].bus;
                c.rating = base.sgs[g].rating;
                c.kind = sync;
                c.outer.p_set = base.sgs[g].params.p_set;
                c.outer.q_set = 0.0;
                c.forming.p_set = base.sgs[g].params.p_set;
                c.forming.v_set = base.sgs[g].params.v_set;
                scn.converters.push_back(c);
            }
        }
        out[r] = assess_scenario(scn);
    });
    return out;
}

}  // namespace vimsim::analysis
