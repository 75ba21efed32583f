#include "vimsim/dae/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace vimsim::dae {

namespace {

bool finite(const Eigen::VectorXd& v) { return v.allFinite(); }

void eval_fg(const AssembledSystem& sys, double t, const Eigen::VectorXd& x,
             const Eigen::VectorXd& y, Eigen::VectorXd& f, Eigen::VectorXd& g) {
    static double dummy = 0.0;
    const double* yp = y.size() ? y.data() : &dummy;
    double* gp = g.size() ? g.data() : &dummy;
    sys.eval(t, x.data(), yp, f.data(), gp);
}

// d[f; g] / d[x; y] by forward differences.
Eigen::MatrixXd fd_system_jacobian(const AssembledSystem& sys, double t,
                                   const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    const int nx = int(x.size()), ny = int(y.size());
    const int m = nx + ny;
    Eigen::VectorXd f0(nx), g0(ny), f1(nx), g1(ny);
    eval_fg(sys, t, x, y, f0, g0);
    Eigen::MatrixXd jac(m, m);
    Eigen::VectorXd xp = x, yp = y;
    for (int j = 0; j < m; ++j) {
        double& uj = j < nx ? xp(j) : yp(j - nx);
        const double save = uj;
        const double h = 1e-8 * std::max(1.0, std::abs(save));
        uj = save + h;
        eval_fg(sys, t, xp, yp, f1, g1);
        uj = save;
        jac.col(j).head(nx) = (f1 - f0) / h;
        if (ny) jac.col(j).tail(ny) = (g1 - g0) / h;
    }
    return jac;
}

struct StepJacobian {
    Eigen::MatrixXd fg;  // system Jacobian at the point of last refresh
    Eigen::PartialPivLU<Eigen::MatrixXd> lu;
    double h = -1.0;
    int age = 1 << 30;
    bool valid = false;

    void factor(int nx, int ny, double h_new) {
        const int m = nx + ny;
        Eigen::MatrixXd j(m, m);
        j.topRows(nx) = -0.5 * h_new * fg.topRows(nx);
        j.topLeftCorner(nx, nx) += Eigen::MatrixXd::Identity(nx, nx);
        if (ny) j.bottomRows(ny) = fg.bottomRows(ny);
        lu.compute(j);
        h = h_new;
        valid = true;
    }
};

// One trapezoidal step from (t, x, y) to t + h. Returns false when Newton
// fails even after a Jacobian refresh.
bool trapezoid_step(const AssembledSystem& sys, double t, double h, Eigen::VectorXd& x,
                    Eigen::VectorXd& y, StepJacobian& jac, const SolveOptions& opts) {
    const int nx = int(x.size()), ny = int(y.size());
    Eigen::VectorXd f_old(nx), g_old(ny);
    eval_fg(sys, t, x, y, f_old, g_old);
    if (!finite(f_old)) return false;

    for (int attempt = 0; attempt < 2; ++attempt) {
        if (!jac.valid || jac.age >= opts.jacobian_max_age || jac.h != h || attempt > 0) {
            jac.fg = fd_system_jacobian(sys, t + h, x, y);
            jac.factor(nx, ny, h);
            jac.age = 0;
        }
        Eigen::VectorXd xn = x, yn = y;
        Eigen::VectorXd f_new(nx), g_new(ny), r(nx + ny);
        bool ok = false;
        for (int it = 0; it < opts.max_newton_iters; ++it) {
            eval_fg(sys, t + h, xn, yn, f_new, g_new);
            r.head(nx) = xn - x - 0.5 * h * (f_old + f_new);
            if (ny) r.tail(ny) = g_new;
            if (!finite(r)) break;
            if (r.lpNorm<Eigen::Infinity>() < opts.newton_tol) {
                ok = true;
                break;
            }
            const Eigen::VectorXd du = jac.lu.solve(r);
            xn -= du.head(nx);
            if (ny) yn -= du.tail(ny);
        }
        if (ok && finite(xn)) {
            x = xn;
            y = yn;
            jac.age++;
            return true;
        }
    }
    return false;
}

// Advances exactly by `span`, halving the step on failure (4 levels deep).
bool advance(const AssembledSystem& sys, double& t, double span, Eigen::VectorXd& x,
             Eigen::VectorXd& y, StepJacobian& jac, const SolveOptions& opts,
             int depth = 0) {
    if (trapezoid_step(sys, t, span, x, y, jac, opts)) {
        t += span;
        return true;
    }
    if (depth >= 4) return false;
    const double h = span / 2.0;
    return advance(sys, t, h, x, y, jac, opts, depth + 1) &&
           advance(sys, t, h, x, y, jac, opts, depth + 1);
}

}  // namespace

bool solve_algebraic(const AssembledSystem& sys, double t, const Eigen::VectorXd& x,
                     Eigen::VectorXd& y, double tol, int max_iters) {
    const int nx = int(x.size()), ny = int(y.size());
    if (ny == 0) return true;
    Eigen::VectorXd f(nx), g(ny), g1(ny);
    for (int it = 0; it < max_iters; ++it) {
        eval_fg(sys, t, x, y, f, g);
        if (!finite(g)) return false;
        if (g.lpNorm<Eigen::Infinity>() < tol) return true;
        Eigen::MatrixXd gy(ny, ny);
        Eigen::VectorXd yp = y;
        for (int j = 0; j < ny; ++j) {
            const double save = yp(j);
            const double h = 1e-8 * std::max(1.0, std::abs(save));
            yp(j) = save + h;
            eval_fg(sys, t, x, yp, f, g1);
            yp(j) = save;
            gy.col(j) = (g1 - g) / h;
        }
        const Eigen::VectorXd dy = gy.partialPivLu().solve(g);
        // damped update protects the slip saturation corners
        double alpha = 1.0;
        for (int ls = 0; ls < 8; ++ls) {
            Eigen::VectorXd ytry = y - alpha * dy;
            eval_fg(sys, t, x, ytry, f, g1);
            if (finite(g1) && (g1.norm() < g.norm() || ls == 7)) {
                y = ytry;
                break;
            }
            alpha *= 0.5;
        }
    }
    eval_fg(sys, t, x, y, f, g);
    return finite(g) && g.lpNorm<Eigen::Infinity>() < tol * 100.0;
}

namespace {

// Newton on the steady-state residual; when the frame speed floats, it is an
// extra unknown and one device angle is pinned at its current value.
EquilibriumResult newton_equilibrium(AssembledSystem& sys, Eigen::VectorXd x,
                                     Eigen::VectorXd y, double tol, int max_iters) {
    const int nx = int(x.size()), ny = int(y.size());
    const bool floating = !sys.has_connected_grid();
    const int pin = floating ? sys.reference_angle_index() : -1;
    if (floating && pin < 0)
        throw std::runtime_error("cannot pin a reference angle: no devices");
    const double pin_val = floating ? x(pin) : 0.0;
    const int m = nx + ny + (floating ? 1 : 0);

    Eigen::VectorXd u(m);
    u.head(nx) = x;
    if (ny) u.segment(nx, ny) = y;
    if (floating) u(m - 1) = sys.omega_frame();

    auto residual = [&](const Eigen::VectorXd& uu) {
        if (floating) sys.set_omega_frame(uu(m - 1));
        Eigen::VectorXd f(nx), g(ny), r(m);
        const Eigen::VectorXd xx = uu.head(nx);
        const Eigen::VectorXd yy = ny ? Eigen::VectorXd(uu.segment(nx, ny))
                                      : Eigen::VectorXd();
        eval_fg(sys, 0.0, xx, yy, f, g);
        r.head(nx) = f;
        if (ny) r.segment(nx, ny) = g;
        if (floating) r(m - 1) = uu(pin) - pin_val;
        return r;
    };

    EquilibriumResult out;
    Eigen::VectorXd r = residual(u);
    for (int it = 0; it < max_iters; ++it) {
        const double rn = r.lpNorm<Eigen::Infinity>();
        if (!std::isfinite(rn)) break;
        if (rn < tol) {
            out.converged = true;
            out.iterations = it;
            break;
        }
        Eigen::MatrixXd jac(m, m);
        Eigen::VectorXd up = u;
        for (int j = 0; j < m; ++j) {
            const double save = up(j);
            const double h = 1e-8 * std::max(1.0, std::abs(save));
            up(j) = save + h;
            jac.col(j) = (residual(up) - r) / h;
            up(j) = save;
        }
        const Eigen::VectorXd du = jac.partialPivLu().solve(r);
        double alpha = 1.0;
        bool stepped = false;
        for (int ls = 0; ls < 10; ++ls) {
            const Eigen::VectorXd r_try = residual(u - alpha * du);
            if (r_try.allFinite() && r_try.norm() < r.norm()) {
                u -= alpha * du;
                r = r_try;
                stepped = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!stepped) {
            // accept the tiny damped step anyway; stagnation ends the loop
            const Eigen::VectorXd r_try = residual(u - alpha * du);
            if (!r_try.allFinite()) break;
            u -= alpha * du;
            r = r_try;
        }
        out.iterations = it + 1;
    }
    r = residual(u);  // leaves sys.omega_frame consistent with the returned point
    out.residual = r.allFinite() ? r.lpNorm<Eigen::Infinity>()
                                 : std::numeric_limits<double>::infinity();
    out.converged = out.converged && out.residual < tol;
    out.x = u.head(nx);
    out.y = ny ? Eigen::VectorXd(u.segment(nx, ny)) : Eigen::VectorXd();
    out.omega_frame = sys.omega_frame();
    if (!ny) {
        out.g_y_condition = 1.0;  // no algebraic block: trivially well conditioned
    } else if (out.x.allFinite()) {
        const Eigen::MatrixXd fg = fd_system_jacobian(sys, 0.0, out.x, out.y);
        const Eigen::JacobiSVD<Eigen::MatrixXd> svd(fg.bottomRightCorner(ny, ny));
        const double smin = svd.singularValues()(ny - 1);
        out.g_y_condition = smin > 0.0 ? svd.singularValues()(0) / smin
                                       : std::numeric_limits<double>::infinity();
    }
    return out;
}

}  // namespace

EquilibriumResult find_equilibrium(AssembledSystem& sys, double tol, int max_iters) {
    Eigen::VectorXd x(sys.n_states()), y(sys.n_alg());
    try {
        sys.init_from_powerflow(x.data(), y.data());
    } catch (const std::runtime_error&) {
        sys.init_cold(x.data(), y.data());
    }
    solve_algebraic(sys, 0.0, x, y);

    EquilibriumResult eq = newton_equilibrium(sys, x, y, tol, max_iters);
    if (eq.converged) return eq;

    // settle the transients first, then retry
    SolveOptions march;
    march.dt = 2e-4;
    march.output_stride = 1 << 30;
    const double w_hold = sys.has_connected_grid() ? sys.omega_frame() : 1.0;
    sys.set_omega_frame(w_hold);
    Eigen::VectorXd xm = eq.x.size() ? eq.x : x;
    Eigen::VectorXd ym = eq.y.size() ? eq.y : y;
    solve_algebraic(sys, 0.0, xm, ym);
    StepJacobian jac;
    double t = 0.0;
    while (t < 2.0) {
        if (!advance(sys, t, march.dt, xm, ym, jac, march)) break;
    }
    EquilibriumResult eq2 = newton_equilibrium(sys, xm, ym, tol, max_iters);
    return eq2.residual < eq.residual ? eq2 : eq;
}

SimulationResult simulate(AssembledSystem& sys, Eigen::VectorXd x, Eigen::VectorXd y,
                          double t_end, std::vector<Event> events,
                          const SolveOptions& opts) {
    std::sort(events.begin(), events.end(),
              [](const Event& a, const Event& b) { return a.time < b.time; });

    // channel selection
    const auto& all = sys.channel_names();
    std::vector<int> sel;
    std::vector<std::string> sel_names;
    const auto& wanted = sys.scenario().outputs;
    for (std::size_t i = 0; i < all.size(); ++i) {
        if (wanted.empty() ||
            std::find(wanted.begin(), wanted.end(), all[i]) != wanted.end()) {
            sel.push_back(int(i));
            sel_names.push_back(all[i]);
        }
    }

    SimulationResult out;
    out.series = TimeSeries(sel_names);
    std::vector<double> chan(all.size()), row(sel.size());
    static double dummy = 0.0;
    auto record = [&](double t) {
        sys.channels(t, x.data(), y.size() ? y.data() : &dummy, chan.data());
        for (std::size_t i = 0; i < sel.size(); ++i) row[i] = chan[sel[i]];
        out.series.append(t, row);
    };

    if (!solve_algebraic(sys, 0.0, x, y)) {
        out.message = "initial algebraic solve failed";
        out.x_final = x;
        out.y_final = y;
        return out;
    }

    double t = 0.0;
    record(t);
    StepJacobian jac;
    std::size_t next_event = 0;
    int since_record = 0;
    const double eps_t = 1e-12;

    try {
    while (t < t_end - eps_t) {
        double t_stop = t_end;
        while (next_event < events.size() && events[next_event].time <= t + eps_t) {
            sys.apply_event(events[next_event], x.data(),
                            y.size() ? y.data() : &dummy);
            if (!solve_algebraic(sys, t, x, y)) {
                out.message = "algebraic re-solve failed after event '" +
                              events[next_event].kind + "'";
                out.t_final = t;
                out.x_final = x;
                out.y_final = y;
                return out;
            }
            jac.valid = false;
            ++next_event;
        }
        if (next_event < events.size() && events[next_event].time < t_stop)
            t_stop = std::min(t_stop, events[next_event].time);

        const double h = std::min(opts.dt, t_stop - t);
        if (h <= eps_t) {
            t = t_stop;
            continue;
        }
        if (!advance(sys, t, h, x, y, jac, opts)) {
            out.message = "integration failed at t = " + std::to_string(t) +
                          " (Newton divergence at the minimum step)";
            out.t_final = t;
            out.x_final = x;
            out.y_final = y;
            return out;
        }
        if (++since_record >= opts.output_stride || t >= t_stop - eps_t) {
            record(t);
            since_record = 0;
        }
    }
    } catch (const std::exception& e) {
        out.message = std::string("model evaluation failed at t = ") +
                      std::to_string(t) + ": " + e.what();
        out.t_final = t;
        out.x_final = x;
        out.y_final = y;
        return out;
    }

    out.ok = true;
    out.t_final = t;
    out.x_final = x;
    out.y_final = y;
    return out;
}

SimulationResult run_scenario(const Scenario& scn, double t_end) {
    AssembledSystem sys(scn);
    Eigen::VectorXd x(sys.n_states()), y(sys.n_alg());
    if (scn.cold_start) {
        // network pre-solved without the cold devices; converter states zeroed
        try {
            sys.init_from_powerflow(x.data(), y.data());
        } catch (const std::exception&) {
            sys.init_cold(x.data(), y.data());
        }
        solve_algebraic(sys, 0.0, x, y);
    } else {
        EquilibriumResult eq = find_equilibrium(sys);
        if (!eq.converged)
            throw std::runtime_error("equilibrium solve failed (residual " +
                                     std::to_string(eq.residual) + ")");
        x = eq.x;
        y = eq.y;
    }
    return simulate(sys, x, y, t_end, scn.events, scn.solver);
}

}  // namespace vimsim::dae
