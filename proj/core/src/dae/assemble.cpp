#include "vimsim/dae/assemble.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "vimsim/dae/powerflow.hpp"

namespace vimsim::dae {

namespace {
constexpr double kMinBusShunt = 1e-3;   // pu, keeps every bus equation regular
constexpr double kOpenDecay = 1e3;      // 1/s, drives dangling currents to zero
constexpr double kDefaultFaultR = 1e-3; // pu
}  // namespace

AssembledSystem::AssembledSystem(Scenario scn) : scn_(std::move(scn)) {
    const auto problems = scn_.validate();
    if (!problems.empty()) {
        std::string msg = "invalid scenario:";
        for (const auto& p : problems) msg += "\n  " + p;
        throw std::invalid_argument(msg);
    }
    omega_b_ = scn_.omega_base();

    for (const auto& b : scn_.buses) buses_.push_back({b, kMinBusShunt, 0.0});

    int off = 2 * int(buses_.size());
    for (const auto& br : scn_.branches) {
        BranchRt rt;
        rt.p = br;
        rt.from = scn_.bus_index(br.from_bus);
        rt.to = scn_.bus_index(br.to_bus);
        rt.x_off = off;
        off += 2;
        buses_[rt.from].c += br.c / 2.0;
        buses_[rt.to].c += br.c / 2.0;
        branches_.push_back(rt);
    }
    for (const auto& ld : scn_.loads) {
        loads_.push_back({ld, scn_.bus_index(ld.bus), off});
        off += 2;
    }
    for (const auto& g : scn_.grids) {
        grids_.push_back({g, true, scn_.bus_index(g.bus), off});
        off += 2;
    }

    int y_off = 0;
    for (const auto& c : scn_.converters) {
        DevRt d;
        d.bus = scn_.bus_index(c.bus);
        d.name = c.name;
        d.x_off = off;
        d.y_off = y_off;
        if (c.kind == ConverterKind::forming) {
            d.kind = DevRt::Kind::forming;
            d.model = int(forming_.size());
            forming_.emplace_back(c.forming, c.device, c.rating);
            off += forming_.back().n_states();
        } else {
            d.kind = DevRt::Kind::following;
            d.model = int(following_.size());
            const auto sync = c.kind == ConverterKind::following_vim
                                  ? converter::SyncKind::vim
                                  : converter::SyncKind::pll;
            following_.emplace_back(sync, c.outer, c.device, c.pll, c.vim, c.rating);
            off += following_.back().n_states();
            y_off += following_.back().n_alg();
        }
        devices_.push_back(d);
    }
    for (const auto& s : scn_.sgs) {
        DevRt d;
        d.kind = DevRt::Kind::sg;
        d.bus = scn_.bus_index(s.bus);
        d.name = s.name;
        d.x_off = off;
        d.y_off = y_off;
        d.model = int(sgs_.size());
        sgs_.emplace_back(s.params, s.rating);
        off += sgs_.back().n_states();
        devices_.push_back(d);
    }
    nx_ = off;
    ny_ = y_off;
    build_names();
}

void AssembledSystem::build_names() {
    x_names_.clear();
    y_names_.clear();
    channel_names_.clear();
    for (const auto& b : buses_) {
        x_names_.push_back(b.name + ".v_d");
        x_names_.push_back(b.name + ".v_q");
    }
    for (const auto& br : branches_) {
        x_names_.push_back(br.p.name + ".i_d");
        x_names_.push_back(br.p.name + ".i_q");
    }
    for (const auto& ld : loads_) {
        x_names_.push_back(ld.p.name + ".i_d");
        x_names_.push_back(ld.p.name + ".i_q");
    }
    for (const auto& g : grids_) {
        x_names_.push_back(g.p.name + ".i_d");
        x_names_.push_back(g.p.name + ".i_q");
    }
    for (const auto& d : devices_) {
        std::vector<std::string> sn;
        if (d.kind == DevRt::Kind::following) {
            sn = following_[d.model].state_names();
            for (const auto& a : following_[d.model].alg_names())
                y_names_.push_back(d.name + "." + a);
        } else if (d.kind == DevRt::Kind::forming) {
            sn = forming_[d.model].state_names();
        } else {
            sn = sgs_[d.model].state_names();
        }
        for (const auto& s : sn) x_names_.push_back(d.name + "." + s);
    }

    for (const auto& b : buses_) {
        channel_names_.push_back(b.name + ".v_d");
        channel_names_.push_back(b.name + ".v_q");
        channel_names_.push_back(b.name + ".v_mag");
    }
    for (const auto& d : devices_) {
        if (d.kind == DevRt::Kind::sg) {
            for (const char* c : {"p_e", "q_e", "omega", "f_hz", "v_mag", "delta"})
                channel_names_.push_back(d.name + "." + c);
        } else {
            for (const char* c : {"p_c", "q_c", "v_mag", "omega", "f_hz", "v_dc",
                                  "v_f_d", "v_f_q", "i_g_d", "i_g_q"})
                channel_names_.push_back(d.name + "." + c);
        }
    }
}

bool AssembledSystem::has_connected_grid() const {
    for (const auto& g : grids_)
        if (g.connected) return true;
    return false;
}

void AssembledSystem::eval(double t, const double* x, const double* y, double* f,
                           double* g) const {
    const int nb = int(buses_.size());
    std::vector<DqVector> v(nb), i_net(nb);
    for (int k = 0; k < nb; ++k) v[k] = {x[2 * k], x[2 * k + 1]};

    for (const auto& br : branches_) {
        const DqVector i{x[br.x_off], x[br.x_off + 1]};
        DqVector di;
        if (br.closed) {
            di = network::series_current_derivative(i, v[br.from], v[br.to], br.p.r,
                                                    br.p.l, omega_frame_, omega_b_);
            i_net[br.from] -= i;
            i_net[br.to] += i;
        } else {
            di = -kOpenDecay * i;
        }
        f[br.x_off] = di.d;
        f[br.x_off + 1] = di.q;
    }
    for (const auto& ld : loads_) {
        const DqVector i{x[ld.x_off], x[ld.x_off + 1]};
        const DqVector di = network::series_current_derivative(
            i, v[ld.bus], DqVector{0.0, 0.0}, ld.p.r, std::max(ld.p.l, 1e-4),
            omega_frame_, omega_b_);
        i_net[ld.bus] -= i;
        f[ld.x_off] = di.d;
        f[ld.x_off + 1] = di.q;
    }
    for (const auto& gr : grids_) {
        const DqVector i{x[gr.x_off], x[gr.x_off + 1]};
        DqVector di;
        if (gr.connected) {
            const double th =
                gr.p.theta0 + omega_b_ * (gr.p.omega_grid - omega_frame_) * t;
            const DqVector v_src{gr.p.v_mag * std::cos(th), gr.p.v_mag * std::sin(th)};
            di = network::series_current_derivative(i, v_src, v[gr.bus], gr.p.r, gr.p.l,
                                                    omega_frame_, omega_b_);
            i_net[gr.bus] += i;
        } else {
            di = -kOpenDecay * i;
        }
        f[gr.x_off] = di.d;
        f[gr.x_off + 1] = di.q;
    }

    for (const auto& d : devices_) {
        if (d.kind == DevRt::Kind::following) {
            converter::ConverterIo io;
            following_[d.model].eval(omega_b_, omega_frame_, v[d.bus], x + d.x_off,
                                     y + d.y_off, f + d.x_off, g + d.y_off, &io);
            i_net[d.bus] += io.i_inj;
        } else if (d.kind == DevRt::Kind::forming) {
            converter::ConverterIo io;
            forming_[d.model].eval(omega_b_, omega_frame_, v[d.bus], x + d.x_off,
                                   f + d.x_off, &io);
            i_net[d.bus] += io.i_inj;
        } else {
            network::SgIo io;
            sgs_[d.model].eval(omega_b_, omega_frame_, v[d.bus], x + d.x_off,
                               f + d.x_off, &io);
            i_net[d.bus] += io.i_inj;
        }
    }

    for (int k = 0; k < nb; ++k) {
        const DqVector rhs = i_net[k] - buses_[k].fault_g * v[k];
        const DqVector dv =
            (omega_b_ / buses_[k].c) * rhs - omega_b_ * omega_frame_ * rotate90(v[k]);
        f[2 * k] = dv.d;
        f[2 * k + 1] = dv.q;
    }
}

void AssembledSystem::channels(double t, const double* x, const double* y,
                               double* out) const {
    (void)t;
    const int nb = int(buses_.size());
    int c = 0;
    for (int k = 0; k < nb; ++k) {
        const DqVector v{x[2 * k], x[2 * k + 1]};
        out[c++] = v.d;
        out[c++] = v.q;
        out[c++] = v.norm();
    }
    for (const auto& d : devices_) {
        const DqVector v{x[2 * d.bus], x[2 * d.bus + 1]};
        if (d.kind == DevRt::Kind::sg) {
            std::vector<double> ftmp(sgs_[d.model].n_states());
            network::SgIo io;
            sgs_[d.model].eval(omega_b_, omega_frame_, v, x + d.x_off, ftmp.data(), &io);
            out[c++] = io.p_e;
            out[c++] = io.q_e;
            out[c++] = io.omega;
            out[c++] = io.omega * scn_.f_base_hz;
            out[c++] = io.v_mag;
            out[c++] = x[d.x_off + network::SgModel::DELTA];
        } else {
            converter::ConverterIo io;
            int vfd, vfq, igd, igq;
            if (d.kind == DevRt::Kind::following) {
                const auto& m = following_[d.model];
                std::vector<double> ftmp(m.n_states()), gtmp(m.n_alg());
                m.eval(omega_b_, omega_frame_, v, x + d.x_off, y + d.y_off, ftmp.data(),
                       gtmp.data(), &io);
                vfd = converter::FollowingConverter::VF_D;
                vfq = converter::FollowingConverter::VF_Q;
                igd = converter::FollowingConverter::IG_D;
                igq = converter::FollowingConverter::IG_Q;
            } else {
                const auto& m = forming_[d.model];
                std::vector<double> ftmp(m.n_states());
                m.eval(omega_b_, omega_frame_, v, x + d.x_off, ftmp.data(), &io);
                vfd = converter::FormingConverter::VF_D;
                vfq = converter::FormingConverter::VF_Q;
                igd = converter::FormingConverter::IG_D;
                igq = converter::FormingConverter::IG_Q;
            }
            out[c++] = io.p_c;
            out[c++] = io.q_c;
            out[c++] = io.v_mag;
            out[c++] = io.omega;
            out[c++] = io.omega * scn_.f_base_hz;
            out[c++] = io.v_dc;
            out[c++] = x[d.x_off + vfd];
            out[c++] = x[d.x_off + vfq];
            out[c++] = x[d.x_off + igd];
            out[c++] = x[d.x_off + igq];
        }
    }
}

const AssembledSystem::DevRt* AssembledSystem::find_device(
    const std::string& name) const {
    for (const auto& d : devices_)
        if (d.name == name) return &d;
    return nullptr;
}

converter::FollowingConverter* AssembledSystem::following(const std::string& name) {
    const DevRt* d = find_device(name);
    if (d && d->kind == DevRt::Kind::following) return &following_[d->model];
    return nullptr;
}

converter::FormingConverter* AssembledSystem::forming(const std::string& name) {
    const DevRt* d = find_device(name);
    if (d && d->kind == DevRt::Kind::forming) return &forming_[d->model];
    return nullptr;
}

network::SgModel* AssembledSystem::sg(const std::string& name) {
    const DevRt* d = find_device(name);
    if (d && d->kind == DevRt::Kind::sg) return &sgs_[d->model];
    return nullptr;
}

int AssembledSystem::state_index(const std::string& name) const {
    for (std::size_t i = 0; i < x_names_.size(); ++i)
        if (x_names_[i] == name) return int(i);
    return -1;
}

int AssembledSystem::reference_angle_index() const {
    for (const auto& d : devices_) {
        if (d.kind == DevRt::Kind::following)
            return d.x_off + following_[d.model].delta_index();
        if (d.kind == DevRt::Kind::forming)
            return d.x_off + converter::FormingConverter::DELTA;
        if (d.kind == DevRt::Kind::sg) return d.x_off + network::SgModel::DELTA;
    }
    return -1;
}

void AssembledSystem::apply_event(const Event& e, double* x, double* y) {
    (void)y;
    auto payload = [&](const char* key, double fallback) {
        auto it = e.payload.find(key);
        return it == e.payload.end() ? fallback : it->second;
    };
    auto has = [&](const char* key) { return e.payload.count(key) > 0; };

    if (e.kind == "breaker_open" || e.kind == "breaker_close") {
        for (auto& br : branches_) {
            if (br.p.name != e.target) continue;
            br.closed = (e.kind == "breaker_close");
            if (!br.closed) x[br.x_off] = x[br.x_off + 1] = 0.0;
            return;
        }
        for (auto& gr : grids_) {
            if (gr.p.name != e.target) continue;
            gr.connected = (e.kind == "breaker_close");
            if (!gr.connected) x[gr.x_off] = x[gr.x_off + 1] = 0.0;
            return;
        }
        throw std::invalid_argument("event targets unknown branch/grid: " + e.target);
    }
    if (e.kind == "three_phase_fault_on" || e.kind == "fault_clear") {
        const int b = scn_.bus_index(e.target);
        if (b < 0) throw std::invalid_argument("event targets unknown bus: " + e.target);
        buses_[b].fault_g = e.kind == "fault_clear"
                                ? 0.0
                                : 1.0 / payload("r_fault", kDefaultFaultR);
        return;
    }
    if (e.kind == "load_step") {
        for (auto& ld : loads_) {
            if (ld.p.name != e.target) continue;
            if (has("p") || has("q")) {
                const auto sized = network::RlLoadParams::from_power(
                    ld.p.name, ld.p.bus, payload("p", 0.0), payload("q", 0.0));
                ld.p.r = sized.r;
                ld.p.l = sized.l;
            }
            if (has("scale")) {
                const double s = payload("scale", 1.0);
                if (s <= 0.0) throw std::invalid_argument("load_step scale must be > 0");
                ld.p.r /= s;
                ld.p.l /= s;
            }
            if (has("r")) ld.p.r = payload("r", ld.p.r);
            if (has("l")) ld.p.l = payload("l", ld.p.l);
            return;
        }
        throw std::invalid_argument("event targets unknown load: " + e.target);
    }
    if (e.kind == "setpoint_step") {
        for (auto& gr : grids_) {
            if (gr.p.name != e.target) continue;
            if (has("v_mag")) gr.p.v_mag = payload("v_mag", gr.p.v_mag);
            if (has("omega_grid")) gr.p.omega_grid = payload("omega_grid", gr.p.omega_grid);
            if (has("f_hz"))
                gr.p.omega_grid = payload("f_hz", 0.0) / scn_.f_base_hz;
            return;
        }
        const DevRt* d = find_device(e.target);
        if (!d) throw std::invalid_argument("event targets unknown device: " + e.target);
        if (d->kind == DevRt::Kind::following) {
            auto& m = following_[d->model];
            if (has("p_set")) m.outer().p_set = payload("p_set", 0.0);
            if (has("q_set")) m.outer().q_set = payload("q_set", 0.0);
            if (has("v_set")) m.outer().v_set = payload("v_set", 1.0);
            if (has("omega_set")) m.outer().omega_set = payload("omega_set", 1.0);
            if (has("v_dc_set")) m.device().v_dc_set = payload("v_dc_set", 1.0);
            if (has("f0_star_hz"))
                m.vim().omega0_star = payload("f0_star_hz", 0.0) / scn_.f_base_hz;
        } else if (d->kind == DevRt::Kind::forming) {
            auto& m = forming_[d->model];
            if (has("p_set")) m.outer().p_set = payload("p_set", 0.0);
            if (has("q_set")) m.outer().q_set = payload("q_set", 0.0);
            if (has("v_set")) m.outer().v_set = payload("v_set", 1.0);
            if (has("omega_set")) m.outer().omega_set = payload("omega_set", 1.0);
            if (has("v_dc_set")) m.device().v_dc_set = payload("v_dc_set", 1.0);
        } else {
            auto& p = sgs_[d->model].params();
            if (has("p_set")) p.p_set = payload("p_set", 0.0);
            if (has("v_set")) p.v_set = payload("v_set", 1.0);
        }
        return;
    }
    throw std::invalid_argument("unknown event kind: " + e.kind);
}

void AssembledSystem::init_cold(double* x, double* y) const {
    for (int i = 0; i < nx_; ++i) x[i] = 0.0;
    // flat voltage profile keeps the first Newton step well conditioned
    for (std::size_t k = 0; k < buses_.size(); ++k) x[2 * k] = 1.0;
    for (const auto& gr : grids_) {
        x[gr.x_off] = 0.0;
        x[gr.x_off + 1] = 0.0;
    }
    for (const auto& d : devices_) {
        if (d.kind == DevRt::Kind::following) {
            following_[d.model].init_cold(x + d.x_off, y + d.y_off);
        } else if (d.kind == DevRt::Kind::forming) {
            x[d.x_off + converter::FormingConverter::V_DC] =
                forming_[d.model].device().v_dc_set;
            x[d.x_off + converter::FormingConverter::VF_D] = 1.0;
        } else {
            x[d.x_off + network::SgModel::TAU_M] = 0.0;
            if (sgs_[d.model].n_states() == 8) {
                x[d.x_off + network::SgModel::EQ_ST] = 1.0;
                x[d.x_off + network::SgModel::EQ_T] = 1.0;
                x[d.x_off + network::SgModel::E_FD] = 1.0;
            }
        }
    }
}

void AssembledSystem::init_from_powerflow(double* x, double* y) {
    const int nb = int(buses_.size());
    int n_nodes = nb;
    std::vector<int> grid_node(grids_.size(), -1);
    for (std::size_t gi = 0; gi < grids_.size(); ++gi)
        if (grids_[gi].connected) grid_node[gi] = n_nodes++;

    const double w_pf = has_connected_grid() ? grids_[0].p.omega_grid : 1.0;

    Eigen::MatrixXcd ybus = Eigen::MatrixXcd::Zero(n_nodes, n_nodes);
    const std::complex<double> jj(0.0, 1.0);
    auto add_series = [&](int a, int b, std::complex<double> z) {
        const std::complex<double> ya = 1.0 / z;
        ybus(a, a) += ya;
        ybus(b, b) += ya;
        ybus(a, b) -= ya;
        ybus(b, a) -= ya;
    };
    for (int k = 0; k < nb; ++k) ybus(k, k) += jj * w_pf * buses_[k].c;
    for (const auto& br : branches_) {
        if (!br.closed) continue;
        add_series(br.from, br.to, {br.p.r, w_pf * br.p.l});
    }
    for (const auto& ld : loads_)
        ybus(ld.bus, ld.bus) += 1.0 / std::complex<double>(ld.p.r, w_pf * ld.p.l);
    for (std::size_t gi = 0; gi < grids_.size(); ++gi)
        if (grid_node[gi] >= 0)
            add_series(grids_[gi].bus, grid_node[gi],
                       {grids_[gi].p.r, w_pf * grids_[gi].p.l});

    std::vector<PfBus> pf(n_nodes);
    std::vector<int> devices_at(nb, 0);
    for (const auto& d : devices_) {
        devices_at[d.bus]++;
        auto& node = pf[d.bus];
        if (d.kind == DevRt::Kind::following) {
            const auto& o = following_[d.model].outer();
            node.type = PfBus::Type::pq;
            // a cold-started converter has zero injection at t = 0; the
            // network is pre-solved without it
            node.p = scn_.cold_start ? 0.0 : following_[d.model].rating() * o.p_set;
            node.q = scn_.cold_start ? 0.0 : following_[d.model].rating() * o.q_set;
        } else if (d.kind == DevRt::Kind::forming) {
            const auto& o = forming_[d.model].outer();
            node.type = PfBus::Type::pq;
            node.p = forming_[d.model].rating() * o.p_set;
            node.q = forming_[d.model].rating() * o.q_set;
        } else {
            const auto& p = sgs_[d.model].params();
            node.type = PfBus::Type::pv;
            node.p = sgs_[d.model].rating() * p.p_set;
            node.v = p.v_set;
        }
    }
    for (int k = 0; k < nb; ++k)
        if (devices_at[k] > 1)
            throw std::invalid_argument("multiple devices on bus " + buses_[k].name +
                                        "; place them on separate buses");

    bool have_slack = false;
    for (std::size_t gi = 0; gi < grids_.size(); ++gi) {
        if (grid_node[gi] < 0) continue;
        auto& node = pf[grid_node[gi]];
        node.type = PfBus::Type::slack;
        node.v = grids_[gi].p.v_mag;
        node.theta = grids_[gi].p.theta0;
        have_slack = true;
    }
    if (!have_slack) {
        // islanded roster: let the stiffest angle-forming device balance it
        const DevRt* pick = nullptr;
        for (const auto& d : devices_)
            if (d.kind == DevRt::Kind::sg) { pick = &d; break; }
        if (!pick)
            for (const auto& d : devices_)
                if (d.kind == DevRt::Kind::forming) { pick = &d; break; }
        if (!pick)
            throw std::invalid_argument(
                "no stiff grid and no angle-forming device: equilibrium is undefined");
        auto& node = pf[pick->bus];
        node.type = PfBus::Type::slack;
        node.v = pick->kind == DevRt::Kind::sg ? sgs_[pick->model].params().v_set
                                               : forming_[pick->model].outer().v_set;
        node.theta = 0.0;
    }

    const PfResult res = solve_powerflow(ybus, pf);
    if (!res.converged)
        throw std::runtime_error("power-flow initialization did not converge");

    omega_frame_ = w_pf;
    for (int i = 0; i < nx_; ++i) x[i] = 0.0;
    for (int k = 0; k < nb; ++k) {
        x[2 * k] = res.v[k].real();
        x[2 * k + 1] = res.v[k].imag();
    }
    for (const auto& br : branches_) {
        std::complex<double> i = 0.0;
        if (br.closed)
            i = (res.v[br.from] - res.v[br.to]) /
                std::complex<double>(br.p.r, w_pf * br.p.l);
        x[br.x_off] = i.real();
        x[br.x_off + 1] = i.imag();
    }
    for (const auto& ld : loads_) {
        const std::complex<double> i =
            res.v[ld.bus] / std::complex<double>(ld.p.r, w_pf * ld.p.l);
        x[ld.x_off] = i.real();
        x[ld.x_off + 1] = i.imag();
    }
    for (std::size_t gi = 0; gi < grids_.size(); ++gi) {
        std::complex<double> i = 0.0;
        if (grid_node[gi] >= 0)
            i = (res.v[grid_node[gi]] - res.v[grids_[gi].bus]) /
                std::complex<double>(grids_[gi].p.r, w_pf * grids_[gi].p.l);
        x[grids_[gi].x_off] = i.real();
        x[grids_[gi].x_off + 1] = i.imag();
    }

    for (const auto& d : devices_) {
        const std::complex<double> v = res.v[d.bus];
        const std::complex<double> s = res.s[d.bus];
        if (d.kind == DevRt::Kind::following) {
            auto& m = following_[d.model];
            if (scn_.cold_start)
                m.init_cold(x + d.x_off, y + d.y_off);
            else
                m.init_from_terminal(v, s / m.rating(), w_pf, omega_b_, x + d.x_off,
                                     y + d.y_off);
        } else if (d.kind == DevRt::Kind::forming) {
            auto& m = forming_[d.model];
            m.init_from_terminal(v, s / m.rating(), w_pf, x + d.x_off);
        } else {
            sgs_[d.model].init_from_terminal(v, s / sgs_[d.model].rating(), w_pf,
                                             x + d.x_off);
        }
    }
}

}  // namespace vimsim::dae
