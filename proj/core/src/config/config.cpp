#include "vimsim/config/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "vimsim/core/per_unit.hpp"

namespace vimsim::config {

using json = nlohmann::ordered_json;

namespace {

std::string join_problems(const std::vector<std::string>& problems) {
    std::string msg = "scenario config rejected:";
    for (const auto& p : problems) msg += "\n  " + p;
    return msg;
}

enum class Dim { pu, plain, seconds, per_second, freq, inertia, damping, rad_s, angle };

struct Loader {
    std::vector<std::string> errors;
    double f_base_hz = 50.0;
    double s_base_va = 1.5e6;
    double v_base_v = 690.0;

    PerUnitBase base() const {
        return PerUnitBase(s_base_va, v_base_v, 2.0 * M_PI * f_base_hz);
    }

    void fail(const std::string& path, const std::string& what) {
        errors.push_back(path + ": " + what);
    }

    void check_keys(const json& obj, const std::string& path,
                    const std::set<std::string>& allowed) {
        if (!obj.is_object()) {
            fail(path, "expected an object");
            return;
        }
        for (const auto& [k, v] : obj.items())
            if (!allowed.count(k)) fail(path + "." + k, "unknown key");
    }

    double convert(double v, const std::string& unit, Dim dim,
                   const std::string& path) {
        switch (dim) {
            case Dim::pu:
                if (unit == "pu") return v;
                break;
            case Dim::plain:
                if (unit.empty() || unit == "1") return v;
                break;
            case Dim::seconds:
                if (unit == "s") return v;
                if (unit == "ms") return v / 1e3;
                break;
            case Dim::per_second:
                if (unit == "1/s") return v;
                break;
            case Dim::freq:
                if (unit == "pu") return v;
                if (unit == "hz") return v / f_base_hz;
                break;
            case Dim::inertia:
                if (unit == "s") return v;
                if (unit == "kg_m2") return base().inertia_h_from_j(v);
                break;
            case Dim::damping:
                if (unit == "pu") return v;
                if (unit == "N_m_s") return base().damping_pu_from_si(v);
                break;
            case Dim::rad_s:
                if (unit == "rad/s" || unit == "rad_s") return v;
                if (unit == "hz") return v * 2.0 * M_PI;
                break;
            case Dim::angle:
                if (unit == "rad") return v;
                if (unit == "deg") return v * M_PI / 180.0;
                break;
        }
        fail(path, "unit '" + unit + "' does not fit this field");
        return v;
    }

    double number(const json& obj, const std::string& key, const std::string& path,
                  Dim dim, double fallback, bool required = false) {
        if (!obj.contains(key)) {
            if (required) fail(path + "." + key, "missing required field");
            return fallback;
        }
        const json& j = obj.at(key);
        if (j.is_number()) return j.get<double>();
        if (j.is_object()) {
            check_keys(j, path + "." + key, {"value", "unit"});
            if (!j.contains("value") || !j.at("value").is_number() ||
                !j.contains("unit") || !j.at("unit").is_string()) {
                fail(path + "." + key, "tagged quantity needs numeric 'value' and string 'unit'");
                return fallback;
            }
            return convert(j.at("value").get<double>(), j.at("unit").get<std::string>(),
                           dim, path + "." + key);
        }
        fail(path + "." + key, "expected a number or {value, unit}");
        return fallback;
    }

    std::string text(const json& obj, const std::string& key, const std::string& path,
                     const std::string& fallback = "", bool required = true) {
        if (!obj.contains(key) || !obj.at(key).is_string()) {
            if (required) fail(path + "." + key, "missing required string");
            return fallback;
        }
        return obj.at(key).get<std::string>();
    }

    void parse_network(const json& j, const std::string& path, dae::Scenario& scn) {
        if (j.contains("buses")) {
            if (!j.at("buses").is_array()) {
                fail(path + ".buses", "expected an array of names");
            } else {
                for (const auto& b : j.at("buses")) {
                    if (b.is_string())
                        scn.buses.push_back(b.get<std::string>());
                    else
                        fail(path + ".buses", "bus names must be strings");
                }
            }
        }
        if (j.contains("branches")) {
            int i = 0;
            for (const auto& br : j.at("branches")) {
                const std::string p = path + ".branches[" + std::to_string(i++) + "]";
                check_keys(br, p, {"name", "from", "to", "r", "l", "c"});
                network::BranchParams bp;
                bp.name = text(br, "name", p);
                bp.from_bus = text(br, "from", p);
                bp.to_bus = text(br, "to", p);
                bp.r = number(br, "r", p, Dim::pu, 0.0);
                bp.l = number(br, "l", p, Dim::pu, 0.0, true);
                bp.c = number(br, "c", p, Dim::pu, 0.0);
                scn.branches.push_back(bp);
            }
        }
        if (j.contains("loads")) {
            int i = 0;
            for (const auto& ld : j.at("loads")) {
                const std::string p = path + ".loads[" + std::to_string(i++) + "]";
                check_keys(ld, p, {"name", "bus", "p", "q", "r", "l"});
                const std::string name = text(ld, "name", p);
                const std::string bus = text(ld, "bus", p);
                network::RlLoadParams lp;
                if (ld.contains("p") || ld.contains("q")) {
                    lp = network::RlLoadParams::from_power(
                        name, bus, number(ld, "p", p, Dim::pu, 0.0),
                        number(ld, "q", p, Dim::pu, 0.0));
                } else {
                    lp.name = name;
                    lp.bus = bus;
                    lp.r = number(ld, "r", p, Dim::pu, 1.0, true);
                    lp.l = number(ld, "l", p, Dim::pu, 0.0);
                }
                scn.loads.push_back(lp);
            }
        }
        if (j.contains("grids")) {
            int i = 0;
            for (const auto& g : j.at("grids")) {
                const std::string p = path + ".grids[" + std::to_string(i++) + "]";
                check_keys(g, p,
                           {"name", "bus", "scr", "x_over_r", "r", "l", "v_mag",
                            "theta0", "f"});
                network::StiffGridParams gp;
                gp.name = text(g, "name", p);
                gp.bus = text(g, "bus", p);
                if (g.contains("scr")) {
                    gp = network::StiffGridParams::from_scr(
                        gp.name, gp.bus, number(g, "scr", p, Dim::plain, 20.0),
                        number(g, "x_over_r", p, Dim::plain, 10.0));
                } else {
                    gp.r = number(g, "r", p, Dim::pu, gp.r);
                    gp.l = number(g, "l", p, Dim::pu, gp.l);
                }
                gp.v_mag = number(g, "v_mag", p, Dim::pu, 1.0);
                gp.theta0 = number(g, "theta0", p, Dim::angle, 0.0);
                gp.omega_grid = number(g, "f", p, Dim::freq, 1.0);
                scn.grids.push_back(gp);
            }
        }
    }

    void parse_device(const json& d, const std::string& p, dae::Scenario& scn) {
        // loads and stiff grids may appear either in the dedicated arrays or
        // in the device roster; route the roster form to the same parsers
        if (d.is_object() && d.contains("type") && d.at("type").is_string()) {
            const std::string t = d.at("type").get<std::string>();
            if (t == "rl_load") {
                json ld = d;
                ld.erase("type");
                json wrap;
                wrap["loads"] = json::array({ld});
                parse_network(wrap, p, scn);
                return;
            }
            if (t == "stiff_grid") {
                json g = d;
                g.erase("type");
                json wrap;
                wrap["grids"] = json::array({g});
                parse_network(wrap, p, scn);
                return;
            }
        }
        check_keys(d, p,
                   {"name", "type", "bus", "rating", "outer", "forming", "device",
                    "pll", "vim", "sg"});
        const std::string type = text(d, "type", p);
        if (type == "sg") {
            dae::SgSpec s;
            s.name = text(d, "name", p);
            s.bus = text(d, "bus", p);
            s.rating = number(d, "rating", p, Dim::plain, 1.0);
            if (d.contains("sg")) {
                const json& g = d.at("sg");
                const std::string q = p + ".sg";
                check_keys(g, q,
                           {"order", "h", "d", "r_a", "x_d", "x_q", "x_d_t", "x_q_t",
                            "x_d_st", "x_q_st", "t_d0_t", "t_q0_t", "t_d0_st",
                            "t_q0_st", "r_gov", "t_gov", "k_avr", "t_avr", "e_fd_max",
                            "p_set", "v_set"});
                auto& m = s.params;
                m.order = int(number(g, "order", q, Dim::plain, 6));
                m.h = number(g, "h", q, Dim::inertia, m.h);
                m.d = number(g, "d", q, Dim::damping, m.d);
                m.r_a = number(g, "r_a", q, Dim::pu, m.r_a);
                m.x_d = number(g, "x_d", q, Dim::pu, m.x_d);
                m.x_q = number(g, "x_q", q, Dim::pu, m.x_q);
                m.x_d_t = number(g, "x_d_t", q, Dim::pu, m.x_d_t);
                m.x_q_t = number(g, "x_q_t", q, Dim::pu, m.x_q_t);
                m.x_d_st = number(g, "x_d_st", q, Dim::pu, m.x_d_st);
                m.x_q_st = number(g, "x_q_st", q, Dim::pu, m.x_q_st);
                m.t_d0_t = number(g, "t_d0_t", q, Dim::seconds, m.t_d0_t);
                m.t_q0_t = number(g, "t_q0_t", q, Dim::seconds, m.t_q0_t);
                m.t_d0_st = number(g, "t_d0_st", q, Dim::seconds, m.t_d0_st);
                m.t_q0_st = number(g, "t_q0_st", q, Dim::seconds, m.t_q0_st);
                m.r_gov = number(g, "r_gov", q, Dim::plain, m.r_gov);
                m.t_gov = number(g, "t_gov", q, Dim::seconds, m.t_gov);
                m.k_avr = number(g, "k_avr", q, Dim::plain, m.k_avr);
                m.t_avr = number(g, "t_avr", q, Dim::seconds, m.t_avr);
                m.e_fd_max = number(g, "e_fd_max", q, Dim::pu, m.e_fd_max);
                m.p_set = number(g, "p_set", q, Dim::pu, m.p_set);
                m.v_set = number(g, "v_set", q, Dim::pu, m.v_set);
            }
            scn.sgs.push_back(s);
            return;
        }

        dae::ConverterSpec c;
        c.name = text(d, "name", p);
        c.bus = text(d, "bus", p);
        c.rating = number(d, "rating", p, Dim::plain, 1.0);
        if (type == "following_vim")
            c.kind = dae::ConverterKind::following_vim;
        else if (type == "following_pll")
            c.kind = dae::ConverterKind::following_pll;
        else if (type == "forming")
            c.kind = dae::ConverterKind::forming;
        else
            fail(p + ".type", "unknown device type '" + type + "'");

        if (d.contains("outer")) {
            const json& o = d.at("outer");
            const std::string q = p + ".outer";
            check_keys(o, q,
                       {"k_i_p", "k_i_q", "r_p", "r_q", "p_set", "q_set", "v_set",
                        "omega_set"});
            auto& m = c.outer;
            m.k_i_p = number(o, "k_i_p", q, Dim::per_second, m.k_i_p);
            m.k_i_q = number(o, "k_i_q", q, Dim::per_second, m.k_i_q);
            m.r_p = number(o, "r_p", q, Dim::pu, m.r_p);
            m.r_q = number(o, "r_q", q, Dim::pu, m.r_q);
            m.p_set = number(o, "p_set", q, Dim::pu, m.p_set);
            m.q_set = number(o, "q_set", q, Dim::pu, m.q_set);
            m.v_set = number(o, "v_set", q, Dim::pu, m.v_set);
            m.omega_set = number(o, "omega_set", q, Dim::freq, m.omega_set);
        }
        if (d.contains("forming")) {
            const json& o = d.at("forming");
            const std::string q = p + ".forming";
            check_keys(o, q,
                       {"r_p", "r_q", "omega_z", "p_set", "q_set", "v_set",
                        "omega_set"});
            auto& m = c.forming;
            m.r_p = number(o, "r_p", q, Dim::pu, m.r_p);
            m.r_q = number(o, "r_q", q, Dim::pu, m.r_q);
            m.omega_z = number(o, "omega_z", q, Dim::rad_s, m.omega_z);
            m.p_set = number(o, "p_set", q, Dim::pu, m.p_set);
            m.q_set = number(o, "q_set", q, Dim::pu, m.q_set);
            m.v_set = number(o, "v_set", q, Dim::pu, m.v_set);
            m.omega_set = number(o, "omega_set", q, Dim::freq, m.omega_set);
        }
        if (d.contains("device")) {
            const json& o = d.at("device");
            const std::string q = p + ".device";
            check_keys(o, q,
                       {"k_p_c", "k_i_c", "k_p_v", "k_i_v", "c_dc", "k_p_dc", "k_i_dc",
                        "v_dc_set", "v_dc_fault", "r_f", "l_f", "c_f", "r_t", "l_t",
                        "omega_ref_filt", "i_max", "eps_v", "m_max"});
            auto& m = c.device;
            m.k_p_c = number(o, "k_p_c", q, Dim::plain, m.k_p_c);
            m.k_i_c = number(o, "k_i_c", q, Dim::per_second, m.k_i_c);
            m.k_p_v = number(o, "k_p_v", q, Dim::plain, m.k_p_v);
            m.k_i_v = number(o, "k_i_v", q, Dim::per_second, m.k_i_v);
            m.c_dc = number(o, "c_dc", q, Dim::seconds, m.c_dc);
            m.k_p_dc = number(o, "k_p_dc", q, Dim::plain, m.k_p_dc);
            m.k_i_dc = number(o, "k_i_dc", q, Dim::per_second, m.k_i_dc);
            m.v_dc_set = number(o, "v_dc_set", q, Dim::pu, m.v_dc_set);
            m.v_dc_fault = number(o, "v_dc_fault", q, Dim::pu, m.v_dc_fault);
            m.r_f = number(o, "r_f", q, Dim::pu, m.r_f);
            m.l_f = number(o, "l_f", q, Dim::pu, m.l_f);
            m.c_f = number(o, "c_f", q, Dim::pu, m.c_f);
            m.r_t = number(o, "r_t", q, Dim::pu, m.r_t);
            m.l_t = number(o, "l_t", q, Dim::pu, m.l_t);
            m.omega_ref_filt = number(o, "omega_ref_filt", q, Dim::rad_s, m.omega_ref_filt);
            m.i_max = number(o, "i_max", q, Dim::pu, m.i_max);
            m.eps_v = number(o, "eps_v", q, Dim::pu, m.eps_v);
            m.m_max = number(o, "m_max", q, Dim::plain, m.m_max);
        }
        if (d.contains("pll")) {
            const json& o = d.at("pll");
            const std::string q = p + ".pll";
            check_keys(o, q, {"k_p", "k_i", "f0"});
            c.pll.k_p = number(o, "k_p", q, Dim::plain, c.pll.k_p);
            c.pll.k_i = number(o, "k_i", q, Dim::per_second, c.pll.k_i);
            c.pll.omega0 = number(o, "f0", q, Dim::freq, c.pll.omega0);
        }
        if (d.contains("vim")) {
            const json& o = d.at("vim");
            const std::string q = p + ".vim";
            check_keys(o, q,
                       {"h", "d", "r_r", "l_r", "l_m", "f0_star", "k_nu_d", "slip_min",
                        "slip_max", "eps_div"});
            auto& m = c.vim;
            m.h_inertia = number(o, "h", q, Dim::inertia, m.h_inertia);
            m.d_damping = number(o, "d", q, Dim::damping, m.d_damping);
            m.r_r = number(o, "r_r", q, Dim::pu, m.r_r);
            m.l_r = number(o, "l_r", q, Dim::pu, m.l_r);
            m.l_m = number(o, "l_m", q, Dim::pu, m.l_m);
            m.omega0_star = number(o, "f0_star", q, Dim::freq, m.omega0_star);
            m.k_nu_d = number(o, "k_nu_d", q, Dim::plain, m.k_nu_d);
            m.slip_min = number(o, "slip_min", q, Dim::pu, m.slip_min);
            m.slip_max = number(o, "slip_max", q, Dim::pu, m.slip_max);
            m.eps_div = number(o, "eps_div", q, Dim::pu, m.eps_div);
        }
        scn.converters.push_back(c);
    }

    dae::Scenario parse(const json& j, const std::string& base_dir) {
        dae::Scenario scn;
        check_keys(j, "$",
                   {"base", "network", "buses", "branches", "loads", "grids",
                    "devices", "events", "solver", "outputs", "cold_start"});
        if (j.contains("base")) {
            const json& b = j.at("base");
            check_keys(b, "$.base", {"s_va", "v_v", "f_hz"});
            s_base_va = number(b, "s_va", "$.base", Dim::plain, s_base_va);
            v_base_v = number(b, "v_v", "$.base", Dim::plain, v_base_v);
            f_base_hz = number(b, "f_hz", "$.base", Dim::plain, f_base_hz);
        }
        scn.s_base_va = s_base_va;
        scn.v_base_v = v_base_v;
        scn.f_base_hz = f_base_hz;

        if (j.contains("network")) {
            const json& n = j.at("network");
            if (n.is_string()) {
                const std::string path = base_dir + "/" + n.get<std::string>();
                std::ifstream is(path);
                if (!is) {
                    fail("$.network", "cannot open referenced file " + path);
                } else {
                    json nj = json::parse(is, nullptr, false);
                    if (nj.is_discarded()) {
                        fail("$.network", "referenced file is not valid JSON");
                    } else {
                        check_keys(nj, "$.network",
                                   {"buses", "branches", "loads", "grids"});
                        parse_network(nj, "$.network", scn);
                    }
                }
            } else if (n.is_object()) {
                check_keys(n, "$.network", {"buses", "branches", "loads", "grids"});
                parse_network(n, "$.network", scn);
            } else {
                fail("$.network", "expected a file path or an object");
            }
        }
        parse_network(j, "$", scn);

        if (j.contains("devices")) {
            int i = 0;
            for (const auto& d : j.at("devices"))
                parse_device(d, "$.devices[" + std::to_string(i++) + "]", scn);
        }
        if (j.contains("events")) {
            int i = 0;
            for (const auto& e : j.at("events")) {
                const std::string p = "$.events[" + std::to_string(i++) + "]";
                if (!e.is_object()) {
                    fail(p, "expected an object");
                    continue;
                }
                dae::Event ev;
                ev.time = number(e, "time", p, Dim::seconds, 0.0, true);
                ev.kind = text(e, "kind", p);
                ev.target = text(e, "target", p);
                for (const auto& [k, v] : e.items()) {
                    if (k == "time" || k == "kind" || k == "target") continue;
                    if (v.is_number())
                        ev.payload[k] = v.get<double>();
                    else
                        fail(p + "." + k, "event payload values must be numbers");
                }
                scn.events.push_back(ev);
            }
        }
        if (j.contains("solver")) {
            const json& s = j.at("solver");
            check_keys(s, "$.solver",
                       {"dt", "newton_tol", "max_newton_iters", "jacobian_max_age",
                        "output_stride"});
            scn.solver.dt = number(s, "dt", "$.solver", Dim::seconds, scn.solver.dt);
            scn.solver.newton_tol =
                number(s, "newton_tol", "$.solver", Dim::plain, scn.solver.newton_tol);
            scn.solver.max_newton_iters = int(number(s, "max_newton_iters", "$.solver",
                                                     Dim::plain,
                                                     scn.solver.max_newton_iters));
            scn.solver.jacobian_max_age = int(number(s, "jacobian_max_age", "$.solver",
                                                     Dim::plain,
                                                     scn.solver.jacobian_max_age));
            scn.solver.output_stride = int(
                number(s, "output_stride", "$.solver", Dim::plain,
                       scn.solver.output_stride));
        }
        if (j.contains("outputs")) {
            for (const auto& o : j.at("outputs")) {
                if (o.is_string())
                    scn.outputs.push_back(o.get<std::string>());
                else
                    fail("$.outputs", "channel names must be strings");
            }
        }
        if (j.contains("cold_start")) {
            if (j.at("cold_start").is_boolean())
                scn.cold_start = j.at("cold_start").get<bool>();
            else
                fail("$.cold_start", "expected a boolean");
        }

        for (const auto& v : scn.validate()) errors.push_back("$: " + v);
        return scn;
    }
};

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error(join_problems(problems)), problems_(std::move(problems)) {}

dae::Scenario load_scenario_from_string(const std::string& text,
                                        const std::string& base_dir) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ConfigError({"$: not valid JSON"});
    Loader ld;
    dae::Scenario scn = ld.parse(j, base_dir);
    if (!ld.errors.empty()) throw ConfigError(ld.errors);
    return scn;
}

dae::Scenario load_scenario(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError({"$: cannot open " + path});
    std::ostringstream ss;
    ss << is.rdbuf();
    std::string dir = ".";
    const auto slash = path.find_last_of('/');
    if (slash != std::string::npos) dir = path.substr(0, slash);
    return load_scenario_from_string(ss.str(), dir);
}

std::string emit_scenario(const dae::Scenario& scn) {
    json j;
    j["base"] = {{"s_va", scn.s_base_va}, {"v_v", scn.v_base_v}, {"f_hz", scn.f_base_hz}};
    j["buses"] = scn.buses;
    j["branches"] = json::array();
    for (const auto& b : scn.branches)
        j["branches"].push_back({{"name", b.name},
                                 {"from", b.from_bus},
                                 {"to", b.to_bus},
                                 {"r", b.r},
                                 {"l", b.l},
                                 {"c", b.c}});
    j["loads"] = json::array();
    for (const auto& l : scn.loads)
        j["loads"].push_back(
            {{"name", l.name}, {"bus", l.bus}, {"r", l.r}, {"l", l.l}});
    j["grids"] = json::array();
    for (const auto& g : scn.grids)
        j["grids"].push_back({{"name", g.name},
                              {"bus", g.bus},
                              {"r", g.r},
                              {"l", g.l},
                              {"v_mag", g.v_mag},
                              {"theta0", g.theta0},
                              {"f", g.omega_grid}});
    j["devices"] = json::array();
    for (const auto& c : scn.converters) {
        json d;
        d["name"] = c.name;
        d["type"] = c.kind == dae::ConverterKind::following_vim ? "following_vim"
                    : c.kind == dae::ConverterKind::following_pll ? "following_pll"
                                                                  : "forming";
        d["bus"] = c.bus;
        d["rating"] = c.rating;
        d["outer"] = {{"k_i_p", c.outer.k_i_p},   {"k_i_q", c.outer.k_i_q},
                      {"r_p", c.outer.r_p},       {"r_q", c.outer.r_q},
                      {"p_set", c.outer.p_set},   {"q_set", c.outer.q_set},
                      {"v_set", c.outer.v_set},   {"omega_set", c.outer.omega_set}};
        d["forming"] = {{"r_p", c.forming.r_p},     {"r_q", c.forming.r_q},
                        {"omega_z", c.forming.omega_z}, {"p_set", c.forming.p_set},
                        {"q_set", c.forming.q_set}, {"v_set", c.forming.v_set},
                        {"omega_set", c.forming.omega_set}};
        d["device"] = {{"k_p_c", c.device.k_p_c},
                       {"k_i_c", c.device.k_i_c},
                       {"k_p_v", c.device.k_p_v},
                       {"k_i_v", c.device.k_i_v},
                       {"c_dc", c.device.c_dc},
                       {"k_p_dc", c.device.k_p_dc},
                       {"k_i_dc", c.device.k_i_dc},
                       {"v_dc_set", c.device.v_dc_set},
                       {"v_dc_fault", c.device.v_dc_fault},
                       {"r_f", c.device.r_f},
                       {"l_f", c.device.l_f},
                       {"c_f", c.device.c_f},
                       {"r_t", c.device.r_t},
                       {"l_t", c.device.l_t},
                       {"omega_ref_filt", c.device.omega_ref_filt},
                       {"i_max", c.device.i_max},
                       {"eps_v", c.device.eps_v},
                       {"m_max", c.device.m_max}};
        d["pll"] = {{"k_p", c.pll.k_p}, {"k_i", c.pll.k_i}, {"f0", c.pll.omega0}};
        d["vim"] = {{"h", c.vim.h_inertia},     {"d", c.vim.d_damping},
                    {"r_r", c.vim.r_r},         {"l_r", c.vim.l_r},
                    {"l_m", c.vim.l_m},         {"f0_star", c.vim.omega0_star},
                    {"k_nu_d", c.vim.k_nu_d},   {"slip_min", c.vim.slip_min},
                    {"slip_max", c.vim.slip_max}, {"eps_div", c.vim.eps_div}};
        j["devices"].push_back(d);
    }
    for (const auto& s : scn.sgs) {
        json d;
        d["name"] = s.name;
        d["type"] = "sg";
        d["bus"] = s.bus;
        d["rating"] = s.rating;
        d["sg"] = {{"order", s.params.order},     {"h", s.params.h},
                   {"d", s.params.d},             {"r_a", s.params.r_a},
                   {"x_d", s.params.x_d},         {"x_q", s.params.x_q},
                   {"x_d_t", s.params.x_d_t},     {"x_q_t", s.params.x_q_t},
                   {"x_d_st", s.params.x_d_st},   {"x_q_st", s.params.x_q_st},
                   {"t_d0_t", s.params.t_d0_t},   {"t_q0_t", s.params.t_q0_t},
                   {"t_d0_st", s.params.t_d0_st}, {"t_q0_st", s.params.t_q0_st},
                   {"r_gov", s.params.r_gov},     {"t_gov", s.params.t_gov},
                   {"k_avr", s.params.k_avr},     {"t_avr", s.params.t_avr},
                   {"e_fd_max", s.params.e_fd_max}, {"p_set", s.params.p_set},
                   {"v_set", s.params.v_set}};
        j["devices"].push_back(d);
    }
    j["events"] = json::array();
    for (const auto& e : scn.events) {
        json ev;
        ev["time"] = e.time;
        ev["kind"] = e.kind;
        ev["target"] = e.target;
        for (const auto& [k, v] : e.payload) ev[k] = v;
        j["events"].push_back(ev);
    }
    j["solver"] = {{"dt", scn.solver.dt},
                   {"newton_tol", scn.solver.newton_tol},
                   {"max_newton_iters", scn.solver.max_newton_iters},
                   {"jacobian_max_age", scn.solver.jacobian_max_age},
                   {"output_stride", scn.solver.output_stride}};
    j["outputs"] = scn.outputs;
    j["cold_start"] = scn.cold_start;
    return j.dump(2) + "\n";
}

void save_scenario(const dae::Scenario& scn, const std::string& path) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp);
        if (!os) throw std::runtime_error("cannot open for writing: " + tmp);
        os << emit_scenario(scn);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("atomic rename failed for " + path);
}

}  // namespace vimsim::config
