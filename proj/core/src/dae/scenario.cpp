#include "vimsim/dae/scenario.hpp"

#include <set>

namespace vimsim::dae {

int Scenario::bus_index(const std::string& name) const {
    for (std::size_t i = 0; i < buses.size(); ++i)
        if (buses[i] == name) return static_cast<int>(i);
    return -1;
}

std::vector<std::string> Scenario::validate() const {
    std::vector<std::string> problems;
    if (buses.empty()) problems.push_back("network has no buses");
    std::set<std::string> seen;
    for (const auto& b : buses) {
        if (!seen.insert(b).second) problems.push_back("duplicate bus: " + b);
    }
    std::set<std::string> names;
    auto check_name = [&](const std::string& n, const char* what) {
        if (n.empty()) problems.push_back(std::string("unnamed ") + what);
        if (!names.insert(n).second) problems.push_back("duplicate device/element name: " + n);
    };
    auto check_bus = [&](const std::string& b, const std::string& owner) {
        if (bus_index(b) < 0) problems.push_back("dangling bus '" + b + "' referenced by " + owner);
    };
    for (const auto& br : branches) {
        check_name(br.name, "branch");
        check_bus(br.from_bus, br.name);
        check_bus(br.to_bus, br.name);
        if (!br.valid()) problems.push_back("invalid branch parameters: " + br.name);
    }
    for (const auto& ld : loads) {
        check_name(ld.name, "load");
        check_bus(ld.bus, ld.name);
        if (!ld.valid()) problems.push_back("invalid load parameters: " + ld.name);
    }
    for (const auto& g : grids) {
        check_name(g.name, "grid");
        check_bus(g.bus, g.name);
        if (!g.valid()) problems.push_back("invalid stiff-grid parameters: " + g.name);
    }
    for (const auto& c : converters) {
        check_name(c.name, "converter");
        check_bus(c.bus, c.name);
        if (!c.device.valid()) problems.push_back("invalid device-level parameters: " + c.name);
        if (c.kind == ConverterKind::following_vim && !c.vim.valid())
            problems.push_back("invalid VIM parameters: " + c.name);
        if (c.kind == ConverterKind::following_pll && !c.pll.valid())
            problems.push_back("invalid PLL parameters: " + c.name);
        if (c.kind == ConverterKind::forming && !c.forming.valid())
            problems.push_back("invalid forming parameters: " + c.name);
        if (c.kind != ConverterKind::forming && !c.outer.valid())
            problems.push_back("invalid outer-loop parameters: " + c.name);
        if (c.rating <= 0.0) problems.push_back("nonpositive rating: " + c.name);
    }
    for (const auto& s : sgs) {
        check_name(s.name, "sg");
        check_bus(s.bus, s.name);
        if (!s.params.valid()) problems.push_back("invalid SG parameters: " + s.name);
    }
    // connectivity: every bus reachable through closed branches from bus 0
    if (!buses.empty() && buses.size() > 1) {
        std::vector<char> vis(buses.size(), 0);
        std::vector<int> stack{0};
        vis[0] = 1;
        while (!stack.empty()) {
            int b = stack.back();
            stack.pop_back();
            for (const auto& br : branches) {
                int fi = bus_index(br.from_bus), ti = bus_index(br.to_bus);
                if (fi < 0 || ti < 0) continue;
                if (fi == b && !vis[ti]) { vis[ti] = 1; stack.push_back(ti); }
                if (ti == b && !vis[fi]) { vis[fi] = 1; stack.push_back(fi); }
            }
        }
        for (std::size_t i = 0; i < buses.size(); ++i)
            if (!vis[i]) problems.push_back("bus not connected to the network: " + buses[i]);
    }
    for (const auto& e : events) {
        if (e.time < 0.0) problems.push_back("event with negative time: " + e.kind);
    }
    if (!(solver.dt > 0.0)) problems.push_back("solver dt must be positive");
    if (!(solver.newton_tol > 0.0)) problems.push_back("solver tolerance must be positive");
    return problems;
}

}  // namespace vimsim::dae
