#pragma once

#include <string>
#include <vector>

#include "vimsim/dae/scenario.hpp"

namespace vimsim::dae {

// Flattens a Scenario into a semi-explicit index-1 DAE
//   x' = f(t, x, y),  0 = g(t, x, y)
// in a single global frame rotating at omega_frame. Differential states:
// 2 per bus (capacitor voltage), 2 per branch / load / grid source current,
// then the device states. Algebraic unknowns come from the converter
// synchronization blocks.
class AssembledSystem {
  public:
    explicit AssembledSystem(Scenario scn);

    int n_states() const { return nx_; }
    int n_alg() const { return ny_; }
    const std::vector<std::string>& state_names() const { return x_names_; }
    const std::vector<std::string>& alg_names() const { return y_names_; }

    double omega_base() const { return omega_b_; }
    double omega_frame() const { return omega_frame_; }
    void set_omega_frame(double w) { omega_frame_ = w; }
    bool has_connected_grid() const;

    void eval(double t, const double* x, const double* y, double* f, double* g) const;

    const std::vector<std::string>& channel_names() const { return channel_names_; }
    void channels(double t, const double* x, const double* y, double* out) const;

    // Scripted discontinuities; may reset states (e.g. breaker opening zeroes
    // the branch current). Algebraic variables must be re-solved afterwards.
    void apply_event(const Event& e, double* x, double* y);

    // Phasor power-flow initialization of every state; throws on failure.
    // Leaves the system near (not exactly at) the equilibrium; callers polish
    // with a full Newton solve.
    void init_from_powerflow(double* x, double* y);
    void init_cold(double* x, double* y) const;

    // Index in x of a device angle state suitable for pinning when the frame
    // speed is itself an unknown; -1 when the roster has no device.
    int reference_angle_index() const;

    int state_index(const std::string& name) const;  // -1 when absent
    int bus_voltage_offset(int bus) const { return 2 * bus; }

    const Scenario& scenario() const { return scn_; }
    converter::FollowingConverter* following(const std::string& name);
    converter::FormingConverter* forming(const std::string& name);
    network::SgModel* sg(const std::string& name);

  private:
    struct BusRt {
        std::string name;
        double c = 0.0;       // total shunt capacitance, pu
        double fault_g = 0.0; // shunt fault conductance, pu
    };
    struct BranchRt {
        network::BranchParams p;
        bool closed = true;
        int from = 0, to = 0;
        int x_off = 0;
    };
    struct LoadRt {
        network::RlLoadParams p;
        int bus = 0;
        int x_off = 0;
    };
    struct GridRt {
        network::StiffGridParams p;
        bool connected = true;
        int bus = 0;
        int x_off = 0;
    };
    struct DevRt {
        enum class Kind { following, forming, sg } kind;
        int model = 0;  // index into the matching model vector
        int bus = 0;
        int x_off = 0;
        int y_off = 0;
        std::string name;
    };

    void build_names();
    const DevRt* find_device(const std::string& name) const;

    Scenario scn_;
    double omega_b_;
    double omega_frame_ = 1.0;
    int nx_ = 0, ny_ = 0;

    std::vector<BusRt> buses_;
    std::vector<BranchRt> branches_;
    std::vector<LoadRt> loads_;
    std::vector<GridRt> grids_;
    std::vector<DevRt> devices_;
    std::vector<converter::FollowingConverter> following_;
    std::vector<converter::FormingConverter> forming_;
    std::vector<network::SgModel> sgs_;

    std::vector<std::string> x_names_;
    std::vector<std::string> y_names_;
    std::vector<std::string> channel_names_;
};

}  // namespace vimsim::dae
