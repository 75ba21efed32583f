#include "vimsim/dae/powerflow.hpp"

#include <cmath>
#include <stdexcept>

namespace vimsim::dae {

namespace {

// Packs the unknowns (theta at non-slack, |v| at pq) and evaluates the
// active/reactive mismatches in the same order.
struct PfProblem {
    const Eigen::MatrixXcd& y;
    const std::vector<PfBus>& buses;
    std::vector<int> theta_idx;  // bus index per theta unknown
    std::vector<int> v_idx;      // bus index per magnitude unknown

    explicit PfProblem(const Eigen::MatrixXcd& y_, const std::vector<PfBus>& b)
        : y(y_), buses(b) {
        for (std::size_t k = 0; k < buses.size(); ++k) {
            if (buses[k].type != PfBus::Type::slack) theta_idx.push_back(int(k));
            if (buses[k].type == PfBus::Type::pq) v_idx.push_back(int(k));
        }
    }

    int n_unknowns() const { return int(theta_idx.size() + v_idx.size()); }

    Eigen::VectorXcd phasors(const Eigen::VectorXd& u) const {
        const int n = int(buses.size());
        Eigen::VectorXd vm(n), th(n);
        for (int k = 0; k < n; ++k) {
            vm(k) = buses[k].v;
            th(k) = buses[k].theta;
        }
        for (std::size_t j = 0; j < theta_idx.size(); ++j) th(theta_idx[j]) = u(int(j));
        for (std::size_t j = 0; j < v_idx.size(); ++j)
            vm(v_idx[j]) = u(int(theta_idx.size() + j));
        Eigen::VectorXcd v(n);
        for (int k = 0; k < n; ++k) v(k) = std::polar(vm(k), th(k));
        return v;
    }

    Eigen::VectorXd residual(const Eigen::VectorXd& u) const {
        const Eigen::VectorXcd v = phasors(u);
        const Eigen::VectorXcd s = v.cwiseProduct((y * v).conjugate());
        Eigen::VectorXd r(n_unknowns());
        for (std::size_t j = 0; j < theta_idx.size(); ++j)
            r(int(j)) = s(theta_idx[j]).real() - buses[theta_idx[j]].p;
        for (std::size_t j = 0; j < v_idx.size(); ++j)
            r(int(theta_idx.size() + j)) = s(v_idx[j]).imag() - buses[v_idx[j]].q;
        return r;
    }
};

}  // namespace

PfResult solve_powerflow(const Eigen::MatrixXcd& ybus, const std::vector<PfBus>& buses,
                         double tol, int max_iters) {
    if (ybus.rows() != ybus.cols() || std::size_t(ybus.rows()) != buses.size())
        throw std::invalid_argument("powerflow: admittance matrix / bus list size mismatch");
    bool have_slack = false;
    for (const auto& b : buses) have_slack |= (b.type == PfBus::Type::slack);
    if (!have_slack) throw std::invalid_argument("powerflow: no slack node");

    PfProblem prob(ybus, buses);
    const int m = prob.n_unknowns();
    Eigen::VectorXd u(m);
    for (std::size_t j = 0; j < prob.theta_idx.size(); ++j)
        u(int(j)) = buses[prob.theta_idx[j]].theta;
    for (std::size_t j = 0; j < prob.v_idx.size(); ++j)
        u(int(prob.theta_idx.size() + j)) = buses[prob.v_idx[j]].v;

    PfResult out;
    Eigen::VectorXd r = prob.residual(u);
    for (int it = 0; it < max_iters; ++it) {
        if (r.lpNorm<Eigen::Infinity>() < tol) {
            out.converged = true;
            out.iterations = it;
            break;
        }
        Eigen::MatrixXd jac(m, m);
        for (int j = 0; j < m; ++j) {
            const double h = 1e-7 * std::max(1.0, std::abs(u(j)));
            Eigen::VectorXd up = u, um = u;
            up(j) += h;
            um(j) -= h;
            jac.col(j) = (prob.residual(up) - prob.residual(um)) / (2.0 * h);
        }
        const Eigen::VectorXd du = jac.partialPivLu().solve(r);
        // damped update guards the low-voltage iterates near heavy loading
        double alpha = 1.0;
        for (int ls = 0; ls < 6; ++ls) {
            const Eigen::VectorXd r_try = prob.residual(u - alpha * du);
            if (r_try.norm() < r.norm() || ls == 5) {
                u -= alpha * du;
                r = r_try;
                break;
            }
            alpha *= 0.5;
        }
    }
    if (!out.converged && r.lpNorm<Eigen::Infinity>() < tol) {
        out.converged = true;
        out.iterations = max_iters;
    }

    const Eigen::VectorXcd v = prob.phasors(u);
    const Eigen::VectorXcd s = v.cwiseProduct((ybus * v).conjugate());
    out.v.assign(v.data(), v.data() + v.size());
    out.s.assign(s.data(), s.data() + s.size());
    return out;
}

}  // namespace vimsim::dae
