#include "vimsim/analysis/linear_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace vimsim::analysis {

LinearModel linearize_fd(const FgEval& eval, const Eigen::VectorXd& x0,
                         const Eigen::VectorXd& y0, double h_rel,
                         std::vector<std::string> state_names,
                         double equilibrium_tol) {
    const int nx = int(x0.size()), ny = int(y0.size());
    Eigen::VectorXd f0(nx), g0(ny);
    eval(x0, y0, f0, g0);
    const double res = std::max(f0.lpNorm<Eigen::Infinity>(),
                                ny ? g0.lpNorm<Eigen::Infinity>() : 0.0);
    if (!(res < equilibrium_tol))
        throw std::invalid_argument(
            "linearize: point is not an equilibrium (residual " + std::to_string(res) +
            ")");

    LinearModel m;
    m.f_x.resize(nx, nx);
    m.f_y.resize(nx, ny);
    m.g_x.resize(ny, nx);
    m.g_y.resize(ny, ny);
    m.state_names = std::move(state_names);

    Eigen::VectorXd fp(nx), gp(ny), fm(nx), gm(ny);
    Eigen::VectorXd x = x0, y = y0;
    for (int j = 0; j < nx; ++j) {
        const double save = x(j);
        const double h = h_rel * std::max(1.0, std::abs(save));
        x(j) = save + h;
        eval(x, y, fp, gp);
        x(j) = save - h;
        eval(x, y, fm, gm);
        x(j) = save;
        m.f_x.col(j) = (fp - fm) / (2.0 * h);
        if (ny) m.g_x.col(j) = (gp - gm) / (2.0 * h);
    }
    for (int j = 0; j < ny; ++j) {
        const double save = y(j);
        const double h = h_rel * std::max(1.0, std::abs(save));
        y(j) = save + h;
        eval(x, y, fp, gp);
        y(j) = save - h;
        eval(x, y, fm, gm);
        y(j) = save;
        m.f_y.col(j) = (fp - fm) / (2.0 * h);
        m.g_y.col(j) = (gp - gm) / (2.0 * h);
    }

    if (ny) {
        const Eigen::JacobiSVD<Eigen::MatrixXd> svd(m.g_y);
        const double smin = svd.singularValues()(ny - 1);
        const double smax = svd.singularValues()(0);
        m.g_y_condition = smin > 0.0 ? smax / smin
                                     : std::numeric_limits<double>::infinity();
        if (!(smin > smax * 1e-14))
            throw std::runtime_error(
                "linearize: singular algebraic Jacobian (index violation)");
        m.a = m.f_x - m.f_y * m.g_y.partialPivLu().solve(m.g_x);
    } else {
        m.a = m.f_x;
    }
    return m;
}

LinearModel linearize(const dae::AssembledSystem& sys, const Eigen::VectorXd& x0,
                      const Eigen::VectorXd& y0, double h_rel) {
    static double dummy = 0.0;
    auto eval = [&sys](const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                       Eigen::VectorXd& f, Eigen::VectorXd& g) {
        sys.eval(0.0, x.data(), y.size() ? y.data() : &dummy, f.data(),
                 g.size() ? g.data() : &dummy);
    };
    return linearize_fd(eval, x0, y0, h_rel, sys.state_names());
}

ModalAnalysis modal_analysis(const LinearModel& model) {
    ModalAnalysis out;
    out.state_names = model.state_names;
    const int n = int(model.a.rows());
    Eigen::EigenSolver<Eigen::MatrixXd> es(model.a);
    out.eigenvalues = es.eigenvalues();
    out.right = es.eigenvectors();

    const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(out.right);
    const double smin = svd.singularValues()(n - 1);
    const double smax = svd.singularValues()(0);
    out.participation.resize(n, n);
    if (!(smin > smax * 1e-12)) {
        out.defective = true;
        out.participation.setConstant(std::numeric_limits<double>::quiet_NaN());
        out.left = Eigen::MatrixXcd::Zero(n, n);
        return out;
    }
    out.left = out.right.inverse();
    for (int i = 0; i < n; ++i) {
        double sum = 0.0;
        for (int k = 0; k < n; ++k) {
            const double p = std::abs(out.left(i, k) * out.right(k, i));
            out.participation(k, i) = p;
            sum += p;
        }
        out.participation.col(i) /= sum;
    }
    return out;
}

StabilityResult classify(const ModalAnalysis& modal, double tol, double zero_tol) {
    StabilityResult out;
    const int n = int(modal.eigenvalues.size());
    int zero_mode = -1;
    int n_zero = 0;
    for (int i = 0; i < n; ++i) {
        if (std::abs(modal.eigenvalues(i)) < zero_tol) {
            ++n_zero;
            if (zero_mode < 0) zero_mode = i;
        }
    }
    out.ambiguous = n_zero > 1;
    out.n_discarded = n_zero > 0 ? 1 : 0;

    out.max_re = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        if (i == zero_mode) continue;
        if (modal.eigenvalues(i).real() > out.max_re) {
            out.max_re = modal.eigenvalues(i).real();
            out.critical = modal.eigenvalues(i);
            out.critical_index = i;
        }
    }
    out.stable = !out.ambiguous && out.max_re < -tol;
    return out;
}

std::vector<std::pair<std::string, double>> top_participants(const ModalAnalysis& modal,
                                                             int mode, int count) {
    std::vector<std::pair<std::string, double>> all;
    const int n = int(modal.participation.rows());
    for (int k = 0; k < n; ++k) {
        const std::string name =
            k < int(modal.state_names.size()) ? modal.state_names[k]
                                              : "x" + std::to_string(k);
        all.emplace_back(name, modal.participation(k, mode));
    }
    std::sort(all.begin(), all.end(),
              [](const auto& a, const auto& b) { return a.second > b.second; });
    if (int(all.size()) > count) all.resize(count);
    return all;
}

void write_eigenvalue_csv(const ModalAnalysis& modal, const std::string& path) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp);
        if (!os) throw std::runtime_error("cannot open for writing: " + tmp);
        os << "re,im,dominant_state,participation_top3\n";
        char buf[64];
        for (int i = 0; i < int(modal.eigenvalues.size()); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", modal.eigenvalues(i).real());
            os << buf << ",";
            std::snprintf(buf, sizeof buf, "%.17g", modal.eigenvalues(i).imag());
            os << buf << ",";
            const auto top = top_participants(modal, i, 3);
            os << (top.empty() ? "" : top.front().first) << ",\"";
            for (std::size_t j = 0; j < top.size(); ++j) {
                std::snprintf(buf, sizeof buf, "%.4f", top[j].second);
                os << (j ? ";" : "") << top[j].first << ":" << buf;
            }
            os << "\"\n";
        }
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("atomic rename failed for " + path);
}

}  // namespace vimsim::analysis
