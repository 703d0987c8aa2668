#include "viscocal/modal.hpp"

#include <cmath>
#include <stdexcept>

#include "viscocal/newmark.hpp"

namespace viscocal {

SampledSignal simulate_mode(const ModalSystem& sys, double dt, double T) {
    if (sys.lambda_i <= 0.0) throw std::invalid_argument("simulate_mode: lambda_i must be > 0");
    if (!sys.ell) throw std::invalid_argument("simulate_mode: missing load profile");

    ViscoSystem vs;
    auto one_by_one = [](double v) {
        SpMat m(1, 1);
        m.insert(0, 0) = v;
        m.makeCompressed();
        return m;
    };
    vs.M = one_by_one(1.0);
    vs.K_C = one_by_one(sys.lambda_i);
    vs.K_visc_eps = one_by_one(sys.lambda_i);  // kernel rides on the elastic operator
    vs.K_visc_tr = one_by_one(0.0);
    vs.observation = Eigen::MatrixXd::Constant(1, 1, sys.b_phi);
    const double f = sys.f_i;
    const auto ell = sys.ell;
    vs.load = [f, ell](double t) { return Vec::Constant(1, ell(t) * f); };

    SolverConfig cfg;
    cfg.T_final = T;
    cfg.n_steps = int(std::lround(T / dt));
    if (cfg.n_steps < 1) throw std::invalid_argument("simulate_mode: T/dt < 1");

    const NewmarkSoeSolver solver(vs, sys.kernel, SoeKernel::zero(), cfg);
    const TrajectoryRecord traj = solver.solve();

    SampledSignal out;
    out.dt = cfg.dt();
    out.values.resize(std::size_t(cfg.n_steps) + 1);
    for (int n = 0; n <= cfg.n_steps; ++n) out.values[std::size_t(n)] = traj.observations(0, n);
    return out;
}

namespace {

double laplace_trapezoid(const SampledSignal& f, double s) {
    double acc = 0.0;
    const std::size_t n = f.values.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double w = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
        acc += w * f.values[i] * std::exp(-s * double(i) * f.dt);
    }
    return acc * f.dt;
}

} // namespace

std::vector<LaplacePoint> recover_kernel_laplace(const SampledSignal& y, const ModalSystem& sys,
                                                 const std::vector<double>& s_points,
                                                 double conditioning_threshold) {
    if (y.values.size() < 2) throw std::invalid_argument("recover_kernel_laplace: empty signal");
    const double T = y.back_time();
    SampledSignal ell;
    ell.dt = y.dt;
    ell.values.resize(y.values.size());
    for (std::size_t i = 0; i < ell.values.size(); ++i) ell.values[i] = sys.ell(double(i) * y.dt);

    double ymax = 0.0;
    for (double v : y.values) ymax = std::max(ymax, std::abs(v));

    std::vector<LaplacePoint> out;
    for (double s : s_points) {
        if (s <= 0.0) throw std::invalid_argument("recover_kernel_laplace: s points must be > 0");
        LaplacePoint pt;
        pt.s = s;
        const double Ly = laplace_trapezoid(y, s);
        const double Ll = laplace_trapezoid(ell, s);
        pt.tail_bound = std::abs(y.values.back()) * std::exp(-s * T) / s;
        if (std::abs(Ly) < conditioning_threshold * std::max(ymax, 1e-300)) {
            pt.well_conditioned = false;  // reported, point skipped
            out.push_back(pt);
            continue;
        }
        pt.value = (sys.f_i * sys.b_phi * Ll / Ly - s * s - sys.lambda_i) / (sys.lambda_i * s);
        out.push_back(pt);
    }
    return out;
}

} // namespace viscocal
