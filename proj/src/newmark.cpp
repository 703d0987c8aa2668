#include "viscocal/newmark.hpp"

#include <cmath>
#include <stdexcept>

namespace viscocal {

void SolverConfig::validate() const {
    if (n_steps < 1) throw std::invalid_argument("SolverConfig: n_steps must be >= 1");
    if (T_final <= 0.0) throw std::invalid_argument("SolverConfig: T_final must be > 0");
    if (newmark_beta < 0.0 || newmark_beta > 0.5)
        throw std::invalid_argument("SolverConfig: beta must lie in [0, 0.5]");
    if (newmark_gamma < 0.0 || newmark_gamma > 1.0)
        throw std::invalid_argument("SolverConfig: gamma must lie in [0, 1]");
}

ViscoSystem ViscoSystem::from_assembly(const BeamAssembly& asmb, const LoadSpec& spec) {
    ViscoSystem sys;
    sys.M = asmb.M;
    sys.K_C = asmb.K_C;
    sys.K_visc_eps = asmb.K_visc_eps;
    sys.K_visc_tr = asmb.K_visc_tr;
    sys.observation = asmb.observation;
    const Vec basis = asmb.traction_basis.col(spec.direction());
    sys.load = [basis, spec](double t) { return Vec(spec.profile(t) * basis); };
    return sys;
}

SoeStepCoeffs soe_step_coefficients(const SoeKernel& k, double dt) {
    SoeStepCoeffs c;
    const std::size_t m = k.modes();
    c.decay.resize(m);
    c.alpha.resize(m);
    c.beta.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double lam = k.rates()[i];
        const double x = lam * dt;
        c.decay[i] = std::exp(-x);
        if (x < 1e-4) {
            // series around x = 0: alpha = dt(1/2 - x/6 + x^2/24), beta = dt(1/2 - x/3 + x^2/8)
            c.alpha[i] = dt * (0.5 - x / 6.0 + x * x / 24.0);
            c.beta[i] = dt * (0.5 - x / 3.0 + x * x / 8.0);
        } else {
            c.alpha[i] = (x - 1.0 + c.decay[i]) / (dt * lam * lam);
            c.beta[i] = (1.0 - c.decay[i] * (1.0 + x)) / (dt * lam * lam);
        }
        c.alpha_sum += k.weights()[i] * c.alpha[i];
        c.beta_sum += k.weights()[i] * c.beta[i];
    }
    return c;
}

void soe_step_coefficient_derivatives(double lambda, double dt, double& d_decay,
                                      double& d_alpha, double& d_beta) {
    const double x = lambda * dt;
    const double e = std::exp(-x);
    d_decay = -dt * e;
    if (x < 1e-4) {
        d_alpha = dt * dt * (-1.0 / 6.0 + x / 12.0 - x * x / 40.0);
        d_beta = dt * dt * (-1.0 / 3.0 + x / 4.0 - x * x / 10.0);
    } else {
        d_alpha = (1.0 - e) / (lambda * lambda) - 2.0 * (x - 1.0 + e) / (dt * lambda * lambda * lambda);
        d_beta = e * x / (lambda * lambda) - 2.0 * (1.0 - e * (1.0 + x)) / (dt * lambda * lambda * lambda);
    }
}

NewmarkSoeSolver::NewmarkSoeSolver(const ViscoSystem& sys, const SoeKernel& k_eps,
                                   const SoeKernel& k_tr, const SolverConfig& cfg)
    : sys_(&sys), keps_(k_eps), ktr_(k_tr), cfg_(cfg) {
    cfg_.validate();
    const double dt = cfg_.dt();
    ce_ = soe_step_coefficients(keps_, dt);
    ct_ = soe_step_coefficients(ktr_, dt);

    SpMat S = sys.M + cfg_.newmark_beta * dt * dt * sys.K_C +
              cfg_.newmark_gamma * dt * ce_.alpha_sum * sys.K_visc_eps +
              cfg_.newmark_gamma * dt * ct_.alpha_sum * sys.K_visc_tr;
    S_llt_.compute(S);
    if (S_llt_.info() != Eigen::Success)
        throw std::runtime_error("NewmarkSoeSolver: effective matrix is not SPD (bad kernel parameters?)");
    M_llt_.compute(sys.M);
    if (M_llt_.info() != Eigen::Success)
        throw std::runtime_error("NewmarkSoeSolver: mass matrix is not SPD");
}

void NewmarkSoeSolver::step(Vec& u, Vec& v, Vec& a, std::vector<Vec>& q_eps,
                            std::vector<Vec>& q_tr, int n) const {
    const double dt = cfg_.dt();
    const double beta = cfg_.newmark_beta, gamma = cfg_.newmark_gamma;
    const double t1 = double(n + 1) * dt;

    const Vec u_pred = u + dt * v + dt * dt * (0.5 - beta) * a;
    const Vec v_pred = v + dt * (1.0 - gamma) * a;

    // memory contribution at t_{n+1} with the implicit a^{n+1} part folded into S
    Vec h_eps = ce_.alpha_sum * v_pred + ce_.beta_sum * v;
    for (std::size_t k = 0; k < q_eps.size(); ++k)
        h_eps += keps_.weights()[k] * ce_.decay[k] * q_eps[k];
    Vec h_tr = ct_.alpha_sum * v_pred + ct_.beta_sum * v;
    for (std::size_t k = 0; k < q_tr.size(); ++k)
        h_tr += ktr_.weights()[k] * ct_.decay[k] * q_tr[k];

    const Vec rhs = sys_->load(t1) - sys_->K_C * u_pred - sys_->K_visc_eps * h_eps -
                    sys_->K_visc_tr * h_tr;
    const Vec a1 = S_llt_.solve(rhs);

    u = u_pred + beta * dt * dt * a1;
    const Vec v1 = v_pred + gamma * dt * a1;
    for (std::size_t k = 0; k < q_eps.size(); ++k)
        q_eps[k] = ce_.decay[k] * q_eps[k] + ce_.alpha[k] * v1 + ce_.beta[k] * v;
    for (std::size_t k = 0; k < q_tr.size(); ++k)
        q_tr[k] = ct_.decay[k] * q_tr[k] + ct_.alpha[k] * v1 + ct_.beta[k] * v;
    v = v1;
    a = a1;
}

TrajectoryRecord NewmarkSoeSolver::solve() const {
    const auto ndof = sys_->M.rows();
    const int n_steps = cfg_.n_steps;

    TrajectoryRecord rec;
    rec.dt = cfg_.dt();
    rec.u.reserve(std::size_t(n_steps) + 1);
    rec.v.reserve(std::size_t(n_steps) + 1);
    rec.a.reserve(std::size_t(n_steps) + 1);

    Vec u = Vec::Zero(ndof), v = Vec::Zero(ndof);
    Vec a = M_llt_.solve(sys_->load(0.0));  // beam at rest: u0 = v0 = 0, q(0) = 0
    std::vector<Vec> q_eps(keps_.modes(), Vec::Zero(ndof));
    std::vector<Vec> q_tr(ktr_.modes(), Vec::Zero(ndof));

    const auto obs_rows = sys_->observation.rows();
    rec.observations.resize(obs_rows, n_steps + 1);

    auto record = [&](int n) {
        rec.u.push_back(u);
        rec.v.push_back(v);
        rec.a.push_back(a);
        rec.q_eps.push_back(q_eps);
        rec.q_tr.push_back(q_tr);
        if (obs_rows > 0) rec.observations.col(n) = sys_->observation * u;
    };
    record(0);
    for (int n = 0; n < n_steps; ++n) {
        step(u, v, a, q_eps, q_tr, n);
        record(n + 1);
    }
    return rec;
}

TrajectoryRecord solve_forward(const BeamAssembly& asmb, const SoeKernel& k_eps,
                               const SoeKernel& k_tr, const LoadSpec& spec,
                               const SolverConfig& cfg) {
    const ViscoSystem sys = ViscoSystem::from_assembly(asmb, spec);
    return NewmarkSoeSolver(sys, k_eps, k_tr, cfg).solve();
}

EnergyTrace energy_monitor(const TrajectoryRecord& traj, const ViscoSystem& sys) {
    EnergyTrace e;
    const std::size_t n = traj.u.size();
    e.kinetic.resize(n);
    e.elastic.resize(n);
    e.total.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        e.kinetic[i] = 0.5 * traj.v[i].dot(sys.M * traj.v[i]);
        e.elastic[i] = 0.5 * traj.u[i].dot(sys.K_C * traj.u[i]);
        e.total[i] = e.kinetic[i] + e.elastic[i];
    }
    return e;
}

EnergyTrace energy_monitor(const TrajectoryRecord& traj, const BeamAssembly& asmb) {
    EnergyTrace e;
    const std::size_t n = traj.u.size();
    e.kinetic.resize(n);
    e.elastic.resize(n);
    e.total.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        e.kinetic[i] = 0.5 * traj.v[i].dot(asmb.M * traj.v[i]);
        e.elastic[i] = 0.5 * traj.u[i].dot(asmb.K_C * traj.u[i]);
        e.total[i] = e.kinetic[i] + e.elastic[i];
    }
    return e;
}

} // namespace viscocal
