#include "viscocal/adjoint.hpp"

#include <cmath>
#include <stdexcept>

#include "viscocal/calibration.hpp"

namespace viscocal {

std::pair<SoeKernel, SoeKernel> theta_to_kernels(const Vec& theta, const ThetaLayout& layout) {
    if (theta.size() != layout.size()) throw std::invalid_argument("theta_to_kernels: size mismatch");
    auto block = [&](int off, int m) {
        std::vector<double> w(static_cast<std::size_t>(m)), lam(static_cast<std::size_t>(m));
        for (int k = 0; k < m; ++k) {
            w[std::size_t(k)] = theta[off + k];
            const double s = theta[off + m + k];
            lam[std::size_t(k)] = layout.lambda_min + s * s;
        }
        return SoeKernel(std::move(w), std::move(lam));
    };
    if (layout.shared) {
        SoeKernel k = block(0, layout.m_eps);
        return {k, k};
    }
    return {block(0, layout.m_tr), block(2 * layout.m_tr, layout.m_eps)};
}

Vec kernels_to_theta(const SoeKernel& k_tr, const SoeKernel& k_eps, const ThetaLayout& layout) {
    auto fill = [&](Vec& th, int off, const SoeKernel& k) {
        const int m = int(k.modes());
        for (int i = 0; i < m; ++i) {
            th[off + i] = k.weights()[std::size_t(i)];
            const double lam = k.rates()[std::size_t(i)];
            if (lam < layout.lambda_min - 1e-14)
                throw std::invalid_argument("kernels_to_theta: rate below lambda_min");
            th[off + m + i] = std::sqrt(std::max(0.0, lam - layout.lambda_min));
        }
    };
    Vec th(layout.size());
    if (layout.shared) {
        if (int(k_eps.modes()) != layout.m_eps) throw std::invalid_argument("kernels_to_theta: mode count");
        fill(th, 0, k_eps);
        return th;
    }
    if (int(k_tr.modes()) != layout.m_tr || int(k_eps.modes()) != layout.m_eps)
        throw std::invalid_argument("kernels_to_theta: mode count");
    fill(th, 0, k_tr);
    fill(th, 2 * layout.m_tr, k_eps);
    return th;
}

AdjointRecord adjoint_sweep(const NewmarkSoeSolver& solver, const TrajectoryRecord& traj,
                            const Eigen::MatrixXd& residual_weight) {
    const ViscoSystem& sys = solver.system();
    const SolverConfig& cfg = solver.config();
    const int n_steps = traj.steps();
    if (residual_weight.cols() != n_steps + 1)
        throw std::invalid_argument("adjoint_sweep: residual columns must match trajectory length");
    if (traj.q_eps.empty() || traj.q_tr.empty())
        throw std::invalid_argument("adjoint_sweep: trajectory lacks memory states");

    const double dt = cfg.dt();
    const double beta = cfg.newmark_beta, gamma = cfg.newmark_gamma;
    const SoeStepCoeffs& ce = solver.coeffs_eps();
    const SoeStepCoeffs& ct = solver.coeffs_tr();
    const SoeKernel& keps = solver.kernel_eps();
    const SoeKernel& ktr = solver.kernel_tr();
    const int me = int(keps.modes()), mt = int(ktr.modes());
    const auto ndof = sys.M.rows();

    auto seed = [&](int n) { return Vec(sys.observation.transpose() * residual_weight.col(n)); };

    Vec bu = seed(n_steps);
    Vec bv = Vec::Zero(ndof), ba = Vec::Zero(ndof);
    std::vector<Vec> bqe(std::size_t(me), Vec::Zero(ndof));
    std::vector<Vec> bqt(std::size_t(mt), Vec::Zero(ndof));

    Vec gwe = Vec::Zero(me), gwt = Vec::Zero(mt);
    Vec g_de = Vec::Zero(me), g_ae = Vec::Zero(me), g_be = Vec::Zero(me);
    Vec g_dtz = Vec::Zero(mt), g_at = Vec::Zero(mt), g_bt = Vec::Zero(mt);
    double gAe = 0.0, gBe = 0.0, gAt = 0.0, gBt = 0.0;

    AdjointRecord rec;
    rec.p.resize(std::size_t(n_steps));

    for (int n = n_steps - 1; n >= 0; --n) {
        const Vec& u_n = traj.u[std::size_t(n)];
        const Vec& v_n = traj.v[std::size_t(n)];
        const Vec& a_n = traj.a[std::size_t(n)];
        const auto& qe_n = traj.q_eps[std::size_t(n)];
        const auto& qt_n = traj.q_tr[std::size_t(n)];
        const Vec& v1 = traj.v[std::size_t(n) + 1];
        const Vec& a1 = traj.a[std::size_t(n) + 1];
        const Vec v_pred = v_n + dt * (1.0 - gamma) * a_n;
        (void)u_n;

        // reverse of the q updates
        Vec bv1 = bv;
        Vec bv_n = Vec::Zero(ndof);
        for (int k = 0; k < me; ++k) {
            g_de[k] += bqe[std::size_t(k)].dot(qe_n[std::size_t(k)]);
            g_ae[k] += bqe[std::size_t(k)].dot(v1);
            g_be[k] += bqe[std::size_t(k)].dot(v_n);
            bv1 += ce.alpha[std::size_t(k)] * bqe[std::size_t(k)];
            bv_n += ce.beta[std::size_t(k)] * bqe[std::size_t(k)];
            bqe[std::size_t(k)] *= ce.decay[std::size_t(k)];
        }
        for (int k = 0; k < mt; ++k) {
            g_dtz[k] += bqt[std::size_t(k)].dot(qt_n[std::size_t(k)]);
            g_at[k] += bqt[std::size_t(k)].dot(v1);
            g_bt[k] += bqt[std::size_t(k)].dot(v_n);
            bv1 += ct.alpha[std::size_t(k)] * bqt[std::size_t(k)];
            bv_n += ct.beta[std::size_t(k)] * bqt[std::size_t(k)];
            bqt[std::size_t(k)] *= ct.decay[std::size_t(k)];
        }

        // reverse of v1 = v_pred + gamma dt a1 and u1 = u_pred + beta dt^2 a1
        Vec bvt = bv1;
        Vec ba1 = ba + gamma * dt * bv1 + beta * dt * dt * bu;
        Vec but = bu;

        // reverse of the effective solve (S is symmetric, same factorization)
        const Vec brhs = solver.effective_solver().solve(ba1);
        rec.p[std::size_t(n)] = brhs;
        gAe += -gamma * dt * brhs.dot(sys.K_visc_eps * a1);
        gAt += -gamma * dt * brhs.dot(sys.K_visc_tr * a1);

        // reverse of rhs = F - K_C u_pred - K_ve h_eps - K_vt h_tr
        but -= sys.K_C * brhs;
        const Vec bhe = -(sys.K_visc_eps * brhs);
        const Vec bht = -(sys.K_visc_tr * brhs);

        // reverse of h_eps = sum_k w_k decay_k q_k + A v_pred + B v
        for (int k = 0; k < me; ++k) {
            const double c = bhe.dot(qe_n[std::size_t(k)]);
            gwe[k] += ce.decay[std::size_t(k)] * c;
            g_de[k] += keps.weights()[std::size_t(k)] * c;
            bqe[std::size_t(k)] += keps.weights()[std::size_t(k)] * ce.decay[std::size_t(k)] * bhe;
        }
        gAe += bhe.dot(v_pred);
        gBe += bhe.dot(v_n);
        bvt += ce.alpha_sum * bhe;
        bv_n += ce.beta_sum * bhe;
        for (int k = 0; k < mt; ++k) {
            const double c = bht.dot(qt_n[std::size_t(k)]);
            gwt[k] += ct.decay[std::size_t(k)] * c;
            g_dtz[k] += ktr.weights()[std::size_t(k)] * c;
            bqt[std::size_t(k)] += ktr.weights()[std::size_t(k)] * ct.decay[std::size_t(k)] * bht;
        }
        gAt += bht.dot(v_pred);
        gBt += bht.dot(v_n);
        bvt += ct.alpha_sum * bht;
        bv_n += ct.beta_sum * bht;

        // reverse of the Newmark predictors
        bv_n += bvt;
        Vec ba_n = dt * (1.0 - gamma) * bvt;
        bv_n += dt * but;
        ba_n += dt * dt * (0.5 - beta) * but;

        bu = but + seed(n);
        bv = bv_n;
        ba = ba_n;
    }
    rec.u_bar.push_back(bu);

    // chain the alpha/beta sums onto per-mode coefficients
    for (int k = 0; k < me; ++k) {
        gwe[k] += gAe * ce.alpha[std::size_t(k)] + gBe * ce.beta[std::size_t(k)];
        g_ae[k] += gAe * keps.weights()[std::size_t(k)];
        g_be[k] += gBe * keps.weights()[std::size_t(k)];
    }
    for (int k = 0; k < mt; ++k) {
        gwt[k] += gAt * ct.alpha[std::size_t(k)] + gBt * ct.beta[std::size_t(k)];
        g_at[k] += gAt * ktr.weights()[std::size_t(k)];
        g_bt[k] += gBt * ktr.weights()[std::size_t(k)];
    }

    // coefficient chain rule onto the rates
    rec.grads.d_w_eps = gwe;
    rec.grads.d_w_tr = gwt;
    rec.grads.d_lambda_eps = Vec::Zero(me);
    rec.grads.d_lambda_tr = Vec::Zero(mt);
    for (int k = 0; k < me; ++k) {
        double dd, da, db;
        soe_step_coefficient_derivatives(keps.rates()[std::size_t(k)], dt, dd, da, db);
        rec.grads.d_lambda_eps[k] = g_de[k] * dd + g_ae[k] * da + g_be[k] * db;
    }
    for (int k = 0; k < mt; ++k) {
        double dd, da, db;
        soe_step_coefficient_derivatives(ktr.rates()[std::size_t(k)], dt, dd, da, db);
        rec.grads.d_lambda_tr[k] = g_dtz[k] * dd + g_at[k] * da + g_bt[k] * db;
    }
    return rec;
}

Eigen::MatrixXd tangent_observations(const NewmarkSoeSolver& solver, const TrajectoryRecord& traj,
                                     const SoeKernel& dk_eps, const SoeKernel& dk_tr) {
    const ViscoSystem& sys = solver.system();
    const SolverConfig& cfg = solver.config();
    const SoeStepCoeffs& ce = solver.coeffs_eps();
    const SoeStepCoeffs& ct = solver.coeffs_tr();
    const SoeKernel& keps = solver.kernel_eps();
    const SoeKernel& ktr = solver.kernel_tr();
    const int me = int(keps.modes()), mt = int(ktr.modes());
    if (int(dk_eps.modes()) != me || int(dk_tr.modes()) != mt)
        throw std::invalid_argument("tangent_observations: perturbation mode counts must match");

    const double dt = cfg.dt();
    const double beta = cfg.newmark_beta, gamma = cfg.newmark_gamma;
    const auto ndof = sys.M.rows();
    const int n_steps = traj.steps();

    // perturbed step coefficients: d(decay), d(alpha), d(beta) times d(lambda)
    std::vector<double> dde(static_cast<std::size_t>(me)), dae(static_cast<std::size_t>(me)), dbe(static_cast<std::size_t>(me));
    std::vector<double> ddt(static_cast<std::size_t>(mt)), dat(static_cast<std::size_t>(mt)), dbt(static_cast<std::size_t>(mt));
    double dAe = 0.0, dBe = 0.0, dAt = 0.0, dBt = 0.0;
    for (int k = 0; k < me; ++k) {
        double dd, da, db;
        soe_step_coefficient_derivatives(keps.rates()[std::size_t(k)], dt, dd, da, db);
        const double dl = dk_eps.rates()[std::size_t(k)];
        dde[std::size_t(k)] = dd * dl;
        dae[std::size_t(k)] = da * dl;
        dbe[std::size_t(k)] = db * dl;
        dAe += dk_eps.weights()[std::size_t(k)] * ce.alpha[std::size_t(k)] +
               keps.weights()[std::size_t(k)] * dae[std::size_t(k)];
        dBe += dk_eps.weights()[std::size_t(k)] * ce.beta[std::size_t(k)] +
               keps.weights()[std::size_t(k)] * dbe[std::size_t(k)];
    }
    for (int k = 0; k < mt; ++k) {
        double dd, da, db;
        soe_step_coefficient_derivatives(ktr.rates()[std::size_t(k)], dt, dd, da, db);
        const double dl = dk_tr.rates()[std::size_t(k)];
        ddt[std::size_t(k)] = dd * dl;
        dat[std::size_t(k)] = da * dl;
        dbt[std::size_t(k)] = db * dl;
        dAt += dk_tr.weights()[std::size_t(k)] * ct.alpha[std::size_t(k)] +
               ktr.weights()[std::size_t(k)] * dat[std::size_t(k)];
        dBt += dk_tr.weights()[std::size_t(k)] * ct.beta[std::size_t(k)] +
               ktr.weights()[std::size_t(k)] * dbt[std::size_t(k)];
    }

    Vec du = Vec::Zero(ndof), dv = Vec::Zero(ndof), da_ = Vec::Zero(ndof);
    std::vector<Vec> dqe(std::size_t(me), Vec::Zero(ndof));
    std::vector<Vec> dqt(std::size_t(mt), Vec::Zero(ndof));

    Eigen::MatrixXd dY(sys.observation.rows(), n_steps + 1);
    dY.setZero();

    for (int n = 0; n < n_steps; ++n) {
        const Vec& v_n = traj.v[std::size_t(n)];
        const auto& qe_n = traj.q_eps[std::size_t(n)];
        const auto& qt_n = traj.q_tr[std::size_t(n)];
        const Vec& v1 = traj.v[std::size_t(n) + 1];
        const Vec& a1 = traj.a[std::size_t(n) + 1];
        const Vec v_pred_f = v_n + dt * (1.0 - gamma) * traj.a[std::size_t(n)];

        const Vec du_pred = du + dt * dv + dt * dt * (0.5 - beta) * da_;
        const Vec dv_pred = dv + dt * (1.0 - gamma) * da_;

        // d(h) = sum_k [dw e + w d(decay)] q + w e dq + dA v_pred + A dv_pred + dB v + B dv
        Vec dhe = dAe * v_pred_f + ce.alpha_sum * dv_pred + dBe * v_n + ce.beta_sum * dv;
        for (int k = 0; k < me; ++k)
            dhe += (dk_eps.weights()[std::size_t(k)] * ce.decay[std::size_t(k)] +
                    keps.weights()[std::size_t(k)] * dde[std::size_t(k)]) * qe_n[std::size_t(k)] +
                   keps.weights()[std::size_t(k)] * ce.decay[std::size_t(k)] * dqe[std::size_t(k)];
        Vec dht = dAt * v_pred_f + ct.alpha_sum * dv_pred + dBt * v_n + ct.beta_sum * dv;
        for (int k = 0; k < mt; ++k)
            dht += (dk_tr.weights()[std::size_t(k)] * ct.decay[std::size_t(k)] +
                    ktr.weights()[std::size_t(k)] * ddt[std::size_t(k)]) * qt_n[std::size_t(k)] +
                   ktr.weights()[std::size_t(k)] * ct.decay[std::size_t(k)] * dqt[std::size_t(k)];

        // dS a1 from the perturbed effective matrix
        const Vec dS_a1 = gamma * dt * (dAe * (sys.K_visc_eps * a1) + dAt * (sys.K_visc_tr * a1));
        const Vec drhs = -(sys.K_C * du_pred) - sys.K_visc_eps * dhe - sys.K_visc_tr * dht - dS_a1;
        const Vec da1 = solver.effective_solver().solve(drhs);

        du = du_pred + beta * dt * dt * da1;
        const Vec dv1 = dv_pred + gamma * dt * da1;
        for (int k = 0; k < me; ++k)
            dqe[std::size_t(k)] = ce.decay[std::size_t(k)] * dqe[std::size_t(k)] +
                                  dde[std::size_t(k)] * qe_n[std::size_t(k)] +
                                  ce.alpha[std::size_t(k)] * dv1 + dae[std::size_t(k)] * v1 +
                                  ce.beta[std::size_t(k)] * dv + dbe[std::size_t(k)] * v_n;
        for (int k = 0; k < mt; ++k)
            dqt[std::size_t(k)] = ct.decay[std::size_t(k)] * dqt[std::size_t(k)] +
                                  ddt[std::size_t(k)] * qt_n[std::size_t(k)] +
                                  ct.alpha[std::size_t(k)] * dv1 + dat[std::size_t(k)] * v1 +
                                  ct.beta[std::size_t(k)] * dv + dbt[std::size_t(k)] * v_n;
        dv = dv1;
        da_ = da1;
        dY.col(n + 1) = sys.observation * du;
    }
    return dY;
}

} // namespace viscocal
