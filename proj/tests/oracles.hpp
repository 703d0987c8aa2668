#ifndef VISCOCAL_TEST_ORACLES_HPP
#define VISCOCAL_TEST_ORACLES_HPP

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <vector>

#include "viscocal/kernels.hpp"

// Test-only reference integrators, independent of the production solve path.

namespace oracles {

// Dense RK4 on x' = f(t, x).
inline std::vector<Eigen::VectorXd> rk4(const std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>& f,
                                        Eigen::VectorXd x0, double dt, int n_steps) {
    std::vector<Eigen::VectorXd> out;
    out.reserve(std::size_t(n_steps) + 1);
    out.push_back(x0);
    Eigen::VectorXd x = std::move(x0);
    for (int n = 0; n < n_steps; ++n) {
        const double t = n * dt;
        const Eigen::VectorXd k1 = f(t, x);
        const Eigen::VectorXd k2 = f(t + 0.5 * dt, x + 0.5 * dt * k1);
        const Eigen::VectorXd k3 = f(t + 0.5 * dt, x + 0.5 * dt * k2);
        const Eigen::VectorXd k4 = f(t + dt, x + dt * k3);
        x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        out.push_back(x);
    }
    return out;
}

// Scalar three-kernel model
//   u'' + (ksig * u'')' + c0 u + (keps + ktre) * u' = f + (ksig * f)'
// integrated as an explicit ODE system with exponential auxiliary states:
//   q_j' = -lam_j q_j + w_j u''        (for ksig * u'')
//   r_j' = -mu_j r_j + v_j u'          (for (keps + ktre) * u')
//   p_j' = -lam_j p_j + w_j f(t)       (for ksig * f)
// where (ksig*u'')' = sum_j q_j' and (ksig*f)' = sum_j p_j'. Solving the
// algebraic relation for u'' gives an explicit right-hand side.
struct ScalarModel1 {
    viscocal::SoeKernel ksig = viscocal::SoeKernel::zero();
    viscocal::SoeKernel kvisc = viscocal::SoeKernel::zero();  // keps + ktre combined
    double c0 = 1.0;                                          // elastic coefficient (2mu + lambda scale)
    std::function<double(double)> force;

    // state: [u, v, q_0..q_{ms-1}, r_0..r_{mv-1}, p_0..p_{ms-1}]
    std::vector<double> simulate(double dt, int n_steps) const {
        const int ms = int(ksig.modes()), mv = int(kvisc.modes());
        const double ksig0 = ksig.weight_sum();
        auto rhs = [&](double t, const Eigen::VectorXd& x) {
            const double v = x[1];
            double sum_lam_q = 0.0;
            for (int j = 0; j < ms; ++j) sum_lam_q += ksig.rates()[std::size_t(j)] * x[2 + j];
            double conv_visc = 0.0;
            for (int j = 0; j < mv; ++j) conv_visc += x[2 + ms + j];
            double sum_lam_p = 0.0;
            for (int j = 0; j < ms; ++j) sum_lam_p += ksig.rates()[std::size_t(j)] * x[2 + ms + mv + j];
            const double f = force(t);
            // (1 + ksig(0)) u'' = f + ksig(0) f - sum lam p - c0 u - conv + sum lam q
            const double acc =
                (f + ksig0 * f - sum_lam_p - c0 * x[0] - conv_visc + sum_lam_q) / (1.0 + ksig0);
            Eigen::VectorXd dx(x.size());
            dx[0] = v;
            dx[1] = acc;
            for (int j = 0; j < ms; ++j)
                dx[2 + j] = -ksig.rates()[std::size_t(j)] * x[2 + j] + ksig.weights()[std::size_t(j)] * acc;
            for (int j = 0; j < mv; ++j)
                dx[2 + ms + j] =
                    -kvisc.rates()[std::size_t(j)] * x[2 + ms + j] + kvisc.weights()[std::size_t(j)] * v;
            for (int j = 0; j < ms; ++j)
                dx[2 + ms + mv + j] =
                    -ksig.rates()[std::size_t(j)] * x[2 + ms + mv + j] + ksig.weights()[std::size_t(j)] * f;
            return dx;
        };
        const auto traj = rk4(rhs, Eigen::VectorXd::Zero(2 + 2 * ms + mv), dt, n_steps);
        std::vector<double> u(traj.size());
        for (std::size_t i = 0; i < traj.size(); ++i) u[i] = traj[i][0];
        return u;
    }
};

// Scalar two-kernel model u'' + c0 u + kv * u' = f, same auxiliary-state trick.
struct ScalarModel2 {
    viscocal::SoeKernel kvisc = viscocal::SoeKernel::zero();
    double c0 = 1.0;
    std::function<double(double)> force;

    std::vector<double> simulate(double dt, int n_steps) const {
        const int mv = int(kvisc.modes());
        auto rhs = [&](double t, const Eigen::VectorXd& x) {
            double conv = 0.0;
            for (int j = 0; j < mv; ++j) conv += x[2 + j];
            Eigen::VectorXd dx(x.size());
            dx[0] = x[1];
            dx[1] = force(t) - c0 * x[0] - conv;
            for (int j = 0; j < mv; ++j)
                dx[2 + j] = -kvisc.rates()[std::size_t(j)] * x[2 + j] + kvisc.weights()[std::size_t(j)] * x[1];
            return dx;
        };
        const auto traj = rk4(rhs, Eigen::VectorXd::Zero(2 + mv), dt, n_steps);
        std::vector<double> u(traj.size());
        for (std::size_t i = 0; i < traj.size(); ++i) u[i] = traj[i][0];
        return u;
    }
};

} // namespace oracles

#endif
