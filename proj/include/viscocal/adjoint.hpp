#ifndef VISCOCAL_ADJOINT_HPP
#define VISCOCAL_ADJOINT_HPP

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "viscocal/newmark.hpp"

namespace viscocal {

struct CalibrationProblem;  // calibration.hpp

/// Fixed parameter layout theta <-> (k_treps, k_eps) with lambda = lambda_min + s^2.
/// shared: single-kernel mode, theta = [w | s] drives both kernels.
/// otherwise: theta = [w_tr | s_tr | w_eps | s_eps].
struct ThetaLayout {
    int m_tr = 0;
    int m_eps = 0;
    bool shared = false;
    double lambda_min = 0.0;

    int size() const { return shared ? 2 * m_eps : 2 * (m_tr + m_eps); }
};

std::pair<SoeKernel, SoeKernel> theta_to_kernels(const Vec& theta, const ThetaLayout& layout);
Vec kernels_to_theta(const SoeKernel& k_tr, const SoeKernel& k_eps, const ThetaLayout& layout);

/// Parameter-gradient accumulators of one reverse sweep, in (w, lambda) coordinates.
struct KernelGradient {
    Vec d_w_eps, d_lambda_eps, d_w_tr, d_lambda_tr;
};

/// Adjoint trajectory: the solved adjoint field per reverse step plus the
/// adjoint memory states mirroring q_k. p[n] pairs with the forward step n -> n+1.
struct AdjointRecord {
    std::vector<Vec> p;
    std::vector<Vec> u_bar;  // adjoint of the state u^n at exit (n = 0 entry is final)
    KernelGradient grads;
};

/// Exact transpose of the forward Newmark+SOE update. residual_weight(:, n) is
/// dJ/dy^n; the same factored effective matrix as the forward solve is reused.
AdjointRecord adjoint_sweep(const NewmarkSoeSolver& solver, const TrajectoryRecord& traj,
                            const Eigen::MatrixXd& residual_weight);

/// Tangent (directional-derivative) observations for perturbations of the
/// kernel parameters; exact linearization of the discrete scheme. Used by the
/// adjoint dot-product test and available as an independent derivative oracle.
Eigen::MatrixXd tangent_observations(const NewmarkSoeSolver& solver, const TrajectoryRecord& traj,
                                     const SoeKernel& dk_eps, const SoeKernel& dk_tr);

struct GradientReport {
    Vec grad;
    double objective = 0.0;
    std::vector<double> per_excitation;  // misfit terms before weighting
};

/// Reduced-gradient dJ/dtheta of the calibration objective via one forward
/// solve and one adjoint sweep per excitation.
GradientReport gradient(const Vec& theta, const CalibrationProblem& problem);

} // namespace viscocal

#endif
