#ifndef VISCOCAL_NEWMARK_HPP
#define VISCOCAL_NEWMARK_HPP

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <functional>
#include <vector>

#include "viscocal/assembly.hpp"
#include "viscocal/kernels.hpp"

namespace viscocal {

struct SolverConfig {
    double T_final = 4.0;
    int n_steps = 100;
    double newmark_beta = 0.25;
    double newmark_gamma = 0.5;

    double dt() const { return T_final / n_steps; }
    void validate() const;
};

/// Generic semi-discrete system M a + K_C u + k_eps * K_ve v + k_tr * K_vt v = F(t).
/// BeamAssembly adapts to this; the modal oracle uses a 1x1 instance.
struct ViscoSystem {
    SpMat M, K_C, K_visc_eps, K_visc_tr;
    std::function<Vec(double)> load;
    Eigen::MatrixXd observation;  // rows x ndof, may have zero rows

    static ViscoSystem from_assembly(const BeamAssembly& asmb, const LoadSpec& spec);
};

/// Exponential-integrator coefficients for one SOE mode over a step of size dt:
/// q^{n+1} = decay q^n + alpha v^{n+1} + beta v^n, exact for piecewise-linear v.
struct SoeStepCoeffs {
    std::vector<double> decay, alpha, beta;
    double alpha_sum = 0.0;  // sum_k w_k alpha_k
    double beta_sum = 0.0;   // sum_k w_k beta_k
};
SoeStepCoeffs soe_step_coefficients(const SoeKernel& k, double dt);

/// d(decay)/d(lambda), d(alpha)/d(lambda), d(beta)/d(lambda) for one mode.
void soe_step_coefficient_derivatives(double lambda, double dt, double& d_decay,
                                      double& d_alpha, double& d_beta);

struct TrajectoryRecord {
    double dt = 0.0;
    std::vector<Vec> u, v, a;                   // n_steps + 1 entries each
    std::vector<std::vector<Vec>> q_eps, q_tr;  // memory states per step, per mode
    Eigen::MatrixXd observations;               // obs rows x (n_steps + 1)

    int steps() const { return int(u.size()) - 1; }
};

struct EnergyTrace {
    std::vector<double> kinetic, elastic, total;
};

/// One factored Newmark + SOE integrator for fixed kernels and step size.
class NewmarkSoeSolver {
  public:
    NewmarkSoeSolver(const ViscoSystem& sys, const SoeKernel& k_eps, const SoeKernel& k_tr,
                     const SolverConfig& cfg);

    /// In-place advance of (u, v, a, q) from t_n to t_{n+1}.
    void step(Vec& u, Vec& v, Vec& a, std::vector<Vec>& q_eps, std::vector<Vec>& q_tr,
              int n) const;

    TrajectoryRecord solve() const;

    const Eigen::SimplicialLLT<SpMat>& effective_solver() const { return S_llt_; }
    const SoeStepCoeffs& coeffs_eps() const { return ce_; }
    const SoeStepCoeffs& coeffs_tr() const { return ct_; }
    const ViscoSystem& system() const { return *sys_; }
    const SolverConfig& config() const { return cfg_; }
    const SoeKernel& kernel_eps() const { return keps_; }
    const SoeKernel& kernel_tr() const { return ktr_; }

  private:
    const ViscoSystem* sys_;
    SoeKernel keps_, ktr_;
    SolverConfig cfg_;
    SoeStepCoeffs ce_, ct_;
    Eigen::SimplicialLLT<SpMat> S_llt_;  // factored once, constant over steps
    Eigen::SimplicialLLT<SpMat> M_llt_;
};

TrajectoryRecord solve_forward(const BeamAssembly& asmb, const SoeKernel& k_eps,
                               const SoeKernel& k_tr, const LoadSpec& spec,
                               const SolverConfig& cfg);

EnergyTrace energy_monitor(const TrajectoryRecord& traj, const ViscoSystem& sys);
EnergyTrace energy_monitor(const TrajectoryRecord& traj, const BeamAssembly& asmb);

} // namespace viscocal

#endif
