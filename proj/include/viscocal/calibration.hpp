#ifndef VISCOCAL_CALIBRATION_HPP
#define VISCOCAL_CALIBRATION_HPP

#include <functional>
#include <optional>
#include <vector>

#include "viscocal/adjoint.hpp"
#include "viscocal/lbfgs.hpp"
#include "viscocal/newmark.hpp"

namespace viscocal {

enum class ObjectiveKind { SingleKernel, TwoKernel };

struct Excitation {
    LoadSpec load;
    double weight = 1.0;             // 1 for bending, omega for extension
    Eigen::MatrixXd measurements;    // 3 x (n_meas + 1) tip observations on [0, t_meas]
};

struct NoiseSpec {
    double level = 0.0;      // fraction of max |component signal|
    unsigned long seed = 0;
};

/// Plain L2(0,T) Tikhonov term (weight function = 1); off by default, the
/// experiments converge without it.
struct Regularization {
    double gamma_eps = 0.0;
    double gamma_tr = 0.0;
    double horizon_T = 4.0;
};

struct OptimizerSettings {
    int memory = 10;
    int max_steps = 14;       // recorded optimization steps (the loss-history horizon)
    int iters_per_step = 20;  // internal LBFGS iterations per recorded step
    double wolfe_c1 = 1e-4;
    double wolfe_c2 = 0.9;
    double grad_rel_tol = 1e-12;
    int max_linesearch = 30;
};

struct CalibrationProblem {
    const BeamAssembly* assembly = nullptr;
    SolverConfig solver;
    std::vector<Excitation> excitations;
    ObjectiveKind kind = ObjectiveKind::SingleKernel;
    double t_meas = 2.0;
    ThetaLayout layout;
    Regularization reg;
    bool parallel_excitations = false;

    int measured_steps() const;  // index of the last measured sample
    void validate() const;
};

struct ObjectiveBreakdown {
    double total = 0.0;
    std::vector<double> misfit;  // per excitation, before weighting
    double regularization = 0.0;
};

/// Forward solves for the truth kernels, truncation to [0, t_meas], seeded
/// additive white Gaussian noise with std = level * max_t |component|.
void synthesize_measurements(const SoeKernel& truth_tr, const SoeKernel& truth_eps,
                             CalibrationProblem& problem, const NoiseSpec& noise);

ObjectiveBreakdown evaluate_objective(const Vec& theta, const CalibrationProblem& problem);

struct CalibrationResult {
    Vec theta;
    SoeKernel k_tr = SoeKernel::zero();
    SoeKernel k_eps = SoeKernel::zero();
    std::vector<double> loss_history;  // per recorded step; [0] = initial loss
    int inner_iterations = 0;
    bool line_search_failed = false;
    bool converged = false;
    int wolfe_violations = 0;
    std::vector<Eigen::MatrixXd> predicted;  // per excitation, 3 x (n_steps+1) on [0, T]
    std::optional<double> l1_error_eps;      // vs supplied truth on [dt, t_meas]
    std::optional<double> l1_error_tr;
};

/// LBFGS with strong Wolfe line search; one continuous run, loss recorded every
/// iters_per_step iterations (the optimization-step granularity of the loss plots).
CalibrationResult lbfgs_minimize(const CalibrationProblem& problem, const OptimizerSettings& settings,
                                 const Vec& theta0,
                                 const SoeKernel* truth_tr = nullptr,
                                 const SoeKernel* truth_eps = nullptr);

/// Trapezoidal L1([dt, t_meas]) distance between kernels on the solver grid.
double kernel_l1_error(const SoeKernel& predicted, const std::function<double(double)>& truth,
                       double dt, double t_meas);
double kernel_l1_error(const SoeKernel& predicted, const SoeKernel& truth, double dt,
                       double t_meas);

} // namespace viscocal

#endif
