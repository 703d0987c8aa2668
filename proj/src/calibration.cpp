#include "viscocal/calibration.hpp"

#include <cmath>
#include <future>
#include <random>
#include <stdexcept>

namespace viscocal {

int CalibrationProblem::measured_steps() const {
    return int(std::lround(t_meas / solver.dt()));
}

void CalibrationProblem::validate() const {
    if (!assembly) throw std::invalid_argument("CalibrationProblem: assembly missing");
    solver.validate();
    if (excitations.empty()) throw std::invalid_argument("CalibrationProblem: no excitations");
    if (t_meas > solver.T_final + 1e-12)
        throw std::invalid_argument("CalibrationProblem: t_meas must be <= T_final");
    const int nm = measured_steps();
    for (const auto& e : excitations)
        if (e.measurements.size() > 0 && e.measurements.cols() != nm + 1)
            throw std::invalid_argument("CalibrationProblem: measurement length != measured steps");
}

void synthesize_measurements(const SoeKernel& truth_tr, const SoeKernel& truth_eps,
                             CalibrationProblem& problem, const NoiseSpec& noise) {
    if (problem.excitations.empty())
        throw std::invalid_argument("synthesize_measurements: no excitations");
    const int nm = problem.measured_steps();
    std::mt19937_64 rng(noise.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (auto& exc : problem.excitations) {
        const TrajectoryRecord traj =
            solve_forward(*problem.assembly, truth_eps, truth_tr, exc.load, problem.solver);
        exc.measurements = traj.observations.leftCols(nm + 1);
        if (noise.level > 0.0) {
            for (int c = 0; c < 3; ++c) {
                const double sigma = noise.level * traj.observations.row(c).cwiseAbs().maxCoeff();
                for (int n = 0; n <= nm; ++n) exc.measurements(c, n) += sigma * gauss(rng);
            }
        }
    }
}

namespace {

// closed-form L2(0,T) inner products of SOE modes for the Tikhonov term
double exp_pair_integral(double lam, double T) {  // int_0^T e^{-lam t} dt
    const double x = lam * T;
    if (x < 1e-6) return T * (1.0 - 0.5 * x + x * x / 6.0);
    return (1.0 - std::exp(-x)) / lam;
}

double reg_value(const SoeKernel& k, double T) {
    double acc = 0.0;
    for (std::size_t i = 0; i < k.modes(); ++i)
        for (std::size_t j = 0; j < k.modes(); ++j)
            acc += k.weights()[i] * k.weights()[j] * exp_pair_integral(k.rates()[i] + k.rates()[j], T);
    return 0.5 * acc;
}

void reg_gradient(const SoeKernel& k, double T, double gamma, Vec& d_w, Vec& d_lam) {
    const int m = int(k.modes());
    for (int i = 0; i < m; ++i) {
        double gw = 0.0, gl = 0.0;
        for (int j = 0; j < m; ++j) {
            const double lam = k.rates()[std::size_t(i)] + k.rates()[std::size_t(j)];
            const double I = exp_pair_integral(lam, T);
            gw += k.weights()[std::size_t(j)] * I;
            // d/d lam_i of I(lam_i + lam_j)
            const double x = lam * T;
            double dI;
            if (x < 1e-6)
                dI = -T * T * (0.5 - x / 3.0);
            else
                dI = (T * std::exp(-x) * lam - (1.0 - std::exp(-x))) / (lam * lam);
            gl += k.weights()[std::size_t(i)] * k.weights()[std::size_t(j)] * dI;
        }
        d_w[i] += gamma * gw;
        d_lam[i] += gamma * gl;
    }
}

struct ExcitationEval {
    double misfit = 0.0;          // unweighted misfit term
    KernelGradient grads;         // d(total objective)/d(w,lambda), weights applied
    Eigen::MatrixXd observations; // full horizon
};

ExcitationEval eval_excitation(const Vec& theta, const CalibrationProblem& problem,
                               const Excitation& exc, bool want_gradient) {
    const auto [ktr, keps] = theta_to_kernels(theta, problem.layout);
    const ViscoSystem sys = ViscoSystem::from_assembly(*problem.assembly, exc.load);
    const NewmarkSoeSolver solver(sys, keps, ktr, problem.solver);
    const TrajectoryRecord traj = solver.solve();

    const int nm = problem.measured_steps();
    const int n_steps = traj.steps();
    const double dt = problem.solver.dt();

    Eigen::MatrixXd residual = traj.observations.leftCols(nm + 1) - exc.measurements;
    const double rr = residual.squaredNorm();

    ExcitationEval out;
    out.observations = traj.observations;

    double seed_scale;  // residual_weight = seed_scale * residual on [0, nm]
    if (problem.kind == ObjectiveKind::SingleKernel) {
        out.misfit = 0.5 * dt * rr;
        seed_scale = exc.weight * dt;
    } else {
        const double mm = exc.measurements.squaredNorm();
        if (mm <= 0.0) throw std::runtime_error("evaluate_objective: zero measurement norm");
        out.misfit = 0.5 * rr / mm;
        seed_scale = exc.weight / mm;
    }

    if (want_gradient) {
        Eigen::MatrixXd rw = Eigen::MatrixXd::Zero(3, n_steps + 1);
        rw.leftCols(nm + 1) = seed_scale * residual;
        out.grads = adjoint_sweep(solver, traj, rw).grads;
    }
    return out;
}

ObjectiveBreakdown objective_impl(const Vec& theta, const CalibrationProblem& problem,
                                  Vec* grad_out, std::vector<Eigen::MatrixXd>* predicted) {
    problem.validate();
    ObjectiveBreakdown bd;
    const bool want_grad = grad_out != nullptr;

    std::vector<ExcitationEval> evals(problem.excitations.size());
    if (problem.parallel_excitations && problem.excitations.size() > 1) {
        std::vector<std::future<ExcitationEval>> futs;
        futs.reserve(problem.excitations.size());
        for (const auto& exc : problem.excitations)
            futs.push_back(std::async(std::launch::async, eval_excitation, std::cref(theta),
                                      std::cref(problem), std::cref(exc), want_grad));
        for (std::size_t i = 0; i < futs.size(); ++i) evals[i] = futs[i].get();
    } else {
        for (std::size_t i = 0; i < problem.excitations.size(); ++i)
            evals[i] = eval_excitation(theta, problem, problem.excitations[i], want_grad);
    }

    const auto [ktr, keps] = theta_to_kernels(theta, problem.layout);
    const int me = problem.layout.m_eps, mt_ = problem.layout.shared ? problem.layout.m_eps : problem.layout.m_tr;
    Vec dwe = Vec::Zero(me), dle = Vec::Zero(me), dwt = Vec::Zero(mt_), dlt = Vec::Zero(mt_);

    for (std::size_t i = 0; i < evals.size(); ++i) {
        bd.misfit.push_back(evals[i].misfit);
        bd.total += problem.excitations[i].weight * evals[i].misfit;
        if (want_grad) {
            dwe += evals[i].grads.d_w_eps;
            dle += evals[i].grads.d_lambda_eps;
            dwt += evals[i].grads.d_w_tr;
            dlt += evals[i].grads.d_lambda_tr;
        }
        if (predicted) predicted->push_back(evals[i].observations);
    }

    if (problem.reg.gamma_eps > 0.0 || problem.reg.gamma_tr > 0.0) {
        bd.regularization = problem.reg.gamma_eps * reg_value(keps, problem.reg.horizon_T) +
                            problem.reg.gamma_tr * reg_value(ktr, problem.reg.horizon_T);
        bd.total += bd.regularization;
        if (want_grad) {
            reg_gradient(keps, problem.reg.horizon_T, problem.reg.gamma_eps, dwe, dle);
            reg_gradient(ktr, problem.reg.horizon_T, problem.reg.gamma_tr, dwt, dlt);
        }
    }

    if (want_grad) {
        const ThetaLayout& L = problem.layout;
        Vec g = Vec::Zero(L.size());
        if (L.shared) {
            for (int k = 0; k < me; ++k) {
                const double s = theta[me + k];
                g[k] = dwe[k] + dwt[k];
                g[me + k] = (dle[k] + dlt[k]) * 2.0 * s;
            }
        } else {
            for (int k = 0; k < L.m_tr; ++k) {
                const double s = theta[L.m_tr + k];
                g[k] = dwt[k];
                g[L.m_tr + k] = dlt[k] * 2.0 * s;
            }
            const int off = 2 * L.m_tr;
            for (int k = 0; k < L.m_eps; ++k) {
                const double s = theta[off + L.m_eps + k];
                g[off + k] = dwe[k];
                g[off + L.m_eps + k] = dle[k] * 2.0 * s;
            }
        }
        *grad_out = g;
    }
    return bd;
}

} // namespace

ObjectiveBreakdown evaluate_objective(const Vec& theta, const CalibrationProblem& problem) {
    return objective_impl(theta, problem, nullptr, nullptr);
}

GradientReport gradient(const Vec& theta, const CalibrationProblem& problem) {
    GradientReport rep;
    Vec g;
    const ObjectiveBreakdown bd = objective_impl(theta, problem, &g, nullptr);
    rep.grad = g;
    rep.objective = bd.total;
    rep.per_excitation = bd.misfit;
    for (int i = 0; i < rep.grad.size(); ++i)
        if (!std::isfinite(rep.grad[i])) throw std::runtime_error("gradient: non-finite entry");
    return rep;
}

CalibrationResult lbfgs_minimize(const CalibrationProblem& problem, const OptimizerSettings& settings,
                                 const Vec& theta0, const SoeKernel* truth_tr,
                                 const SoeKernel* truth_eps) {
    problem.validate();
    const ObjectiveFn fg = [&](const Vec& th, Vec& grad) {
        Vec g;
        const ObjectiveBreakdown bd = objective_impl(th, problem, &g, nullptr);
        grad = g;
        return bd.total;
    };

    LbfgsOptions opts;
    opts.memory = settings.memory;
    opts.c1 = settings.wolfe_c1;
    opts.c2 = settings.wolfe_c2;
    opts.grad_rel_tol = settings.grad_rel_tol;
    opts.max_linesearch = settings.max_linesearch;
    opts.max_iters = settings.max_steps * settings.iters_per_step;

    const LbfgsResult raw = lbfgs_minimize(fg, theta0, opts);

    CalibrationResult res;
    res.theta = raw.x;
    res.inner_iterations = raw.iterations;
    res.line_search_failed = raw.line_search_failed;
    res.converged = raw.converged;
    res.wolfe_violations = raw.wolfe_violations;

    // loss per recorded optimization step (iters_per_step inner iterations each);
    // a converged run plateaus at its final value, as in the reference loss plots
    res.loss_history.push_back(raw.history.front());
    for (int s = 1; s <= settings.max_steps; ++s) {
        const std::size_t idx = std::min(std::size_t(s) * std::size_t(settings.iters_per_step),
                                         raw.history.size() - 1);
        res.loss_history.push_back(raw.history[idx]);
    }

    auto [ktr, keps] = theta_to_kernels(res.theta, problem.layout);
    res.k_tr = ktr;
    res.k_eps = keps;

    std::vector<Eigen::MatrixXd> predicted;
    objective_impl(res.theta, problem, nullptr, &predicted);
    res.predicted = std::move(predicted);

    const double dt = problem.solver.dt();
    if (truth_eps) res.l1_error_eps = kernel_l1_error(res.k_eps, *truth_eps, dt, problem.t_meas);
    if (truth_tr) res.l1_error_tr = kernel_l1_error(res.k_tr, *truth_tr, dt, problem.t_meas);
    return res;
}

double kernel_l1_error(const SoeKernel& predicted, const std::function<double(double)>& truth,
                       double dt, double t_meas) {
    const int n = int(std::lround(t_meas / dt));
    if (n < 1) throw std::invalid_argument("kernel_l1_error: empty window");
    double acc = 0.0;
    for (int i = 1; i <= n; ++i) {
        const double t = double(i) * dt;
        const double d = std::abs(predicted.evaluate(t) - truth(t));
        acc += (i == 1 || i == n) ? 0.5 * d : d;
    }
    return acc * dt;
}

double kernel_l1_error(const SoeKernel& predicted, const SoeKernel& truth, double dt,
                       double t_meas) {
    return kernel_l1_error(predicted, [&](double t) { return truth.evaluate(t); }, dt, t_meas);
}

} // namespace viscocal
