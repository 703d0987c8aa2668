#ifndef VISCOCAL_LAPLACE_HPP
#define VISCOCAL_LAPLACE_HPP

#include <complex>
#include <utility>
#include <vector>

#include "viscocal/kernels.hpp"

namespace viscocal {

/// Pole/residue (plus constant) form of a kernel's Laplace transform,
///   F(s) = c + sum_j r_j / (s - p_j).
/// Complex poles come in conjugate pairs with conjugate residues.
struct RationalLaplace {
    std::vector<std::complex<double>> poles;
    std::vector<std::complex<double>> residues;
    double constant = 0.0;

    std::complex<double> evaluate(std::complex<double> s) const;
    double evaluate_real(double s) const { return evaluate({s, 0.0}).real(); }

    static RationalLaplace from_soe(const SoeKernel& k);
};

/// Convert to an SOE kernel; requires real poles <= 0 (up to imag_tol relative
/// imaginary dust) and |constant| <= constant_tol.
SoeKernel to_soe(const RationalLaplace& rl, double constant_tol = 1e-10,
                 double imag_tol = 1e-8);

/// Barycentric rational interpolant produced by AAA.
struct BarycentricFit {
    std::vector<double> support;   // distinct support points z_j > 0
    std::vector<double> values;    // f_j = F(z_j)
    std::vector<double> weights;   // barycentric weights beta_j, not all zero
    double max_rel_error = 0.0;    // max_i |F_i - R(z_i)| / |F_i| over the sample set
    bool converged = false;        // max_rel_error <= tol at exit

    double evaluate(double z) const;
    std::complex<double> evaluate(std::complex<double> z) const;
    int degree() const { return int(support.size()) - 1; }
};

/// Greedy AAA fit on real positive samples: at each step adopt the point of
/// largest relative residual as a support point and solve the Loewner
/// least-squares problem (smallest right singular vector) for the weights.
/// Stops at max relative error <= tol or degree == max_degree.
BarycentricFit aaa_fit(const std::vector<double>& s, const std::vector<double>& F,
                       double tol, int max_degree);

/// Poles from the generalized arrow eigenproblem, residues via N(p)/D'(p),
/// constant as the z -> inf limit. Rejects poles on the positive real axis.
RationalLaplace to_pole_residue(const BarycentricFit& fit);

struct SoeFromFractionalResult {
    SoeKernel kernel = SoeKernel::zero();
    double laplace_rel_error = 0.0;   // achieved AAA error on the sample set
    double time_rel_error = 0.0;      // max relative error vs g_alpha on the validated window
    double dropped_constant = 0.0;    // |c| of the rational fit, removed in the SOE form
    bool tol_reached = false;
};

/// AAA fit of s^{-alpha} on log-spaced samples composed with pole/residue
/// extraction and SOE conversion. When the Laplace tolerance was reached the
/// result is validated against the Gamma-function oracle on
/// [1.25/s_max, 1/s_min] at 1e-3 relative (left edge guarded by the
/// resolution limit of a fit sampled up to s_max).
SoeFromFractionalResult soe_from_fractional(double alpha, double s_min = 1e-3,
                                            double s_max = 1e3, int n_samples = 400,
                                            double tol = 1e-9, int max_modes = 22);

/// Two-kernel reduction of the three-kernel constitutive relation:
///   k_eps2  = ILT[(Lk_eps - 2 mu Lk_sig) / (1 + s Lk_sig)]
///   k_tre2  = ILT[(Lk_tre - lambda Lk_sig) / (1 + s Lk_sig)]
/// by exact rational arithmetic (common denominators, shared-root deflation,
/// companion-matrix roots, residue evaluation). Errors on right-half-plane
/// poles surviving cancellation.
struct ReducedKernels {
    RationalLaplace k_eps;
    RationalLaplace k_treps;
    double min_pole_gap = 0.0;    // conditioning estimate: smallest pole separation
};
ReducedKernels reduce_kernels(const RationalLaplace& k_sigma, const RationalLaplace& k_eps,
                              const RationalLaplace& k_treps, double mu, double lambda);

/// First reduction step of Remark-style four-to-three kernel algebra:
///   k_tre1 = ILT[ ((2mu + d lam)(Lk_sig - Lk_trsig) + Lk_tre (1 + s Lk_sig)) / (d (1 + s Lk_trsig)) ].
RationalLaplace trace_kernel_one_step(const RationalLaplace& k_sigma,
                                      const RationalLaplace& k_trsigma,
                                      const RationalLaplace& k_treps, double mu,
                                      double lambda, int d = 3);

} // namespace viscocal

#endif
