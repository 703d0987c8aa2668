#ifndef VISCOCAL_MODAL_HPP
#define VISCOCAL_MODAL_HPP

#include <functional>
#include <vector>

#include "viscocal/kernels.hpp"

namespace viscocal {

/// Scalar eigenmode system u'' + lambda_i u + lambda_i k * u' = ell(t) f_i, zero
/// initial data; the observable is y = B_phi u.
struct ModalSystem {
    double lambda_i = 1.0;   // > 0
    double f_i = 1.0;        // excitation amplitude
    double b_phi = 1.0;      // observation gain
    std::function<double(double)> ell;  // time profile of the load
    SoeKernel kernel = SoeKernel::zero();
};

/// Newmark + SOE integration of the mode (the 3D machinery at dimension one).
SampledSignal simulate_mode(const ModalSystem& sys, double dt, double T);

struct LaplacePoint {
    double s = 0.0;
    double value = 0.0;        // recovered Re(Lk)(s)
    double tail_bound = 0.0;   // |y(T)| e^{-sT}/s finite-horizon truncation estimate
    bool well_conditioned = true;  // |Ly(s)| above the conditioning threshold
};

/// Kernel transform recovery from one mode's observation:
///   Lk(s) = ( f B Lell(s) / Ly(s) - s^2 - lambda_i ) / (lambda_i s),
/// with Ly, Lell numerically transformed on [0, T] (trapezoid with e^{-st}).
std::vector<LaplacePoint> recover_kernel_laplace(const SampledSignal& y, const ModalSystem& sys,
                                                 const std::vector<double>& s_points,
                                                 double conditioning_threshold = 1e-12);

} // namespace viscocal

#endif
