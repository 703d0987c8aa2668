#ifndef VISCOCAL_KERNELS_HPP
#define VISCOCAL_KERNELS_HPP

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

namespace viscocal {

/// Scalar memory kernel in sum-of-exponentials form, k(t) = sum_k w_k exp(-lambda_k t).
/// Immutable after construction; this is the object the inverse problem optimizes.
class SoeKernel {
  public:
    SoeKernel(std::vector<double> weights, std::vector<double> rates);

    static SoeKernel zero() { return SoeKernel({0.0}, {0.0}); }
    static SoeKernel constant(double c) { return SoeKernel({c}, {0.0}); }

    double evaluate(double t) const;                // exact closed form, t >= 0
    double weight_sum() const;                      // k(0+)
    double laplace(double s) const;                 // sum w_k / (s + lambda_k)
    double fourier_real(double omega) const;        // Re(Fk)(w) = sum w_k l_k/(l_k^2+w^2)

    const std::vector<double>& weights() const { return weights_; }
    const std::vector<double>& rates() const { return rates_; }
    std::size_t modes() const { return weights_.size(); }

  private:
    std::vector<double> weights_;
    std::vector<double> rates_;
};

/// Abel kernel g_alpha(t) = t^{alpha-1} / Gamma(alpha), alpha in (0, 1].
/// Singular at t = 0 for alpha < 1; evaluation there is an error, sample from t >= dt.
class FractionalKernel {
  public:
    explicit FractionalKernel(double alpha);

    double evaluate(double t) const;
    double laplace(double s) const;                 // s^{-alpha}
    double fourier_real(double omega) const;        // cos(alpha pi/2) |w|^{-alpha}
    double alpha() const { return alpha_; }

  private:
    double alpha_;
};

using KernelRef = std::variant<SoeKernel, FractionalKernel>;

/// Uniformly sampled time series, values[n] ~ f(n dt).
struct SampledSignal {
    double dt = 0.0;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    double back_time() const { return dt * double(values.size() - 1); }

    template <class F>
    static SampledSignal sample(F&& f, double dt, std::size_t n) {
        SampledSignal s;
        s.dt = dt;
        s.values.resize(n + 1);
        for (std::size_t i = 0; i <= n; ++i) s.values[i] = f(double(i) * dt);
        return s;
    }
};

/// Trapezoidal discrete convolution (k*f)(n dt) on [0, n dt]; g[0] = 0.
SampledSignal discrete_convolve(const SampledSignal& k, const SampledSignal& f);
SampledSignal discrete_convolve(const SoeKernel& k, const SampledSignal& f);

/// Residuals of the Leibniz rule (k*w)_t = k*w_t + k(t) w(0) and of the transposition
/// identity int_0^T (k*w)(t) q(T-t) dt = int_0^T w(t) (k*q)(T-t) dt, both discrete.
struct ConvolutionIdentityReport {
    double leibniz_residual = 0.0;        // max pointwise residual (interior nodes)
    double transposition_residual = 0.0;  // |lhs - rhs|
    double dt = 0.0;
    double leibniz_constant = 0.0;        // residual / dt^2
    double transposition_constant = 0.0;
};
ConvolutionIdentityReport verify_convolution_identities(const SoeKernel& k,
                                                        const SampledSignal& w,
                                                        const SampledSignal& q);

/// Discrete lower-bound check of the Alikhanov-type inequality
///   int <w, k*w_t> >= 1/2 (k*||w||^2)(T) - 1/2 int k dt ||w(0)||^2
/// for sampled k >= 0 non-increasing. Returns LHS - RHS (nonnegative certifies it).
double check_alikhanov(const SampledSignal& k, const SampledSignal& w);

struct CoercivityReport {
    double min_quadratic_form = 0.0;  // smallest observed discrete int (k*y) y over trial signals
    double gamma_lower = 0.0;         // largest gamma with Re(Fk)(w) >= gamma (1+w^2)^{-delta/2} on grid
    double delta = 0.0;
    bool passed = false;              // min_quadratic_form >= -tolerance and gamma_lower > 0
};

/// Frequency-domain coercivity check (sufficient condition for the H^{-delta} bound):
/// evaluates Re(Fk) in closed form on the grid and reports the largest admissible gamma.
CoercivityReport check_fourier_coercivity(const KernelRef& k, double delta,
                                          const std::vector<double>& omega_grid);

} // namespace viscocal

#endif
