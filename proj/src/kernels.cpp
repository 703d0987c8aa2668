#include "viscocal/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace viscocal {

SoeKernel::SoeKernel(std::vector<double> weights, std::vector<double> rates)
    : weights_(std::move(weights)), rates_(std::move(rates)) {
    if (weights_.empty() || weights_.size() != rates_.size())
        throw std::invalid_argument("SoeKernel: weights and rates must have equal nonzero length");
    for (double w : weights_)
        if (!std::isfinite(w)) throw std::invalid_argument("SoeKernel: non-finite weight");
    for (double l : rates_)
        if (!std::isfinite(l) || l < 0.0)
            throw std::invalid_argument("SoeKernel: rates must be finite and >= 0");
}

double SoeKernel::evaluate(double t) const {
    if (!std::isfinite(t) || t < 0.0) throw std::invalid_argument("SoeKernel::evaluate: t must be finite and >= 0");
    double acc = 0.0;
    for (std::size_t i = 0; i < weights_.size(); ++i) acc += weights_[i] * std::exp(-rates_[i] * t);
    return acc;
}

double SoeKernel::weight_sum() const {
    return std::accumulate(weights_.begin(), weights_.end(), 0.0);
}

double SoeKernel::laplace(double s) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < weights_.size(); ++i) acc += weights_[i] / (s + rates_[i]);
    return acc;
}

double SoeKernel::fourier_real(double omega) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        const double l = rates_[i];
        if (l == 0.0 && omega == 0.0) continue;  // constant mode: no absolutely continuous part
        acc += weights_[i] * l / (l * l + omega * omega);
    }
    return acc;
}

FractionalKernel::FractionalKernel(double alpha) : alpha_(alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw std::invalid_argument("FractionalKernel: alpha must lie in (0, 1]");
}

double FractionalKernel::evaluate(double t) const {
    if (t < 0.0 || !std::isfinite(t)) throw std::invalid_argument("FractionalKernel::evaluate: bad t");
    if (t == 0.0) {
        if (alpha_ < 1.0) throw std::domain_error("FractionalKernel::evaluate: singular at t = 0");
        return 1.0;
    }
    return std::pow(t, alpha_ - 1.0) / std::tgamma(alpha_);
}

double FractionalKernel::laplace(double s) const { return std::pow(s, -alpha_); }

double FractionalKernel::fourier_real(double omega) const {
    if (omega == 0.0) throw std::domain_error("FractionalKernel::fourier_real: omega = 0");
    return std::cos(alpha_ * M_PI / 2.0) * std::pow(std::abs(omega), -alpha_);
}

namespace {

SampledSignal convolve_samples(const std::vector<double>& k, const SampledSignal& f) {
    SampledSignal g;
    g.dt = f.dt;
    const std::size_t n = f.values.size();
    g.values.assign(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
        double acc = 0.5 * (k[0] * f.values[i] + k[i] * f.values[0]);
        for (std::size_t j = 1; j < i; ++j) acc += k[j] * f.values[i - j];
        g.values[i] = acc * f.dt;
    }
    return g;
}

} // namespace

SampledSignal discrete_convolve(const SampledSignal& k, const SampledSignal& f) {
    if (k.dt != f.dt) throw std::invalid_argument("discrete_convolve: mismatched dt");
    if (k.values.size() < f.values.size())
        throw std::invalid_argument("discrete_convolve: kernel samples shorter than signal");
    return convolve_samples(k.values, f);
}

SampledSignal discrete_convolve(const SoeKernel& k, const SampledSignal& f) {
    std::vector<double> ks(f.values.size());
    for (std::size_t i = 0; i < ks.size(); ++i) ks[i] = k.evaluate(double(i) * f.dt);
    return convolve_samples(ks, f);
}

ConvolutionIdentityReport verify_convolution_identities(const SoeKernel& k,
                                                        const SampledSignal& w,
                                                        const SampledSignal& q) {
    if (w.values.size() < 3) throw std::invalid_argument("verify_convolution_identities: need >= 3 samples");
    if (w.dt != q.dt || w.values.size() != q.values.size())
        throw std::invalid_argument("verify_convolution_identities: w and q must share the grid");

    const double dt = w.dt;
    const std::size_t n = w.values.size();
    ConvolutionIdentityReport rep;
    rep.dt = dt;

    // Leibniz: central difference of k*w against k*w_t + k(t) w(0), w_t by central differences.
    SampledSignal kw = discrete_convolve(k, w);
    SampledSignal wt;
    wt.dt = dt;
    wt.values.resize(n);
    wt.values[0] = (w.values[1] - w.values[0]) / dt;  // one-sided ends, unused interior-only
    wt.values[n - 1] = (w.values[n - 1] - w.values[n - 2]) / dt;
    for (std::size_t i = 1; i + 1 < n; ++i) wt.values[i] = (w.values[i + 1] - w.values[i - 1]) / (2.0 * dt);
    SampledSignal kwt = discrete_convolve(k, wt);
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double lhs = (kw.values[i + 1] - kw.values[i - 1]) / (2.0 * dt);
        const double rhs = kwt.values[i] + k.evaluate(double(i) * dt) * w.values[0];
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    rep.leibniz_residual = worst;
    rep.leibniz_constant = worst / (dt * dt);

    // Transposition: trapezoid of both sides over [0, T].
    SampledSignal kq = discrete_convolve(k, q);
    double lhs = 0.0, rhs = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double wgt = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
        lhs += wgt * kw.values[i] * q.values[n - 1 - i];
        rhs += wgt * w.values[i] * kq.values[n - 1 - i];
    }
    rep.transposition_residual = std::abs(lhs - rhs) * dt;
    rep.transposition_constant = rep.transposition_residual / (dt * dt);
    return rep;
}

// The discrete analogue evaluates the continuous inequality EXACTLY for
//   k: step function, k(t) = k_j on [t_j, t_{j+1})  (>= 0, non-increasing)
//   w: piecewise-linear interpolant of the samples
// so the lemma applies verbatim and the return is nonnegative up to rounding.
double check_alikhanov(const SampledSignal& k, const SampledSignal& w) {
    if (k.dt != w.dt || k.values.size() < w.values.size())
        throw std::invalid_argument("check_alikhanov: grids incompatible");
    const std::size_t n = w.values.size();
    if (n < 2) throw std::invalid_argument("check_alikhanov: signal too short");
    for (std::size_t i = 0; i < n; ++i) {
        if (k.values[i] < 0.0) throw std::invalid_argument("check_alikhanov: kernel must be >= 0");
        if (i > 0 && k.values[i] > k.values[i - 1] + 1e-14)
            throw std::invalid_argument("check_alikhanov: kernel must be non-increasing");
    }
    const double dt = w.dt;
    const std::size_t nc = n - 1;  // cells

    // K(r) = int_0^r k, piecewise linear with node values Kn[i].
    std::vector<double> Kn(n, 0.0);
    for (std::size_t i = 0; i < nc; ++i) Kn[i + 1] = Kn[i] + dt * k.values[i];
    auto Kat = [&](double r) {
        if (r <= 0.0) return 0.0;
        const double rmax = dt * double(nc);
        if (r >= rmax) return Kn[nc];
        const auto c = std::size_t(r / dt);
        return Kn[c] + (r - double(c) * dt) * k.values[c];
    };

    std::vector<double> slope(nc);
    for (std::size_t j = 0; j < nc; ++j) slope[j] = (w.values[j + 1] - w.values[j]) / dt;

    // (k*w')(t) = sum_j slope_j [K(t - t_j) - K(t - t_{j+1})], exact for the step kernel.
    auto conv_wt = [&](double t) {
        double acc = 0.0;
        for (std::size_t j = 0; j < nc && double(j) * dt < t; ++j)
            acc += slope[j] * (Kat(t - double(j) * dt) - Kat(t - double(j + 1) * dt));
        return acc;
    };

    // LHS: per-cell Simpson is exact (w linear, k*w' linear on each cell).
    double lhs = 0.0;
    double c_lo = 0.0;
    for (std::size_t i = 0; i < nc; ++i) {
        const double t0 = double(i) * dt;
        const double c_mid = conv_wt(t0 + 0.5 * dt);
        const double c_hi = conv_wt(t0 + dt);
        const double w_lo = w.values[i], w_hi = w.values[i + 1];
        lhs += dt / 6.0 * (w_lo * c_lo + 4.0 * 0.5 * (w_lo + w_hi) * c_mid + w_hi * c_hi);
        c_lo = c_hi;
    }

    // RHS: (k*w^2)(T) with w^2 piecewise quadratic and k constant per cell, both exact.
    double kw2 = 0.0;
    for (std::size_t j = 0; j < nc; ++j) {
        const double a = w.values[j], b = w.values[j + 1];
        kw2 += k.values[nc - 1 - j] * dt / 3.0 * (a * a + a * b + b * b);
    }
    const double int_k = Kn[nc];
    const double rhs = 0.5 * kw2 - 0.5 * int_k * w.values[0] * w.values[0];
    return lhs - rhs;
}

CoercivityReport check_fourier_coercivity(const KernelRef& k, double delta,
                                          const std::vector<double>& omega_grid) {
    if (delta <= 0.0) throw std::invalid_argument("check_fourier_coercivity: delta must be > 0");
    if (omega_grid.empty()) throw std::invalid_argument("check_fourier_coercivity: empty grid");

    CoercivityReport rep;
    rep.delta = delta;
    double gamma = std::numeric_limits<double>::infinity();
    double min_re = std::numeric_limits<double>::infinity();
    for (double om : omega_grid) {
        const double re = std::visit([&](const auto& kk) { return kk.fourier_real(om); }, k);
        min_re = std::min(min_re, re);
        gamma = std::min(gamma, re * std::pow(1.0 + om * om, delta / 2.0));
    }
    rep.gamma_lower = gamma;

    // Time-domain spot check of the quadratic form int (k*y) y dt over a few random signals.
    std::mt19937_64 rng(0x5eed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double dt = 1e-2;
    const std::size_t n = 200;
    double minq = std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < 8; ++trial) {
        SampledSignal y;
        y.dt = dt;
        y.values.resize(n);
        double smooth = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            smooth = 0.9 * smooth + 0.1 * gauss(rng);
            y.values[i] = smooth;
        }
        SampledSignal ky = std::holds_alternative<SoeKernel>(k)
                               ? discrete_convolve(std::get<SoeKernel>(k), y)
                               : discrete_convolve(SampledSignal::sample(
                                     [&](double t) {
                                         const auto& fk = std::get<FractionalKernel>(k);
                                         return fk.evaluate(std::max(t, dt));  // clip the singular sample
                                     },
                                     dt, n - 1), y);
        double q = 0.0;
        for (std::size_t i = 0; i < n; ++i) q += ky.values[i] * y.values[i];
        minq = std::min(minq, q * dt);
    }
    rep.min_quadratic_form = minq;
    rep.passed = (rep.min_quadratic_form >= -1e-10) && (rep.gamma_lower > 0.0);
    return rep;
}

} // namespace viscocal
