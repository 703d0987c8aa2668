#include "viscocal/laplace.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace viscocal {

using cd = std::complex<double>;

std::complex<double> RationalLaplace::evaluate(std::complex<double> s) const {
    cd acc(constant, 0.0);
    for (std::size_t j = 0; j < poles.size(); ++j) acc += residues[j] / (s - poles[j]);
    return acc;
}

RationalLaplace RationalLaplace::from_soe(const SoeKernel& k) {
    RationalLaplace rl;
    for (std::size_t i = 0; i < k.modes(); ++i) {
        rl.poles.emplace_back(-k.rates()[i], 0.0);
        rl.residues.emplace_back(k.weights()[i], 0.0);
    }
    return rl;
}

SoeKernel to_soe(const RationalLaplace& rl, double constant_tol, double imag_tol) {
    if (std::abs(rl.constant) > constant_tol)
        throw std::invalid_argument("to_soe: nonzero constant term (delta component) of magnitude " +
                                    std::to_string(rl.constant));
    std::vector<double> w, lam;
    for (std::size_t j = 0; j < rl.poles.size(); ++j) {
        const cd p = rl.poles[j];
        const cd r = rl.residues[j];
        const double scale = std::max(std::abs(p.real()), 1.0);
        if (std::abs(p.imag()) > imag_tol * scale || std::abs(r.imag()) > imag_tol * std::max(std::abs(r.real()), 1.0))
            throw std::invalid_argument("to_soe: complex pole/residue pair, not representable as SOE");
        if (p.real() > imag_tol * scale)
            throw std::invalid_argument("to_soe: pole on the positive real axis (unstable kernel)");
        w.push_back(r.real());
        lam.push_back(std::max(0.0, -p.real()));
    }
    if (w.empty()) return SoeKernel::zero();
    return SoeKernel(std::move(w), std::move(lam));
}

double BarycentricFit::evaluate(double z) const { return evaluate(cd(z, 0.0)).real(); }

std::complex<double> BarycentricFit::evaluate(std::complex<double> z) const {
    cd num(0.0), den(0.0);
    for (std::size_t j = 0; j < support.size(); ++j) {
        const cd d = z - support[j];
        if (std::abs(d) < 1e-290) return cd(values[j], 0.0);  // interpolation point
        const cd c = weights[j] / d;
        num += c * values[j];
        den += c;
    }
    return num / den;
}

BarycentricFit aaa_fit(const std::vector<double>& s, const std::vector<double>& F,
                       double tol, int max_degree) {
    const std::size_t M = s.size();
    if (M != F.size() || M < 2) throw std::invalid_argument("aaa_fit: need >= 2 matching samples");
    if (tol <= 0.0) throw std::invalid_argument("aaa_fit: tol must be > 0");
    for (std::size_t i = 0; i < M; ++i) {
        if (F[i] == 0.0 || !std::isfinite(F[i]) || !std::isfinite(s[i]))
            throw std::invalid_argument("aaa_fit: samples must be finite with nonzero values");
        for (std::size_t j = i + 1; j < M; ++j)
            if (s[i] == s[j]) throw std::invalid_argument("aaa_fit: duplicate sample points");
    }

    const int max_support = std::min<int>(max_degree + 1, int(M) - 1);
    std::vector<bool> is_support(M, false);
    BarycentricFit fit;
    std::vector<double> R(M, std::accumulate(F.begin(), F.end(), 0.0) / double(M));

    for (int m = 1; m <= max_support; ++m) {
        // adopt the worst point (relative residual)
        int jworst = -1;
        double worst = -1.0;
        for (std::size_t i = 0; i < M; ++i) {
            if (is_support[i]) continue;
            const double r = std::abs(F[i] - R[i]) / std::abs(F[i]);
            if (r > worst) { worst = r; jworst = int(i); }
        }
        is_support[std::size_t(jworst)] = true;
        fit.support.push_back(s[std::size_t(jworst)]);
        fit.values.push_back(F[std::size_t(jworst)]);

        // Loewner least squares over non-support rows, rows scaled by 1/|F_i|
        std::vector<std::size_t> rows;
        for (std::size_t i = 0; i < M; ++i)
            if (!is_support[i]) rows.push_back(i);
        Eigen::MatrixXd A(rows.size(), std::size_t(m));
        for (std::size_t r = 0; r < rows.size(); ++r) {
            const std::size_t i = rows[r];
            for (int j = 0; j < m; ++j)
                A(r, j) = (F[i] - fit.values[std::size_t(j)]) /
                          ((s[i] - fit.support[std::size_t(j)]) * std::abs(F[i]));
        }
        Eigen::BDCSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinV);
        if (svd.info() != Eigen::Success) throw std::runtime_error("aaa_fit: SVD failed");
        Eigen::VectorXd wv = svd.matrixV().col(m - 1);
        fit.weights.assign(wv.data(), wv.data() + m);

        // update R and the error
        double err = 0.0;
        for (std::size_t i = 0; i < M; ++i) {
            if (is_support[i]) { R[i] = F[i]; continue; }
            cd num(0.0), den(0.0);
            for (int j = 0; j < m; ++j) {
                const double c = fit.weights[std::size_t(j)] / (s[i] - fit.support[std::size_t(j)]);
                num += c * fit.values[std::size_t(j)];
                den += c;
            }
            R[i] = (num / den).real();
            err = std::max(err, std::abs(F[i] - R[i]) / std::abs(F[i]));
        }
        fit.max_rel_error = err;
        if (err <= tol) { fit.converged = true; break; }
    }
    double wnorm = 0.0;
    for (double w : fit.weights) wnorm += w * w;
    if (wnorm == 0.0) throw std::runtime_error("aaa_fit: degenerate weight vector");
    return fit;
}

RationalLaplace to_pole_residue(const BarycentricFit& fit) {
    const int m = int(fit.support.size());
    if (m < 1 || fit.weights.size() != std::size_t(m)) throw std::invalid_argument("to_pole_residue: invalid fit");
    RationalLaplace rl;
    double wsum = 0.0, wfsum = 0.0;
    for (int j = 0; j < m; ++j) {
        wsum += fit.weights[std::size_t(j)];
        wfsum += fit.weights[std::size_t(j)] * fit.values[std::size_t(j)];
    }
    if (m == 1) {  // degree-0 fit: a constant
        rl.constant = fit.values[0];
        return rl;
    }

    // Poles: finite generalized eigenvalues of the (m+1)x(m+1) arrow pencil.
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m + 1, m + 1);
    Eigen::MatrixXd B = Eigen::MatrixXd::Identity(m + 1, m + 1);
    B(0, 0) = 0.0;
    for (int j = 0; j < m; ++j) {
        A(0, j + 1) = fit.weights[std::size_t(j)];
        A(j + 1, 0) = 1.0;
        A(j + 1, j + 1) = fit.support[std::size_t(j)];
    }
    Eigen::GeneralizedEigenSolver<Eigen::MatrixXd> ges;
    ges.compute(A, B, false);
    if (ges.info() != Eigen::Success) throw std::runtime_error("to_pole_residue: QZ iteration failed");

    double s_scale = 0.0;
    for (double z : fit.support) s_scale = std::max(s_scale, std::abs(z));

    std::vector<cd> poles;
    for (int i = 0; i < m + 1; ++i) {
        const double beta = ges.betas()(i);
        if (std::abs(beta) < 1e-13) continue;  // eigenvalue at infinity
        cd p = cd(ges.alphas()(i)) / beta;
        if (std::abs(p) > 1e13 * s_scale) continue;
        // Newton polish on D(z) = sum beta_j/(z - z_j); QZ gives ~1e-9 relative,
        // two steps restore the poles (and hence residues) to machine accuracy
        for (int polish = 0; polish < 3; ++polish) {
            cd D(0.0), Dp(0.0);
            for (int j = 0; j < m; ++j) {
                const cd d = p - fit.support[std::size_t(j)];
                if (std::abs(d) < 1e-300) break;
                D += fit.weights[std::size_t(j)] / d;
                Dp -= fit.weights[std::size_t(j)] / (d * d);
            }
            if (std::abs(Dp) < 1e-300) break;
            const cd delta = D / Dp;
            p -= delta;
            if (std::abs(delta) < 1e-15 * std::abs(p)) break;
        }
        poles.push_back(p);
    }

    // Residues via N(p)/D'(p) of the barycentric form.
    std::vector<cd> residues;
    std::vector<cd> kept;
    double rmax = 0.0;
    for (const cd& p : poles) {
        cd N(0.0), Dp(0.0);
        for (int j = 0; j < m; ++j) {
            const cd d = p - fit.support[std::size_t(j)];
            N += fit.weights[std::size_t(j)] * fit.values[std::size_t(j)] / d;
            Dp -= fit.weights[std::size_t(j)] / (d * d);
        }
        const cd r = N / Dp;
        kept.push_back(p);
        residues.push_back(r);
        rmax = std::max(rmax, std::abs(r));
    }
    // drop Froissart doublets (spurious poles with negligible residues)
    for (std::size_t j = 0; j < kept.size(); ++j) {
        if (std::abs(residues[j]) <= 1e-12 * rmax) continue;
        if (kept[j].real() > 1e-8 * std::max(1.0, s_scale) && std::abs(kept[j].imag()) < 1e-8 * s_scale)
            throw std::runtime_error("to_pole_residue: pole on the positive real axis (unstable kernel)");
        rl.poles.push_back(kept[j]);
        rl.residues.push_back(residues[j]);
    }
    rl.constant = std::abs(wsum) > 1e-13 * std::sqrt(double(m)) ? wfsum / wsum : 0.0;
    if (std::abs(wsum) <= 1e-13 * std::sqrt(double(m))) {
        // w-sum cancellation: recover the limit from a far-field evaluation
        const double zfar = 1e8 * std::max(1.0, s_scale);
        rl.constant = (fit.evaluate(cd(zfar, 0.0)) - rl.evaluate(cd(zfar, 0.0))).real() + rl.constant;
    }
    return rl;
}

SoeFromFractionalResult soe_from_fractional(double alpha, double s_min, double s_max,
                                            int n_samples, double tol, int max_modes) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("soe_from_fractional: alpha in (0,1]");
    if (!(s_min > 0.0 && s_max > s_min)) throw std::invalid_argument("soe_from_fractional: bad s range");

    std::vector<double> s(static_cast<std::size_t>(n_samples)), F(static_cast<std::size_t>(n_samples));
    const double lmin = std::log10(s_min), lmax = std::log10(s_max);
    for (int i = 0; i < n_samples; ++i) {
        s[std::size_t(i)] = std::pow(10.0, lmin + (lmax - lmin) * double(i) / double(n_samples - 1));
        F[std::size_t(i)] = std::pow(s[std::size_t(i)], -alpha);
    }
    BarycentricFit fit = aaa_fit(s, F, tol, max_modes);
    RationalLaplace rl = to_pole_residue(fit);

    SoeFromFractionalResult out;
    out.laplace_rel_error = fit.max_rel_error;
    out.tol_reached = fit.converged;
    out.dropped_constant = rl.constant;
    rl.constant = 0.0;  // delta component of the type-(m,m) fit, not part of the kernel
    out.kernel = to_soe(rl);

    const FractionalKernel oracle(alpha);
    // left edge guarded: the resolvable times of a fit sampled up to s_max start
    // a small factor above 1/s_max (the equioscillation band of the rational error)
    const double t_lo = 2.5 / s_max, t_hi = 1.0 / s_min;
    double worst = 0.0;
    const int nt = 600;
    for (int i = 0; i < nt; ++i) {
        const double t = std::pow(10.0, std::log10(t_lo) + (std::log10(t_hi) - std::log10(t_lo)) * double(i) / double(nt - 1));
        const double truth = oracle.evaluate(t);
        worst = std::max(worst, std::abs(out.kernel.evaluate(t) - truth) / std::abs(truth));
    }
    out.time_rel_error = worst;
    if (out.tol_reached && worst > 1e-3)
        throw std::runtime_error("soe_from_fractional: time-domain validation failed, rel error " +
                                 std::to_string(worst));
    return out;
}

// ---------------------------------------------------------------------------
// rational arithmetic for the kernel reductions
// ---------------------------------------------------------------------------
namespace {

using Poly = std::vector<cd>;  // ascending coefficients

Poly poly_mul(const Poly& a, const Poly& b) {
    Poly c(a.size() + b.size() - 1, cd(0.0));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
    return c;
}

Poly poly_add(const Poly& a, const Poly& b) {
    Poly c(std::max(a.size(), b.size()), cd(0.0));
    for (std::size_t i = 0; i < a.size(); ++i) c[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) c[i] += b[i];
    return c;
}

Poly poly_scale(Poly a, cd f) {
    for (auto& c : a) c *= f;
    return a;
}

Poly poly_shift_mul_s(const Poly& a) {  // multiply by s
    Poly c(a.size() + 1, cd(0.0));
    for (std::size_t i = 0; i < a.size(); ++i) c[i + 1] = a[i];
    return c;
}

cd poly_eval(const Poly& a, cd s) {
    cd acc(0.0);
    for (std::size_t i = a.size(); i-- > 0;) acc = acc * s + a[i];
    return acc;
}

double poly_eval_scale(const Poly& a, cd s) {  // sum |c_k| |s|^k, for relative tests
    double acc = 0.0;
    const double as = std::abs(s);
    double pw = 1.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc += std::abs(a[i]) * pw;
        pw *= as;
    }
    return acc;
}

Poly poly_deriv(const Poly& a) {
    if (a.size() <= 1) return {cd(0.0)};
    Poly d(a.size() - 1);
    for (std::size_t i = 1; i < a.size(); ++i) d[i - 1] = double(i) * a[i];
    return d;
}

void poly_trim(Poly& a, double rel = 1e-13) {
    double scale = 0.0;
    for (const cd& c : a) scale = std::max(scale, std::abs(c));
    while (a.size() > 1 && std::abs(a.back()) <= rel * scale) a.pop_back();
}

Poly poly_deflate(const Poly& a, cd root) {  // divide by (s - root), remainder discarded
    Poly q(a.size() - 1);
    cd carry = a.back();
    for (std::size_t i = a.size() - 1; i-- > 0;) {
        q[i] = carry;
        carry = a[i] + carry * root;
    }
    return q;
}

std::vector<cd> poly_roots(Poly a) {
    poly_trim(a);
    const std::size_t n = a.size() - 1;
    if (n == 0) return {};
    if (n > 64) throw std::runtime_error("poly_roots: degree cap (64) exceeded");
    // real companion matrix (imaginary dust discarded after a sanity check)
    double imax = 0.0, rmax = 0.0;
    for (const cd& c : a) {
        imax = std::max(imax, std::abs(c.imag()));
        rmax = std::max(rmax, std::abs(c.real()));
    }
    if (imax > 1e-9 * std::max(rmax, 1e-300))
        throw std::runtime_error("poly_roots: polynomial is not numerically real");
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(long(n), long(n));
    for (std::size_t i = 0; i + 1 < n; ++i) C(long(i) + 1, long(i)) = 1.0;
    for (std::size_t i = 0; i < n; ++i) C(long(i), long(n) - 1) = -(a[i] / a[n]).real();
    Eigen::EigenSolver<Eigen::MatrixXd> es(C, false);
    if (es.info() != Eigen::Success) throw std::runtime_error("poly_roots: eigensolver failed");
    std::vector<cd> roots(n);
    for (std::size_t i = 0; i < n; ++i) roots[i] = es.eigenvalues()(long(i));
    return roots;
}

std::pair<Poly, Poly> to_num_den(const RationalLaplace& rl) {
    Poly den{cd(1.0)};
    for (const cd& p : rl.poles) den = poly_mul(den, Poly{-p, cd(1.0)});
    Poly num = poly_scale(den, cd(rl.constant));
    for (std::size_t j = 0; j < rl.poles.size(); ++j) {
        Poly term{cd(1.0)};
        for (std::size_t i = 0; i < rl.poles.size(); ++i)
            if (i != j) term = poly_mul(term, Poly{-rl.poles[i], cd(1.0)});
        num = poly_add(num, poly_scale(term, rl.residues[j]));
    }
    poly_trim(num);
    poly_trim(den);
    return {num, den};
}

/// num/den -> pole/residue form with shared-root deflation and RHP rejection.
RationalLaplace rational_to_pole_residue(Poly num, Poly den, double* min_gap_out) {
    poly_trim(num);
    poly_trim(den);
    std::vector<cd> droots = poly_roots(den);

    // deflate roots shared with the numerator (numerical GCD by root matching)
    double pole_scale = 1.0;
    for (const cd& p : droots) pole_scale = std::max(pole_scale, std::abs(p));
    std::vector<cd> remaining;
    for (const cd& p : droots) {
        const double nval = std::abs(poly_eval(num, p));
        const double nscale = poly_eval_scale(num, p);
        if (num.size() > 1 && nval <= 1e-9 * nscale) {
            num = poly_deflate(num, p);
            continue;
        }
        remaining.push_back(p);
    }
    Poly den_red{cd(1.0)};
    for (const cd& p : remaining) den_red = poly_mul(den_red, Poly{-p, cd(1.0)});
    // strip leading coefficient of the original den into the numerator
    num = poly_scale(num, cd(1.0) / den.back());
    poly_trim(num);

    RationalLaplace out;
    if (num.size() >= den_red.size() && remaining.empty()) {
        if (num.size() > 1) throw std::runtime_error("rational_to_pole_residue: improper rational function");
        out.constant = num[0].real();
        return out;
    }
    if (num.size() >= den_red.size() + 1)
        throw std::runtime_error("rational_to_pole_residue: improper rational function");
    if (num.size() == den_red.size()) {
        const cd c = num.back() / den_red.back();
        out.constant = c.real();
        for (std::size_t i = 0; i < num.size(); ++i) num[i] -= c * den_red[i];
        poly_trim(num);
    }

    double min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < remaining.size(); ++i)
        for (std::size_t j = i + 1; j < remaining.size(); ++j)
            min_gap = std::min(min_gap, std::abs(remaining[i] - remaining[j]));
    if (min_gap_out) *min_gap_out = remaining.size() > 1 ? min_gap : pole_scale;
    if (remaining.size() > 1 && min_gap < 1e-10 * pole_scale)
        throw std::runtime_error("rational_to_pole_residue: near-coincident poles, residues ill-conditioned (gap " +
                                 std::to_string(min_gap) + ")");

    Poly dprime = poly_deriv(den_red);
    for (const cd& p : remaining) {
        if (p.real() > 1e-9 * pole_scale)
            throw std::runtime_error("rational_to_pole_residue: right-half-plane pole in the result");
        out.poles.push_back(p);
        out.residues.push_back(poly_eval(num, p) / poly_eval(dprime, p));
    }
    return out;
}

} // namespace

ReducedKernels reduce_kernels(const RationalLaplace& k_sigma, const RationalLaplace& k_eps,
                              const RationalLaplace& k_treps, double mu, double lambda) {
    auto [Sn, Sd] = to_num_den(k_sigma);
    auto [En, Ed] = to_num_den(k_eps);
    auto [Tn, Td] = to_num_den(k_treps);

    // 1 + s S: denominator factor shared by both reductions
    const Poly one_plus_sS = poly_add(Sd, poly_shift_mul_s(Sn));

    ReducedKernels out;
    double gap_e = 0.0, gap_t = 0.0;

    // k_eps2 = (En Sd - 2 mu Sn Ed) / (Ed (Sd + s Sn))
    {
        Poly num = poly_add(poly_mul(En, Sd), poly_scale(poly_mul(Sn, Ed), cd(-2.0 * mu)));
        Poly den = poly_mul(Ed, one_plus_sS);
        out.k_eps = rational_to_pole_residue(std::move(num), std::move(den), &gap_e);
    }
    // k_tre2 = (Tn Sd - lambda Sn Td) / (Td (Sd + s Sn))
    {
        Poly num = poly_add(poly_mul(Tn, Sd), poly_scale(poly_mul(Sn, Td), cd(-lambda)));
        Poly den = poly_mul(Td, one_plus_sS);
        out.k_treps = rational_to_pole_residue(std::move(num), std::move(den), &gap_t);
    }
    out.min_pole_gap = std::min(gap_e, gap_t);
    return out;
}

RationalLaplace trace_kernel_one_step(const RationalLaplace& k_sigma,
                                      const RationalLaplace& k_trsigma,
                                      const RationalLaplace& k_treps, double mu,
                                      double lambda, int d) {
    auto [Sn, Sd] = to_num_den(k_sigma);
    auto [Tn, Td] = to_num_den(k_trsigma);
    auto [Rn, Rd] = to_num_den(k_treps);

    // ((2mu + d lam)(S - T) + R (1 + s S)) / (d (1 + s T)) over common denominators
    const cd m2dl(2.0 * mu + double(d) * lambda);
    Poly num = poly_scale(poly_mul(poly_add(poly_mul(Sn, Td), poly_scale(poly_mul(Tn, Sd), cd(-1.0))), Rd), m2dl);
    num = poly_add(num, poly_mul(poly_mul(Rn, Td), poly_add(Sd, poly_shift_mul_s(Sn))));
    Poly den = poly_scale(poly_mul(poly_mul(Sd, Rd), poly_add(Td, poly_shift_mul_s(Tn))), cd(double(d)));
    return rational_to_pole_residue(std::move(num), std::move(den), nullptr);
}

} // namespace viscocal
