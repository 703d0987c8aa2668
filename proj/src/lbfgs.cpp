#include "viscocal/lbfgs.hpp"

#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

namespace viscocal {

using Eigen::VectorXd;

void LbfgsOptions::validate() const {
    if (!(0.0 < c1 && c1 < c2 && c2 < 1.0))
        throw std::invalid_argument("LbfgsOptions: need 0 < c1 < c2 < 1");
    if (memory < 1 || max_iters < 1 || max_linesearch < 2)
        throw std::invalid_argument("LbfgsOptions: bad sizes");
}

namespace {

struct Probe {
    double a, f, d;  // step, value, directional derivative
};

// cubic minimizer of the interpolant through (a0,f0,d0), (a1,f1,d1); safeguarded by caller
double cubic_min(const Probe& p0, const Probe& p1) {
    const double d1 = p0.d + p1.d - 3.0 * (p0.f - p1.f) / (p0.a - p1.a);
    const double disc = d1 * d1 - p0.d * p1.d;
    if (disc < 0.0) return 0.5 * (p0.a + p1.a);
    const double d2 = std::copysign(std::sqrt(disc), p1.a - p0.a);
    const double a = p1.a - (p1.a - p0.a) * (p1.d + d2 - d1) / (p1.d - p0.d + 2.0 * d2);
    return a;
}

} // namespace

LbfgsResult lbfgs_minimize(const ObjectiveFn& fg, const VectorXd& x0, const LbfgsOptions& opts,
                           const std::function<void(int, double)>& per_iteration) {
    opts.validate();
    LbfgsResult res;
    res.x = x0;
    res.grad.resize(x0.size());
    res.f = fg(res.x, res.grad);
    res.history.push_back(res.f);
    const double g0norm = res.grad.norm();

    std::deque<VectorXd> S, Y;
    std::deque<double> rho;

    VectorXd gtrial(x0.size());

    for (int it = 0; it < opts.max_iters; ++it) {
        if (res.grad.norm() <= opts.grad_rel_tol * g0norm) {
            res.converged = true;
            break;
        }

        // two-loop recursion
        VectorXd q = res.grad;
        std::vector<double> alphas(S.size());
        for (std::size_t i = S.size(); i-- > 0;) {
            alphas[i] = rho[i] * S[i].dot(q);
            q -= alphas[i] * Y[i];
        }
        if (!S.empty())
            q *= S.back().dot(Y.back()) / Y.back().squaredNorm();
        else
            q /= std::max(res.grad.norm(), 1e-300);
        for (std::size_t i = 0; i < S.size(); ++i) {
            const double b = rho[i] * Y[i].dot(q);
            q += (alphas[i] - b) * S[i];
        }
        VectorXd p = -q;
        double d0 = res.grad.dot(p);
        if (d0 >= 0.0) {  // fall back to steepest descent if curvature info is stale
            p = -res.grad / std::max(res.grad.norm(), 1e-300);
            d0 = res.grad.dot(p);
        }

        // strong Wolfe line search: bracketing then zoom with cubic interpolation
        const double f0 = res.f;
        auto phi = [&](double a, double& f, double& d) {
            f = fg(res.x + a * p, gtrial);
            d = gtrial.dot(p);
        };

        double a_accept = -1.0, f_accept = 0.0;
        VectorXd g_accept;

        Probe lo{0.0, f0, d0}, hi{0.0, 0.0, 0.0};
        bool bracketed = false;
        Probe prev = lo;
        double a = 1.0;
        int evals = 0;
        for (; evals < opts.max_linesearch; ++evals) {
            Probe cur;
            cur.a = a;
            phi(a, cur.f, cur.d);
            if (cur.f > f0 + opts.c1 * cur.a * d0 || (evals > 0 && cur.f >= prev.f)) {
                lo = prev;
                hi = cur;
                bracketed = true;
                break;
            }
            if (std::abs(cur.d) <= -opts.c2 * d0) {
                a_accept = cur.a;
                f_accept = cur.f;
                g_accept = gtrial;
                break;
            }
            if (cur.d >= 0.0) {
                lo = cur;
                hi = prev;
                bracketed = true;
                break;
            }
            prev = cur;
            a = 2.0 * a;
        }
        if (bracketed) {
            for (; evals < opts.max_linesearch; ++evals) {
                double at = cubic_min(lo, hi);
                const double lo_b = std::min(lo.a, hi.a), hi_b = std::max(lo.a, hi.a);
                const double margin = 0.1 * (hi_b - lo_b);
                if (!std::isfinite(at) || at < lo_b + margin || at > hi_b - margin)
                    at = 0.5 * (lo.a + hi.a);
                Probe cur;
                cur.a = at;
                phi(at, cur.f, cur.d);
                if (cur.f > f0 + opts.c1 * cur.a * d0 || cur.f >= lo.f) {
                    hi = cur;
                } else {
                    if (std::abs(cur.d) <= -opts.c2 * d0) {
                        a_accept = cur.a;
                        f_accept = cur.f;
                        g_accept = gtrial;
                        break;
                    }
                    if (cur.d * (hi.a - lo.a) >= 0.0) hi = lo;
                    lo = cur;
                }
                if (std::abs(hi.a - lo.a) < 1e-16 * std::max(1.0, std::abs(lo.a))) break;
            }
        }

        if (a_accept <= 0.0) {
            res.line_search_failed = true;  // best-so-far returned with the flag
            break;
        }

        // strong Wolfe certification of the accepted step
        const double dn = g_accept.dot(p);
        if (!(f_accept <= f0 + opts.c1 * a_accept * d0 + 1e-300) || !(std::abs(dn) <= -opts.c2 * d0))
            ++res.wolfe_violations;

        const VectorXd s = a_accept * p;
        const VectorXd y = g_accept - res.grad;
        const double sy = s.dot(y);
        if (sy > 1e-10 * s.norm() * y.norm()) {
            S.push_back(s);
            Y.push_back(y);
            rho.push_back(1.0 / sy);
            if (int(S.size()) > opts.memory) {
                S.pop_front();
                Y.pop_front();
                rho.pop_front();
            }
        }
        res.x += s;
        res.f = f_accept;
        res.grad = g_accept;
        res.iterations = it + 1;
        res.history.push_back(res.f);
        if (per_iteration) per_iteration(it + 1, res.f);
    }
    return res;
}

} // namespace viscocal
