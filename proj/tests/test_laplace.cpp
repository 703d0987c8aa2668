#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "viscocal/laplace.hpp"

using namespace viscocal;

namespace {

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        g[std::size_t(i)] = std::pow(10.0, std::log10(lo) + (std::log10(hi) - std::log10(lo)) * i / double(n - 1));
    return g;
}

SoeKernel random_positive_soe(std::mt19937_64& rng, int m, double wmax = 1.0, double lmax = 5.0) {
    std::uniform_real_distribution<double> uni(0.05, 1.0);
    std::vector<double> w(static_cast<std::size_t>(m)), lam(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        w[std::size_t(i)] = wmax * uni(rng);
        lam[std::size_t(i)] = lmax * uni(rng);
    }
    return SoeKernel(w, lam);
}

} // namespace

TEST_CASE("aaa_fit basics") {
    SUBCASE("a degree-1 rational is recovered exactly with 2 support points") {
        const auto s = log_grid(1e-3, 1e3, 100);
        std::vector<double> F(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) F[i] = 1.0 / (s[i] + 1.0);
        const auto fit = aaa_fit(s, F, 1e-12, 22);
        CHECK(fit.support.size() == 2);
        CHECK(fit.max_rel_error < 1e-13);
        CHECK(fit.converged);
    }
    SUBCASE("constant function gives a degree-0 fit with zero error") {
        const auto s = log_grid(1e-2, 1e2, 50);
        std::vector<double> F(s.size(), 3.5);
        const auto fit = aaa_fit(s, F, 1e-12, 10);
        CHECK(fit.degree() == 0);
        CHECK(fit.max_rel_error <= 1e-14);
        const auto rl = to_pole_residue(fit);
        CHECK(rl.poles.empty());
        CHECK(rl.constant == doctest::Approx(3.5));
    }
    SUBCASE("s^{-0.7} to 1e-9 within 22 support points") {
        const auto s = log_grid(1e-3, 1e3, 400);
        std::vector<double> F(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) F[i] = std::pow(s[i], -0.7);
        const auto fit = aaa_fit(s, F, 1e-9, 22);
        CHECK(fit.converged);
        CHECK(fit.max_rel_error <= 1e-9);
        CHECK(fit.support.size() <= 23);
    }
    SUBCASE("degenerate samples are rejected") {
        CHECK_THROWS(aaa_fit({1.0, 1.0}, {1.0, 2.0}, 1e-9, 5));
        CHECK_THROWS(aaa_fit({1.0, 2.0}, {1.0, 0.0}, 1e-9, 5));
        CHECK_THROWS(aaa_fit({1.0}, {1.0}, 1e-9, 5));
    }
}

TEST_CASE("to_pole_residue") {
    SUBCASE("1/(s+1)") {
        const auto s = log_grid(1e-3, 1e3, 100);
        std::vector<double> F(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) F[i] = 1.0 / (s[i] + 1.0);
        const auto rl = to_pole_residue(aaa_fit(s, F, 1e-12, 22));
        REQUIRE(rl.poles.size() == 1);
        CHECK(std::abs(rl.poles[0] - std::complex<double>(-1.0, 0.0)) < 1e-12);
        CHECK(std::abs(rl.residues[0] - std::complex<double>(1.0, 0.0)) < 1e-12);
        CHECK(std::abs(rl.constant) < 1e-12);
    }
    SUBCASE("(s+2)/(s+1): constant 1, pole -1, residue 1") {
        const auto s = log_grid(1e-3, 1e3, 120);
        std::vector<double> F(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) F[i] = (s[i] + 2.0) / (s[i] + 1.0);
        const auto rl = to_pole_residue(aaa_fit(s, F, 1e-12, 22));
        REQUIRE(rl.poles.size() == 1);
        CHECK(std::abs(rl.constant - 1.0) < 1e-10);
        CHECK(std::abs(rl.poles[0] - std::complex<double>(-1.0, 0.0)) < 1e-10);
        CHECK(std::abs(rl.residues[0] - std::complex<double>(1.0, 0.0)) < 1e-10);
    }
    SUBCASE("s^{-0.7} poles are real negative with positive residues") {
        const auto s = log_grid(1e-3, 1e3, 400);
        std::vector<double> F(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) F[i] = std::pow(s[i], -0.7);
        const auto fit = aaa_fit(s, F, 1e-12, 22);
        const auto rl = to_pole_residue(fit);
        CHECK(rl.poles.size() >= 20);
        for (std::size_t j = 0; j < rl.poles.size(); ++j) {
            CHECK(rl.poles[j].real() < 0.0);
            CHECK(std::abs(rl.poles[j].imag()) < 1e-10 * std::abs(rl.poles[j].real()));
            CHECK(rl.residues[j].real() > 0.0);
        }
        // round trip: pole/residue form reproduces the barycentric fit on the samples
        double worst = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            const double ref = fit.evaluate(s[i]);
            worst = std::max(worst, std::abs(rl.evaluate_real(s[i]) - ref) / std::abs(ref));
        }
        CHECK(worst < 10.0 * std::max(fit.max_rel_error, 1e-12));
    }
    SUBCASE("a positive-axis pole is rejected") {
        // F(s) = 1/(2 - s) has a pole at +2 inside the sampled band
        const auto s = log_grid(1e-2, 1.0, 60);
        std::vector<double> F(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) F[i] = 1.0 / (2.0 - s[i]);
        CHECK_THROWS(to_pole_residue(aaa_fit(s, F, 1e-12, 10)));
    }
}

TEST_CASE("soe_from_fractional") {
    SUBCASE("alpha = 1 is the constant kernel") {
        const auto r = soe_from_fractional(1.0, 1e-3, 1e3, 100, 1e-12, 8);
        for (double t : {0.0, 0.5, 2.0, 10.0})
            CHECK(r.kernel.evaluate(t) == doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("alpha = 0.7 with 22 modes: 1e-4 on [1e-2, 4]") {
        const auto r = soe_from_fractional(0.7, 1e-3, 1e3, 400, 1e-12, 22);
        CHECK(r.kernel.modes() >= 20);
        const FractionalKernel g(0.7);
        double worst = 0.0;
        for (double t = 1e-2; t <= 4.0; t += 1e-3)
            worst = std::max(worst, std::abs(r.kernel.evaluate(t) - g.evaluate(t)) / g.evaluate(t));
        CHECK(worst < 1e-4);
        CHECK(r.time_rel_error < 1e-3);  // validated window [1.25/s_max, 1/s_min]
    }
    SUBCASE("alpha = 0.5 with 8 modes: moderate accuracy initial guess") {
        const auto r = soe_from_fractional(0.5, 1e-1, 1e2, 400, 1e-12, 8);
        const FractionalKernel g(0.5);
        double worst = 0.0;
        for (int i = 1; i <= 100; ++i) {
            const double t = 0.04 * i;
            worst = std::max(worst, std::abs(r.kernel.evaluate(t) - g.evaluate(t)) / g.evaluate(t));
        }
        CHECK(worst < 1e-2);
    }
    SUBCASE("error decreases with the mode budget (alpha = 0.7)") {
        const FractionalKernel g(0.7);
        double prev = std::numeric_limits<double>::infinity();
        for (int modes : {4, 8, 16, 22}) {
            const auto r = soe_from_fractional(0.7, 1e-3, 1e3, 400, 1e-14, modes);
            double worst = 0.0;
            for (double t = 0.04; t <= 4.0; t += 4e-3)
                worst = std::max(worst, std::abs(r.kernel.evaluate(t) - g.evaluate(t)) / g.evaluate(t));
            CHECK(worst <= prev * 1.1);  // monotone within 10%
            prev = worst;
        }
    }
}

TEST_CASE("reduce_kernels") {
    const double mu = 384.6153846153846, lambda = 576.9230769230769;
    SUBCASE("zero stress kernel leaves the pair unchanged") {
        const auto keps = RationalLaplace::from_soe(SoeKernel({2.0, 0.5}, {1.0, 3.0}));
        const auto ktre = RationalLaplace::from_soe(SoeKernel({1.5}, {2.0}));
        const auto red = reduce_kernels(RationalLaplace::from_soe(SoeKernel::zero()), keps, ktre, mu, lambda);
        for (double s : {0.1, 1.0, 7.0, 40.0}) {
            CHECK(red.k_eps.evaluate_real(s) == doctest::Approx(keps.evaluate_real(s)).epsilon(1e-10));
            CHECK(red.k_treps.evaluate_real(s) == doctest::Approx(ktre.evaluate_real(s)).epsilon(1e-10));
        }
    }
    SUBCASE("proportional kernels cancel exactly") {
        const SoeKernel base({0.8, 0.2}, {0.7, 4.0});
        std::vector<double> weps(base.weights()), wtre(base.weights());
        for (auto& w : weps) w *= 2.0 * mu;
        for (auto& w : wtre) w *= lambda;
        const auto red = reduce_kernels(RationalLaplace::from_soe(base),
                                        RationalLaplace::from_soe(SoeKernel(weps, base.rates())),
                                        RationalLaplace::from_soe(SoeKernel(wtre, base.rates())), mu, lambda);
        for (double s : {0.3, 1.0, 12.0})
            CHECK(std::abs(red.k_eps.evaluate_real(s)) +
                      std::abs(red.k_treps.evaluate_real(s)) < 1e-8);
    }
    SUBCASE("defining identity at random points (exponential kernels)") {
        const auto ks = RationalLaplace::from_soe(SoeKernel({1.0}, {1.0}));   // e^{-t}
        const auto ke = RationalLaplace::from_soe(SoeKernel({2.0}, {2.0}));   // 2 e^{-2t}
        const auto kt = RationalLaplace::from_soe(SoeKernel({0.4}, {3.0}));
        const auto red = reduce_kernels(ks, ke, kt, 1.0, 0.5);
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> uni(0.05, 50.0);
        for (int i = 0; i < 20; ++i) {
            const double s = uni(rng);
            const double S = ks.evaluate_real(s);
            const double lhs_e = red.k_eps.evaluate_real(s) * (1.0 + s * S);
            const double rhs_e = ke.evaluate_real(s) - 2.0 * 1.0 * S;
            CHECK(std::abs(lhs_e - rhs_e) < 1e-10 * std::max(1.0, std::abs(rhs_e)));
            const double lhs_t = red.k_treps.evaluate_real(s) * (1.0 + s * S);
            const double rhs_t = kt.evaluate_real(s) - 0.5 * S;
            CHECK(std::abs(lhs_t - rhs_t) < 1e-10 * std::max(1.0, std::abs(rhs_t)));
        }
    }
    SUBCASE("defining identity for 10 random SOE triples") {
        std::mt19937_64 rng(42);
        std::uniform_real_distribution<double> uni(1e-2, 1e2);
        for (int trial = 0; trial < 10; ++trial) {
            const auto ksig = random_positive_soe(rng, 3, 0.5, 4.0);
            const auto keps = random_positive_soe(rng, 3, 2.0, 6.0);
            const auto ktre = random_positive_soe(rng, 2, 1.0, 6.0);
            const auto red = reduce_kernels(RationalLaplace::from_soe(ksig), RationalLaplace::from_soe(keps),
                                            RationalLaplace::from_soe(ktre), mu, lambda);
            for (int i = 0; i < 100; ++i) {
                const double s = uni(rng);
                const double S = ksig.laplace(s);
                const double lhs = red.k_eps.evaluate_real(s) * (1.0 + s * S);
                const double rhs = keps.laplace(s) - 2.0 * mu * S;
                CHECK(std::abs(lhs - rhs) <= 1e-8 * std::max(1.0, std::abs(rhs)));
                const double lhs_t = red.k_treps.evaluate_real(s) * (1.0 + s * S);
                const double rhs_t = ktre.laplace(s) - lambda * S;
                CHECK(std::abs(lhs_t - rhs_t) <= 1e-8 * std::max(1.0, std::abs(rhs_t)));
            }
        }
    }
    SUBCASE("a right-half-plane zero of 1 + s L k_sigma is rejected") {
        // ksig = -2 e^{-t}: 1 + s(-2/(s+1)) = (1 - s)/(s + 1) vanishes at s = 1
        const auto ksig = RationalLaplace::from_soe(SoeKernel({-2.0}, {1.0}));
        const auto ke = RationalLaplace::from_soe(SoeKernel({1.0}, {2.0}));
        CHECK_THROWS(reduce_kernels(ksig, ke, ke, 1.0, 1.0));
    }
}

TEST_CASE("trace_kernel_one_step identity") {
    const double mu = 2.0, lambda = 1.5;
    const int d = 3;
    const auto ks = RationalLaplace::from_soe(SoeKernel({0.6}, {1.2}));
    const auto kts = RationalLaplace::from_soe(SoeKernel({0.3, 0.2}, {0.8, 5.0}));
    const auto ktr = RationalLaplace::from_soe(SoeKernel({1.1}, {2.5}));
    const auto k1 = trace_kernel_one_step(ks, kts, ktr, mu, lambda, d);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> uni(0.05, 30.0);
    for (int i = 0; i < 50; ++i) {
        const double s = uni(rng);
        const double lhs = k1.evaluate_real(s) * double(d) * (1.0 + s * kts.evaluate_real(s));
        const double rhs = (2.0 * mu + d * lambda) * (ks.evaluate_real(s) - kts.evaluate_real(s)) +
                           ktr.evaluate_real(s) * (1.0 + s * ks.evaluate_real(s));
        CHECK(std::abs(lhs - rhs) <= 1e-9 * std::max(1.0, std::abs(rhs)));
    }
}

TEST_CASE("scalar Model-1 trajectory matches its two-kernel reduction") {
    // u'' + (ksig*u'')' + c0 u + (keps + ktre)*u' = f + (ksig*f)'  versus the
    // reduced u'' + c0 u + (keps2 + ktre2)*u' = f with c0 = 2 mu + lambda.
    const double mu = 1.3, lambda = 0.9;
    const double c0 = 2.0 * mu + lambda;
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 3; ++trial) {
        const auto ksig = random_positive_soe(rng, 2, 0.4, 3.0);
        const auto keps = random_positive_soe(rng, 2, 1.5, 5.0);
        const auto ktre = random_positive_soe(rng, 2, 0.8, 5.0);
        const auto red = reduce_kernels(RationalLaplace::from_soe(ksig), RationalLaplace::from_soe(keps),
                                        RationalLaplace::from_soe(ktre), mu, lambda);
        const auto keps2 = to_soe(red.k_eps, 1e-8);
        const auto ktre2 = to_soe(red.k_treps, 1e-8);

        auto force = [](double t) { return std::sin(3.0 * t) * std::exp(-0.2 * t); };
        oracles::ScalarModel1 m1;
        std::vector<double> wv(keps.weights()), lv(keps.rates());
        wv.insert(wv.end(), ktre.weights().begin(), ktre.weights().end());
        lv.insert(lv.end(), ktre.rates().begin(), ktre.rates().end());
        m1.ksig = ksig;
        m1.kvisc = SoeKernel(wv, lv);
        m1.c0 = c0;
        m1.force = force;

        oracles::ScalarModel2 m2;
        std::vector<double> w2(keps2.weights()), l2(keps2.rates());
        w2.insert(w2.end(), ktre2.weights().begin(), ktre2.weights().end());
        l2.insert(l2.end(), ktre2.rates().begin(), ktre2.rates().end());
        m2.kvisc = SoeKernel(w2, l2);
        m2.c0 = c0;
        m2.force = force;

        const double dt = 1e-3;
        const int n = 4000;
        const auto u1 = m1.simulate(dt, n);
        const auto u2 = m2.simulate(dt, n);
        double scale = 0.0, diff = 0.0;
        for (int i = 0; i <= n; ++i) {
            scale = std::max(scale, std::abs(u1[std::size_t(i)]));
            diff = std::max(diff, std::abs(u1[std::size_t(i)] - u2[std::size_t(i)]));
        }
        CHECK(diff / scale < 1e-4);
    }
}
