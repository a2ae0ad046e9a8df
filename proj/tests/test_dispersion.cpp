#include <chrono>
#include <cmath>
#include <numbers>

#include <boost/math/tools/roots.hpp>
#include <gtest/gtest.h>

#include <landau/dispersion.hpp>

using namespace landau;

namespace {

// int_0^inf e^{w u - u^2/2} u du = 1 + w sqrt(pi/2) e^{w^2/2} erfc(-w/sqrt 2), w real
double maxwell_moment(double w) {
    return 1.0 + w * std::sqrt(std::numbers::pi / 2) * std::exp(w * w / 2) * std::erfc(-w / std::numbers::sqrt2);
}

MarginOptions quick_margin(int k_max = 2) {
    MarginOptions o;
    o.k_max = k_max;
    o.n_mu = 4;
    o.n_zeta = 81;
    return o;
}

bool penrose_pass(const Equilibrium& eq, const Interaction& W, int k) {
    return penrose_check(eq, W, {wavevector(k)}).pass;
}

} // namespace

TEST(Dispersion, VanishesWithoutInteraction) {
    const auto eq = make_maxwellian(1.0);
    const auto W = make_interaction(0.0, 1.0, 1);
    EXPECT_EQ(dispersion_function(eq, W, 1, cplx(0.01, 0.3)), cplx{});
    EXPECT_TRUE(find_dispersion_roots(eq, W, wavevector(1)).roots.empty());
    const auto m = condition_L_margin(eq, W, quick_margin());
    EXPECT_DOUBLE_EQ(m.kappa, 1.0);
}

TEST(Dispersion, MaxwellianClosedFormOnRealAxis) {
    const auto eq = make_maxwellian(1.0);
    for (double A : {1.0, 4.0})
        for (int sign : {1, -1}) {
            const auto W = make_interaction(A, 1.0, sign);
            for (double mu : {-2.0, -0.5, 0.0, 0.05, 0.5})
                for (int k : {1, 2, -3}) {
                    // u = |k| t and fhat(k t) = e^{-u^2/2}
                    const double ref = -W(std::abs(k)) * maxwell_moment(mu);
                    EXPECT_NEAR(std::abs(dispersion_function(eq, W, k, cplx(mu, 0)) - ref), 0.0, 1e-11 * std::abs(ref));
                }
        }
    // Coulomb A = 1, k = 1, xi = 0: L = -1
    EXPECT_NEAR(std::abs(dispersion_function(eq, make_interaction(1, 1, 1), 1, 0.0) + 1.0), 0.0, 1e-12);
}

TEST(Dispersion, DecaysForLargeNegativeRealPart) {
    const auto eq = make_maxwellian(1.0);
    const auto W = make_interaction(1.0, 1.0, 1);
    double prev = std::abs(dispersion_function(eq, W, 1, cplx(-1, 0.5)));
    for (double mu : {-4.0, -16.0, -64.0}) {
        const double v = std::abs(dispersion_function(eq, W, 1, cplx(mu, 0.5)));
        EXPECT_LT(v, prev);
        prev = v;
    }
    EXPECT_LT(prev, 1e-3);
}

TEST(Dispersion, ConjugateSymmetry) {
    for (const auto& eq : {make_maxwellian(1.0), make_two_stream(2.5, 1.0)}) {
        const auto W = make_interaction(2.0, 1.0, 1);
        for (cplx xi : {cplx(0.03, 1.7), cplx(-0.6, -2.2), cplx(-1.0, 5.0)})
            for (int k : {1, 3}) {
                const cplx a = dispersion_function(eq, W, k, xi), b = dispersion_function(eq, W, k, std::conj(xi));
                EXPECT_NEAR(std::abs(b - std::conj(a)), 0.0, 1e-12 * std::max(1.0, std::abs(a)));
            }
    }
}

TEST(Dispersion, AdaptiveQuadratureIsSelfConvergent) {
    const auto eq = make_two_stream(2.0, 1.0);
    const auto W = make_interaction(1.5, 1.0, 1);
    for (cplx xi : {cplx(0.0, 0.0), cplx(0.04, 3.0), cplx(-0.8, -6.0), cplx(-0.3, 9.5)}) {
        const auto k = wavevector(1);
        const cplx a = dispersion_function_fixed(eq, W, k, xi, 0.2), b = dispersion_function_fixed(eq, W, k, xi, 0.1);
        EXPECT_LE(std::abs(a - b), 1e-9 * std::abs(b));
        EXPECT_LE(std::abs(dispersion_function(eq, W, k, xi) - b), 1e-9 * std::abs(b));
    }
}

TEST(Dispersion, DerivativeMatchesFiniteDifference) {
    const auto eq = make_maxwellian(1.0);
    const auto W = make_interaction(3.0, 1.0, 1);
    const auto k = wavevector(1);
    const cplx xi(0.2, 1.3), h(1e-5, 0);
    // holomorphic in w = conj(xi): dL/dw via a step in w
    const cplx fd = (dispersion_function(eq, W, k, std::conj(std::conj(xi) + h)) -
                     dispersion_function(eq, W, k, std::conj(std::conj(xi) - h))) / (2.0 * h);
    EXPECT_NEAR(std::abs(dispersion_derivative(eq, W, k, xi) - fd), 0.0, 1e-7 * std::abs(fd));
}

TEST(Penrose, RepulsiveMaxwellianPassesEverywhere) {
    for (double th : {1.0, 2.0}) {
        const auto eq = make_maxwellian(th);
        const auto rep = penrose_check(eq, make_interaction(5.0, 1.0, 1), mode_set(1, 8));
        EXPECT_TRUE(rep.pass);
        for (const auto& m : rep.modes) {
            ASSERT_EQ(m.points.size(), 1u);
            EXPECT_NEAR(m.points[0].w, 0.0, 1e-12);
            // f0'(r)/r = -f0(r)/theta integrates to -1/theta
            EXPECT_NEAR(m.points[0].pv, -1.0 / th, 1e-8);
        }
    }
}

TEST(Penrose, JeansThresholdByBisection) {
    for (double th : {1.0, 2.0})
        for (int k : {1, 2}) {
            const auto eq = make_maxwellian(th);
            double lo = 0.01, hi = 20;
            ASSERT_TRUE(penrose_pass(eq, make_interaction(lo, 1, -1), k));
            ASSERT_FALSE(penrose_pass(eq, make_interaction(hi, 1, -1), k));
            while (hi - lo > 1e-6) {
                const double mid = 0.5 * (lo + hi);
                (penrose_pass(eq, make_interaction(mid, 1, -1), k) ? lo : hi) = mid;
            }
            EXPECT_NEAR(0.5 * (lo + hi), k * k * th, 1e-2 * k * k * th);
        }
}

TEST(Penrose, TwoStreamFailsAtCentralPoint) {
    const auto eq = make_two_stream(3.0, 1.0);
    const auto rep = penrose_check(eq, make_interaction(8.0, 1.0, 1), {wavevector(1)});
    ASSERT_EQ(rep.modes[0].points.size(), 3u);
    EXPECT_NEAR(rep.modes[0].points[1].w, 0.0, 1e-9);
    EXPECT_GT(rep.modes[0].points[1].value, 1.0);
    EXPECT_FALSE(rep.pass);
    // the outer critical points are maxima and contribute negative values
    EXPECT_LT(rep.modes[0].points[0].value, 0.0);
    // weak coupling is stable
    EXPECT_TRUE(penrose_check(eq, make_interaction(1.0, 1.0, 1), {wavevector(1)}).pass);
}

TEST(Penrose, BracketingGridResolvesCloseBeams) {
    // barely double-humped: the central minimum is shallow
    const auto eq = make_two_stream(0.55, 0.25);
    const auto pts = critical_points(eq.marginal({1, 0}), 4096);
    ASSERT_EQ(pts.size(), 3u);
    EXPECT_NEAR(pts[1], 0.0, 1e-12);
    for (double w : pts) EXPECT_NEAR(eq.df0(w), 0.0, 1e-12);
}

TEST(Winding, CountsGrowingRoots) {
    const auto eq = make_maxwellian(1.0);
    EXPECT_EQ(winding_number(eq, make_interaction(1.0, 1.0, 1), wavevector(1)).number, 0);
    EXPECT_EQ(std::abs(winding_number(eq, make_interaction(4.0, 1.0, -1), wavevector(1)).number), 1);
    EXPECT_EQ(winding_number(eq, make_interaction(4.0, 1.0, -1), wavevector(3)).number, 0);
}

TEST(Margin, StableMaxwellianIsPositiveAndRefinementStable) {
    const auto eq = make_maxwellian(1.0);
    const auto W = make_interaction(1.0, 1.0, 1);
    auto o = quick_margin();
    const auto a = condition_L_margin(eq, W, o);
    o.n_zeta = 161;
    o.n_mu = 8;
    const auto b = condition_L_margin(eq, W, o);
    EXPECT_GT(a.kappa, 0.0);
    EXPECT_FALSE(a.unstable_root);
    EXPECT_EQ(std::string(a.label), "sampled");
    EXPECT_NEAR(a.sampled_min, b.sampled_min, 0.01 * b.sampled_min);
    EXPECT_LE(a.tail_zeta, 1.0);
    EXPECT_LE(a.tail_k, 1.0);
}

TEST(Margin, AttractiveAboveThresholdHasNoMargin) {
    const auto m = condition_L_margin(make_maxwellian(1.0), make_interaction(4.0, 1.0, -1), quick_margin(1));
    EXPECT_TRUE(m.unstable_root);
    EXPECT_EQ(m.kappa, 0.0);
    EXPECT_TRUE(m.warning);
    EXPECT_NEAR(std::abs(m.argmin_k[0]), 1.0, 0);
}

TEST(Roots, LangmuirRootOfStrongCoulombCoupling) {
    // W(1) = 4 and theta = 1: plasma frequency 2, Debye number 1/2
    const auto rs = find_dispersion_roots(make_maxwellian(1.0), make_interaction(4.0, 1.0, 1), wavevector(1));
    ASSERT_FALSE(rs.roots.empty());
    const auto& r = rs.roots.front();
    EXPECT_NEAR(r.growth_rate, -0.3066, 5e-4);
    EXPECT_NEAR(std::abs(r.frequency), 2.8312, 5e-4);
    EXPECT_LT(r.residual, 1e-10);
    for (const auto& x : rs.roots) EXPECT_GT(x.xi.real(), 0.0); // all damped
}

TEST(Roots, JeansRootIsPurelyGrowing) {
    const auto rs = find_dispersion_roots(make_maxwellian(1.0), make_interaction(4.0, 1.0, -1), wavevector(1));
    ASSERT_FALSE(rs.roots.empty());
    const auto& r = rs.roots.front();
    EXPECT_GT(r.growth_rate, 0.0);
    EXPECT_NEAR(r.xi.imag(), 0.0, 1e-10);
    // independent: 4 (1 + mu I0(mu)) = 1 on the negative real axis
    boost::uintmax_t it = 100;
    const auto br = boost::math::tools::bisect([](double mu) { return 4 * maxwell_moment(mu) - 1; }, -5.0, -1e-6,
                                               boost::math::tools::eps_tolerance<double>(50), it);
    EXPECT_NEAR(r.xi.real(), 0.5 * (br.first + br.second), 1e-9);
}

// pass/fail of the pointwise criterion agrees with the sign of the sampled margin
TEST(CriterionAgreement, AcrossTheJeansThreshold) {
    const auto eq = make_maxwellian(1.0);
    for (double A : {0.3, 0.8, 0.95, 1.1, 2.5}) {
        const auto W = make_interaction(A, 1.0, -1);
        const bool p = penrose_check(eq, W, mode_set(1, 2)).pass;
        const auto m = condition_L_margin(eq, W, quick_margin());
        EXPECT_EQ(p, m.kappa > 0) << "A = " << A << " kappa = " << m.kappa;
    }
}
