#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include <landau/equilibrium.hpp>

using namespace landau;
using GK = boost::math::quadrature::gauss_kronrod<double, 31>;

namespace {

double integrate(const std::function<double(double)>& f, double a, double b) {
    return GK::integrate(f, a, b, 20, 1e-14);
}

// int e^{-i v eta} v^alpha f(v) dv by adaptive quadrature
cplx transform(const std::function<double(double)>& f, double eta, int alpha, double L) {
    const double re = integrate([&](double v) { return std::pow(v, alpha) * f(v) * std::cos(v * eta); }, -L, L);
    const double im = integrate([&](double v) { return -std::pow(v, alpha) * f(v) * std::sin(v * eta); }, -L, L);
    return {re, im};
}

} // namespace

TEST(Maxwellian, PointValuesAndDerivative) {
    const auto m = make_maxwellian(1.0);
    EXPECT_NEAR(m.f0(0.0), 1 / std::sqrt(2 * std::numbers::pi), 1e-16);
    for (double th : {0.5, 1.0, 2.0}) {
        const auto e = make_maxwellian(th);
        for (double v = -5; v <= 5; v += 0.37) EXPECT_NEAR(e.df0(v), -(v / th) * e.f0(v), 1e-16);
    }
    EXPECT_THROW(make_maxwellian(0.0), Error);
}

TEST(Equilibria, UnitMassAndNonNegative) {
    for (const auto& e : {make_maxwellian(1.0), make_maxwellian(0.3), make_two_stream(3.0, 1.0), make_two_stream(1.0, 0.5)}) {
        EXPECT_NEAR(integrate([&](double v) { return e.f0(v); }, -40, 40), 1.0, 1e-10);
        for (double v = -10; v <= 10; v += 0.1) EXPECT_GE(e.f0(v), 0.0);
        EXPECT_NEAR(std::abs(e.fhat(0.0) - 1.0), 0.0, 1e-15);
    }
}

TEST(Equilibria, AnalyticTransformMatchesQuadrature) {
    for (const auto& e : {make_maxwellian(1.0), make_maxwellian(2.5), make_two_stream(2.0, 0.7)}) {
        for (double eta : {0.0, 0.3, 1.0, 2.2, -1.7})
            for (int a = 0; a <= 3; ++a) {
                const cplx ref = transform([&](double v) { return e.f0(v); }, eta, a, 40);
                EXPECT_NEAR(std::abs(e.fhat_moment(eta, a) - ref), 0.0, 1e-8 * std::max(1.0, std::abs(ref)))
                    << "eta=" << eta << " alpha=" << a;
            }
    }
}

TEST(Equilibria, MaxwellianTransformClosedForm) {
    const auto e = make_maxwellian(1.7);
    for (double eta = -4; eta <= 4; eta += 0.25) EXPECT_NEAR(e.fhat(eta).real(), std::exp(-1.7 * eta * eta / 2), 1e-15);
}

TEST(Equilibria, EnvelopeDominatesTransform) {
    for (const auto& e : {make_maxwellian(1.0), make_two_stream(3.0, 1.0)})
        for (double eta = 0; eta < 8; eta += 0.05)
            for (double later = eta; later < eta + 4; later += 0.1) EXPECT_GE(e.envelope(eta) + 1e-300, std::abs(e.fhat(later)));
}

TEST(CustomTable, ReproducesSampledGaussian) {
    std::vector<double> vals;
    const double h = 0.05, v0 = -12;
    for (int i = 0; i <= 480; ++i) vals.push_back(3.0 * Equilibrium::gauss(v0 + i * h, 1.0));
    const auto e = make_custom(vals, v0, h);
    EXPECT_NEAR(e.f0(0.3), Equilibrium::gauss(0.3, 1.0), 1e-7);
    EXPECT_NEAR(e.df0(0.3), -0.3 * Equilibrium::gauss(0.3, 1.0), 1e-5);
    for (double eta : {0.0, 0.5, 2.0}) EXPECT_NEAR(std::abs(e.fhat(eta) - std::exp(-eta * eta / 2)), 0.0, 1e-12);
    EXPECT_EQ(e.f0(20.0), 0.0);
    EXPECT_THROW(make_custom({1, 2, 3}, 0, 1), Error);
    EXPECT_THROW(make_custom(std::vector<double>(10, -1.0), 0, 1), Error);
}

// marginal of a 2-d mixture along k = integral over the orthogonal direction
TEST(Marginal, TwoDimensionalProjectionMatchesLineIntegral) {
    const auto e = make_two_stream(2.0, 0.8, 2);
    const std::array<double, 2> k{1.0, 2.0};
    const double nk = std::hypot(k[0], k[1]);
    const std::array<double, 2> u{k[0] / nk, k[1] / nk}, w{-u[1], u[0]};
    const auto m = e.marginal(k);
    for (double r = -5; r <= 5; r += 0.5) {
        const double ref = integrate([&](double s) { return e.f0(std::array<double, 2>{r * u[0] + s * w[0], r * u[1] + s * w[1]}); }, -30, 30);
        EXPECT_NEAR(m.f(r), ref, 1e-12);
    }
    // 1-d marginal along negative k mirrors the profile
    const auto e1 = make_two_stream(1.0, 0.5);
    const auto mm = e1.marginal({-1.0, 0.0});
    EXPECT_NEAR(mm.f(0.7), e1.f0(-0.7), 1e-16);
    EXPECT_NEAR(mm.df(0.7), -e1.df0(-0.7), 1e-16);
}

TEST(Interaction, PowerLawAndBound) {
    const auto W = make_interaction(2.0, 1.5, -1);
    EXPECT_EQ(W(0.0), 0.0);
    EXPECT_DOUBLE_EQ(W(2.0), -2.0 * std::pow(2.0, -2.5));
    for (int k = 1; k < 50; ++k) EXPECT_LE(std::abs(W(double(k))), 2.0 * std::pow(k, -2.5) * (1 + 1e-15));
    EXPECT_THROW(make_interaction(1.0, 0.5, 1), Error);
    EXPECT_THROW(make_interaction(-1.0, 1.0, 1), Error);
    EXPECT_THROW(make_interaction(1.0, 1.0, 0), Error);
    EXPECT_TRUE(make_interaction(0.0, 1.0, 1).vanishes());
}

TEST(Localization, MaxwellianIsFiniteAndResolutionStable) {
    const auto e = make_maxwellian(1.0);
    const auto a = check_localization(e, 0.5, 1, 0.05);
    const auto b = check_localization(e, 0.5, 1, 0.025);
    EXPECT_TRUE(std::isfinite(a.C0));
    EXPECT_GT(a.C0, 0);
    EXPECT_NEAR(a.C0, b.C0, 1e-6 * b.C0);
    // any radius is admissible for a Gaussian
    EXPECT_TRUE(std::isfinite(check_localization(e, 5.0, 2).C0));
}

TEST(Localization, CompactSpectrumIsFiniteSum) {
    // fhat = 1 - |eta| on [-1, 1]: the sum is a finite lattice sum
    auto spec = [](double eta, int a) -> cplx { return a == 0 ? cplx(std::max(0.0, 1 - std::abs(eta))) : cplx{}; };
    const auto e = make_custom_spectrum(spec, 1.0);
    const double h = 0.125, lb = 0.3;
    double ref = 0;
    for (int i = -8; i <= 8; ++i) {
        const double eta = i * h;
        ref += (std::abs(i) == 8 ? 0.5 : 1.0) * std::pow(1 - std::abs(eta), 2) * std::exp(2 * lb * std::sqrt(1 + eta * eta)) * h;
    }
    EXPECT_NEAR(check_localization(e, lb, 1, h).C0, ref, 1e-14 * ref);
}

TEST(Localization, SlowlyDecayingSpectrumIsInadmissible) {
    // a kink in the table leaves fhat with algebraic decay only
    std::vector<double> vals;
    for (int i = 0; i <= 400; ++i) vals.push_back(std::max(0.0, 1.0 - std::abs(-2.0 + 0.01 * i)));
    const auto e = make_custom(vals, -2.0, 0.01);
    try {
        check_localization(e, 5.0, 1);
        FAIL();
    } catch (const Error& err) {
        EXPECT_EQ(err.kind(), ErrorKind::inadmissible);
    }
}
