#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include <landau/vlasov.hpp>

using namespace landau;

namespace {

SimConfig base(double A, double eps, std::size_t Nx = 16, std::size_t Nv = 256, double V = 8.0) {
    SimConfig c;
    c.setup = {make_grid(1, Nx, Nv, V), make_maxwellian(1.0), make_interaction(A, 1.0, 1), false, {}};
    c.schedule = make_schedule(0.5, 1.0, 0.5, 0.0, 3.0, 1, 1.0);
    c.perturbation = {eps, {{1, {1.0, 0.5}, 1.0, 0.0}}};
    return c;
}

std::size_t index_of(const DensityTrace& d, int k) {
    return static_cast<std::size_t>(std::find(d.modes.begin(), d.modes.end(), k) - d.modes.begin());
}

} // namespace

TEST(FreeTransport, DensityMatchesGaussianDecay) {
    auto c = base(0.0, 1e-3, 32, 512);
    c.perturbation.modes.push_back({3, {0.2, -0.1}, 1.0, 0.0});
    const auto r = run_simulation(c);
    ASSERT_EQ(r.status, RunStatus::ok);
    for (int k : {1, 3}) {
        const cplx c0 = k == 1 ? cplx(1.0, 0.5) : cplx(0.2, -0.1);
        const auto& v = r.density.values[index_of(r.density, k)];
        const double scale = 1e-3 * std::abs(c0);
        for (std::size_t n = 0; n < v.size(); ++n) {
            const double t = n * r.density.dt;
            const cplx exact = 1e-3 * c0 * std::exp(-0.5 * k * k * t * t);
            EXPECT_LE(std::abs(v[n] - exact), 1e-12 * scale) << "k=" << k << " t=" << t;
            if (std::abs(exact) > 1e-6 * scale) {
                EXPECT_LE(std::abs(v[n] - exact), 1e-6 * std::abs(exact));
            }
        }
    }
}

TEST(FreeTransport, UntouchedModesStayAtRoundoff) {
    const auto r = run_simulation(base(0.0, 1e-3));
    for (std::size_t i = 0; i < r.density.modes.size(); ++i) {
        if (r.density.modes[i] == 1) continue;
        for (auto z : r.density.values[i]) EXPECT_LE(std::abs(z), 1e-16);
    }
}

TEST(FreeTransport, GlidingSpectrumIsConstant) {
    auto c = base(0.0, 1e-3);
    c.snapshot_stride = 4;
    const auto r = run_simulation(c);
    const auto init = sample(c.perturbation, c.setup.grid);
    ASSERT_FALSE(r.snapshots.empty());
    for (const auto& s : r.snapshots) {
        auto back = from_gliding(s.gliding).spec;
        EXPECT_LE(l2_distance(s.lab, back), 1e-16);
        double d = 0;
        for (std::size_t i = 0; i < init.c.size(); ++i) d = std::max(d, std::abs(s.gliding.c[i] - init.c[i]));
        EXPECT_LE(d, 1e-15) << "t=" << s.t;
    }
}

TEST(FreeTransport, SubstepsAgreeWithLatticeStep) {
    auto c1 = base(0.0, 1e-3);
    auto c2 = c1;
    c2.dt = c1.setup.grid.deta() / 4;
    const auto a = run_simulation(c1), b = run_simulation(c2);
    ASSERT_EQ(a.density.n_times, b.density.n_times);
    const auto& va = a.density.values[0];
    const auto& vb = b.density.values[0];
    for (std::size_t n = 0; n < va.size(); ++n) EXPECT_LE(std::abs(va[n] - vb[n]), 1e-17);
}

// h + f0 -> f0(v - a cos 2x): on the ray eta = 2(t - tau),
// rho_2 = e^{-eta^2/2} (1/Nx) sum_j e^{-2i x_j} e^{-i a eta cos 2x_j}  (-> -i J_1(a eta) as Nx grows)
TEST(Kick, MatchesSampledShiftOracle) {
    auto c = base(0.0, 0.0);
    c.perturbation.modes.clear();
    const auto& g = c.setup.grid;
    const double tau = 5 * g.deta(), a = 0.3;
    c.kick = {true, tau, 2, a};
    const auto r = run_simulation(c);
    ASSERT_EQ(r.status, RunStatus::ok);
    const auto& v = r.density.values[index_of(r.density, 2)];
    for (std::size_t n = 0; n < v.size(); ++n) {
        const double t = n * r.density.dt;
        const double eta = t > tau ? 2.0 * (t - tau) : 0.0;
        cplx acc{};
        for (std::size_t j = 0; j < g.Nx; ++j) {
            const double x = g.x(j);
            acc += std::polar(1.0, -2.0 * x - a * eta * std::cos(2.0 * x));
        }
        const double exact = t > tau ? std::abs(acc) / g.Nx * std::exp(-0.5 * eta * eta) : 0.0;
        EXPECT_NEAR(std::abs(v[n]), exact, 1e-14) << "t=" << t;
        if (t > tau) {
            EXPECT_NEAR(exact, std::abs(std::cyl_bessel_j(1.0, a * eta)) * std::exp(-0.5 * eta * eta), 1e-7);
        }
    }
}

TEST(Invariants, MassRealityAndCasimir) {
    auto c = base(1.0, 2e-2);
    c.snapshot_stride = 2;
    const auto r = run_simulation(c);
    ASSERT_EQ(r.status, RunStatus::ok);
    const double c0 = r.bootstrap.front().casimir;
    for (const auto& b : r.bootstrap) {
        EXPECT_LE(std::abs(b.mass), 1e-15);
        EXPECT_LE(std::abs(b.casimir - c0), 1e-6 * c0) << "t=" << b.t;
    }
    for (const auto& s : r.snapshots) EXPECT_LE(reality_defect(s.lab), 1e-14);
}

TEST(Invariants, NonlinearCorrectionIsSecondOrder) {
    auto gap = [](double eps) {
        auto c = base(1.0, eps);
        auto l = c;
        l.setup.linearized = true;
        const auto a = run_simulation(c), b = run_simulation(l);
        double d = 0;
        for (std::size_t i = 0; i < a.density.values.size(); ++i)
            for (std::size_t n = 0; n < a.density.values[i].size(); ++n)
                d = std::max(d, std::abs(a.density.values[i][n] - b.density.values[i][n]));
        return d;
    };
    const double r = gap(2e-3) / gap(1e-3);
    EXPECT_GT(r, 3.5);
    EXPECT_LT(r, 4.5);
}

TEST(Invariants, LinearizedRunScalesWithEps) {
    auto c = base(1.0, 1e-3);
    c.setup.linearized = true;
    auto c2 = c;
    c2.perturbation.eps = 3e-3;
    const auto a = run_simulation(c), b = run_simulation(c2);
    for (std::size_t n = 0; n < a.density.values[0].size(); ++n)
        EXPECT_LE(std::abs(3.0 * a.density.values[0][n] - b.density.values[0][n]), 1e-15);
}

TEST(Invariants, LinearizedDensityDecaysAtLandauRate) {
    auto c = base(1.0, 1e-3, 16, 512);
    c.setup.linearized = true;
    const auto r = run_simulation(c);
    const auto& v = r.density.values[0];
    const std::size_t n0 = static_cast<std::size_t>(std::lround(5.0 / r.density.dt));
    EXPECT_LT(std::abs(v.back()), 1e-3 * std::abs(v[n0]));
}

TEST(Status, StepMustDivideLattice) {
    auto c = base(0.0, 1e-3);
    c.dt = 0.3 * c.setup.grid.deta();
    try {
        run_simulation(c);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::config);
    }
}

TEST(Status, KickMustBeOnLattice) {
    auto c = base(0.0, 1e-3);
    c.kick = {true, 2.0, 2, 0.1};
    try {
        run_simulation(c);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::off_lattice);
    }
}

TEST(Status, AlarmPastValidityHorizon) {
    auto c = base(0.0, 1e-3);
    c.perturbation.modes[0] = {4, {1.0, 0.0}, 0.05, 0.0};
    c.horizon = 2.0 * validity_horizon(c.setup.grid);
    const auto r = run_simulation(c);
    EXPECT_EQ(r.status, RunStatus::resolution_alarm);
    EXPECT_LT(r.bootstrap.back().t, c.horizon);
    c.abort_on_alarm = false;
    const auto full = run_simulation(c);
    EXPECT_EQ(full.status, RunStatus::resolution_alarm);
    EXPECT_NEAR(full.bootstrap.back().t, full.horizon, 1e-12);
}

TEST(Status, NonFiniteStateReported) {
    auto c = base(1.0, std::numeric_limits<double>::quiet_NaN());
    const auto r = run_simulation(c);
    EXPECT_EQ(r.status, RunStatus::numerical_failure);
    EXPECT_EQ(r.bootstrap.size(), 0u);
}

TEST(Profile, RefusesUndecayedDensity) {
    auto c = base(0.0, 1e-3);
    c.horizon = 1.0;
    const auto r = run_simulation(c);
    try {
        asymptotic_profile(r, 0.1, 0.5);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::not_decayed);
    }
}

TEST(Profile, FreeTransportProfileIsInitialData) {
    auto c = base(0.0, 1e-3);
    c.snapshot_stride = 2;
    const auto r = run_simulation(c);
    const auto p = asymptotic_profile(r, 0.1, 0.5);
    EXPECT_LE(l2_distance(p.h_inf, sample(c.perturbation, c.setup.grid)), 1e-17);
}

TEST(Bootstrap, FreeTransportSobolevGrowsLikeBracketSquared) {
    const auto r = run_simulation(base(0.0, 1e-3, 16, 1024));
    double lo = 1e300, hi = 0;
    for (const auto& b : r.bootstrap) {
        if (b.t < 2) continue;
        const double ratio = b.sobolev / (1.0 + b.t * b.t);
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
    }
    EXPECT_LE(hi / lo, 2.0);
}
