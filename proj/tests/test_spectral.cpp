#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include <landau/fft.hpp>
#include <landau/grid.hpp>
#include <landau/io.hpp>
#include <landau/perturbation.hpp>

using namespace landau;

namespace {

double gauss(double v, double theta) {
    return std::exp(-v * v / (2 * theta)) / std::sqrt(2 * std::numbers::pi * theta);
}

FieldSpectrum random_real_spectrum(const PhaseGrid& g, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n;
    RealField r(g);
    for (auto& h : r.h) h = n(rng);
    return to_spectrum(r);
}

} // namespace

TEST(Fft, MatchesDirectDft) {
    const std::size_t n = 16;
    std::vector<cplx> a(n), ref(n);
    for (std::size_t i = 0; i < n; ++i) a[i] = {std::sin(1.0 + i), std::cos(0.3 * i * i)};
    for (std::size_t q = 0; q < n; ++q)
        for (std::size_t j = 0; j < n; ++j) ref[q] += a[j] * std::polar(1.0, -2 * std::numbers::pi * q * j / n);
    Fft f(n);
    auto b = a;
    f.forward(b.data());
    for (std::size_t q = 0; q < n; ++q) EXPECT_NEAR(std::abs(b[q] - ref[q]), 0.0, 1e-12);
    f.backward(b.data());
    for (std::size_t q = 0; q < n; ++q) EXPECT_NEAR(std::abs(b[q] / double(n) - a[q]), 0.0, 1e-14);
}

TEST(Grid, RejectsBadShapes) {
    EXPECT_THROW(make_grid(1, 24, 64, 8), Error);
    EXPECT_THROW(make_grid(1, 32, 4, 8), Error);
    EXPECT_THROW(make_grid(1, 32, 64, -1), Error);
    EXPECT_THROW(make_grid(2, 32, 64, 8), Error);
    const auto g = make_grid(1, 32, 64, 8);
    EXPECT_DOUBLE_EQ(g.deta(), std::numbers::pi / 8);
    EXPECT_DOUBLE_EQ(g.dv(), 0.25);
    EXPECT_EQ(g.k_dealias(), 10);
}

// h(x, v) = eps (c e^{ikx} + c.c.) N_theta(v - u) has h_k(eta) = eps c e^{-theta eta^2/2} e^{-iu eta}
TEST(Transform, GaussianProfileMatchesClosedForm) {
    const auto g = make_grid(1, 16, 256, 10);
    Perturbation p{0.1, {{2, {0.3, -0.4}, 1.5, 0.7}}};
    const auto s = sample(p, g);
    const auto r = to_real(s);
    double err = 0;
    for (std::size_t j = 0; j < g.Nx; ++j)
        for (std::size_t m = 0; m < g.Nv; ++m) {
            const double exact = 0.1 * 2 * std::real(cplx(0.3, -0.4) * std::polar(1.0, 2 * g.x(j))) *
                                 gauss(g.v(m) - 0.7, 1.5);
            err = std::max(err, std::abs(r.at(j, m) - exact));
        }
    EXPECT_LT(err, 1e-12);
}

TEST(Transform, RoundTripIsIdentity) {
    const auto g = make_grid(1, 16, 128, 6);
    const auto s = random_real_spectrum(g, 7);
    const auto back = to_spectrum(to_real(s));
    double err = 0, scale = 0;
    for (std::size_t i = 0; i < s.c.size(); ++i) {
        err = std::max(err, std::abs(back.c[i] - s.c[i]));
        scale = std::max(scale, std::abs(s.c[i]));
    }
    EXPECT_LT(err / scale, 1e-12);
    const auto kv = spectrum_to_kv(s);
    const auto s2 = kv_to_spectrum(g, kv);
    for (std::size_t i = 0; i < s.c.size(); ++i) EXPECT_LT(std::abs(s2.c[i] - s.c[i]), 1e-12 * scale);
}

TEST(Transform, RealFieldsAreConjugateSymmetric) {
    const auto g = make_grid(1, 16, 64, 5);
    EXPECT_LT(reality_defect(random_real_spectrum(g, 3)), 1e-13);
}

// density is the eta = 0 column: rho_k = int g_k dv
TEST(Transform, DensityIsZeroFrequencyColumn) {
    const auto g = make_grid(1, 8, 128, 8);
    Perturbation p{1.0, {{1, {0.5, 0.25}, 0.8, -0.3}}};
    const auto s = sample(p, g);
    const auto kv = spectrum_to_kv(s);
    cplx rho{};
    for (std::size_t m = 0; m < g.Nv; ++m) rho += kv[s.row(1) * g.Nv + m];
    rho *= g.dv();
    EXPECT_NEAR(std::abs(rho - s.at(1, 0)), 0.0, 1e-13);
    EXPECT_NEAR(std::abs(rho - cplx(0.5, 0.25)), 0.0, 1e-13);
}

TEST(Frames, GlidingShiftMovesEachRowByKt) {
    const auto g = make_grid(1, 8, 64, 4);
    const auto lab = random_real_spectrum(g, 11);
    const double t = 3 * g.deta();
    const auto gl = to_gliding(lab, t);
    EXPECT_EQ(gl.spec.frame, Frame::gliding);
    // f_k(eta) = h_k(eta - kt)
    for (int k = -3; k <= 3; ++k)
        for (int p = -20; p <= 20; ++p) EXPECT_EQ(gl.spec.at(k, p), lab.at(k, p - 3 * k));
}

TEST(Frames, RoundTripLosesOnlyReportedMass) {
    const auto g = make_grid(1, 8, 64, 4);
    const auto lab = random_real_spectrum(g, 5);
    const double t = 2 * g.deta();
    const auto gl = to_gliding(lab, t);
    const auto back = from_gliding(gl.spec);
    EXPECT_DOUBLE_EQ(back.spec.t, t);
    const double lost = l2_distance(back.spec, lab);
    EXPECT_NEAR(lost, gl.dropped, 1e-12 * l2_norm(lab));
    EXPECT_NEAR(std::pow(l2_norm(gl.spec), 2) + gl.dropped * gl.dropped, std::pow(l2_norm(lab), 2),
                1e-12 * std::pow(l2_norm(lab), 2));
}

TEST(Frames, OffLatticeTimeIsRefused) {
    const auto g = make_grid(1, 8, 64, 4);
    FieldSpectrum lab(g);
    try {
        to_gliding(lab, 0.5 * g.deta());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::off_lattice);
    }
    EXPECT_THROW(from_gliding(lab), Error);
}

TEST(Snapshot, RoundTripIsBitExact) {
    const auto g = make_grid(1, 8, 32, 3);
    auto s = random_real_spectrum(g, 2);
    s.t = 1.25;
    const auto path = std::filesystem::temp_directory_path() / "landau_snapshot_test.bin";
    write_snapshot(path, s);
    EXPECT_EQ(std::filesystem::file_size(path), 4 + 4 * 4 + 8 * 2 + s.c.size() * 16);
    const auto r = read_snapshot(path);
    EXPECT_EQ(r.grid, g);
    EXPECT_EQ(r.t, 1.25);
    EXPECT_EQ(r.c, s.c);
    std::ifstream in(path, std::ios::binary);
    char magic[4];
    in.read(magic, 4);
    EXPECT_EQ(std::string(magic, 4), "LLAB");
    std::filesystem::remove(path);
}

TEST(Csv, SeventeenDigitsRoundTrip) {
    for (double x : {0.1, 1.0 / 3.0, std::numbers::pi * 1e-200, -2.5e300})
        EXPECT_EQ(std::stod(fmt17(x)), x);
}
