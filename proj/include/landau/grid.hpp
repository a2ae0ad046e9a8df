#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "error.hpp"
#include "fft.hpp"
#include "parallel.hpp"

namespace landau {

inline bool is_pow2(std::size_t n) { return n && !(n & (n - 1)); }

// T^d x [-V, V)^d with the torus side fixed to 2 pi.
struct PhaseGrid {
    int d = 1;
    std::size_t Nx = 32, Nv = 256;
    double V = 8.0;

    double dv() const { return 2.0 * V / static_cast<double>(Nv); }
    double deta() const { return std::numbers::pi / V; }
    double eta_max() const { return deta() * static_cast<double>(Nv / 2); }
    double dx() const { return 2.0 * std::numbers::pi / static_cast<double>(Nx); }
    int kmin() const { return -static_cast<int>(Nx / 2); }
    int pmin() const { return -static_cast<int>(Nv / 2); }
    double v(std::size_t m) const { return -V + static_cast<double>(m) * dv(); }
    double x(std::size_t j) const { return static_cast<double>(j) * dx(); }
    // largest mode kept by the 2/3 rule
    int k_dealias() const { return static_cast<int>(Nx / 3); }

    bool operator==(const PhaseGrid&) const = default;
};

inline PhaseGrid make_grid(int d, std::size_t Nx, std::size_t Nv, double V) {
    require(d == 1, ErrorKind::config, "grid.d: phase-space grids support d = 1 only");
    require(Nx >= 8 && is_pow2(Nx), ErrorKind::config, "grid.Nx must be a power of two >= 8");
    require(Nv >= 8 && is_pow2(Nv), ErrorKind::config, "grid.Nv must be a power of two >= 8");
    require(V > 0 && std::isfinite(V), ErrorKind::config, "grid.V must be positive");
    return PhaseGrid{d, Nx, Nv, V};
}

enum class Frame { lab, gliding };

// Coefficients over the (k, eta) lattice, rows k = -Nx/2..Nx/2-1, columns
// eta_p with p = -Nv/2..Nv/2-1.
struct FieldSpectrum {
    PhaseGrid grid;
    Frame frame = Frame::lab;
    double t = 0.0; // frame time for gliding spectra
    std::vector<cplx> c;

    FieldSpectrum() = default;
    explicit FieldSpectrum(const PhaseGrid& g, Frame f = Frame::lab, double time = 0.0)
        : grid(g), frame(f), t(time), c(g.Nx * g.Nv) {}

    std::size_t row(int k) const { return static_cast<std::size_t>(k - grid.kmin()); }
    std::size_t col(int p) const { return static_cast<std::size_t>(p - grid.pmin()); }
    cplx& at(int k, int p) { return c[row(k) * grid.Nv + col(p)]; }
    const cplx& at(int k, int p) const { return c[row(k) * grid.Nv + col(p)]; }
    int k_of(std::size_t i) const { return static_cast<int>(i) + grid.kmin(); }
    int p_of(std::size_t j) const { return static_cast<int>(j) + grid.pmin(); }
    double eta_of(std::size_t j) const { return p_of(j) * grid.deta(); }
};

// Real samples h(x_j, v_m), index j * Nv + m.
struct RealField {
    PhaseGrid grid;
    std::vector<double> h;

    RealField() = default;
    explicit RealField(const PhaseGrid& g) : grid(g), h(g.Nx * g.Nv) {}
    double& at(std::size_t j, std::size_t m) { return h[j * grid.Nv + m]; }
    double at(std::size_t j, std::size_t m) const { return h[j * grid.Nv + m]; }
};

inline void require_same_grid(const PhaseGrid& a, const PhaseGrid& b) {
    require(a == b, ErrorKind::grid_mismatch, "spectra live on different grids");
}

inline void require_frame(const FieldSpectrum& s, Frame f) {
    require(s.frame == f, ErrorKind::grid_mismatch,
            f == Frame::gliding ? "expected a gliding-frame spectrum" : "expected a lab-frame spectrum");
}

namespace detail {

// FFT order index q <-> centered index j (fftshift)
inline std::size_t fft_to_centered(std::size_t q, std::size_t n) { return (q + n / 2) % n; }
inline std::size_t centered_to_fft(std::size_t j, std::size_t n) { return (j + n / 2) % n; }

} // namespace detail

// g(v_m) in place -> eta spectrum in FFT order: dv * (-1)^p * DFT[g](p)
inline void eta_from_v(const Fft& fft, cplx* row, double dv) {
    fft.forward(row);
    const std::size_t n = fft.size();
    for (std::size_t q = 0; q < n; ++q) row[q] *= (q & 1) ? -dv : dv;
}

// inverse of eta_from_v: g(v_m) = (deta / 2 pi) sum_p e^{i eta_p v_m} h(eta_p)
inline void v_from_eta(const Fft& fft, cplx* row, double deta) {
    const std::size_t n = fft.size();
    for (std::size_t q = 0; q < n; ++q)
        if (q & 1) row[q] = -row[q];
    fft.backward(row);
    const double s = deta / (2.0 * std::numbers::pi);
    for (std::size_t q = 0; q < n; ++q) row[q] *= s;
}

// Per-row (fixed k) velocity profile g_k(v_m), rows in centered k order.
inline std::vector<cplx> spectrum_to_kv(const FieldSpectrum& s) {
    const auto& g = s.grid;
    std::vector<cplx> out(g.Nx * g.Nv);
    parallel_for_range(g.Nx, [&](std::size_t b, std::size_t e) {
        Fft fft(g.Nv);
        std::vector<cplx> buf(g.Nv);
        for (std::size_t i = b; i < e; ++i) {
            for (std::size_t j = 0; j < g.Nv; ++j)
                buf[detail::centered_to_fft(j, g.Nv)] = s.c[i * g.Nv + j];
            v_from_eta(fft, buf.data(), g.deta());
            std::copy(buf.begin(), buf.end(), out.begin() + static_cast<std::ptrdiff_t>(i * g.Nv));
        }
    });
    return out;
}

inline FieldSpectrum kv_to_spectrum(const PhaseGrid& g, const std::vector<cplx>& kv,
                                    Frame f = Frame::lab, double t = 0.0) {
    FieldSpectrum s(g, f, t);
    parallel_for_range(g.Nx, [&](std::size_t b, std::size_t e) {
        Fft fft(g.Nv);
        std::vector<cplx> buf(g.Nv);
        for (std::size_t i = b; i < e; ++i) {
            std::copy_n(kv.begin() + static_cast<std::ptrdiff_t>(i * g.Nv), g.Nv, buf.begin());
            eta_from_v(fft, buf.data(), g.dv());
            for (std::size_t j = 0; j < g.Nv; ++j)
                s.c[i * g.Nv + j] = buf[detail::centered_to_fft(j, g.Nv)];
        }
    });
    return s;
}

// h(x,v) = (1/2pi) sum_k int e^{ikx + iv eta} h_k(eta) d eta
inline RealField to_real(const FieldSpectrum& s) {
    const auto& g = s.grid;
    auto kv = spectrum_to_kv(s);
    RealField r(g);
    parallel_for_range(g.Nv, [&](std::size_t b, std::size_t e) {
        Fft fft(g.Nx);
        std::vector<cplx> buf(g.Nx);
        for (std::size_t m = b; m < e; ++m) {
            for (std::size_t i = 0; i < g.Nx; ++i)
                buf[detail::centered_to_fft(i, g.Nx)] = kv[i * g.Nv + m];
            fft.backward(buf.data());
            for (std::size_t j = 0; j < g.Nx; ++j) r.at(j, m) = buf[j].real();
        }
    });
    return r;
}

// h_k(eta) = (1/2pi) int int e^{-ikx - iv eta} h dx dv
inline FieldSpectrum to_spectrum(const RealField& r) {
    const auto& g = r.grid;
    std::vector<cplx> kv(g.Nx * g.Nv);
    parallel_for_range(g.Nv, [&](std::size_t b, std::size_t e) {
        Fft fft(g.Nx);
        std::vector<cplx> buf(g.Nx);
        for (std::size_t m = b; m < e; ++m) {
            for (std::size_t j = 0; j < g.Nx; ++j) buf[j] = r.at(j, m);
            fft.forward(buf.data());
            for (std::size_t i = 0; i < g.Nx; ++i)
                kv[i * g.Nv + m] = buf[detail::centered_to_fft(i, g.Nx)] / static_cast<double>(g.Nx);
        }
    });
    return kv_to_spectrum(g, kv);
}

// max |c(k,p) - conj(c(-k,-p))| relative to max |c|; Nyquist row/column skipped
inline double reality_defect(const FieldSpectrum& s) {
    const auto& g = s.grid;
    double num = 0, scale = 0;
    for (auto z : s.c) scale = std::max(scale, std::abs(z));
    for (int k = g.kmin() + 1; k < -g.kmin(); ++k)
        for (int p = g.pmin() + 1; p < -g.pmin(); ++p)
            num = std::max(num, std::abs(s.at(k, p) - std::conj(s.at(-k, -p))));
    return scale > 0 ? num / scale : 0.0;
}

inline double l2_norm(const FieldSpectrum& s) {
    double acc = 0;
    for (auto z : s.c) acc += std::norm(z);
    return std::sqrt(acc * s.grid.deta());
}

inline double l2_distance(const FieldSpectrum& a, const FieldSpectrum& b) {
    require_same_grid(a.grid, b.grid);
    double acc = 0;
    for (std::size_t i = 0; i < a.c.size(); ++i) acc += std::norm(a.c[i] - b.c[i]);
    return std::sqrt(acc * a.grid.deta());
}

// t / deta as an integer, or an off-lattice error
inline long aligned_steps(const PhaseGrid& g, double t) {
    const double m = t / g.deta();
    const double r = std::round(m);
    require(std::abs(m - r) <= 1e-9 * std::max(1.0, std::abs(m)), ErrorKind::off_lattice,
            "time " + std::to_string(t) + " is not a multiple of deta = " + std::to_string(g.deta()));
    return static_cast<long>(r);
}

struct FrameShift {
    FieldSpectrum spec;
    double dropped = 0.0; // l2 mass shifted off the lattice edge
};

namespace detail {
inline FrameShift shift_eta(const FieldSpectrum& s, long m, Frame to, double t) {
    const auto& g = s.grid;
    FrameShift out{FieldSpectrum(g, to, t), 0.0};
    const long nv = static_cast<long>(g.Nv);
    for (std::size_t i = 0; i < g.Nx; ++i) {
        const long sh = static_cast<long>(s.k_of(i)) * m;
        for (long j = 0; j < nv; ++j) {
            const long jt = j + sh;
            const cplx z = s.c[i * g.Nv + static_cast<std::size_t>(j)];
            if (jt < 0 || jt >= nv)
                out.dropped += std::norm(z);
            else
                out.spec.c[i * g.Nv + static_cast<std::size_t>(jt)] = z;
        }
    }
    out.dropped = std::sqrt(out.dropped * g.deta());
    return out;
}
} // namespace detail

// f_k(eta) = h_k(eta - k t)
inline FrameShift to_gliding(const FieldSpectrum& lab, double t) {
    require_frame(lab, Frame::lab);
    return detail::shift_eta(lab, aligned_steps(lab.grid, t), Frame::gliding, t);
}

inline FrameShift from_gliding(const FieldSpectrum& gl) {
    require_frame(gl, Frame::gliding);
    return detail::shift_eta(gl, -aligned_steps(gl.grid, gl.t), Frame::lab, gl.t);
}

} // namespace landau
