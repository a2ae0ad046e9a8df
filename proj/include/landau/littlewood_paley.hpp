#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "grid.hpp"

namespace landau {

// psi = 1 on [0, 1/2], 0 on [3/4, inf), degree-7 smoothstep in between
inline double lp_psi(double r) {
    const double x = std::clamp((r - 0.5) / 0.25, 0.0, 1.0);
    const double x4 = x * x * x * x;
    return 1.0 - x4 * (35.0 + x * (-84.0 + x * (70.0 - 20.0 * x)));
}

// N = 1/2 denotes the low block psi; N >= 1 the annulus phi_N, |Xi| in (N/2, 3N/2)
struct DyadicShell {
    double N = 1.0;

    double operator()(double xi) const {
        if (N < 1) return lp_psi(xi);
        return lp_psi(xi / (2.0 * N)) - lp_psi(xi / N);
    }
};

// psi + sum_{1 <= N' < N} phi_{N'} telescopes to psi(Xi / N)
inline double lp_below_multiplier(double N, double xi) {
    return N < 1 ? 0.0 : lp_psi(xi / N);
}

inline double xi_l1(const FieldSpectrum& s, std::size_t i, std::size_t j) {
    return std::abs(s.k_of(i)) + std::abs(s.eta_of(j));
}

// 1/2, 1, 2, ... up to the first N whose low block covers the whole lattice
inline std::vector<double> shells_for(const PhaseGrid& g) {
    const double top = std::abs(g.kmin()) + g.eta_max();
    std::vector<double> out{0.5};
    for (double N = 1; ; N *= 2) {
        out.push_back(N);
        if (N >= top) break;
    }
    return out;
}

template <class Mult>
FieldSpectrum apply_multiplier(const FieldSpectrum& s, Mult&& m) {
    FieldSpectrum out = s;
    const auto& g = s.grid;
    for (std::size_t i = 0; i < g.Nx; ++i)
        for (std::size_t j = 0; j < g.Nv; ++j) out.c[i * g.Nv + j] *= m(xi_l1(s, i, j));
    return out;
}

inline FieldSpectrum lp_project(const FieldSpectrum& s, DyadicShell shell) {
    return apply_multiplier(s, shell);
}

inline FieldSpectrum lp_below(const FieldSpectrum& s, double N) {
    return apply_multiplier(s, [N](double xi) { return lp_below_multiplier(N, xi); });
}

// Product of the underlying real fields, with the 2/3 rule applied in x.
inline FieldSpectrum product(const FieldSpectrum& f, const FieldSpectrum& g) {
    require_same_grid(f.grid, g.grid);
    auto rf = to_real(f);
    const auto rg = to_real(g);
    for (std::size_t i = 0; i < rf.h.size(); ++i) rf.h[i] *= rg.h[i];
    auto out = to_spectrum(rf);
    out.frame = f.frame;
    out.t = f.t;
    const int kc = f.grid.k_dealias();
    for (std::size_t i = 0; i < f.grid.Nx; ++i)
        if (std::abs(out.k_of(i)) > kc)
            std::fill_n(out.c.begin() + static_cast<std::ptrdiff_t>(i * f.grid.Nv), f.grid.Nv, cplx{});
    return out;
}

struct Paraproduct {
    FieldSpectrum Tfg; // low f, high g
    FieldSpectrum Tgf; // high f, low g
    FieldSpectrum R;   // comparable frequencies
};

inline void accumulate(FieldSpectrum& acc, const FieldSpectrum& x) {
    for (std::size_t i = 0; i < acc.c.size(); ++i) acc.c[i] += x.c[i];
}

inline Paraproduct paraproduct_split(const FieldSpectrum& f, const FieldSpectrum& g) {
    require_same_grid(f.grid, g.grid);
    const auto shells = shells_for(f.grid);
    std::vector<FieldSpectrum> fN, gN;
    for (double N : shells) {
        fN.push_back(lp_project(f, {N}));
        gN.push_back(lp_project(g, {N}));
    }
    Paraproduct out{FieldSpectrum(f.grid, f.frame, f.t), FieldSpectrum(f.grid, f.frame, f.t),
                    FieldSpectrum(f.grid, f.frame, f.t)};
    for (std::size_t a = 0; a < shells.size(); ++a) {
        const double N = shells[a];
        if (N >= 8) {
            accumulate(out.Tfg, product(lp_below(f, N / 8), gN[a]));
            accumulate(out.Tgf, product(fN[a], lp_below(g, N / 8)));
        }
        FieldSpectrum near(g.grid, g.frame, g.t);
        bool any = false;
        for (std::size_t b = 0; b < shells.size(); ++b) {
            const double M = shells[b];
            if (M >= N / 8 && M <= 8 * N) {
                accumulate(near, gN[b]);
                any = true;
            }
        }
        if (any) accumulate(out.R, product(fN[a], near));
    }
    return out;
}

} // namespace landau
