#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "equilibrium.hpp"
#include "error.hpp"
#include "parallel.hpp"
#include "quadrature.hpp"

namespace landau {

using Wavevector = std::array<double, 2>;

inline Wavevector wavevector(int k) { return {static_cast<double>(k), 0.0}; }
inline double norm(const Wavevector& k) { return std::hypot(k[0], k[1]); }

namespace detail {

// u beyond which |W| |k| u env(u) e^{mu u} stays below 1e-16
inline double dispersion_cutoff(const Marginal& m, double wk, double kabs, double mu) {
    auto mag = [&](double u) { return std::abs(wk) * kabs * u * m.envelope(u) * std::exp(mu * u); };
    for (double u = 1.0; u < 1e6; u *= 1.1) {
        if (mag(u) < 1e-16 && mag(1.5 * u) < 1e-16 && mag(2.0 * u) < 1e-16) return u;
    }
    fail(ErrorKind::non_convergent,
         "dispersion integral does not converge: Re xi = " + std::to_string(mu) + " outruns the decay of fhat");
}

inline int dispersion_panels(const Marginal& m, double ucut, double zeta) {
    return std::max(1, static_cast<int>(std::ceil(ucut * (std::abs(zeta) + m.v_max + 1.0) / 4.0)));
}

} // namespace detail

// L(xi, k) = -W(k) int_0^inf e^{conj(xi) u} fhat_k(u) u du   (u = |k| t)
inline cplx dispersion_function(const Equilibrium& eq, const Interaction& W, const Wavevector& k, cplx xi) {
    const double kabs = norm(k);
    require(kabs > 0, ErrorKind::config, "dispersion function at k = 0");
    const double wk = W(k);
    if (wk == 0.0) return {};
    const auto m = eq.marginal(k);
    const cplx w = std::conj(xi);
    const double ucut = detail::dispersion_cutoff(m, wk, kabs, xi.real());
    auto f = [&](double u) { return std::exp(w * u) * m.fhat(u) * u; };
    return -wk * integrate_adaptive(f, 0.0, ucut, detail::dispersion_panels(m, ucut, xi.imag())).value;
}

inline cplx dispersion_function(const Equilibrium& eq, const Interaction& W, int k, cplx xi) {
    return dispersion_function(eq, W, wavevector(k), xi);
}

// fixed composite Gauss-Legendre with panel width h (in u); self-convergence oracle
inline cplx dispersion_function_fixed(const Equilibrium& eq, const Interaction& W, const Wavevector& k,
                                      cplx xi, double h) {
    const double wk = W(k);
    if (wk == 0.0) return {};
    const auto m = eq.marginal(k);
    const cplx w = std::conj(xi);
    const double ucut = detail::dispersion_cutoff(m, wk, norm(k), xi.real());
    auto f = [&](double u) { return std::exp(w * u) * m.fhat(u) * u; };
    return -wk * integrate_composite(f, 0.0, ucut, h);
}

// d/d(conj xi) of L; L is holomorphic in conj(xi)
inline cplx dispersion_derivative(const Equilibrium& eq, const Interaction& W, const Wavevector& k, cplx xi) {
    const double wk = W(k);
    if (wk == 0.0) return {};
    const auto m = eq.marginal(k);
    const cplx w = std::conj(xi);
    const double ucut = 1.5 * detail::dispersion_cutoff(m, wk, norm(k), xi.real());
    auto f = [&](double u) { return std::exp(w * u) * m.fhat(u) * u * u; };
    return -wk * integrate_adaptive(f, 0.0, ucut, detail::dispersion_panels(m, ucut, xi.imag())).value;
}

// ---------------------------------------------------------------- Penrose

struct PenrosePoint {
    double w;     // critical point of the marginal
    double pv;    // p.v. int f_k'(r) / (r - w) dr
    double value; // W(k) * pv
};

struct PenroseMode {
    Wavevector k;
    std::vector<PenrosePoint> points;
    bool pass = true;
};

struct PenroseReport {
    std::vector<PenroseMode> modes;
    bool pass = true;
};

inline std::vector<double> critical_points(const Marginal& m, std::size_t grid = 4096) {
    const double R = m.v_max;
    const double h = 2.0 * R / static_cast<double>(grid - 1);
    std::vector<double> x(grid), y(grid);
    double scale = 0;
    for (std::size_t i = 0; i < grid; ++i) {
        x[i] = -R + h * static_cast<double>(i);
        y[i] = m.df(x[i]);
        scale = std::max(scale, std::abs(y[i]));
    }
    std::vector<double> out;
    for (std::size_t i = 0; i + 1 < grid; ++i) {
        if (y[i] == 0.0) {
            out.push_back(x[i]);
            continue;
        }
        if ((y[i] < 0) != (y[i + 1] < 0) && y[i + 1] != 0.0) {
            double a = x[i], b = x[i + 1], fa = y[i];
            for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++it) {
                const double c = 0.5 * (a + b), fc = m.df(c);
                if ((fc < 0) == (fa < 0)) {
                    a = c;
                    fa = fc;
                } else {
                    b = c;
                }
            }
            out.push_back(0.5 * (a + b));
        }
    }
    // a near-touching extremum of f' without a sign change hides a pair of
    // critical points the grid cannot separate
    for (std::size_t i = 1; i + 1 < grid; ++i) {
        const double a = std::abs(y[i]);
        if (a < std::abs(y[i - 1]) && a < std::abs(y[i + 1]) && a < 1e-6 * scale &&
            (y[i - 1] < 0) == (y[i + 1] < 0) && (y[i] < 0) == (y[i - 1] < 0))
            fail(ErrorKind::unresolved_critical_point,
                 "critical point near v = " + std::to_string(x[i]) + " not resolved by the bracketing grid");
    }
    return out;
}

inline double principal_value(const Marginal& m, double w) {
    const double R = m.v_max + 4.0;
    auto f = [&](double r) { return m.df(r) / (r - w); };
    const int panels = std::max(4, static_cast<int>(std::ceil(R * 2.0)));
    // the singularity is removable; splitting at w keeps it on a panel edge,
    // which the Gauss nodes never touch
    return integrate_adaptive(f, -R, w, panels).value.real() + integrate_adaptive(f, w, R, panels).value.real();
}

inline PenroseReport penrose_check(const Equilibrium& eq, const Interaction& W, const std::vector<Wavevector>& ks) {
    PenroseReport rep;
    for (const auto& k : ks) {
        PenroseMode pm{k, {}, true};
        const auto m = eq.marginal(k);
        const double wk = W(k);
        for (double w : critical_points(m)) {
            const double pv = principal_value(m, w);
            pm.points.push_back({w, pv, wk * pv});
            if (!(wk * pv < 1.0)) pm.pass = false;
        }
        rep.pass = rep.pass && pm.pass;
        rep.modes.push_back(std::move(pm));
    }
    return rep;
}

inline std::vector<Wavevector> mode_set(int d, int k_max) {
    std::vector<Wavevector> ks;
    if (d == 1) {
        for (int k = 1; k <= k_max; ++k) ks.push_back(wavevector(k));
    } else {
        for (int a = -k_max; a <= k_max; ++a)
            for (int b = -k_max; b <= k_max; ++b)
                if ((a || b) && (b > 0 || (b == 0 && a > 0)))
                    ks.push_back({static_cast<double>(a), static_cast<double>(b)});
    }
    return ks;
}

// ------------------------------------------------------------- winding

struct Winding {
    int number = 0;
    double Z = 0;
    std::size_t samples = 0;
};

// Winding of zeta -> L(k, i zeta) - 1 about 0. Equals the number of roots
// of 1 = L with Re xi < 0 (growing modes).
inline Winding winding_number(const Equilibrium& eq, const Interaction& W, const Wavevector& k, double Z0 = 4.0) {
    Winding out;
    if (W(k) == 0.0) return out;
    auto G = [&](double z) { return dispersion_function(eq, W, k, cplx(0.0, z)) - 1.0; };
    double Z = Z0;
    while (std::abs(G(Z) + 1.0) > 0.05 || std::abs(G(-Z) + 1.0) > 0.05) {
        Z *= 2;
        require(Z < 1e4, ErrorKind::under_resolved, "dispersion function does not decay along the imaginary axis");
    }
    out.Z = Z;
    const int n0 = 512;
    double total = 0;
    std::size_t count = 0;
    auto darg = [](cplx a, cplx b) { return std::arg(b / a); };
    // recursive refinement keeps each argument increment below pi/4
    auto refine = [&](auto&& self, double z0, cplx g0, double z1, cplx g1, int depth) -> double {
        const double d = darg(g0, g1);
        if (std::abs(d) <= std::numbers::pi / 4) return d;
        if (depth > 30) {
            if (std::abs(d) > std::numbers::pi / 2)
                fail(ErrorKind::under_resolved, "winding contour under-resolved near zeta = " + std::to_string(z0));
            return d;
        }
        const double zm = 0.5 * (z0 + z1);
        const cplx gm = G(zm);
        ++count;
        return self(self, z0, g0, zm, gm, depth + 1) + self(self, zm, gm, z1, g1, depth + 1);
    };
    std::vector<cplx> g(n0 + 1);
    std::vector<double> z(n0 + 1);
    for (int i = 0; i <= n0; ++i) z[i] = -Z + 2.0 * Z * i / n0;
    parallel_for(static_cast<std::size_t>(n0 + 1), [&](std::size_t i) { g[i] = G(z[i]); });
    count = n0 + 1;
    for (int i = 0; i < n0; ++i) total += refine(refine, z[i], g[i], z[i + 1], g[i + 1], 0);
    total += darg(g[n0], g[0]); // closing arc: L ~ 0 there
    const double wn = total / (2.0 * std::numbers::pi);
    out.number = static_cast<int>(std::lround(wn));
    require(std::abs(wn - out.number) < 0.05, ErrorKind::under_resolved, "winding sum is not an integer");
    out.samples = count;
    return out;
}

// --------------------------------------------------------- margin scan

struct MarginOptions {
    double lambda_bar = 0.05;
    double mu_min = -1.0;
    double Z = 10.0;
    int n_mu = 8;
    int n_zeta = 401;
    int k_max = 8;
    double kappa_min = 1e-3;
};

struct MarginReport {
    double kappa = 0;        // reported margin (0 when an unstable root exists)
    double sampled_min = 0;  // min |L - 1| over the scan
    Wavevector argmin_k{};
    cplx argmin_xi{};
    double tail_zeta = 0;    // bound on |L| for |zeta| > Z
    double tail_k = 0;       // bound on |L| for |k| > k_max
    std::vector<int> winding; // per scanned mode
    bool unstable_root = false;
    bool warning = false;     // kappa below kappa_min
    const char* label = "sampled";
};

namespace detail {

// |W| [ |g'(0)| + int |g''| ] with g(u) = e^{mu u} fhat(u) u, so |L| <= bound / zeta^2
inline double zeta_tail_constant(const Marginal& m, double wk, double mu) {
    const double ucut = dispersion_cutoff(m, 1.0, 1.0, mu);
    auto g2 = [&](double u) {
        const cplx f = m.fhat(u);
        const cplx f1 = cplx(0, -1) * m.fhat_moment(u, 1);
        const cplx f2 = -m.fhat_moment(u, 2);
        const cplx val = std::exp(mu * u) * (mu * mu * u * f + 2.0 * mu * f + 2.0 * mu * u * f1 + 2.0 * f1 + u * f2);
        return std::abs(val);
    };
    const double I = integrate_adaptive(g2, 0.0, ucut, dispersion_panels(m, ucut, 0.0), 1e-8).value.real();
    return std::abs(wk) * (std::abs(m.fhat(0)) + I);
}

inline double envelope_moment(const Marginal& m, double mu) {
    const double ucut = dispersion_cutoff(m, 1.0, 1.0, mu);
    auto f = [&](double u) { return std::exp(mu * u) * m.envelope(u) * u; };
    return integrate_adaptive(f, 0.0, ucut, dispersion_panels(m, ucut, 0.0), 1e-8).value.real();
}

} // namespace detail

inline MarginReport condition_L_margin(const Equilibrium& eq, const Interaction& W, const MarginOptions& o) {
    require(o.lambda_bar > o.mu_min && o.n_mu >= 1 && o.n_zeta >= 2 && o.k_max >= 1 && o.Z > 0,
            ErrorKind::config, "margin scan box is empty");
    MarginReport rep;
    rep.sampled_min = std::numeric_limits<double>::infinity();
    std::vector<Wavevector> ks;
    for (const auto& k : mode_set(eq.d, o.k_max)) {
        ks.push_back(k);
        ks.push_back({-k[0], -k[1]});
    }
    const std::size_t per_k = static_cast<std::size_t>(o.n_mu) * o.n_zeta;
    // mu rows run from mu_min up to and including lambda_bar
    auto mu_at = [&](int im) {
        return o.n_mu == 1 ? o.lambda_bar : o.mu_min + (o.lambda_bar - o.mu_min) * im / (o.n_mu - 1);
    };
    std::vector<double> vals(ks.size() * per_k);
    parallel_for(vals.size(), [&](std::size_t idx) {
        const std::size_t ik = idx / per_k, r = idx % per_k;
        const int im = static_cast<int>(r / o.n_zeta), iz = static_cast<int>(r % o.n_zeta);
        const double mu = mu_at(im);
        const double ze = -o.Z + 2.0 * o.Z * iz / (o.n_zeta - 1);
        vals[idx] = std::abs(dispersion_function(eq, W, ks[ik], cplx(mu, ze)) - 1.0);
    });
    for (std::size_t idx = 0; idx < vals.size(); ++idx) {
        if (vals[idx] < rep.sampled_min) {
            rep.sampled_min = vals[idx];
            const std::size_t ik = idx / per_k, r = idx % per_k;
            rep.argmin_k = ks[ik];
            rep.argmin_xi = cplx(mu_at(static_cast<int>(r / o.n_zeta)),
                                 -o.Z + 2.0 * o.Z * static_cast<int>(r % o.n_zeta) / (o.n_zeta - 1));
        }
    }
    for (const auto& k : ks) {
        const int wn = winding_number(eq, W, k).number;
        rep.winding.push_back(wn);
        if (wn != 0) rep.unstable_root = true;
        const auto m = eq.marginal(k);
        rep.tail_zeta = std::max(rep.tail_zeta, detail::zeta_tail_constant(m, W(k), o.lambda_bar) / (o.Z * o.Z));
    }
    // |W| decreases in |k| and the marginal envelope does not depend on |k|
    const double wk_out = std::abs(W(static_cast<double>(o.k_max + 1)));
    double env = 0;
    for (const auto& k : ks) env = std::max(env, detail::envelope_moment(eq.marginal(k), o.lambda_bar));
    rep.tail_k = wk_out * env;
    rep.kappa = rep.unstable_root ? 0.0
                                  : std::max(0.0, std::min({rep.sampled_min, 1.0 - rep.tail_zeta, 1.0 - rep.tail_k}));
    rep.warning = rep.kappa < o.kappa_min;
    return rep;
}

// ------------------------------------------------------------------ roots

struct DispersionRoot {
    cplx xi;
    double growth_rate; // Re of the time exponent: -|k| Re xi
    double frequency;   // |k| Im xi
    double residual;
};

struct RootBox {
    double mu_lo = -3.0, mu_hi = 3.0;
    double Z = 6.0;
    int n_mu = 31, n_zeta = 61;
};

struct RootSearch {
    std::vector<DispersionRoot> roots;
    std::vector<cplx> failed_seeds;
};

inline RootSearch find_dispersion_roots(const Equilibrium& eq, const Interaction& W, const Wavevector& k,
                                        const RootBox& box = {}) {
    RootSearch out;
    if (W(k) == 0.0) return out;
    const double kabs = norm(k);
    const int nm = box.n_mu, nz = box.n_zeta;
    std::vector<double> a(static_cast<std::size_t>(nm) * nz);
    auto xi_at = [&](int i, int j) {
        return cplx(box.mu_lo + (box.mu_hi - box.mu_lo) * i / (nm - 1), -box.Z + 2.0 * box.Z * j / (nz - 1));
    };
    parallel_for(a.size(), [&](std::size_t idx) {
        const int i = static_cast<int>(idx / nz), j = static_cast<int>(idx % nz);
        a[idx] = std::abs(dispersion_function(eq, W, k, xi_at(i, j)) - 1.0);
    });
    std::vector<cplx> seeds;
    for (int i = 0; i < nm; ++i)
        for (int j = 0; j < nz; ++j) {
            const double v = a[static_cast<std::size_t>(i) * nz + j];
            bool is_min = true;
            for (int di = -1; di <= 1 && is_min; ++di)
                for (int dj = -1; dj <= 1; ++dj) {
                    const int ii = i + di, jj = j + dj;
                    if ((di || dj) && ii >= 0 && ii < nm && jj >= 0 && jj < nz &&
                        a[static_cast<std::size_t>(ii) * nz + jj] < v) {
                        is_min = false;
                        break;
                    }
                }
            if (is_min && v < 1.0) seeds.push_back(xi_at(i, j));
        }
    for (const cplx s : seeds) {
        cplx w = std::conj(s);
        bool ok = false;
        double res = 0;
        for (int it = 0; it < 50; ++it) {
            cplx H;
            try {
                H = dispersion_function(eq, W, k, std::conj(w)) - 1.0;
            } catch (const Error&) {
                break;
            }
            res = std::abs(H);
            if (res < 1e-10) {
                ok = true;
                break;
            }
            const cplx dH = dispersion_derivative(eq, W, k, std::conj(w));
            if (dH == cplx{}) break;
            w -= H / dH;
            if (!std::isfinite(w.real()) || !std::isfinite(w.imag()) || w.real() > 4 * std::abs(box.mu_hi) + 10) break;
        }
        if (!ok) {
            out.failed_seeds.push_back(s);
            continue;
        }
        const cplx xi = std::conj(w);
        bool dup = false;
        for (const auto& r : out.roots)
            if (std::abs(r.xi - xi) < 1e-8 * std::max(1.0, std::abs(xi))) dup = true;
        if (!dup) out.roots.push_back({xi, -kabs * xi.real(), kabs * xi.imag(), res});
    }
    std::sort(out.roots.begin(), out.roots.end(),
              [](const auto& x, const auto& y) { return x.growth_rate > y.growth_rate ||
                                                        (x.growth_rate == y.growth_rate && x.frequency > y.frequency); });
    return out;
}

} // namespace landau
