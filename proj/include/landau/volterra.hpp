#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "equilibrium.hpp"
#include "error.hpp"
#include "gevrey.hpp"
#include "grid.hpp"
#include "parallel.hpp"
#include "perturbation.hpp"

namespace landau {

// rho_k(t_n), t_n = n dt, one row per mode
struct DensityTrace {
    double dt = 0;
    std::size_t n_times = 0;
    std::vector<int> modes;
    std::vector<std::vector<cplx>> values;
    std::vector<double> validity; // per-mode horizon; +inf when unlimited

    double t(std::size_t n) const { return dt * static_cast<double>(n); }
    std::size_t index_of(int k) const {
        for (std::size_t i = 0; i < modes.size(); ++i)
            if (modes[i] == k) return i;
        fail(ErrorKind::config, "mode " + std::to_string(k) + " not in trace");
    }
    const std::vector<cplx>& mode(int k) const { return values[index_of(k)]; }
};

// phi_n = F_n + dt (K_n phi_0 / 2 + sum_{m=1}^{n-1} K_{n-m} phi_m + K_0 phi_n / 2)
struct VolterraProblem {
    std::vector<cplx> K; // K(t_n)
    std::vector<cplx> F; // F(t_n)
    double dt = 0;
};

inline std::vector<cplx> solve_volterra(const VolterraProblem& p) {
    require(p.K.size() == p.F.size() && !p.F.empty(), ErrorKind::grid_mismatch,
            "kernel and forcing must share the time grid");
    require(p.dt > 0, ErrorKind::config, "volterra step must be positive");
    const std::size_t N = p.F.size();
    std::vector<cplx> phi(N);
    const cplx diag = 1.0 - 0.5 * p.dt * p.K[0];
    phi[0] = p.F[0]; // the integral over [0, 0] vanishes
    for (std::size_t n = 1; n < N; ++n) {
        cplx acc = 0.5 * p.K[n] * phi[0];
        for (std::size_t m = 1; m < n; ++m) acc += p.K[n - m] * phi[m];
        phi[n] = (p.F[n] + p.dt * acc) / diag;
    }
    return phi;
}

// K0(t, k) = -fhat0(kt) W(k) k^2 t
inline std::vector<cplx> landau_kernel(const Equilibrium& eq, const Interaction& W, int k, double dt, std::size_t n) {
    std::vector<cplx> K(n);
    const double wk = W(std::abs(k));
    for (std::size_t i = 0; i < n; ++i) {
        const double t = dt * static_cast<double>(i);
        K[i] = -eq.fhat(k * t) * wk * double(k) * double(k) * t;
    }
    return K;
}

struct LinearOptions {
    std::vector<int> modes; // empty: positive modes carried by the data
    double eta_max = 0;     // > 0: report the lattice validity horizon
};

inline std::vector<int> data_modes(const Perturbation& p) {
    std::vector<int> ks;
    for (const auto& m : p.modes)
        if (std::find(ks.begin(), ks.end(), m.k) == ks.end()) ks.push_back(m.k);
    std::sort(ks.begin(), ks.end());
    return ks;
}

inline DensityTrace linear_density(const Perturbation& h_in, const Equilibrium& eq, const Interaction& W,
                                   double horizon, double dt, const LinearOptions& opt = {}) {
    require(horizon > 0 && dt > 0, ErrorKind::config, "volterra horizon and dt must be positive");
    require(eq.d == 1, ErrorKind::config, "the Volterra solver works in d = 1");
    DensityTrace tr;
    tr.dt = dt;
    tr.n_times = static_cast<std::size_t>(std::floor(horizon / dt + 1e-9)) + 1;
    tr.modes = opt.modes.empty() ? data_modes(h_in) : opt.modes;
    tr.values.resize(tr.modes.size());
    tr.validity.resize(tr.modes.size());
    parallel_for(tr.modes.size(), [&](std::size_t i) {
        const int k = tr.modes[i];
        require(k != 0, ErrorKind::config, "mode 0 carries no density");
        VolterraProblem p{landau_kernel(eq, W, k, dt, tr.n_times), std::vector<cplx>(tr.n_times), dt};
        for (std::size_t n = 0; n < tr.n_times; ++n) p.F[n] = h_in(k, k * tr.t(n));
        tr.values[i] = solve_volterra(p);
        tr.validity[i] = opt.eta_max > 0 ? opt.eta_max / std::abs(k) : std::numeric_limits<double>::infinity();
    });
    return tr;
}

inline DensityTrace forcing_trace(const Perturbation& h_in, const DensityTrace& like) {
    DensityTrace f = like;
    for (std::size_t i = 0; i < f.modes.size(); ++i)
        for (std::size_t n = 0; n < f.n_times; ++n) f.values[i][n] = h_in(f.modes[i], f.modes[i] * f.t(n));
    return f;
}

struct WeightedRatio {
    double ratio = 0;
    int mode = 0;
    std::vector<int> skipped; // zero-forcing modes
};

// max_k ( int A_k(t,kt)^2 |phi|^2 dt / int A_k(t,kt)^2 |F|^2 dt )^{1/2}, trapezoid in time
inline WeightedRatio estimate_weighted_ratio(const DensityTrace& phi, const DensityTrace& F, const GevreySchedule& g) {
    require(phi.modes == F.modes && phi.n_times == F.n_times && phi.dt == F.dt, ErrorKind::grid_mismatch,
            "solution and forcing traces differ in modes or times");
    WeightedRatio out;
    for (std::size_t i = 0; i < phi.modes.size(); ++i) {
        const double k = std::abs(phi.modes[i]);
        double num = 0, den = 0;
        for (std::size_t n = 0; n < phi.n_times; ++n) {
            const double t = phi.t(n);
            const double w = (n == 0 || n + 1 == phi.n_times) ? 0.5 : 1.0;
            const double lw = 2.0 * log_weight(g, lambda_at(g, t).lambda, k, k * t, 0.0);
            num += w * std::norm(phi.values[i][n]) * std::exp(lw);
            den += w * std::norm(F.values[i][n]) * std::exp(lw);
        }
        if (den == 0.0) {
            out.skipped.push_back(phi.modes[i]);
            continue;
        }
        const double r = std::sqrt(num / den);
        if (r > out.ratio) {
            out.ratio = r;
            out.mode = phi.modes[i];
        }
    }
    return out;
}

// least-squares slope of log|rho| over samples with t in [t0, t1]
inline double fitted_log_slope(const std::vector<cplx>& v, double dt, double t0, double t1) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double t = dt * static_cast<double>(i);
        if (t < t0 || t > t1 || std::abs(v[i]) == 0.0) continue;
        const double y = std::log(std::abs(v[i]));
        sx += t, sy += y, sxx += t * t, sxy += t * y;
        ++n;
    }
    if (n < 2) return 0.0;
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

struct LinearFinalState {
    FieldSpectrum h;     // gliding frame
    double tail = 0;     // estimated |int_T^inf rho| contribution scale
    double decay_rate = 0;
    DensityTrace rho;
};

// h^L_k(eta) = h_in,k(eta) - int_0^T rho_k(t) W(k) k (eta - kt) fhat0(eta - kt) dt
inline LinearFinalState linear_final_state(const Perturbation& h_in, const Equilibrium& eq, const Interaction& W,
                                           const PhaseGrid& grid, double horizon, double dt) {
    LinearFinalState out;
    out.h = sample(h_in, grid);
    out.h.frame = Frame::gliding;
    out.h.t = horizon;
    if (W.vanishes()) return out;
    LinearOptions opt;
    for (int k : data_modes(h_in)) {
        opt.modes.push_back(-k);
        opt.modes.push_back(k);
    }
    out.rho = linear_density(h_in, eq, W, horizon, dt, opt);
    double peak = 0, rate = 0, last = 0;
    for (std::size_t i = 0; i < out.rho.modes.size(); ++i) {
        const auto& v = out.rho.values[i];
        for (auto z : v) peak = std::max(peak, std::abs(z));
        last = std::max(last, std::abs(v.back()));
    }
    // decay rate of the slowest mode, fitted over the second half of the
    // stretch where it stays above round-off
    rate = std::numeric_limits<double>::infinity();
    for (const auto& v : out.rho.values) {
        std::size_t n_hi = 0;
        for (std::size_t n = 0; n < v.size(); ++n)
            if (std::abs(v[n]) > 1e-13 * peak) n_hi = n;
        if (n_hi < 8) continue;
        const double t1 = dt * static_cast<double>(n_hi);
        rate = std::min(rate, -fitted_log_slope(v, dt, 0.5 * t1, t1));
    }
    if (std::isfinite(rate)) {
        if (rate <= 0)
            fail(ErrorKind::instability, "linear density does not decay: refusing to form the final state");
        out.decay_rate = rate;
        out.tail = last / rate;
    }
    const auto& g = grid;
    parallel_for(out.rho.modes.size(), [&](std::size_t i) {
        const int k = out.rho.modes[i];
        if (std::abs(k) >= static_cast<int>(g.Nx / 2)) return;
        const double wk = W(std::abs(k));
        const auto& rho = out.rho.values[i];
        for (std::size_t j = 0; j < g.Nv; ++j) {
            const double eta = out.h.eta_of(j);
            cplx acc{};
            for (std::size_t n = 0; n < out.rho.n_times; ++n) {
                const double w = (n == 0 || n + 1 == out.rho.n_times) ? 0.5 : 1.0;
                const double e = eta - k * out.rho.t(n);
                acc += w * rho[n] * e * eq.fhat(e);
            }
            out.h.at(k, out.h.p_of(j)) -= wk * double(k) * dt * acc;
        }
    });
    return out;
}

} // namespace landau
