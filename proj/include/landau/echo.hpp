#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "error.hpp"
#include "gevrey.hpp"
#include "grid.hpp"
#include "parallel.hpp"
#include "quadrature.hpp"
#include "vlasov.hpp"

namespace landau {

struct EchoKernelConfig {
    GevreySchedule schedule;
    double gamma = 1.0;
    double c = 0.9;
    double delta = 0;       // 0: (1 - c) alpha0
    double C_s = 0.5;       // <a,b>^s >= C_s (<a>^s + <b>^s) for the l1 bracket
    std::vector<int> k_list{1, 2, 3, 4, 6, 8, 12, 16, 24, 32, 48};
    int l_window = 40;      // l ranges over [-l_window, k + l_window]
    double tail_flag = 0.01;

    double delta_eff() const { return delta > 0 ? delta : (1.0 - c) * schedule.alpha0(); }
};

inline double quad_step(double t) { return std::min(0.1, t / 2000.0); }

// e^{-nu <k,kt>^s} <tau> |l|^{-gamma} e^{-delta <k-l, kt - l tau>^s},  nu = lambda(tau) - lambda(t)
inline double response_kernel_surrogate(const EchoKernelConfig& cfg, int k, int l, double t, double tau) {
    if (l == 0) return 0.0;
    const auto& S = cfg.schedule;
    const double s = S.s;
    const double nu = lambda_at(S, tau).lambda - lambda_at(S, t).lambda;
    const double ak = std::abs(k);
    const double lw = -nu * std::pow(bracket(ak, ak * t), s) -
                      cfg.delta_eff() * std::pow(bracket(k - l, k * t - l * tau), s);
    return std::sqrt(1.0 + tau * tau) * std::pow(std::abs(l), -cfg.gamma) * std::exp(lw);
}

// diagonal (l = k) contribution: |k(t - tau)| |k|^{-gamma} e^{-delta <k(t - tau)>^s}
inline double response_kernel_instantaneous(const EchoKernelConfig& cfg, int k, double t, double tau) {
    const double u = std::abs(k * (t - tau));
    return u * std::pow(std::abs(k), -cfg.gamma) * std::exp(-cfg.delta_eff() * std::pow(bracket(0, u), cfg.schedule.s));
}

struct MomentValue {
    double value = 0;
    double instantaneous = 0;
    double tail_bound = 0; // bound on the l outside the window
    bool tail_flagged = false;
};

namespace detail {

// sum over l with j = |l - k| > W of |l|^{-(g+1)} e^{-C delta <j>^s}; right of the
// window |l| >= j, left of it |l| >= j W / (W + k). Integral comparison.
inline double mode_tail_sum(double W, int k, double gamma, double cdelta, double s) {
    auto f = [&](double x) { return std::pow(x, -gamma - 1) * std::exp(-cdelta * std::pow(bracket(0, x), s)); };
    auto g = [&](double y) { const double x = W * std::exp(y); return f(x) * x; };
    const double sides = 1.0 + std::pow((W + std::abs(k)) / W, gamma + 1);
    return sides * (f(W) + integrate_adaptive(g, 0.0, 60.0, 60, 1e-8).value.real());
}

inline double bracket_integral(double cdelta, double s) {
    auto f = [&](double y) { const double x = std::exp(y); return std::exp(-cdelta * std::pow(bracket(0, x), s)) * x; };
    return 2.0 * (1.0 + integrate_adaptive(f, 0.0, 60.0, 60, 1e-8).value.real());
}

} // namespace detail

// Lemma-type time-response moment: int_0^t sum_l kernel dtau with the diagonal
// replaced by its instantaneous form; trapezoid with dtau = min(0.1, t/2000).
inline MomentValue moment_I(const EchoKernelConfig& cfg, double t, int k) {
    MomentValue out;
    if (t <= 0) return out;
    const double h = quad_step(t);
    const long n = static_cast<long>(std::ceil(t / h));
    const double dtau = t / n;
    const auto& S = cfg.schedule;
    const double s = S.s, delta = cfg.delta_eff(), ak = std::abs(k);
    // l-independent factors per tau
    std::vector<double> pre(n + 1);
    const double lam_t = lambda_at(S, t).lambda, bk = std::pow(bracket(ak, ak * t), s);
    for (long i = 0; i <= n; ++i) {
        const double tau = i * dtau;
        pre[i] = std::sqrt(1.0 + tau * tau) * std::exp(-(lambda_at(S, tau).lambda - lam_t) * bk);
    }
    for (long i = 0; i <= n; ++i) {
        const double w = (i == 0 || i == n) ? 0.5 : 1.0;
        out.instantaneous += w * response_kernel_instantaneous(cfg, k, t, i * dtau);
    }
    out.instantaneous *= dtau;

    const double cd = cfg.C_s * delta;
    const double tail_scale = std::sqrt(1.0 + t * t);
    // per-l pruning: skip tau where the bound on the integrand is below this
    const double floor_abs = 1e-18 * std::max(out.instantaneous, 1e-300) / std::max(1.0, t / dtau);
    const int lo = -cfg.l_window, hi = k + cfg.l_window;
    std::vector<double> per_l(static_cast<std::size_t>(hi - lo + 1));
    parallel_for(per_l.size(), [&](std::size_t idx) {
        const int l = lo + static_cast<int>(idx);
        if (l == 0 || l == k) return;
        const double amp = tail_scale * std::pow(std::abs(l), -cfg.gamma) * std::exp(-cd * std::pow(bracket(k - l, 0), s));
        if (amp <= floor_abs) return;
        // |kt - l tau| <= U keeps e^{-C delta <kt - l tau>^s} above floor_abs / amp
        const double U = std::pow(std::log(amp / floor_abs) / cd, 1.0 / s);
        long i0 = 0, i1 = n;
        if (l > 0) {
            i0 = std::max(0L, static_cast<long>(std::floor((k * t - U) / l / dtau)));
            i1 = std::min(n, static_cast<long>(std::ceil((k * t + U) / l / dtau)));
        } else if (k * t > U) {
            return;
        }
        double acc = 0;
        const double bkl = std::abs(k - l);
        for (long i = i0; i <= i1; ++i) {
            const double tau = i * dtau;
            const double w = (i == 0 || i == n) ? 0.5 : 1.0;
            const double r = bkl + std::abs(k * t - l * tau);
            acc += w * pre[i] * std::exp(-delta * std::pow(1.0 + r * r, 0.5 * s));
        }
        per_l[idx] = acc * dtau * std::pow(std::abs(l), -cfg.gamma);
    });
    double sum = 0;
    for (double v : per_l) sum += v;
    out.value = out.instantaneous + sum;
    out.tail_bound = tail_scale * detail::bracket_integral(cd, s) *
                     detail::mode_tail_sum(cfg.l_window, k, cfg.gamma, cd, s);
    out.tail_flagged = out.tail_bound > cfg.tail_flag * out.value;
    return out;
}

// sum over l window and k of int_tau^T kernel dt
inline double moment_II(const EchoKernelConfig& cfg, double tau, int l, double T) {
    require(T >= tau, ErrorKind::config, "moment_II needs T >= tau");
    if (T == tau || l == 0) return 0.0;
    const double h = quad_step(T);
    const long n = std::max(1L, static_cast<long>(std::ceil((T - tau) / h)));
    const double dt = (T - tau) / n;
    double acc = 0;
    for (int k = l - cfg.l_window; k <= l + cfg.l_window; ++k) {
        if (k == 0) continue;
        double part = 0;
        for (long i = 0; i <= n; ++i) {
            const double t = tau + i * dt;
            const double w = (i == 0 || i == n) ? 0.5 : 1.0;
            part += w * (k == l ? response_kernel_instantaneous(cfg, k, t, tau) : response_kernel_surrogate(cfg, k, l, t, tau));
        }
        acc += part * dt;
    }
    return acc;
}

// sup over l and sampled tau of sum_k kernel(t, tau)
inline double sup_kernel(const EchoKernelConfig& cfg, double t, int tau_samples = 512) {
    double best = 0;
    for (int l = -cfg.l_window; l <= cfg.l_window; ++l) {
        if (l == 0) continue;
        for (int i = 0; i <= tau_samples; ++i) {
            const double tau = t * i / tau_samples;
            double acc = 0;
            for (int k = l - cfg.l_window; k <= l + cfg.l_window; ++k)
                if (k != 0) acc += response_kernel_surrogate(cfg, k, l, t, tau);
            best = std::max(best, acc);
        }
    }
    return best;
}

struct ResonantSplit {
    int k = 0, l = 0;
    double t = 0;
    double interval_lo = 0, interval_hi = 0; // I_R, empty when lo >= hi
    double I_short = 0, I_R = 0, I_NR = 0;
    double resonant_bound = 0; // k t / l^{2+gamma} exp(-delta' |kt|^{s-a} / l^{1-a})
};

// The integrand is smooth between tau = 1 (kink of the radius) and the resonance
// kt = l tau, varying on a 1/|l| scale; composite Gauss-Legendre between those cuts.
inline double integrate_kernel(const EchoKernelConfig& cfg, int k, int l, double t, double a, double b) {
    if (b <= a) return 0.0;
    auto f = [&](double tau) { return response_kernel_surrogate(cfg, k, l, t, tau); };
    std::vector<double> cuts{a, b};
    for (double x : {1.0, l != 0 ? double(k) * t / l : -1.0})
        if (x > a && x < b) cuts.push_back(x);
    std::sort(cuts.begin(), cuts.end());
    const double h = std::min(0.1, 0.25 / std::max(1, std::abs(l)));
    double acc = 0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) acc += integrate_composite(f, cuts[i], cuts[i + 1], h).real();
    return acc;
}

inline ResonantSplit resonant_split(const EchoKernelConfig& cfg, int k, int l, double t) {
    require(k >= 1 && l >= 1, ErrorKind::config, "resonant_split works with k, l >= 1");
    ResonantSplit r{k, l, t};
    const double t1 = std::min(1.0, t);
    r.I_short = integrate_kernel(cfg, k, l, t, 0.0, t1);
    r.interval_lo = std::max(1.0, (k * t - 0.5 * t) / l);
    r.interval_hi = std::min(t, (k * t + 0.5 * t) / l);
    if (r.interval_hi > r.interval_lo) {
        r.I_R = integrate_kernel(cfg, k, l, t, r.interval_lo, r.interval_hi);
        r.I_NR = integrate_kernel(cfg, k, l, t, t1, r.interval_lo) + integrate_kernel(cfg, k, l, t, r.interval_hi, t);
    } else {
        r.interval_lo = r.interval_hi = 0;
        r.I_NR = integrate_kernel(cfg, k, l, t, t1, t);
    }
    const double a = cfg.schedule.a, s = cfg.schedule.s;
    r.resonant_bound = k * t / std::pow(l, 2.0 + cfg.gamma) *
                       std::exp(-cfg.C_s * cfg.delta_eff() * std::pow(std::abs(k * t), s - a) / std::pow(l, 1.0 - a));
    return r;
}

struct SweepRow {
    double s = 0, T = 0;
    double sup_moment = 0;
    int argmax_k = 0;
    double a = 0;
    bool surrogate_schedule = false;
    bool tail_flagged = false;
};

struct SweepClass {
    double s = 0;
    std::string label; // bounded | growing | indeterminate
    double drift = 0;  // max/min - 1 over the horizons
    double first_ratio = 0;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::vector<SweepClass> classes;
};

struct SweepOptions {
    double lambda0 = 48, lambda_prime = 4;
    double a0 = 0.05;
    double bounded_drift = 0.10;
    double growth_ratio = 2.0;
};

inline SweepResult critical_exponent_sweep(const EchoKernelConfig& base, double gamma, const std::vector<double>& s_list,
                                           const std::vector<double>& horizons, const SweepOptions& o = {}) {
    SweepResult out;
    for (double s : s_list) {
        EchoKernelConfig cfg = base;
        cfg.gamma = gamma;
        const auto& B = base.schedule;
        cfg.schedule = radius_exponent(s, gamma) > 0
                           ? make_schedule(s, o.lambda0, o.lambda_prime, B.sigma, B.beta, B.M, gamma)
                           : make_surrogate_schedule(s, o.lambda0, o.lambda_prime, B.sigma, B.beta, B.M, gamma, o.a0);
        std::vector<double> sups;
        for (double T : horizons) {
            SweepRow row{s, T, 0, 0, cfg.schedule.a, cfg.schedule.a_surrogate, false};
            for (int k : cfg.k_list) {
                const auto m = moment_I(cfg, T, k);
                if (m.value > row.sup_moment) {
                    row.sup_moment = m.value;
                    row.argmax_k = k;
                }
                row.tail_flagged = row.tail_flagged || m.tail_flagged;
            }
            sups.push_back(row.sup_moment);
            out.rows.push_back(row);
        }
        SweepClass c{s, "indeterminate", 0, 0};
        if (sups.size() >= 2) {
            const auto [mn, mx] = std::minmax_element(sups.begin(), sups.end());
            c.drift = *mx / *mn - 1.0;
            c.first_ratio = sups[1] / sups[0];
            if (c.first_ratio >= o.growth_ratio)
                c.label = "growing";
            else if (c.drift <= o.bounded_drift)
                c.label = "bounded";
        }
        out.classes.push_back(c);
    }
    return out;
}

// Kernel evaluated on simulation data: |l|^{-gamma} e^{(lambda(t)-lambda(tau))<k,kt>^s}
// e^{c lambda(tau) <k-l, kt - l tau>^s} |k(t - tau)| |f_{k-l}(tau, kt - l tau)|
inline double response_kernel_empirical(const FieldSpectrum& snap, const GevreySchedule& S, double gamma, double c,
                                        int k, int l, double t, double tau) {
    require_frame(snap, Frame::gliding);
    if (l == 0) return 0.0;
    const auto& g = snap.grid;
    require(std::abs(snap.t - tau) <= 1e-9 * std::max(1.0, tau), ErrorKind::grid_mismatch,
            "snapshot time differs from tau");
    const int m = k - l;
    require(m > g.kmin() && m < -g.kmin(), ErrorKind::off_lattice, "mode k - l outside the lattice");
    const double eta = k * t - l * tau;
    const double p = eta / g.deta();
    const double pr = std::round(p);
    require(std::abs(p - pr) <= 1e-9 * std::max(1.0, std::abs(p)), ErrorKind::off_lattice,
            "kt - l tau is not on the eta lattice");
    require(pr >= g.pmin() && pr < -g.pmin(), ErrorKind::off_lattice, "kt - l tau beyond eta_max");
    const double lt = lambda_at(S, t).lambda, ltau = lambda_at(S, tau).lambda;
    const double ak = std::abs(k);
    const double lw = (lt - ltau) * std::pow(bracket(ak, ak * t), S.s) + c * ltau * std::pow(bracket(m, eta), S.s);
    return std::pow(std::abs(l), -gamma) * std::exp(lw) * std::abs(k * (t - tau)) *
           std::abs(snap.at(m, static_cast<int>(pr)));
}

// ------------------------------------------------------------ echo run

struct EchoSetup {
    SimConfig sim;        // grid, equilibrium, interaction, schedule, dt
    int source_mode = 2;  // l: kicked mode
    int target_mode = 1;  // k: observed mode
    double tau_kick = 10;
    double eps = 1e-3;
    double profile_theta = 1.0;
};

struct EchoResult {
    bool detected = false;
    double echo_time = 0;
    double amplitude = 0;
    double predicted_time = 0;
    std::vector<double> t;
    std::vector<double> rho_abs; // |rho_k(t)|
    RunStatus status = RunStatus::ok;
    std::string message;
};

inline EchoResult run_echo_experiment(const EchoSetup& e) {
    require(e.source_mode > e.target_mode && e.target_mode >= 1, ErrorKind::config, "echo needs l > k >= 1");
    EchoResult out;
    out.predicted_time = static_cast<double>(e.source_mode) * e.tau_kick / e.target_mode;
    SimConfig cfg = e.sim;
    const auto& g = cfg.setup.grid;
    aligned_steps(g, e.tau_kick);
    cfg.perturbation = Perturbation{e.eps, {ModeProfile{e.source_mode - e.target_mode, {1.0, 0.0}, e.profile_theta, 0.0}}};
    cfg.kick = Kick{true, e.tau_kick, e.source_mode, e.eps};
    cfg.diag_stride = 1;
    const double t_end = std::min(validity_horizon(g), e.tau_kick + 2.0 * (out.predicted_time - e.tau_kick));
    cfg.horizon = t_end;
    const auto r = run_simulation(cfg);
    out.status = r.status;
    out.message = r.message;
    const auto& rho = r.density.mode(e.target_mode);
    for (std::size_t n = 0; n < rho.size(); ++n) {
        out.t.push_back(r.density.t(n));
        out.rho_abs.push_back(std::abs(rho[n]));
    }
    const double w0 = e.tau_kick + 0.5 * (out.predicted_time - e.tau_kick);
    std::size_t best = 0;
    double peak = -1;
    for (std::size_t n = 0; n < out.t.size(); ++n)
        if (out.t[n] >= w0 && out.rho_abs[n] > peak) {
            peak = out.rho_abs[n];
            best = n;
        }
    const double floor = 1e-13 * std::abs(e.eps);
    if (peak <= floor || best == 0 || best + 1 >= out.t.size() || out.t[best - 1] < w0) return out;
    // parabola through the three samples around the peak
    const double y0 = out.rho_abs[best - 1], y1 = out.rho_abs[best], y2 = out.rho_abs[best + 1];
    const double den = y0 - 2 * y1 + y2;
    const double off = den != 0 ? 0.5 * (y0 - y2) / den : 0.0;
    out.detected = true;
    out.echo_time = out.t[best] + off * r.density.dt;
    out.amplitude = y1 - 0.25 * (y0 - y2) * off;
    return out;
}

} // namespace landau
