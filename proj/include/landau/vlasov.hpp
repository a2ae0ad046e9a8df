#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "equilibrium.hpp"
#include "error.hpp"
#include "fft.hpp"
#include "gevrey.hpp"
#include "grid.hpp"
#include "parallel.hpp"
#include "perturbation.hpp"
#include "volterra.hpp"

namespace landau {

// F_k = -i k W(k) rho_k, with F_0 = 0
inline std::vector<cplx> compute_field(const std::vector<DensityMode>& rho, const Interaction& W) {
    std::vector<cplx> F(rho.size());
    for (std::size_t i = 0; i < rho.size(); ++i) {
        const int k = rho[i].k;
        F[i] = k == 0 ? cplx{} : cplx(0.0, -static_cast<double>(k)) * W(std::abs(k)) * rho[i].rho;
    }
    return F;
}

struct EtaFilter {
    bool on = false;
    double strength = 36.0; // multiplies by exp(-strength (|eta|/eta_max)^{2 order})
    int order = 8;
};

struct SolverSetup {
    PhaseGrid grid;
    Equilibrium eq;
    Interaction W;
    bool linearized = false;
    EtaFilter filter;
};

// Strang-split spectral solver for the perturbation h. The state is stored as
// g_k(v_m): Fourier in x, samples in v, rows in centered k order.
class Simulator {
public:
    explicit Simulator(SolverSetup s)
        : s_(std::move(s)), g_(s_.grid.Nx * s_.grid.Nv), f0_(s_.grid.Nv), df0_(s_.grid.Nv) {
        const auto& gr = s_.grid;
        for (std::size_t m = 0; m < gr.Nv; ++m) {
            f0_[m] = s_.eq.f0(gr.v(m));
            df0_[m] = s_.eq.df0(gr.v(m));
        }
        f0_sum_ = 0;
        for (double f : f0_) f0_sum_ += f;
    }

    const PhaseGrid& grid() const { return s_.grid; }
    const SolverSetup& setup() const { return s_; }
    double t = 0.0;

    void set_state(const FieldSpectrum& lab) {
        require_same_grid(lab.grid, s_.grid);
        require_frame(lab, Frame::lab);
        g_ = spectrum_to_kv(lab);
        truncate();
    }

    FieldSpectrum lab_spectrum() const {
        auto s = kv_to_spectrum(s_.grid, g_);
        s.t = t;
        return s;
    }

    const std::vector<cplx>& kv() const { return g_; }

    cplx rho(int k) const {
        const auto& gr = s_.grid;
        const std::size_t i = row(k);
        cplx acc{};
        for (std::size_t m = 0; m < gr.Nv; ++m) acc += g_[i * gr.Nv + m];
        return acc * gr.dv();
    }

    std::vector<DensityMode> density() const {
        std::vector<DensityMode> r;
        for (int k = s_.grid.kmin(); k < -s_.grid.kmin(); ++k) r.push_back({k, rho(k)});
        return r;
    }

    // field samples F(x_j)
    std::vector<double> field_x() const {
        const auto& gr = s_.grid;
        auto rho_k = density();
        for (auto& r : rho_k)
            if (r.k == 0) r.rho = 0;
        const auto F = compute_field(rho_k, s_.W);
        std::vector<cplx> buf(gr.Nx);
        for (std::size_t i = 0; i < gr.Nx; ++i)
            buf[detail::centered_to_fft(i, gr.Nx)] = std::abs(rho_k[i].k) <= gr.k_dealias() ? F[i] : cplx{};
        Fft(gr.Nx).backward(buf.data());
        std::vector<double> out(gr.Nx);
        for (std::size_t j = 0; j < gr.Nx; ++j) out[j] = buf[j].real();
        return out;
    }

    void step(double dt) {
        advect_x(0.5 * dt);
        const auto F = field_x();
        std::vector<double> a(F.size());
        for (std::size_t j = 0; j < a.size(); ++j) a[j] = F[j] * dt;
        shift_velocity(a);
        advect_x(0.5 * dt);
        fix_mass();
        t += dt;
    }

    // (h + f0)(x, v) -> (h + f0)(x, v - a(x)); first order in a for the
    // linearized solver
    void shift_velocity(const std::vector<double>& a) {
        const auto& gr = s_.grid;
        const std::size_t Nx = gr.Nx, Nv = gr.Nv;
        std::vector<cplx> hx(Nx * Nv);
        parallel_for_range(Nv, [&](std::size_t b, std::size_t e) {
            Fft fx(Nx);
            std::vector<cplx> buf(Nx);
            for (std::size_t m = b; m < e; ++m) {
                for (std::size_t i = 0; i < Nx; ++i) buf[detail::centered_to_fft(i, Nx)] = g_[i * Nv + m];
                fx.backward(buf.data());
                for (std::size_t j = 0; j < Nx; ++j) hx[j * Nv + m] = buf[j].real();
            }
        });
        const double deta = gr.deta(), eta_max = gr.eta_max();
        parallel_for_range(Nx, [&](std::size_t b, std::size_t e) {
            Fft fv(Nv);
            for (std::size_t j = b; j < e; ++j) {
                cplx* row = hx.data() + j * Nv;
                if (!s_.linearized && (a[j] != 0.0 || s_.filter.on)) {
                    eta_from_v(fv, row, gr.dv());
                    for (std::size_t q = 0; q < Nv; ++q) {
                        const long p = q < Nv / 2 ? static_cast<long>(q) : static_cast<long>(q) - static_cast<long>(Nv);
                        const double eta = p * deta;
                        cplx mult = std::polar(1.0, -eta * a[j]);
                        if (s_.filter.on)
                            mult *= std::exp(-s_.filter.strength * std::pow(std::abs(eta) / eta_max, 2 * s_.filter.order));
                        row[q] *= mult;
                    }
                    v_from_eta(fv, row, deta);
                    for (std::size_t m = 0; m < Nv; ++m) row[m] = row[m].real();
                }
                if (a[j] == 0.0) continue;
                for (std::size_t m = 0; m < Nv; ++m) {
                    const double src = s_.linearized ? -a[j] * df0_[m] : s_.eq.f0(gr.v(m) - a[j]) - f0_[m];
                    row[m] += src;
                }
            }
        });
        parallel_for_range(Nv, [&](std::size_t b, std::size_t e) {
            Fft fx(Nx);
            std::vector<cplx> buf(Nx);
            for (std::size_t m = b; m < e; ++m) {
                for (std::size_t j = 0; j < Nx; ++j) buf[j] = hx[j * Nv + m];
                fx.forward(buf.data());
                for (std::size_t i = 0; i < Nx; ++i)
                    g_[i * Nv + m] = buf[detail::centered_to_fft(i, Nx)] / static_cast<double>(Nx);
            }
        });
        truncate();
    }

    // exact free streaming: g_k(v) *= e^{-ikv tau}
    void advect_x(double tau) {
        const auto& gr = s_.grid;
        parallel_for(gr.Nx, [&](std::size_t i) {
            const int k = static_cast<int>(i) + gr.kmin();
            if (k == 0) return;
            for (std::size_t m = 0; m < gr.Nv; ++m) g_[i * gr.Nv + m] *= std::polar(1.0, -k * gr.v(m) * tau);
        });
    }

    // 2 pi int int h dx dv / (2 pi) = rho_0
    double mass() const { return rho(0).real(); }

    // || h + f0 ||_{L^2}
    double casimir() const {
        const auto& gr = s_.grid;
        double acc = 0;
        for (std::size_t i = 0; i < gr.Nx; ++i) {
            const bool zero = static_cast<int>(i) + gr.kmin() == 0;
            for (std::size_t m = 0; m < gr.Nv; ++m) acc += std::norm(g_[i * gr.Nv + m] + (zero ? f0_[m] : 0.0));
        }
        return std::sqrt(2.0 * std::numbers::pi * gr.dv() * acc);
    }

    bool finite() const {
        for (auto z : g_)
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
        return true;
    }

private:
    std::size_t row(int k) const { return static_cast<std::size_t>(k - s_.grid.kmin()); }

    // 2/3 rule, Nyquist row, conjugate symmetry
    void truncate() {
        const auto& gr = s_.grid;
        const int kc = gr.k_dealias();
        for (int k = gr.kmin(); k < -gr.kmin(); ++k)
            if (std::abs(k) > kc || k == gr.kmin())
                std::fill_n(g_.begin() + static_cast<std::ptrdiff_t>(row(k) * gr.Nv), gr.Nv, cplx{});
        for (int k = 0; k <= kc; ++k) {
            cplx* a = g_.data() + row(k) * gr.Nv;
            cplx* b = g_.data() + row(-k) * gr.Nv;
            for (std::size_t m = 0; m < gr.Nv; ++m) {
                const cplx z = 0.5 * (a[m] + std::conj(b[m]));
                a[m] = z;
                b[m] = std::conj(z);
            }
        }
    }

    // the perturbation carries no mass; remove drift along the f0 profile
    void fix_mass() {
        const auto& gr = s_.grid;
        const double delta = rho(0).real();
        if (delta == 0.0 || f0_sum_ == 0.0) return;
        cplx* r = g_.data() + row(0) * gr.Nv;
        for (std::size_t m = 0; m < gr.Nv; ++m) r[m] -= delta * f0_[m] / (gr.dv() * f0_sum_);
    }

    SolverSetup s_;
    std::vector<cplx> g_;
    std::vector<double> f0_, df0_;
    double f0_sum_ = 0;
};

struct Kick {
    bool on = false;
    double time = 0;
    int mode = 2;
    double amplitude = 0; // J(x) = amplitude cos(mode x)
};

struct SimConfig {
    SolverSetup setup;
    GevreySchedule schedule;
    Perturbation perturbation;
    double dt = 0;         // 0: deta
    double horizon = 0;    // 0: validity horizon
    int diag_stride = 1;   // diagnostics every diag_stride * deta
    int snapshot_stride = 0; // keep lab/gliding spectra every n diagnostics; 0: none
    double alarm_threshold = 1e-6; // fraction of |h|^2 in the outer eta band
    double alarm_band = 0.9;       // outer band starts at alarm_band * eta_max
    bool abort_on_alarm = true;
    int sobolev_order = 2;
    Kick kick;
};

inline double validity_horizon(const PhaseGrid& g) { return g.eta_max() / g.k_dealias(); }

struct BootstrapSample {
    double t = 0;
    double norm_Arho = 0; // ||A rho(t)||
    double Q1 = 0, Q1_scaled = 0, Q2 = 0, Q3 = 0;
    double boundary_fraction = 0;
    double dropped = 0;
    std::size_t capped = 0;
    double sobolev = 0, bracket_sobolev = 0;
    double mass = 0, casimir = 0;
};

struct Snapshot {
    double t;
    FieldSpectrum lab;
    FieldSpectrum gliding;
};

enum class RunStatus { ok, resolution_alarm, numerical_failure };

struct SimResult {
    DensityTrace density; // modes 1..k_dealias at diagnostic times
    std::vector<BootstrapSample> bootstrap;
    std::vector<Snapshot> snapshots;
    Snapshot final_state;
    RunStatus status = RunStatus::ok;
    std::string message;
    double validity_horizon = 0;
    double horizon = 0;
    double dt = 0;
    double initial_gevrey_norm = 0;
};

namespace detail {

inline double boundary_fraction(const FieldSpectrum& lab, double band) {
    const auto& g = lab.grid;
    double out = 0, all = 0;
    for (std::size_t i = 0; i < g.Nx; ++i)
        for (std::size_t j = 0; j < g.Nv; ++j) {
            const double w = std::norm(lab.c[i * g.Nv + j]);
            all += w;
            if (std::abs(lab.eta_of(j)) > band * g.eta_max()) out += w;
        }
    return all > 0 ? out / all : 0.0;
}

} // namespace detail

inline SimResult run_simulation(const SimConfig& cfg) {
    const auto& g = cfg.setup.grid;
    const double deta = g.deta();
    SimResult res;
    res.validity_horizon = validity_horizon(g);
    res.horizon = cfg.horizon > 0 ? cfg.horizon : res.validity_horizon;
    const double dt = cfg.dt > 0 ? cfg.dt : deta;
    const double sub = deta / dt;
    require(std::abs(sub - std::round(sub)) < 1e-9 * sub && std::round(sub) >= 1, ErrorKind::config,
            "run.dt must divide deta = " + std::to_string(deta));
    require(cfg.diag_stride >= 1, ErrorKind::config, "run.diag_stride must be >= 1");
    const long n_sub = std::lround(sub);
    res.dt = deta / n_sub;
    const long n_diag = static_cast<long>(std::floor(res.horizon / (deta * cfg.diag_stride) + 1e-9));
    res.horizon = n_diag * deta * cfg.diag_stride;
    long kick_step = -1;
    if (cfg.kick.on) {
        const double m = cfg.kick.time / res.dt;
        require(std::abs(m - std::round(m)) <= 1e-9 * std::max(1.0, m), ErrorKind::off_lattice,
                "kick time " + std::to_string(cfg.kick.time) + " is not a multiple of the step " + std::to_string(res.dt));
        kick_step = std::lround(m);
    }

    Simulator sim(cfg.setup);
    const auto init = sample(cfg.perturbation, g);
    sim.set_state(init);
    const auto& S = cfg.schedule;
    {
        auto gl = init;
        gl.frame = Frame::gliding;
        res.initial_gevrey_norm = gevrey_norm(gl, S, 0.0, 0.0, 0);
    }

    res.density.dt = deta * cfg.diag_stride;
    for (int k = 1; k <= g.k_dealias(); ++k) {
        res.density.modes.push_back(k);
        res.density.validity.push_back(g.eta_max() / k);
    }
    res.density.values.resize(res.density.modes.size());

    double q3 = 0, prev_a2 = 0;
    Snapshot last_good{0.0, sim.lab_spectrum(), to_gliding(sim.lab_spectrum(), 0.0).spec};

    auto diagnose = [&](long n) -> bool {
        const double t = n * res.density.dt;
        if (!sim.finite()) {
            res.status = RunStatus::numerical_failure;
            res.message = "non-finite state at t = " + std::to_string(t);
            return false;
        }
        auto lab = sim.lab_spectrum();
        lab.t = t;
        auto gl = to_gliding(lab, t);
        BootstrapSample b;
        b.t = t;
        WeightStats ws;
        std::vector<DensityMode> rho;
        for (std::size_t i = 0; i < res.density.modes.size(); ++i) {
            const int k = res.density.modes[i];
            const cplx r = sim.rho(k);
            res.density.values[i].push_back(r);
            rho.push_back({k, r});
            rho.push_back({-k, std::conj(r)});
        }
        b.norm_Arho = density_norm(rho, S, t, 0.0, &ws);
        const double a2 = b.norm_Arho * b.norm_Arho;
        if (n > 0) q3 += 0.5 * (a2 + prev_a2) * res.density.dt;
        prev_a2 = a2;
        b.Q3 = q3;
        const double q1 = gevrey_norm(gl.spec, S, t, 1.0, S.M, &ws);
        const double q2 = gevrey_norm(gl.spec, S, t, -S.beta, S.M, &ws);
        b.Q1 = q1 * q1;
        b.Q1_scaled = b.Q1 / std::pow(std::sqrt(1.0 + t * t), 7);
        b.Q2 = q2 * q2;
        b.capped = ws.capped;
        b.dropped = gl.dropped;
        b.boundary_fraction = detail::boundary_fraction(lab, cfg.alarm_band);
        b.sobolev = sobolev_norm(lab, cfg.sobolev_order);
        b.bracket_sobolev = bracket_sobolev_norm(lab, cfg.sobolev_order);
        b.mass = sim.mass();
        b.casimir = sim.casimir();
        res.bootstrap.push_back(b);
        Snapshot snap{t, std::move(lab), std::move(gl.spec)};
        if (cfg.snapshot_stride > 0 && n % cfg.snapshot_stride == 0) res.snapshots.push_back(snap);
        last_good = std::move(snap);
        if (b.boundary_fraction > cfg.alarm_threshold || b.capped > 0) {
            res.status = RunStatus::resolution_alarm;
            res.message = b.capped > 0 ? "Gevrey weight exceeded the log cap at t = " + std::to_string(t)
                                       : "eta-boundary mass fraction " + std::to_string(b.boundary_fraction) +
                                             " above threshold at t = " + std::to_string(t);
            if (cfg.abort_on_alarm) return false;
        }
        return true;
    };

    long step = 0;
    bool go = diagnose(0);
    for (long n = 1; go && n <= n_diag; ++n) {
        for (long s = 0; s < n_sub * cfg.diag_stride; ++s) {
            if (step == kick_step) {
                std::vector<double> a(g.Nx);
                for (std::size_t j = 0; j < g.Nx; ++j) a[j] = cfg.kick.amplitude * std::cos(cfg.kick.mode * g.x(j));
                sim.shift_velocity(a);
            }
            sim.step(res.dt);
            ++step;
        }
        sim.t = n * res.density.dt; // avoid accumulated rounding in the frame time
        go = diagnose(n);
    }
    res.density.n_times = res.density.values.empty() ? 0 : res.density.values.front().size();
    res.final_state = std::move(last_good);
    return res;
}

// ||a - b|| with weight e^{lambda <k,eta>^s}
inline double gevrey_distance(const FieldSpectrum& a, const FieldSpectrum& b, double lambda, double s) {
    require_same_grid(a.grid, b.grid);
    double acc = 0;
    for (std::size_t i = 0; i < a.grid.Nx; ++i)
        for (std::size_t j = 0; j < a.grid.Nv; ++j) {
            const double w = std::exp(2.0 * lambda * std::pow(bracket(a.k_of(i), a.eta_of(j)), s));
            acc += w * std::norm(a.c[i * a.grid.Nv + j] - b.c[i * a.grid.Nv + j]);
        }
    return std::sqrt(acc * a.grid.deta());
}

struct AsymptoticProfile {
    FieldSpectrum h_inf; // gliding spectrum at the final time
    double rate = 0;     // fitted exponential decay of ||f(t) - f(T)|| over the last half
};

inline AsymptoticProfile asymptotic_profile(const SimResult& r, double lambda2, double s, double decay_threshold = 1e-2) {
    require(!r.bootstrap.empty(), ErrorKind::not_decayed, "empty trajectory");
    double peak = 0;
    for (const auto& v : r.density.values)
        for (auto z : v) peak = std::max(peak, std::abs(z));
    double last = 0;
    for (const auto& v : r.density.values)
        if (!v.empty()) last = std::max(last, std::abs(v.back()));
    require(peak == 0.0 || last <= decay_threshold * peak, ErrorKind::not_decayed,
            "density has not decayed by the final time; no asymptotic profile");
    AsymptoticProfile out{r.final_state.gliding, 0.0};
    const double T = r.final_state.t;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (const auto& snap : r.snapshots) {
        if (snap.t < 0.5 * T || snap.t >= T) continue;
        const double d = gevrey_distance(snap.gliding, r.final_state.gliding, lambda2, s);
        if (d <= 0) continue;
        const double y = std::log(d);
        sx += snap.t, sy += y, sxx += snap.t * snap.t, sxy += snap.t * y;
        ++n;
    }
    if (n >= 2) out.rate = -(n * sxy - sx * sy) / (n * sxx - sx * sx);
    return out;
}

} // namespace landau
