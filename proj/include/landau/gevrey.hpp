#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"
#include "fft.hpp"
#include "grid.hpp"
#include "parallel.hpp"

namespace landau {

struct GevreySchedule {
    double s = 0.5;
    double lambda0 = 1.0;
    double lambda_prime = 0.5;
    double sigma = 0.0;
    double beta = 3.0;
    int M = 1;
    double gamma = 1.0; // interaction exponent the schedule is tuned to
    double a = 0.0;     // decay exponent of the radius
    bool a_surrogate = false;
    double log_cap = 700.0;

    double alpha0() const { return 0.5 * (lambda0 + lambda_prime); }
    double gap() const { return lambda0 - lambda_prime; }
};

inline double critical_exponent(double gamma) { return 1.0 / (2.0 + gamma); }

inline double radius_exponent(double s, double gamma) {
    return ((2.0 + gamma) * s - 1.0) / (1.0 + gamma);
}

inline void validate_shape(const GevreySchedule& g) {
    require(g.s > 0 && g.s < 1, ErrorKind::config, "gevrey.s must lie in (0, 1)");
    require(g.lambda0 > g.lambda_prime && g.lambda_prime > 0, ErrorKind::config,
            "gevrey: need lambda0 > lambda_prime > 0");
    require(g.sigma >= 0, ErrorKind::config, "gevrey.sigma must be >= 0");
    require(g.beta > 2, ErrorKind::config, "gevrey.beta must exceed 2");
    require(g.M >= 1, ErrorKind::config, "gevrey.M must be a positive integer");
    require(g.gamma >= 1, ErrorKind::config, "interaction.gamma must be >= 1");
    require(g.log_cap > 0, ErrorKind::config, "gevrey.log_cap must be positive");
}

inline GevreySchedule make_schedule(double s, double lambda0, double lambda_prime, double sigma,
                                    double beta, int M, double gamma) {
    GevreySchedule g{s, lambda0, lambda_prime, sigma, beta, M, gamma};
    validate_shape(g);
    g.a = radius_exponent(s, gamma);
    if (g.a <= 0)
        fail(ErrorKind::subcritical_exponent,
             "gevrey.s = " + std::to_string(s) + " is at or below the critical exponent 1/(2+gamma) = " +
                 std::to_string(critical_exponent(gamma)));
    return g;
}

// Same schedule with the radius exponent forced to a0; used where s sits below
// the critical exponent and the formula for a has no admissible value.
inline GevreySchedule make_surrogate_schedule(double s, double lambda0, double lambda_prime,
                                              double sigma, double beta, int M, double gamma,
                                              double a0) {
    GevreySchedule g{s, lambda0, lambda_prime, sigma, beta, M, gamma};
    validate_shape(g);
    require(a0 > 0, ErrorKind::config, "surrogate radius exponent must be positive");
    g.a = a0;
    g.a_surrogate = true;
    return g;
}

struct RadiusSample {
    double lambda;
    double dot_left;
    double dot_right;
    double dot() const { return dot_right; }
};

inline RadiusSample lambda_at(const GevreySchedule& g, double t) {
    require(t >= 0, ErrorKind::config, "lambda_at: t must be non-negative");
    require(g.a > 0, ErrorKind::subcritical_exponent, "schedule has no admissible radius exponent");
    const double D = g.gap();
    const double lam = 0.125 * D * std::max(0.0, 1.0 - t) + g.alpha0() +
                       0.25 * D * std::min(1.0, std::pow(t, -g.a));
    const double early = -0.125 * D;
    const double late = -0.25 * g.a * D * std::pow(std::max(t, 1.0), -g.a - 1.0);
    if (t < 1) return {lam, early, early};
    if (t > 1) return {lam, late, late};
    return {lam, early, late};
}

inline double bracket(double k_l1, double eta_l1) {
    const double r = std::abs(k_l1) + std::abs(eta_l1);
    return std::sqrt(1.0 + r * r);
}

// Counts weights whose logarithm hit the cap.
struct WeightStats {
    std::size_t capped = 0;
};

inline double log_weight(const GevreySchedule& g, double lambda, double k_l1, double eta_l1,
                         double sigma_shift) {
    const double b = bracket(k_l1, eta_l1);
    return lambda * std::pow(b, g.s) + (g.sigma + sigma_shift) * std::log(b);
}

inline double capped_exp(double lw, double cap, WeightStats* st) {
    if (lw > cap) {
        if (st) ++st->capped;
        return std::exp(cap);
    }
    return std::exp(lw);
}

// A^{(sigma_shift)}_k(t, eta) = e^{lambda(t) <k,eta>^s} <k,eta>^{sigma + sigma_shift}
inline double gevrey_weight(const GevreySchedule& g, double t, double k_l1, double eta_l1,
                            double sigma_shift = 0.0, WeightStats* st = nullptr) {
    return capped_exp(log_weight(g, lambda_at(g, t).lambda, k_l1, eta_l1, sigma_shift), g.log_cap, st);
}

// D_eta^alpha of every row, realized as v^alpha in velocity space.
inline FieldSpectrum velocity_moment(const FieldSpectrum& s, int alpha) {
    if (alpha == 0) return s;
    const auto& g = s.grid;
    FieldSpectrum out(g, s.frame, s.t);
    parallel_for_range(g.Nx, [&](std::size_t b, std::size_t e) {
        Fft fft(g.Nv);
        std::vector<cplx> buf(g.Nv);
        for (std::size_t i = b; i < e; ++i) {
            for (std::size_t j = 0; j < g.Nv; ++j)
                buf[detail::centered_to_fft(j, g.Nv)] = s.c[i * g.Nv + j];
            v_from_eta(fft, buf.data(), g.deta());
            for (std::size_t m = 0; m < g.Nv; ++m) buf[m] *= std::pow(g.v(m), alpha);
            eta_from_v(fft, buf.data(), g.dv());
            for (std::size_t j = 0; j < g.Nv; ++j)
                out.c[i * g.Nv + j] = buf[detail::centered_to_fft(j, g.Nv)];
        }
    });
    return out;
}

// sum over (k, eta) of |A^{(shift)} c|^2 deta, summed in lattice order
inline double weighted_square(const FieldSpectrum& s, const GevreySchedule& g, double lambda,
                              double sigma_shift, WeightStats* st = nullptr) {
    const auto& gr = s.grid;
    std::vector<double> rows(gr.Nx);
    std::vector<std::size_t> caps(gr.Nx);
    parallel_for(gr.Nx, [&](std::size_t i) {
        double acc = 0;
        const double k = std::abs(s.k_of(i));
        for (std::size_t j = 0; j < gr.Nv; ++j) {
            const cplx z = s.c[i * gr.Nv + j];
            if (z == cplx{}) continue;
            const double lw = log_weight(g, lambda, k, s.eta_of(j), sigma_shift);
            if (lw > g.log_cap) ++caps[i];
            acc += std::norm(z) * std::exp(2.0 * std::min(lw, g.log_cap));
        }
        rows[i] = acc;
    });
    double acc = 0;
    for (std::size_t i = 0; i < gr.Nx; ++i) {
        acc += rows[i];
        if (st) st->capped += caps[i];
    }
    return acc * gr.deta();
}

// (sum_{alpha <= moment_order} ||A^{(shift)} D^alpha f||^2)^{1/2}
inline double gevrey_norm(const FieldSpectrum& s, const GevreySchedule& g, double t,
                          double sigma_shift, int moment_order, WeightStats* st = nullptr) {
    require(moment_order >= 0 && moment_order <= g.M, ErrorKind::config,
            "moment order must lie in [0, M]");
    if (s.frame == Frame::gliding)
        require(std::abs(s.t - t) <= 1e-9 * std::max(1.0, t), ErrorKind::grid_mismatch,
                "gliding spectrum time differs from the norm time");
    const double lam = lambda_at(g, t).lambda;
    double acc = 0;
    for (int a = 0; a <= moment_order; ++a)
        acc += weighted_square(velocity_moment(s, a), g, lam, sigma_shift, st);
    return std::sqrt(acc);
}

// rho given as (k, rho_k) pairs
struct DensityMode {
    int k;
    cplx rho;
};

inline double density_norm(std::span<const DensityMode> rho, const GevreySchedule& g, double t,
                           double sigma_shift = 0.0, WeightStats* st = nullptr) {
    const double lam = lambda_at(g, t).lambda;
    double acc = 0;
    for (const auto& m : rho) {
        if (m.k == 0) continue;
        const double ak = std::abs(m.k);
        const double lw = log_weight(g, lam, ak, ak * t, sigma_shift);
        acc += std::norm(m.rho) * capped_exp(2.0 * lw, 2.0 * g.log_cap, st);
    }
    return std::sqrt(acc);
}

// sum_{a + b <= N} ||d_x^a d_v^b h||^2, the plain H^N norm
inline double sobolev_norm(const FieldSpectrum& s, int N) {
    const auto& g = s.grid;
    double acc = 0;
    for (std::size_t i = 0; i < g.Nx; ++i) {
        const double k2 = std::pow(static_cast<double>(s.k_of(i)), 2);
        for (std::size_t j = 0; j < g.Nv; ++j) {
            const double e2 = std::pow(s.eta_of(j), 2);
            double w = 0;
            for (int a = 0; a <= N; ++a)
                for (int b = 0; a + b <= N; ++b) w += std::pow(k2, a) * std::pow(e2, b);
            acc += w * std::norm(s.c[i * g.Nv + j]);
        }
    }
    return std::sqrt(acc * g.deta());
}

// ||<k,eta>^N h||, the bracket form of the same norm
inline double bracket_sobolev_norm(const FieldSpectrum& s, int N) {
    const auto& g = s.grid;
    double acc = 0;
    for (std::size_t i = 0; i < g.Nx; ++i)
        for (std::size_t j = 0; j < g.Nv; ++j)
            acc += std::pow(bracket(s.k_of(i), s.eta_of(j)), 2 * N) * std::norm(s.c[i * g.Nv + j]);
    return std::sqrt(acc * g.deta());
}

} // namespace landau
