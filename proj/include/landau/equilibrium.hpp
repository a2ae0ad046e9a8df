#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <boost/math/special_functions/binomial.hpp>
#include <boost/math/special_functions/hermite.hpp>

#include "error.hpp"
#include "fft.hpp"

namespace landau {

struct GaussianBump {
    double weight;
    std::array<double, 2> center; // only center[0] used when d = 1
    double theta;
};

// Velocity profile restricted to a line: what dispersion and Penrose need.
struct Marginal {
    std::function<double(double)> f, df;
    std::function<cplx(double)> fhat;
    std::function<cplx(double, int)> fhat_moment; // transform of r^alpha f
    std::function<double(double)> envelope; // >= |fhat(eta')| for eta' >= eta
    double v_max = 8.0;
};

enum class EquilibriumKind { maxwellian, two_stream, custom_table, custom_spectrum };

inline const char* to_string(EquilibriumKind k) {
    switch (k) {
    case EquilibriumKind::maxwellian: return "maxwellian";
    case EquilibriumKind::two_stream: return "two_stream";
    case EquilibriumKind::custom_table: return "custom_table";
    case EquilibriumKind::custom_spectrum: return "custom_spectrum";
    }
    return "?";
}

// Background f0 with transform fhat(eta) = int e^{-i v eta} f0(v) dv, so that
// fhat(0) = 1 for a unit-mass profile.
class Equilibrium {
public:
    EquilibriumKind kind = EquilibriumKind::maxwellian;
    int d = 1;
    std::vector<GaussianBump> bumps;

    // custom_table
    double table_v0 = 0, table_h = 0;
    std::vector<double> table;
    std::shared_ptr<boost::math::interpolators::cardinal_cubic_b_spline<double>> spline;

    // custom_spectrum: D_eta^alpha fhat, zero beyond spectrum_cut
    std::function<cplx(double, int)> spectrum;
    double spectrum_cut = 0;

    bool is_mixture() const {
        return kind == EquilibriumKind::maxwellian || kind == EquilibriumKind::two_stream;
    }

    double f0(double v) const {
        if (is_mixture()) {
            double acc = 0;
            for (const auto& b : bumps) acc += b.weight * gauss(v - b.center[0], b.theta);
            return acc;
        }
        require_table();
        if (v < table_v0 || v > table_v0 + table_h * (table.size() - 1)) return 0.0;
        return (*spline)(v);
    }

    double df0(double v) const {
        if (is_mixture()) {
            double acc = 0;
            for (const auto& b : bumps) {
                const double u = v - b.center[0];
                acc -= b.weight * u / b.theta * gauss(u, b.theta);
            }
            return acc;
        }
        require_table();
        if (v < table_v0 || v > table_v0 + table_h * (table.size() - 1)) return 0.0;
        return spline->prime(v);
    }

    double f0(std::array<double, 2> v) const {
        if (d == 1) return f0(v[0]);
        double acc = 0;
        for (const auto& b : bumps)
            acc += b.weight * gauss(v[0] - b.center[0], b.theta) * gauss(v[1] - b.center[1], b.theta);
        return acc;
    }

    cplx fhat(double eta) const { return fhat_moment(eta, 0); }

    // transform of v^alpha f0, i.e. D_eta^alpha fhat with D = i d/d eta
    cplx fhat_moment(double eta, int alpha) const {
        switch (kind) {
        case EquilibriumKind::maxwellian:
        case EquilibriumKind::two_stream: {
            cplx acc{};
            for (const auto& b : bumps) {
                const double c = b.center[0];
                cplx inner{};
                for (int j = 0; j <= alpha; ++j)
                    inner += boost::math::binomial_coefficient<double>(alpha, j) *
                             std::pow(c, alpha - j) * gauss_moment_hat(eta, j, b.theta);
                acc += b.weight * std::polar(1.0, -c * eta) * inner;
            }
            return acc;
        }
        case EquilibriumKind::custom_table: {
            cplx acc{};
            for (std::size_t i = 0; i < table.size(); ++i) {
                const double v = table_v0 + table_h * i;
                acc += std::pow(v, alpha) * table[i] * std::polar(1.0, -v * eta);
            }
            return acc * table_h;
        }
        case EquilibriumKind::custom_spectrum:
            return std::abs(eta) > spectrum_cut ? cplx{} : spectrum(eta, alpha);
        }
        return {};
    }

    double envelope(double eta) const {
        eta = std::abs(eta);
        if (is_mixture()) {
            double acc = 0;
            for (const auto& b : bumps) acc += std::abs(b.weight) * std::exp(-0.5 * b.theta * eta * eta);
            return acc;
        }
        if (kind == EquilibriumKind::custom_spectrum && eta > spectrum_cut) return 0.0;
        double m = 0;
        for (int i = 0; i <= 64; ++i) m = std::max(m, std::abs(fhat(eta * (1.0 + i / 64.0) + i / 64.0)));
        return m;
    }

    double v_max() const {
        if (is_mixture()) {
            double th = 0, off = 0;
            for (const auto& b : bumps) {
                th = std::max(th, b.theta);
                off = std::max({off, std::abs(b.center[0]), std::abs(b.center[1])});
            }
            return 8.0 * std::sqrt(th) + off;
        }
        if (kind == EquilibriumKind::custom_table)
            return std::max(std::abs(table_v0), std::abs(table_v0 + table_h * (table.size() - 1)));
        return 8.0;
    }

    // marginal along the direction of k
    Marginal marginal(std::array<double, 2> k) const {
        const double nk = std::hypot(k[0], k[1]);
        require(nk > 0, ErrorKind::config, "marginal along k = 0");
        if (d == 1 || (kind != EquilibriumKind::maxwellian && kind != EquilibriumKind::two_stream)) {
            const double sgn = (d == 1 && k[0] < 0) ? -1.0 : 1.0;
            auto self = std::make_shared<Equilibrium>(*this);
            return {[self, sgn](double r) { return self->f0(sgn * r); },
                    [self, sgn](double r) { return sgn * self->df0(sgn * r); },
                    [self, sgn](double e) { return self->fhat(sgn * e); },
                    [self, sgn](double e, int a) { return std::pow(sgn, a) * self->fhat_moment(sgn * e, a); },
                    [self](double e) { return self->envelope(e); }, v_max()};
        }
        Equilibrium proj;
        proj.kind = kind;
        proj.d = 1;
        for (const auto& b : bumps)
            proj.bumps.push_back({b.weight, {(b.center[0] * k[0] + b.center[1] * k[1]) / nk, 0.0}, b.theta});
        return proj.marginal({1.0, 0.0});
    }

    static double gauss(double u, double theta) {
        return std::exp(-0.5 * u * u / theta) / std::sqrt(2.0 * std::numbers::pi * theta);
    }

    // int u^j e^{-i u eta} N_theta(u) du = (-i)^j theta^{j/2} He_j(sqrt(theta) eta) e^{-theta eta^2 / 2}
    static cplx gauss_moment_hat(double eta, int j, double theta) {
        const double st = std::sqrt(theta), x = st * eta;
        // probabilists' He_j(x) = 2^{-j/2} H_j(x / sqrt 2)
        const double he = std::pow(2.0, -0.5 * j) * boost::math::hermite(static_cast<unsigned>(j), x / std::numbers::sqrt2);
        static const cplx mi[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};
        return mi[j % 4] * std::pow(st, j) * he * std::exp(-0.5 * x * x);
    }

private:
    void require_table() const {
        require(kind == EquilibriumKind::custom_table && spline, ErrorKind::config,
                "this equilibrium is given by its spectrum only; f0(v) is unavailable");
    }
};

inline Equilibrium make_maxwellian(double theta, int d = 1) {
    require(theta > 0, ErrorKind::config, "equilibrium.theta must be positive");
    require(d == 1 || d == 2, ErrorKind::config, "equilibrium dimension must be 1 or 2");
    Equilibrium e;
    e.kind = EquilibriumKind::maxwellian;
    e.d = d;
    e.bumps = {{1.0, {0, 0}, theta}};
    return e;
}

// beams at +-v0 along the first axis
inline Equilibrium make_two_stream(double v0, double theta, int d = 1) {
    require(theta > 0, ErrorKind::config, "equilibrium.theta must be positive");
    require(v0 >= 0, ErrorKind::config, "equilibrium.v0 must be non-negative");
    require(d == 1 || d == 2, ErrorKind::config, "equilibrium dimension must be 1 or 2");
    Equilibrium e;
    e.kind = EquilibriumKind::two_stream;
    e.d = d;
    e.bumps = {{0.5, {v0, 0}, theta}, {0.5, {-v0, 0}, theta}};
    return e;
}

// Tabulated f0 on a uniform v grid; renormalized to unit mass.
inline Equilibrium make_custom(std::vector<double> values, double v0, double h) {
    require(values.size() >= 8 && h > 0, ErrorKind::config, "custom equilibrium table too short");
    double mass = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        require(values[i] >= 0, ErrorKind::config, "custom equilibrium must be non-negative");
        mass += values[i] * h;
    }
    require(mass > 0, ErrorKind::config, "custom equilibrium has zero mass");
    for (auto& v : values) v /= mass;
    Equilibrium e;
    e.kind = EquilibriumKind::custom_table;
    e.table_v0 = v0;
    e.table_h = h;
    e.table = std::move(values);
    e.spline = std::make_shared<boost::math::interpolators::cardinal_cubic_b_spline<double>>(
        e.table.begin(), e.table.end(), v0, h);
    return e;
}

// f0 described only through D^alpha fhat, zero beyond `cut`
inline Equilibrium make_custom_spectrum(std::function<cplx(double, int)> spectrum, double cut) {
    require(cut > 0, ErrorKind::config, "custom spectrum needs a positive cutoff");
    Equilibrium e;
    e.kind = EquilibriumKind::custom_spectrum;
    e.spectrum = std::move(spectrum);
    e.spectrum_cut = cut;
    return e;
}

// W(k) = sign A |k|^{-1-gamma}, W(0) = 0
struct Interaction {
    double A = 1.0;
    double gamma = 1.0;
    int sign = +1;
    std::function<double(double)> custom; // overrides the power law when set

    double operator()(double kabs) const {
        if (kabs == 0) return 0.0;
        if (custom) return custom(kabs);
        return sign * A * std::pow(kabs, -1.0 - gamma);
    }
    double operator()(std::array<double, 2> k) const { return (*this)(std::hypot(k[0], k[1])); }
    bool vanishes() const { return !custom && A == 0.0; }
};

inline Interaction make_interaction(double A, double gamma, int sign) {
    require(A >= 0, ErrorKind::config, "interaction.A must be non-negative");
    require(gamma >= 1, ErrorKind::config, "interaction.gamma must be >= 1");
    require(sign == 1 || sign == -1, ErrorKind::config, "interaction.sign must be +1 or -1");
    return {A, gamma, sign, {}};
}

struct StabilityParams {
    double lambda_bar = 0.05;
    double kappa = 0;
    double C0 = 0;
    int M = 1;
};

struct LocalizationReport {
    double C0 = 0;
    double eta_cut = 0;
    std::vector<double> blocks; // dyadic block sums |eta| in [2^j, 2^{j+1})
};

// sum_{alpha <= M} || v^alpha f0 ||^2 in the analytic (nu = 1) norm of radius lambda_bar
inline LocalizationReport check_localization(const Equilibrium& eq, double lambda_bar, int M,
                                             double h = 0.0, double eta_limit = 4096.0) {
    require(eq.d == 1, ErrorKind::config, "check_localization supports d = 1");
    require(lambda_bar > 0 && M >= 1, ErrorKind::config, "need lambda_bar > 0 and M >= 1");
    if (h <= 0) {
        double th = 1.0, off = 0.0;
        for (const auto& b : eq.bumps) {
            th = std::min(th, b.theta);
            off = std::max(off, std::abs(b.center[0]));
        }
        h = std::min(0.05 * std::max(1.0, 1.0 / std::sqrt(th)), 0.2 / (1.0 + off));
        if (eq.kind == EquilibriumKind::custom_table) h = std::min(h, 0.5 * std::numbers::pi / eq.v_max());
    }
    auto weight = [&](double eta) { return std::exp(2.0 * lambda_bar * std::sqrt(1.0 + eta * eta)); };
    auto term = [&](double eta) {
        double acc = 0;
        for (int a = 0; a <= M; ++a) acc += std::norm(eq.fhat_moment(eta, a));
        return acc > 0 ? std::exp(std::log(acc) + 2.0 * lambda_bar * std::sqrt(1.0 + eta * eta)) : 0.0;
    };

    // natural cutoff: where the weighted envelope is negligible
    double cut = eta_limit;
    bool natural = false;
    if (eq.kind == EquilibriumKind::custom_spectrum) {
        cut = std::min(eq.spectrum_cut, eta_limit);
        natural = eq.spectrum_cut <= eta_limit;
    } else if (eq.is_mixture()) {
        for (double e = 1.0; e <= eta_limit; e *= 1.25) {
            const double env = eq.envelope(e) * std::pow(1.0 + e, M) * (1.0 + std::pow(eq.v_max(), M));
            if (env * env * weight(e) < 1e-40) {
                cut = e;
                natural = true;
                break;
            }
        }
    }

    LocalizationReport rep;
    rep.eta_cut = cut;
    const long n = static_cast<long>(std::ceil(cut / h));
    double total = 0;
    for (long i = -n; i <= n; ++i) {
        const double eta = i * h;
        const double w = (std::abs(i) == n) ? 0.5 : 1.0;
        const double v = w * term(eta) * h;
        total += v;
        const double ae = std::abs(eta);
        if (ae >= 1) {
            const auto j = static_cast<std::size_t>(std::floor(std::log2(ae)));
            if (rep.blocks.size() <= j) rep.blocks.resize(j + 1, 0.0);
            rep.blocks[j] += v;
        }
    }
    if (!natural) {
        const auto& b = rep.blocks;
        const std::size_t nb = b.size();
        // a full block followed by one that does not shrink: the tail diverges
        if (nb >= 3 && b[nb - 2] >= b[nb - 3] && b[nb - 2] > 0)
            fail(ErrorKind::inadmissible, "localization sum grows across dyadic blocks: lambda_bar = " +
                                              std::to_string(lambda_bar) + " is inadmissible");
    }
    require(std::isfinite(total), ErrorKind::inadmissible, "localization sum is not finite");
    rep.C0 = total;
    return rep;
}

} // namespace landau
