#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "error.hpp"
#include "fft.hpp"
#include "grid.hpp"

namespace landau {

// One Gaussian velocity profile riding on mode k:
//   h_k(eta) = eps c e^{-theta eta^2 / 2} e^{-i u eta},  h_{-k}(eta) = conj(h_k(-eta)),
// i.e. h(x, v) = eps (c e^{ikx} + c.c.) N_theta(v - u).
struct ModeProfile {
    int k = 1;
    cplx c{1.0, 0.0};
    double theta = 1.0;
    double u = 0.0;
};

struct Perturbation {
    double eps = 0.0;
    std::vector<ModeProfile> modes;

    cplx operator()(int k, double eta) const {
        cplx acc{};
        for (const auto& m : modes) {
            const cplx base = std::exp(-0.5 * m.theta * eta * eta) * std::polar(1.0, -m.u * eta);
            if (k == m.k) acc += m.c * base;
            if (k == -m.k) acc += std::conj(m.c) * std::conj(std::exp(-0.5 * m.theta * eta * eta) *
                                                             std::polar(1.0, m.u * eta));
        }
        return eps * acc;
    }

    bool touches(int k) const {
        for (const auto& m : modes)
            if (m.k == k || m.k == -k) return true;
        return false;
    }
};

inline void validate(const Perturbation& p) {
    require(std::isfinite(p.eps), ErrorKind::config, "run.eps must be finite");
    for (const auto& m : p.modes) {
        require(m.k > 0, ErrorKind::config, "perturbation mode k must be a positive integer");
        require(m.theta > 0, ErrorKind::config, "perturbation theta must be positive");
    }
}

inline FieldSpectrum sample(const Perturbation& p, const PhaseGrid& g) {
    FieldSpectrum s(g);
    for (const auto& m : p.modes)
        require(m.k < static_cast<int>(g.Nx / 2), ErrorKind::config,
                "perturbation mode " + std::to_string(m.k) + " is not representable with Nx = " + std::to_string(g.Nx));
    for (std::size_t i = 0; i < g.Nx; ++i) {
        const int k = s.k_of(i);
        if (!p.touches(k)) continue;
        for (std::size_t j = 0; j < g.Nv; ++j) s.c[i * g.Nv + j] = p(k, s.eta_of(j));
    }
    return s;
}

} // namespace landau
