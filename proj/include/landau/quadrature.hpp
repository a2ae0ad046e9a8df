#pragma once

#include <algorithm>
#include <cmath>
#include <complex>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace landau {

struct QuadResult {
    std::complex<double> value;
    double error = 0.0;
};

// Adaptive Gauss-Kronrod (7/15) over [a, b], cut into `panels` equal pieces so
// oscillatory integrands are never sampled below their wavelength.
template <class F>
QuadResult integrate_adaptive(F&& f, double a, double b, int panels = 1, double tol = 1e-13,
                              unsigned max_depth = 14) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    QuadResult out{};
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * h, hi = (p + 1 == panels) ? b : lo + h;
        double err = 0;
        out.value += std::complex<double>(GK::integrate(f, lo, hi, max_depth, tol, &err));
        out.error += err;
    }
    return out;
}

// Composite 10-point Gauss-Legendre on panels of width h; the fixed-step
// reference for self-convergence checks.
template <class F>
std::complex<double> integrate_composite(F&& f, double a, double b, double h) {
    using GL = boost::math::quadrature::gauss<double, 10>;
    const int n = std::max(1, static_cast<int>(std::ceil((b - a) / h)));
    const double w = (b - a) / n;
    std::complex<double> acc{};
    for (int p = 0; p < n; ++p) acc += std::complex<double>(GL::integrate(f, a + p * w, a + (p + 1) * w));
    return acc;
}

} // namespace landau
