#pragma once

#include "config.hpp"
#include "dispersion.hpp"
#include "echo.hpp"
#include "equilibrium.hpp"
#include "error.hpp"
#include "fft.hpp"
#include "gevrey.hpp"
#include "grid.hpp"
#include "io.hpp"
#include "littlewood_paley.hpp"
#include "parallel.hpp"
#include "perturbation.hpp"
#include "quadrature.hpp"
#include "vlasov.hpp"
#include "volterra.hpp"

namespace landau {
inline constexpr const char* version = "0.3.0";
}
