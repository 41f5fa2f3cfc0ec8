#pragma once

#include "muskat/grid.hpp"
#include "muskat/omega.hpp"
#include "muskat/params.hpp"

namespace muskat {

/// Rayleigh-Taylor functional and membership in the parabolicity set.
struct RTReport {
    GridFunction a_rt;
    double infimum = 0.0;
    bool in_O = false;  ///< infimum > tolerance
    double tolerance = 0.0;
};

/// Default membership margin: 1e-10 * max(1, |c_rho_mu|).
double rt_tolerance(const DerivedConstants& c);

/// a_RT = c_rho_mu + (a_mu/pi) B(f)[w0] with w0 the zero surface tension
/// sheet strength of f.
RTReport evaluate_rt(const GridFunction& f, const DerivedConstants& c, const SolverOptions& opts = {});

/// Same, reusing an already solved w0.
RTReport evaluate_rt(const GridFunction& f, const GridFunction& omega0, const DerivedConstants& c);

/// Frozen-coefficient data of the linearized generators.
struct FrozenSymbols {
    GridFunction alpha;   ///< pi a_RT / (1 + f'^2)
    GridFunction beta;    ///< B_{1,1}(f)[f, w0] - a_mu pi w0 / (1 + f'^2)
    GridFunction gamma3;  ///< pi / (1 + f'^2)^{3/2}
};

FrozenSymbols frozen_symbols(const GridFunction& f, const GridFunction& omega0, const DerivedConstants& c);

/// Linear decay rate of a mode of wavenumber k about the flat interface, in
/// physical time. Zero surface tension: (c_rho_mu/2)|k|. Otherwise
/// (b_mu/2)(sigma |k|^3 + theta |k|). Negative values mean growth.
double dispersion_rate(double k, bool sigma_on, const FluidParams& p);

}  // namespace muskat
