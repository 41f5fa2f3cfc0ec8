#pragma once

#include "muskat/grid.hpp"
#include "muskat/params.hpp"

namespace muskat {

enum class SolverMethod { direct, neumann };

const char* to_string(SolverMethod m) noexcept;

/// Solution of (1 + a_mu A(f)) w = rhs together with solver metadata.
struct VortexSheet {
    GridFunction omega;
    double residual_norm = 0.0;  ///< discrete L2 norm of (1 + a_mu A_h) w - rhs
    SolverMethod method = SolverMethod::direct;  ///< method that produced `omega`
    int iterations = 0;                          ///< Neumann sweeps (0 for direct)
};

/// Zero surface tension data: -c_rho_mu f'.
GridFunction rhs_no_tension(const GridFunction& f, const DerivedConstants& c);

/// b_mu [sigma h'''/(1+f'^2)^{3/2} - 3 sigma f' f'' h''/(1+f'^2)^{5/2} - theta h'].
GridFunction rhs_tension(const GridFunction& f, const GridFunction& h, const FluidParams& p);

struct SolverOptions {
    SolverMethod method = SolverMethod::direct;
    double neumann_tol = 1e-12;
    int neumann_max_iter = 200;
};

/// Solves (1 + a_mu A(f)) w = rhs.
///
/// a_mu = 0 returns rhs unchanged. The Neumann iteration falls back to the
/// dense solve if it has not converged after `neumann_max_iter` sweeps; the
/// returned `method` tells which one produced the answer.
VortexSheet solve_omega(const GridFunction& f, const GridFunction& rhs, const DerivedConstants& c,
                        const SolverOptions& opts = {});

/// T(f) with (A(f)[w])' = A(f)[w'] + T(f)[w].
GridFunction lower_order_term(const GridFunction& f, const GridFunction& omega);

struct OmegaParts {
    GridFunction omega1;
    GridFunction omega2;
};

/// Splits the surface tension solve as w = (omega1)' + omega2 with
///   (1 + a A) omega1 = b sigma h''/(1+f'^2)^{3/2},
///   (1 + a A) omega2 = -b theta h' + a T(f)[omega1].
OmegaParts omega_decomposition(const GridFunction& f, const GridFunction& h, const FluidParams& p,
                               const SolverOptions& opts = {});

}  // namespace muskat
