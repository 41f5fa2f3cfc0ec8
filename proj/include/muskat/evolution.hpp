#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "muskat/grid.hpp"
#include "muskat/omega.hpp"
#include "muskat/params.hpp"

namespace muskat {

enum class Stepper { rk_adaptive, imex };

const char* to_string(Stepper s) noexcept;

struct StepControls {
    double dt_init = 1e-3;
    double dt_min = 1e-12;
    double dt_max = 1.0;
    double rel_tol = 1e-8;
    double abs_tol = 1e-14;
    Stepper stepper = Stepper::rk_adaptive;
    double cfl_c1 = 1.0;  ///< first-order cap: dt <= c1 h / max((|alpha| + |beta|)/2)
    double cfl_c3 = 0.2;  ///< third-order cap: dt <= c3 h^3 / max(gamma3 b sigma / 2)
    SolverOptions solver;
    /// Abort zero surface tension runs that leave the Rayleigh-Taylor set.
    bool enforce_rt = true;
    double sobolev_s = 3.0;
    double decay_threshold = 1e-6;

    void validate() const;
};

struct Diagnostics {
    double mass = 0.0;
    double sup_norm = 0.0;
    double sobolev_s = 0.0;
    double max_rhs = 0.0;
    std::optional<double> rt_infimum;  ///< zero surface tension runs only
};

struct Snapshot {
    double t = 0.0;
    GridFunction f;
    VortexSheet omega;
    GridFunction dfdt;
    Diagnostics diagnostics;
    double dt_next = 0.0;  ///< step size proposed for the following step
};

struct Evaluation {
    GridFunction dfdt;
    VortexSheet omega;
};

/// df/dt = (1/2 pi) B(f)[w] with w solving the sheet-strength equation.
Evaluation rhs_evolution(const GridFunction& f, const FluidParams& p, const SolverOptions& opts = {});

/// Builds a snapshot at time t, evaluating the right-hand side and the
/// diagnostics.
Snapshot make_snapshot(double t, const GridFunction& f, const FluidParams& p, const StepControls& ctl);

/// Performs one accepted adaptive step.
///
/// Throws RTBreakdown (zero surface tension with enforce_rt) when either
/// the input or the stepped state is outside the Rayleigh-Taylor set,
/// DtUnderflow when the step size falls below dt_min, and NonFinite on
/// blow-up. `dt_limit` clips the step (used to land on t_end).
Snapshot step(const Snapshot& snap, const FluidParams& p, const StepControls& ctl,
              double dt_limit = std::numeric_limits<double>::infinity());

/// Largest step allowed by the stability caps at this state.
double stability_cap(const Snapshot& snap, const FluidParams& p, const StepControls& ctl);

enum class Termination { completed, rt_breakdown, dt_underflow, non_finite };

const char* to_string(Termination t) noexcept;

struct Trajectory {
    std::vector<Snapshot> snapshots;
    Termination cause = Termination::completed;
    std::string message;
    double t_final = 0.0;
    std::size_t accepted_steps = 0;
};

/// Runs from f0 to t_end, keeping the initial state, every
/// `snapshot_every`-th accepted step and the final state.
///
/// Initial data that fail the decay check are rejected with
/// DecayCheckFailed; with zero surface tension and enforce_rt, data outside
/// the Rayleigh-Taylor set are rejected with RTBreakdown. Later failures end
/// the run and are recorded in `cause`.
Trajectory simulate(const GridFunction& f0, const FluidParams& p, double t_end, const StepControls& ctl,
                    std::size_t snapshot_every,
                    const std::function<void(const Snapshot&)>& on_snapshot = {});

}  // namespace muskat
