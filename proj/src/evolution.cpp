#include "muskat/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "muskat/errors.hpp"
#include "muskat/kernels.hpp"
#include "muskat/stability.hpp"

namespace muskat {

namespace {

constexpr double kPi = std::numbers::pi;

bool has_tension(const FluidParams& p) { return p.sigma > 0.0; }

double error_ratio(const Vector& e, const Vector& y0, const Vector& y1, const StepControls& ctl) {
    const double scale = std::max(y0.cwiseAbs().maxCoeff(), y1.cwiseAbs().maxCoeff());
    return e.cwiseAbs().maxCoeff() / (ctl.abs_tol + ctl.rel_tol * scale);
}

double grow_factor(double err, double order) {
    if (err == 0.0) return 5.0;
    return std::clamp(0.9 * std::pow(err, -1.0 / order), 0.2, 5.0);
}

void check_rt(const Snapshot& s, const StepControls& ctl, const DerivedConstants& c) {
    if (!ctl.enforce_rt || !s.diagnostics.rt_infimum) return;
    const double inf = *s.diagnostics.rt_infimum;
    if (!(inf > rt_tolerance(c)))
        throw RTBreakdown("Rayleigh-Taylor condition violated at t = " + std::to_string(s.t) +
                              " (inf a_RT = " + std::to_string(inf) + ")",
                          s.t, inf);
}

Snapshot finish_snapshot(double t, GridFunction f, Evaluation ev, const FluidParams& p, const StepControls& ctl) {
    Snapshot s{t, std::move(f), std::move(ev.omega), std::move(ev.dfdt), {}, ctl.dt_init};
    s.diagnostics.mass = integrate(s.f);
    s.diagnostics.sup_norm = sup_norm(s.f);
    s.diagnostics.sobolev_s = sobolev_norm(s.f, ctl.sobolev_s);
    s.diagnostics.max_rhs = sup_norm(s.dfdt);
    if (!has_tension(p)) {
        const DerivedConstants c = derive_constants(p);
        s.diagnostics.rt_infimum = evaluate_rt(s.f, s.omega.omega, c).infimum;
    }
    return s;
}

GridFunction axpy(const GridFunction& y, double dt, std::initializer_list<std::pair<double, const GridFunction*>> terms) {
    GridFunction out = y;
    for (const auto& [w, k] : terms) out.values += (dt * w) * k->values;
    return out;
}

// Bogacki-Shampine 3(2) with first-same-as-last.
Snapshot step_rk(const Snapshot& s, const FluidParams& p, const StepControls& ctl, double dt, double dt_limit) {
    const double cap = stability_cap(s, p, ctl);
    for (;;) {
        dt = std::min({dt, cap, ctl.dt_max, dt_limit});
        if (dt < ctl.dt_min && dt < dt_limit)
            throw DtUnderflow("step size " + std::to_string(dt) + " fell below dt_min at t = " + std::to_string(s.t));
        const GridFunction& k1 = s.dfdt;
        const GridFunction k2 = rhs_evolution(axpy(s.f, dt, {{0.5, &k1}}), p, ctl.solver).dfdt;
        const GridFunction k3 = rhs_evolution(axpy(s.f, dt, {{0.75, &k2}}), p, ctl.solver).dfdt;
        GridFunction y1 = axpy(s.f, dt, {{2.0 / 9.0, &k1}, {1.0 / 3.0, &k2}, {4.0 / 9.0, &k3}});
        if (!y1.values.allFinite()) throw NonFinite("interface became non-finite at t = " + std::to_string(s.t));
        Evaluation ev4 = rhs_evolution(y1, p, ctl.solver);
        const Vector e = dt * (-5.0 / 72.0 * k1.values + 1.0 / 12.0 * k2.values + 1.0 / 9.0 * k3.values -
                               0.125 * ev4.dfdt.values);
        const double err = error_ratio(e, s.f.values, y1.values, ctl);
        if (!std::isfinite(err)) throw NonFinite("error estimate became non-finite at t = " + std::to_string(s.t));
        if (err <= 1.0) {
            Snapshot out = finish_snapshot(s.t + dt, std::move(y1), std::move(ev4), p, ctl);
            out.dt_next = dt * grow_factor(err, 3.0);
            return out;
        }
        dt *= grow_factor(err, 3.0);
    }
}

// One linearly implicit Euler step: the flat-state third-order symbol is
// treated implicitly, the rest explicitly.
GridFunction imex_euler(const GridFunction& y, const GridFunction& dydt, double dt, double stiff) {
    const GridFunction lin = apply_even_symbol(y, [stiff](double xi) { return -stiff * std::abs(xi * xi * xi); });
    GridFunction explicit_part = y;
    explicit_part.values += dt * (dydt.values - lin.values);
    return apply_even_symbol(explicit_part,
                             [stiff, dt](double xi) { return 1.0 / (1.0 + dt * stiff * std::abs(xi * xi * xi)); });
}

// Step doubling with Richardson extrapolation of the first-order scheme.
Snapshot step_imex(const Snapshot& s, const FluidParams& p, const StepControls& ctl, double dt, double dt_limit) {
    if (!has_tension(p)) throw InvalidConfiguration("the imex stepper requires sigma > 0");
    const double stiff = 0.5 * derive_constants(p).b_mu * p.sigma;
    for (;;) {
        dt = std::min({dt, ctl.dt_max, dt_limit});
        if (dt < ctl.dt_min && dt < dt_limit)
            throw DtUnderflow("step size " + std::to_string(dt) + " fell below dt_min at t = " + std::to_string(s.t));
        const GridFunction big = imex_euler(s.f, s.dfdt, dt, stiff);
        const GridFunction half = imex_euler(s.f, s.dfdt, 0.5 * dt, stiff);
        if (!half.values.allFinite() || !big.values.allFinite())
            throw NonFinite("interface became non-finite at t = " + std::to_string(s.t));
        const GridFunction two = imex_euler(half, rhs_evolution(half, p, ctl.solver).dfdt, 0.5 * dt, stiff);
        const Vector e = two.values - big.values;
        const double err = error_ratio(e, s.f.values, two.values, ctl);
        if (!std::isfinite(err)) throw NonFinite("error estimate became non-finite at t = " + std::to_string(s.t));
        if (err <= 1.0) {
            GridFunction y1(s.f.grid, 2.0 * two.values - big.values);
            Evaluation ev = rhs_evolution(y1, p, ctl.solver);
            Snapshot out = finish_snapshot(s.t + dt, std::move(y1), std::move(ev), p, ctl);
            out.dt_next = dt * grow_factor(err, 2.0);
            return out;
        }
        dt *= grow_factor(err, 2.0);
    }
}

}  // namespace

const char* to_string(Stepper s) noexcept { return s == Stepper::rk_adaptive ? "rk_adaptive" : "imex"; }

const char* to_string(Termination t) noexcept {
    switch (t) {
        case Termination::completed:
            return "completed";
        case Termination::rt_breakdown:
            return "rt_breakdown";
        case Termination::dt_underflow:
            return "dt_underflow";
        case Termination::non_finite:
            return "non_finite";
    }
    return "unknown";
}

void StepControls::validate() const {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw InvalidConfiguration(what);
    };
    require(dt_min > 0.0 && dt_min <= dt_init && dt_init <= dt_max, "step controls need 0 < dt_min <= dt_init <= dt_max");
    require(rel_tol > 0.0 && abs_tol > 0.0, "tolerances must be positive");
    require(cfl_c1 > 0.0 && cfl_c3 > 0.0, "stability factors must be positive");
    require(sobolev_s >= 0.0, "sobolev_s must be nonnegative");
    require(decay_threshold > 0.0, "decay_threshold must be positive");
    require(solver.neumann_tol > 0.0 && solver.neumann_max_iter > 0, "invalid Neumann iteration settings");
}

Evaluation rhs_evolution(const GridFunction& f, const FluidParams& p, const SolverOptions& opts) {
    require_finite(f, "interface");
    const DerivedConstants c = derive_constants(p);
    const GridFunction rhs = has_tension(p) ? rhs_tension(f, f, p) : rhs_no_tension(f, c);
    VortexSheet w = solve_omega(f, rhs, c, opts);
    GridFunction dfdt = apply_B(f, w.omega);
    dfdt.values /= 2.0 * kPi;
    require_finite(dfdt, "df/dt");
    return Evaluation{std::move(dfdt), std::move(w)};
}

Snapshot make_snapshot(double t, const GridFunction& f, const FluidParams& p, const StepControls& ctl) {
    return finish_snapshot(t, f, rhs_evolution(f, p, ctl.solver), p, ctl);
}

double stability_cap(const Snapshot& s, const FluidParams& p, const StepControls& ctl) {
    const double h = s.f.grid.spacing();
    const DerivedConstants c = derive_constants(p);
    if (has_tension(p)) {
        const Vector fp = spectral_derivative(s.f, 1).values;
        double gmax = 0.0;
        for (Eigen::Index j = 0; j < fp.size(); ++j) {
            const double q = 1.0 + fp[j] * fp[j];
            gmax = std::max(gmax, kPi / (q * std::sqrt(q)));
        }
        return ctl.cfl_c3 * h * h * h / (gmax * 0.5 * c.b_mu * p.sigma);
    }
    const FrozenSymbols fs = frozen_symbols(s.f, s.omega.omega, c);
    const double scale = 0.5 * (fs.alpha.values.cwiseAbs() + fs.beta.values.cwiseAbs()).maxCoeff();
    if (scale == 0.0) return std::numeric_limits<double>::infinity();
    return ctl.cfl_c1 * h / scale;
}

Snapshot step(const Snapshot& snap, const FluidParams& p, const StepControls& ctl, double dt_limit) {
    const DerivedConstants c = derive_constants(p);
    if (!has_tension(p)) check_rt(snap, ctl, c);
    const double dt = snap.dt_next > 0.0 ? snap.dt_next : ctl.dt_init;
    Snapshot out = ctl.stepper == Stepper::imex ? step_imex(snap, p, ctl, dt, dt_limit)
                                                : step_rk(snap, p, ctl, dt, dt_limit);
    if (!has_tension(p)) check_rt(out, ctl, c);
    return out;
}

Trajectory simulate(const GridFunction& f0, const FluidParams& p, double t_end, const StepControls& ctl,
                    std::size_t snapshot_every, const std::function<void(const Snapshot&)>& on_snapshot) {
    p.validate();
    ctl.validate();
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw InvalidConfiguration("t_end must be finite and nonnegative");
    if (snapshot_every == 0) throw InvalidConfiguration("snapshot_every must be at least 1");
    if (ctl.stepper == Stepper::imex && !has_tension(p))
        throw InvalidConfiguration("the imex stepper requires sigma > 0");
    require_finite(f0, "initial condition");
    require_decay(f0, ctl.decay_threshold, "initial condition");

    Trajectory traj;
    auto emit = [&](const Snapshot& s) {
        traj.snapshots.push_back(s);
        if (on_snapshot) on_snapshot(s);
    };

    Snapshot cur = make_snapshot(0.0, f0, p, ctl);
    if (!has_tension(p) && ctl.enforce_rt) check_rt(cur, ctl, derive_constants(p));
    emit(cur);

    std::size_t since_emit = 0;
    // Stop once the remaining interval is at rounding level.
    const double t_eps = 1e-13 * std::max(1.0, t_end);
    try {
        while (t_end - cur.t > t_eps) {
            cur = step(cur, p, ctl, t_end - cur.t);
            ++traj.accepted_steps;
            if (++since_emit == snapshot_every) {
                emit(cur);
                since_emit = 0;
            }
        }
        if (since_emit != 0) emit(cur);
    } catch (const RTBreakdown& e) {
        traj.cause = Termination::rt_breakdown;
        traj.message = e.what();
    } catch (const DtUnderflow& e) {
        traj.cause = Termination::dt_underflow;
        traj.message = e.what();
    } catch (const NonFinite& e) {
        traj.cause = Termination::non_finite;
        traj.message = e.what();
    }
    if (traj.cause != Termination::completed && since_emit != 0) emit(cur);
    traj.t_final = cur.t;
    return traj;
}

}  // namespace muskat
