#include "muskat/stability.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "muskat/errors.hpp"
#include "muskat/kernels.hpp"

namespace muskat {

double rt_tolerance(const DerivedConstants& c) { return 1e-10 * std::max(1.0, std::abs(c.c_rho_mu)); }

RTReport evaluate_rt(const GridFunction& f, const DerivedConstants& c, const SolverOptions& opts) {
    const VortexSheet w0 = solve_omega(f, rhs_no_tension(f, c), c, opts);
    return evaluate_rt(f, w0.omega, c);
}

RTReport evaluate_rt(const GridFunction& f, const GridFunction& omega0, const DerivedConstants& c) {
    require_same_grid(f, omega0, "evaluate_rt");
    GridFunction a_rt(f.grid);
    a_rt.values.setConstant(c.c_rho_mu);
    if (c.a_mu != 0.0) a_rt.values += (c.a_mu / std::numbers::pi) * apply_B(f, omega0).values;
    RTReport r{std::move(a_rt), 0.0, false, rt_tolerance(c)};
    r.infimum = r.a_rt.values.minCoeff();
    r.in_O = r.infimum > r.tolerance;
    return r;
}

FrozenSymbols frozen_symbols(const GridFunction& f, const GridFunction& omega0, const DerivedConstants& c) {
    const double pi = std::numbers::pi;
    const RTReport rt = evaluate_rt(f, omega0, c);
    const Vector fp = spectral_derivative(f, 1).values;
    const Vector q = (1.0 + fp.array().square()).matrix();

    GridFunction alpha(f.grid, (pi * rt.a_rt.values.array() / q.array()).matrix());
    GridFunction beta = bnm({f}, {f}, omega0);
    beta.values.array() -= c.a_mu * pi * omega0.values.array() / q.array();
    GridFunction gamma3(f.grid, (pi / (q.array() * q.array().sqrt())).matrix());
    return FrozenSymbols{std::move(alpha), std::move(beta), std::move(gamma3)};
}

double dispersion_rate(double k, bool sigma_on, const FluidParams& p) {
    if (!(k > 0.0) || !std::isfinite(k)) throw InvalidConfiguration("dispersion_rate needs k > 0");
    const DerivedConstants c = derive_constants(p);
    if (!sigma_on) return 0.5 * c.c_rho_mu * k;
    return 0.5 * c.b_mu * (p.sigma * k * k * k + c.theta * k);
}

}  // namespace muskat
