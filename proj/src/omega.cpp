#include "muskat/omega.hpp"

#include <cmath>

#include "muskat/errors.hpp"
#include "muskat/kernels.hpp"

namespace muskat {

const char* to_string(SolverMethod m) noexcept {
    return m == SolverMethod::direct ? "direct" : "neumann";
}

GridFunction rhs_no_tension(const GridFunction& f, const DerivedConstants& c) {
    GridFunction r = spectral_derivative(f, 1);
    r.values *= -c.c_rho_mu;
    return r;
}

GridFunction rhs_tension(const GridFunction& f, const GridFunction& h, const FluidParams& p) {
    require_same_grid(f, h, "rhs_tension");
    const DerivedConstants c = derive_constants(p);
    const Vector fp = spectral_derivative(f, 1).values;
    const Vector fpp = spectral_derivative(f, 2).values;
    const Vector h1 = spectral_derivative(h, 1).values;
    const Vector h2 = spectral_derivative(h, 2).values;
    const Vector h3 = spectral_derivative(h, 3).values;
    GridFunction r(f.grid);
    for (Eigen::Index j = 0; j < r.values.size(); ++j) {
        const double q = 1.0 + fp[j] * fp[j];
        const double q32 = q * std::sqrt(q);
        r.values[j] = c.b_mu * (p.sigma * h3[j] / q32 - 3.0 * p.sigma * fp[j] * fpp[j] * h2[j] / (q32 * q) -
                                c.theta * h1[j]);
    }
    return r;
}

namespace {

double residual(const GridFunction& f, const GridFunction& w, const GridFunction& rhs, double a) {
    GridFunction r = apply_A(f, w);
    r.values = w.values + a * r.values - rhs.values;
    return l2_norm(r);
}

GridFunction solve_direct(const GridFunction& f, const GridFunction& rhs, double a) {
    const OperatorMatrix A = assemble_matrix(KernelSpec::A(f));
    Matrix m = a * A.entries;
    m.diagonal().array() += 1.0;
    const Eigen::PartialPivLU<Matrix> lu(m);
    const double rcond = lu.rcond();
    if (!(rcond >= 1e-12))
        throw DegenerateOperator("1 + a_mu A(f) is numerically singular (reciprocal condition " +
                                 std::to_string(rcond) + ")");
    return GridFunction(f.grid, lu.solve(rhs.values));
}

}  // namespace

VortexSheet solve_omega(const GridFunction& f, const GridFunction& rhs, const DerivedConstants& c,
                        const SolverOptions& opts) {
    require_same_grid(f, rhs, "solve_omega");
    require_finite(f, "interface");
    require_finite(rhs, "right-hand side");
    const double a = c.a_mu;
    if (!(std::abs(a) < 1.0)) throw InvalidConfiguration("solve_omega needs |a_mu| < 1");

    if (a == 0.0) return VortexSheet{rhs, 0.0, opts.method, 0};

    if (opts.method == SolverMethod::neumann) {
        const double scale = std::max(l2_norm(rhs), 1e-300);
        GridFunction w = rhs;
        for (int it = 1; it <= opts.neumann_max_iter; ++it) {
            GridFunction next = apply_A(f, w);
            next.values = rhs.values - a * next.values;
            const double change = l2_norm(GridFunction(f.grid, next.values - w.values));
            w = std::move(next);
            if (!w.values.allFinite()) break;
            if (change <= opts.neumann_tol * scale) {
                const double res = residual(f, w, rhs, a);
                return VortexSheet{std::move(w), res, SolverMethod::neumann, it};
            }
        }
    }
    GridFunction w = solve_direct(f, rhs, a);
    const double res = residual(f, w, rhs, a);
    return VortexSheet{std::move(w), res, SolverMethod::direct, 0};
}

GridFunction lower_order_term(const GridFunction& f, const GridFunction& omega) {
    return derivative_remainder_A(f, omega);
}

OmegaParts omega_decomposition(const GridFunction& f, const GridFunction& h, const FluidParams& p,
                               const SolverOptions& opts) {
    require_same_grid(f, h, "omega_decomposition");
    const DerivedConstants c = derive_constants(p);
    const Vector fp = spectral_derivative(f, 1).values;
    const Vector h2 = spectral_derivative(h, 2).values;
    GridFunction g1(f.grid);
    for (Eigen::Index j = 0; j < g1.values.size(); ++j) {
        const double q = 1.0 + fp[j] * fp[j];
        g1.values[j] = c.b_mu * p.sigma * h2[j] / (q * std::sqrt(q));
    }
    GridFunction w1 = solve_omega(f, g1, c, opts).omega;

    GridFunction g2 = spectral_derivative(h, 1);
    g2.values *= -c.b_mu * c.theta;
    if (c.a_mu != 0.0) g2.values += c.a_mu * lower_order_term(f, w1).values;
    GridFunction w2 = solve_omega(f, g2, c, opts).omega;
    return OmegaParts{std::move(w1), std::move(w2)};
}

}  // namespace muskat
