#include "muskat/kernels.hpp"

#include <cmath>
#include <numbers>

#include "muskat/errors.hpp"

namespace muskat {

namespace {

constexpr double kPi = std::numbers::pi;

using Row = std::vector<double>;

// Precomputed data needed to evaluate one row of a kernel matrix. Each
// operator fills `row` with h*K(x_j, x_j - x_l) for l != j, and reports
// the diagonal weight (multiplying w_j) and, for the Taylor rule of the
// generic operators, the weight multiplying w'_j.
struct RowEvaluator {
    const KernelSpec& spec;
    DiagonalRule rule;
    std::size_t n;
    double h;
    std::vector<const double*> a;
    std::vector<const double*> b;
    // Derivatives of the interface (named kinds) or diagonal coefficients
    // (generic kind).
    Vector fp, fpp;
    Vector diag_w, diag_dw;

    RowEvaluator(const KernelSpec& s, DiagonalRule r) : spec(s), rule(r) {
        spec.validate();
        const Grid& g = spec.grid();
        n = g.size();
        h = g.spacing();
        for (const auto& u : spec.a_list) a.push_back(u.values.data());
        for (const auto& u : spec.b_list) b.push_back(u.values.data());
        diag_w = Vector::Zero(static_cast<Eigen::Index>(n));
        diag_dw = Vector::Zero(static_cast<Eigen::Index>(n));
        if (spec.kind == KernelKind::generic_bnm) {
            if (rule == DiagonalRule::taylor) generic_diagonal();
        } else {
            const GridFunction& f = spec.a_list.front();
            fp = spec.fp ? spec.fp->values : spectral_derivative(f, 1).values;
            fpp = spec.fpp ? spec.fpp->values : spectral_derivative(f, 2).values;
            for (Eigen::Index j = 0; j < fp.size(); ++j) {
                const double lim = fpp[j] / (2.0 * (1.0 + fp[j] * fp[j]));
                switch (spec.kind) {
                    case KernelKind::A_of_f:
                    case KernelKind::A_star_of_f:
                        diag_w[j] = h * lim / kPi;
                        break;
                    case KernelKind::B_of_f:
                        diag_w[j] = h * fp[j] * lim;
                        break;
                    default:
                        break;
                }
            }
        }
    }

    // Expanding the kernel P(x, y)/y with P(x, 0) = P0, d_y P(x, 0) = P1
    // around y = 0 shows that the omitted node carries h (P1 w - P0 w').
    void generic_diagonal() {
        const Eigen::Index ni = static_cast<Eigen::Index>(n);
        std::vector<Vector> bp, bpp;
        for (const auto& u : spec.b_list) {
            bp.push_back(spectral_derivative(u, 1).values);
            bpp.push_back(spectral_derivative(u, 2).values);
        }
        std::vector<Vector> ap, app;
        for (const auto& u : spec.a_list) {
            ap.push_back(spectral_derivative(u, 1).values);
            app.push_back(spectral_derivative(u, 2).values);
        }
        for (Eigen::Index j = 0; j < ni; ++j) {
            double num0 = 1.0;
            for (const auto& d : bp) num0 *= d[j];
            double num1 = 0.0;
            for (std::size_t i = 0; i < bp.size(); ++i) {
                double t = -0.5 * bpp[i][j];
                for (std::size_t k = 0; k < bp.size(); ++k)
                    if (k != i) t *= bp[k][j];
                num1 += t;
            }
            double den = 1.0;
            double slope = 0.0;
            for (std::size_t k = 0; k < ap.size(); ++k) {
                const double q = 1.0 + ap[k][j] * ap[k][j];
                den *= q;
                slope -= ap[k][j] * app[k][j] / q;
            }
            const double p0 = num0 / den;
            const double p1 = num1 / den - p0 * slope;
            diag_w[j] = h * p1;
            diag_dw[j] = -h * p0;
        }
    }

    // Offset x_j - x_l, or 0 for pairs the rule skips.
    double offset(std::size_t j, std::size_t l) const {
        long d = static_cast<long>(j) - static_cast<long>(l);
        if (spec.window == Window::periodic) {
            const long half = static_cast<long>(n / 2);
            if (d > half) d -= static_cast<long>(n);
            if (d < -half) d += static_cast<long>(n);
            if (d == half || d == -half) return 0.0;
        }
        return static_cast<double>(d) * h;
    }

    void fill(std::size_t j, double* row) const {
        switch (spec.kind) {
            case KernelKind::generic_bnm:
                for (std::size_t l = 0; l < n; ++l) {
                    const double y = offset(j, l);
                    if (y == 0.0) {
                        row[l] = 0.0;
                        continue;
                    }
                    double p = 1.0 / y;
                    for (const double* bi : b) p *= (bi[j] - bi[l]) / y;
                    for (const double* ak : a) {
                        const double q = (ak[j] - ak[l]) / y;
                        p /= 1.0 + q * q;
                    }
                    row[l] = h * p;
                }
                break;
            case KernelKind::A_of_f: {
                const double* f = a.front();
                const double fpj = fp[static_cast<Eigen::Index>(j)];
                for (std::size_t l = 0; l < n; ++l) {
                    const double y = offset(j, l);
                    if (y == 0.0) {
                        row[l] = 0.0;
                        continue;
                    }
                    const double df = f[j] - f[l];
                    row[l] = h / kPi * (y * fpj - df) / (y * y + df * df);
                }
                break;
            }
            case KernelKind::A_star_of_f: {
                const double* f = a.front();
                for (std::size_t l = 0; l < n; ++l) {
                    const double y = offset(j, l);
                    if (y == 0.0) {
                        row[l] = 0.0;
                        continue;
                    }
                    const double df = f[j] - f[l];
                    row[l] = h / kPi * (df - y * fp[static_cast<Eigen::Index>(l)]) / (y * y + df * df);
                }
                break;
            }
            case KernelKind::B_of_f: {
                // Regular remainder after subtracting 1/y.
                const double* f = a.front();
                const double fpj = fp[static_cast<Eigen::Index>(j)];
                for (std::size_t l = 0; l < n; ++l) {
                    const double y = offset(j, l);
                    if (y == 0.0) {
                        row[l] = 0.0;
                        continue;
                    }
                    const double df = f[j] - f[l];
                    row[l] = h * ((y + fpj * df) / (y * y + df * df) - 1.0 / y);
                }
                break;
            }
        }
    }
};

}  // namespace

KernelSpec KernelSpec::bnm(std::vector<GridFunction> a, std::vector<GridFunction> b) {
    KernelSpec s;
    s.kind = KernelKind::generic_bnm;
    s.a_list = std::move(a);
    s.b_list = std::move(b);
    s.validate();
    return s;
}

KernelSpec KernelSpec::A(const GridFunction& f) {
    KernelSpec s;
    s.kind = KernelKind::A_of_f;
    s.a_list = {f};
    return s;
}

KernelSpec KernelSpec::B(const GridFunction& f) {
    KernelSpec s;
    s.kind = KernelKind::B_of_f;
    s.a_list = {f};
    return s;
}

KernelSpec KernelSpec::A_star(const GridFunction& f) {
    KernelSpec s;
    s.kind = KernelKind::A_star_of_f;
    s.a_list = {f};
    return s;
}

const Grid& KernelSpec::grid() const {
    if (a_list.empty()) throw InvalidConfiguration("kernel spec has no denominator arguments");
    return a_list.front().grid;
}

void KernelSpec::validate() const {
    if (kind == KernelKind::generic_bnm) {
        if (a_list.empty()) throw InvalidConfiguration("B_{n,m} requires m >= 1");
    } else if (a_list.size() != 1 || !b_list.empty()) {
        throw InvalidConfiguration("A, B and A* kernels carry exactly one function f");
    }
    if ((fp || fpp) && kind == KernelKind::generic_bnm)
        throw InvalidConfiguration("derivative overrides apply to the A, B and A* kinds only");
    if (fp) require_same_grid(a_list.front(), *fp, "kernel arguments");
    if (fpp) require_same_grid(a_list.front(), *fpp, "kernel arguments");
    for (const auto& u : a_list) require_same_grid(a_list.front(), u, "kernel arguments");
    for (const auto& u : b_list) require_same_grid(a_list.front(), u, "kernel arguments");
}

GridFunction apply(const KernelSpec& spec, const GridFunction& omega, DiagonalRule rule) {
    const RowEvaluator ev(spec, rule);
    require_same_grid(spec.a_list.front(), omega, "kernel density");
    const std::size_t n = ev.n;
    GridFunction out(omega.grid);
    Row row(n);
    for (std::size_t j = 0; j < n; ++j) {
        ev.fill(j, row.data());
        double acc = 0.0;
        for (std::size_t l = 0; l < n; ++l) acc += row[l] * omega[l];
        out[j] = acc;
    }
    out.values += ev.diag_w.cwiseProduct(omega.values);
    if (spec.kind == KernelKind::generic_bnm && rule == DiagonalRule::taylor)
        out.values += ev.diag_dw.cwiseProduct(spectral_derivative(omega, 1).values);
    if (spec.kind == KernelKind::B_of_f) out.values += kPi * hilbert_transform(omega).values;
    return out;
}

GridFunction bnm_apply(const KernelSpec& spec, const GridFunction& omega, DiagonalRule rule) {
    if (spec.kind != KernelKind::generic_bnm)
        throw InvalidConfiguration("bnm_apply expects a generic B_{n,m} spec");
    return apply(spec, omega, rule);
}

GridFunction bnm(const std::vector<GridFunction>& a, const std::vector<GridFunction>& b,
                 const GridFunction& omega, DiagonalRule rule) {
    return bnm_apply(KernelSpec::bnm(a, b), omega, rule);
}

GridFunction apply_A(const GridFunction& f, const GridFunction& omega) {
    return apply(KernelSpec::A(f), omega);
}

GridFunction apply_B(const GridFunction& f, const GridFunction& omega) {
    return apply(KernelSpec::B(f), omega);
}

GridFunction apply_A_star(const GridFunction& f, const GridFunction& phi) {
    return apply(KernelSpec::A_star(f), phi);
}

OperatorMatrix assemble_matrix(const KernelSpec& spec, DiagonalRule rule) {
    const RowEvaluator ev(spec, rule);
    const std::size_t n = ev.n;
    const Eigen::Index ni = static_cast<Eigen::Index>(n);
    // Row-major scratch so each row is filled contiguously.
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> m(ni, ni);
    for (std::size_t j = 0; j < n; ++j) ev.fill(j, m.row(static_cast<Eigen::Index>(j)).data());
    Matrix entries = m;
    entries.diagonal() += ev.diag_w;
    if (spec.kind == KernelKind::generic_bnm && rule == DiagonalRule::taylor)
        entries += ev.diag_dw.asDiagonal() * multiplier_matrix(spec.grid(), SpectralOp::derivative1);
    if (spec.kind == KernelKind::B_of_f) entries += kPi * multiplier_matrix(spec.grid(), SpectralOp::hilbert);
    return OperatorMatrix{spec.grid(), std::move(entries), spec};
}

GridFunction OperatorMatrix::apply(const GridFunction& omega) const {
    if (!(omega.grid == grid)) throw GridMismatch("operator matrix and density live on different grids");
    return GridFunction(grid, entries * omega.values);
}

GridFunction derivative_remainder_A(const GridFunction& f, const GridFunction& omega) {
    require_same_grid(f, omega, "derivative_remainder_A");
    const GridFunction fp = spectral_derivative(f, 1);
    const GridFunction fpp = spectral_derivative(f, 2);
    Vector r = fpp.values.cwiseProduct(bnm({f}, {}, omega).values);
    r -= 2.0 * fp.values.cwiseProduct(bnm({f, f}, {fp, f}, omega).values);
    r -= bnm({f}, {fp}, omega).values;
    r += 2.0 * bnm({f, f}, {fp, f, f}, omega).values;
    return GridFunction(f.grid, r / kPi);
}

GridFunction derivative_remainder_B(const GridFunction& f, const GridFunction& omega) {
    require_same_grid(f, omega, "derivative_remainder_B");
    const GridFunction fp = spectral_derivative(f, 1);
    const GridFunction fpp = spectral_derivative(f, 2);
    Vector r = -2.0 * bnm({f, f}, {fp, f}, omega).values;
    r += fpp.values.cwiseProduct(bnm({f}, {f}, omega).values);
    r += fp.values.cwiseProduct(bnm({f}, {fp}, omega).values);
    r -= 2.0 * fp.values.cwiseProduct(bnm({f, f}, {fp, f, f}, omega).values);
    return GridFunction(f.grid, r);
}

}  // namespace muskat
