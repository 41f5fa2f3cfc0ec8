#include "muskat/verify.hpp"

#include <cmath>
#include <numbers>

#include "muskat/errors.hpp"
#include "muskat/evolution.hpp"
#include "muskat/fields.hpp"
#include "muskat/kernels.hpp"
#include "muskat/omega.hpp"
#include "muskat/stability.hpp"

namespace muskat {

namespace {

constexpr double kPi = std::numbers::pi;

double rel_l2(const GridFunction& a, const GridFunction& b) {
    return l2_norm(GridFunction(a.grid, a.values - b.values)) / std::max(l2_norm(b), 1e-300);
}

CheckResult at_most(std::string name, double value, double threshold) {
    return CheckResult{std::move(name), value, threshold, value <= threshold};
}

CheckResult at_least(std::string name, double value, double threshold) {
    return CheckResult{std::move(name), value, threshold, value >= threshold};
}

// Interfaces and densities used by the built-in suites. Densities are
// oscillatory wave packets so that the periodic Hilbert transform agrees
// with the one on the line.
GridFunction interface_sample(const Grid& g) {
    return GridFunction::sample(g, [](double x) { return 0.8 * std::exp(-(x - 0.3) * (x - 0.3)); });
}

GridFunction density_sample(const Grid& g) {
    return GridFunction::sample(g, [](double x) { return std::exp(-x * x / 4.0) * std::cos(5.0 * x); });
}

SuiteReport operators_suite() {
    SuiteReport r{"operators", {}};
    const Grid g(20.0, 1024);
    const GridFunction f = interface_sample(g);
    const GridFunction w = density_sample(g);
    const GridFunction zero(g);

    GridFunction pih = hilbert_transform(w);
    pih.values *= kPi;
    r.checks.push_back(at_most("B01(0) = pi H (relative L2)", rel_l2(bnm({zero}, {}, w), pih), 1e-6));

    const GridFunction fp = spectral_derivative(f, 1);
    const GridFunction b01 = bnm({f}, {}, w);
    const GridFunction b11 = bnm({f}, {f}, w);
    GridFunction fof(g, (fp.values.cwiseProduct(b01.values) - b11.values) / kPi);
    r.checks.push_back(at_most("A(f) composition (relative L2)", rel_l2(apply_A(f, w), fof), 1e-6));
    GridFunction oper(g, b01.values + fp.values.cwiseProduct(b11.values));
    r.checks.push_back(at_most("B(f) composition (relative L2)", rel_l2(apply_B(f, w), oper), 1e-6));

    const GridFunction phi = GridFunction::sample(g, [](double x) { return std::exp(-(x + 1) * (x + 1)) * x; });
    const double lhs = inner_product(apply_A(f, w), phi);
    const double rhs = inner_product(w, apply_A_star(f, phi));
    r.checks.push_back(at_most("adjoint mismatch / (|w||phi|)", std::abs(lhs - rhs) / (l2_norm(w) * l2_norm(phi)), 1e-8));

    const Grid gs(20.0, 256);
    const GridFunction fs = GridFunction::sample(gs, [](double x) { return std::exp(-x * x); });
    const DerivedConstants c = derive_constants(FluidParams::normalized(0.9, 1.0, 0.0));
    const GridFunction rhs_s = rhs_no_tension(fs, c);
    const VortexSheet direct = solve_omega(fs, rhs_s, c, {SolverMethod::direct});
    const VortexSheet neumann = solve_omega(fs, rhs_s, c, {SolverMethod::neumann});
    r.checks.push_back(at_most("direct vs Neumann (max abs)", (direct.omega.values - neumann.omega.values).cwiseAbs().maxCoeff(), 1e-8));
    r.checks.push_back(at_most("direct residual", direct.residual_norm, 1e-10));
    return r;
}

SuiteReport rellich_suite() {
    SuiteReport r{"rellich", {}};
    double prev_plus = 0.0, prev_minus = 0.0;
    for (std::size_t n : {512u, 1024u}) {
        const Grid g(20.0, n);
        const GridFunction f = GridFunction::sample(g, [](double x) { return 0.3 * std::exp(-x * x / 0.09); });
        const GridFunction w = GridFunction::sample(g, [](double x) { return std::exp(-x * x) * std::cos(8.0 * x); });
        const double norm2 = l2_norm(w) * l2_norm(w);
        const RellichResidual res = rellich_residual(f, w);
        const double plus = std::abs(res.r_plus) / norm2;
        const double minus = std::abs(res.r_minus) / norm2;
        if (n == 512) {
            r.checks.push_back(at_most("(A-1) residual / |w|^2, N=512", plus, 1e-4));
            r.checks.push_back(at_most("(A+1) residual / |w|^2, N=512", minus, 1e-4));
            prev_plus = plus;
            prev_minus = minus;
        } else {
            r.checks.push_back(at_least("(A-1) refinement ratio", prev_plus / plus, 3.0));
            r.checks.push_back(at_least("(A+1) refinement ratio", prev_minus / minus, 3.0));
        }
    }
    return r;
}

SuiteReport plemelj_suite() {
    SuiteReport r{"plemelj", {}};
    const Grid g(20.0, 512);
    const double h = g.spacing();
    const GridFunction f = GridFunction::sample(g, [](double x) { return 0.3 * std::exp(-x * x); });
    const GridFunction w = GridFunction::sample(g, [](double x) { return std::exp(-x * x) * (1.0 + 0.5 * x); });
    const GridFunction fp = spectral_derivative(f, 1);
    const Traces above = trace_velocity(f, w, Side::above);
    const Traces below = trace_velocity(f, w, Side::below);
    double jump = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
        const double t = (below.v1[j] - above.v1[j]) + fp[j] * (below.v2[j] - above.v2[j]);
        jump = std::max(jump, std::abs(t - w[j]));
    }
    r.checks.push_back(at_most("tangential jump - w (max abs)", jump, 1e-12));

    bool monotone = true;
    double last_err = 0.0;
    for (double side_sign : {1.0, -1.0}) {
        const Traces& tr = side_sign > 0 ? above : below;
        double prev = std::numeric_limits<double>::infinity();
        for (double m : {8.0, 4.0, 2.0}) {
            std::vector<Point> pts;
            std::vector<std::size_t> idx;
            for (std::size_t j = g.size() / 2 - 40; j <= g.size() / 2 + 40; j += 4) {
                pts.push_back({g.node(j), f[j] + side_sign * m * h * std::sqrt(1.0 + fp[j] * fp[j])});
                idx.push_back(j);
            }
            const auto samples = biot_savart(f, w, pts);
            double err = 0.0;
            for (std::size_t i = 0; i < samples.size(); ++i)
                err = std::max(err, std::hypot(samples[i].v1 - tr.v1[idx[i]], samples[i].v2 - tr.v2[idx[i]]));
            if (!(err < prev)) monotone = false;
            prev = err;
            last_err = std::max(last_err, err);
        }
    }
    r.checks.push_back(at_least("offset 8h -> 2h monotone convergence", monotone ? 1.0 : 0.0, 1.0));
    return r;
}

SuiteReport dispersion_suite() {
    SuiteReport r{"dispersion", {}};
    const FluidParams flat_sigma0 = FluidParams::normalized(0.5, 1.0, 0.0);
    for (double k : {2.0, 4.0}) {
        const RateMeasurement m = measure_rate(flat_sigma0, k);
        r.checks.push_back(at_most("sigma=0 rate error, k=" + std::to_string(static_cast<int>(k)), m.relative_error, 0.03));
    }
    const FluidParams tension = FluidParams::normalized(0.5, 1.0, 1.0);
    for (double k : {2.0, 4.0}) {
        const RateMeasurement m = measure_rate(tension, k);
        r.checks.push_back(at_most("sigma>0 rate error, k=" + std::to_string(static_cast<int>(k)), m.relative_error, 0.03));
    }
    return r;
}

}  // namespace

bool SuiteReport::passed() const {
    for (const auto& c : checks)
        if (!c.passed) return false;
    return !checks.empty();
}

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"operators", "rellich", "plemelj", "dispersion"};
    return names;
}

SuiteReport run_suite(const std::string& name) {
    if (name == "operators") return operators_suite();
    if (name == "rellich") return rellich_suite();
    if (name == "plemelj") return plemelj_suite();
    if (name == "dispersion") return dispersion_suite();
    throw InvalidConfiguration("unknown suite '" + name + "' (expected operators, rellich, plemelj or dispersion)");
}

nlohmann::json to_json(const SuiteReport& r) {
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : r.checks)
        checks.push_back({{"name", c.name}, {"value", c.value}, {"threshold", c.threshold}, {"passed", c.passed}});
    return {{"suite", r.suite}, {"passed", r.passed()}, {"checks", checks}};
}

RateMeasurement measure_rate(const FluidParams& p, double k, double eps, double L, std::size_t N) {
    const Grid g(L, N);
    const double mf = k * L / kPi;
    const auto m = static_cast<std::size_t>(std::llround(mf));
    if (std::abs(mf - static_cast<double>(m)) > 1e-9 || m == 0 || m >= N / 2)
        throw InvalidConfiguration("measure_rate: k must be a grid wavenumber m*pi/L with 0 < m < N/2");

    RateMeasurement out;
    out.k = k;
    out.predicted = dispersion_rate(k, p.sigma > 0.0, p);
    if (out.predicted == 0.0) throw InvalidConfiguration("measure_rate: predicted rate is zero");

    const double width = L / 6.0;
    const GridFunction f0 =
        GridFunction::sample(g, [&](double x) { return eps * std::exp(-(x / width) * (x / width)) * std::cos(k * x); });
    StepControls ctl;
    ctl.rel_tol = 1e-9;
    ctl.abs_tol = 1e-18;
    ctl.enforce_rt = false;
    ctl.dt_init = 1e-4;
    ctl.dt_min = 1e-14;
    const double t_end = 1.0 / std::abs(out.predicted);
    const Trajectory tr = simulate(f0, p, t_end, ctl, 1);
    if (tr.cause != Termination::completed) throw Error("measure_rate: run ended early: " + tr.message);

    // Least-squares slope of log |coefficient m| against time.
    double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    const double n = static_cast<double>(tr.snapshots.size());
    for (const Snapshot& s : tr.snapshots) {
        const double y = std::log(std::abs(forward_coefficients(s.f)[m]));
        st += s.t;
        sy += y;
        stt += s.t * s.t;
        sty += s.t * y;
    }
    const double slope = (n * sty - st * sy) / (n * stt - st * st);
    out.measured = -slope;
    out.relative_error = std::abs(out.measured - out.predicted) / std::abs(out.predicted);
    return out;
}

}  // namespace muskat
