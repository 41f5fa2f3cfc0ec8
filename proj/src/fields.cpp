#include "muskat/fields.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "muskat/errors.hpp"
#include "muskat/kernels.hpp"

namespace muskat {

namespace {

constexpr double kPi = std::numbers::pi;

struct Velocity {
    double v1 = 0.0;
    double v2 = 0.0;
};

// Trapezoidal Biot-Savart sum; no proximity check.
Velocity induced(const GridFunction& f, const GridFunction& omega, double x, double y) {
    const Grid& g = f.grid;
    const double h = g.spacing();
    double s1 = 0.0;
    double s2 = 0.0;
    for (std::size_t l = 0; l < g.size(); ++l) {
        const double dx = x - g.node(l);
        const double dy = y - f[l];
        const double w = omega[l] / (dx * dx + dy * dy);
        s1 -= dy * w;
        s2 += dx * w;
    }
    const double scale = h / (2.0 * kPi);
    return {scale * s1, scale * s2};
}

std::string describe(Point p) { return "(" + std::to_string(p.x) + ", " + std::to_string(p.y) + ")"; }

double integrate_segment(const std::function<double(double)>& fn, double a, double b, double tol) {
    if (a == b) return 0.0;
    const double sign = a < b ? 1.0 : -1.0;
    const double lo = std::min(a, b);
    const double hi = std::max(a, b);
    return sign * boost::math::quadrature::gauss_kronrod<double, 31>::integrate(fn, lo, hi, 15, tol);
}

struct PathContext {
    const GridFunction& f;
    const GridFunction& omega;
    const FluidParams& p;
    double d;
    double guard;
    double tol;
};

double path_height(const PathContext& ctx, Side side) { return side == Side::above ? ctx.d : -ctx.d; }

// Pressure without the additive constant.
double pressure_unanchored(const PathContext& ctx, Point pt, Side side) {
    const double mu = side == Side::above ? ctx.p.mu_plus : ctx.p.mu_minus;
    const double rho = side == Side::above ? ctx.p.rho_plus : ctx.p.rho_minus;
    const double yd = path_height(ctx, side);
    const double fx = interpolate(ctx.f, pt.x);
    if ((pt.y - fx) * (yd - fx) <= 0.0)
        throw PathCrossesInterface("vertical pressure path from height " + std::to_string(yd) + " to " + describe(pt) +
                                   " crosses the interface");
    const double i1 = integrate_segment([&](double s) { return induced(ctx.f, ctx.omega, s, yd).v1; }, 0.0, pt.x, ctx.tol);
    const double i2 =
        integrate_segment([&](double s) { return induced(ctx.f, ctx.omega, pt.x, s).v2; }, yd, pt.y, ctx.tol);
    return -(mu / ctx.p.k) * (i1 + i2) - (rho * ctx.p.g + mu * ctx.p.V / ctx.p.k) * pt.y;
}

PathContext make_context(const GridFunction& f, const GridFunction& omega, const FluidParams& p,
                         const PressureOptions& opts) {
    require_same_grid(f, omega, "pressure reconstruction");
    p.validate();
    const double h = f.grid.spacing();
    const double d = opts.d > 0.0 ? opts.d : sup_norm(f) + 10.0 * h;
    return PathContext{f, omega, p, d, opts.guard_factor * h, opts.quad_tol};
}

}  // namespace

const char* to_string(Side s) noexcept {
    switch (s) {
        case Side::above:
            return "above";
        case Side::below:
            return "below";
        case Side::on_interface:
            return "on_interface";
    }
    return "unknown";
}

double distance_to_interface(const GridFunction& f, Point p) {
    const Grid& g = f.grid;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t l = 0; l + 1 < g.size(); ++l) {
        const double ax = g.node(l), ay = f[l];
        const double bx = g.node(l + 1), by = f[l + 1];
        const double ex = bx - ax, ey = by - ay;
        const double t = std::clamp(((p.x - ax) * ex + (p.y - ay) * ey) / (ex * ex + ey * ey), 0.0, 1.0);
        best = std::min(best, std::hypot(p.x - ax - t * ex, p.y - ay - t * ey));
    }
    return best;
}

Side classify(const GridFunction& f, Point p, double guard) {
    // The polygon cuts inside a curved graph by O(h^2 kappa); the 1% slack
    // keeps points placed exactly `guard` off the smooth curve admissible.
    if (distance_to_interface(f, p) < 0.99 * guard) return Side::on_interface;
    return p.y > interpolate(f, p.x) ? Side::above : Side::below;
}

std::vector<FieldSample> biot_savart(const GridFunction& f, const GridFunction& omega, const std::vector<Point>& points,
                                     double guard_factor) {
    require_same_grid(f, omega, "biot_savart");
    const double guard = guard_factor * f.grid.spacing();
    std::vector<FieldSample> out;
    out.reserve(points.size());
    for (const Point& pt : points) {
        const Side side = classify(f, pt, guard);
        if (side == Side::on_interface)
            throw PointTooClose("point " + describe(pt) + " lies within the guard band of the interface");
        const Velocity v = induced(f, omega, pt.x, pt.y);
        out.push_back(FieldSample{pt, v.v1, v.v2, std::nullopt, side});
    }
    return out;
}

Traces trace_velocity(const GridFunction& f, const GridFunction& omega, Side side) {
    require_same_grid(f, omega, "trace_velocity");
    if (side == Side::on_interface) throw InvalidConfiguration("trace_velocity needs side above or below");
    const Vector fp = spectral_derivative(f, 1).values;
    const Vector tang = 0.5 * apply_A(f, omega).values;
    const Vector norm = apply_B(f, omega).values / (2.0 * kPi);
    // Above the sheet the velocity is the PV value minus half the jump.
    const double jump_sign = side == Side::above ? -0.5 : 0.5;
    Traces t{GridFunction(f.grid), GridFunction(f.grid)};
    for (Eigen::Index j = 0; j < fp.size(); ++j) {
        const double q = 1.0 + fp[j] * fp[j];
        const double tj = tang[j] + jump_sign * omega.values[j];
        t.v1.values[j] = (tj - fp[j] * norm[j]) / q;
        t.v2.values[j] = (fp[j] * tj + norm[j]) / q;
    }
    return t;
}

GridFunction normal_trace(const GridFunction& f, const GridFunction& omega) {
    GridFunction b = apply_B(f, omega);
    b.values /= 2.0 * kPi;
    return b;
}

GridFunction curvature(const GridFunction& f) {
    const Vector fp = spectral_derivative(f, 1).values;
    const Vector fpp = spectral_derivative(f, 2).values;
    const Vector q = (1.0 + fp.array().square()).matrix();
    return GridFunction(f.grid, (fpp.array() / (q.array() * q.array().sqrt())).matrix());
}

PressureCalibration calibrate_pressure(const GridFunction& f, const GridFunction& omega, const FluidParams& p,
                                       const PressureOptions& opts) {
    const PathContext ctx = make_context(f, omega, p, opts);
    const Grid& g = f.grid;
    const double h = g.spacing();
    const std::size_t mid = g.size() / 2;
    const Vector fp = spectral_derivative(f, 1).values;
    const GridFunction kappa = curvature(f);

    // Interface values by quadratic extrapolation from three points on the
    // vertical through each probe, kept outside the guard band.
    std::vector<double> gaps;
    for (int i = -2; i <= 2; ++i) {
        const std::size_t j = static_cast<std::size_t>(static_cast<long>(mid) + i);
        const double x = g.node(j);
        const double delta = 1.5 * opts.guard_factor * h * std::sqrt(1.0 + fp[static_cast<Eigen::Index>(j)] * fp[static_cast<Eigen::Index>(j)]);
        auto edge_value = [&](Side side) {
            const double s = side == Side::above ? 1.0 : -1.0;
            double v[3];
            for (int k = 0; k < 3; ++k) v[k] = pressure_unanchored(ctx, {x, f[j] + s * (k + 1) * delta}, side);
            return 3.0 * v[0] - 3.0 * v[1] + v[2];
        };
        gaps.push_back(p.sigma * kappa[j] - (edge_value(Side::above) - edge_value(Side::below)));
    }
    PressureCalibration cal;
    cal.d = ctx.d;
    double sum = 0.0;
    for (double gap : gaps) sum += gap;
    cal.c_plus = sum / static_cast<double>(gaps.size());
    for (double gap : gaps) cal.jump_residual = std::max(cal.jump_residual, std::abs(gap - cal.c_plus));
    return cal;
}

std::vector<FieldSample> reconstruct_pressure(const GridFunction& f, const GridFunction& omega, const FluidParams& p,
                                              const std::vector<Point>& points, const PressureOptions& opts,
                                              PressureCalibration* calibration) {
    std::vector<FieldSample> out = biot_savart(f, omega, points, opts.guard_factor);
    const PathContext ctx = make_context(f, omega, p, opts);
    const PressureCalibration cal = calibrate_pressure(f, omega, p, opts);
    for (FieldSample& s : out) {
        const double c = s.side == Side::above ? cal.c_plus : cal.c_minus;
        s.pressure = c + pressure_unanchored(ctx, s.point, s.side);
    }
    if (calibration) *calibration = cal;
    return out;
}

double darcy_residual(const GridFunction& f, const GridFunction& omega, const FluidParams& p, Point at,
                      const PressureOptions& opts, double step) {
    const PathContext ctx = make_context(f, omega, p, opts);
    const double h = f.grid.spacing();
    const double dh = step > 0.0 ? step : 0.25 * h;
    const Side side = classify(f, at, ctx.guard);
    if (side == Side::on_interface)
        throw PointTooClose("point " + describe(at) + " lies within the guard band of the interface");
    const double mu = side == Side::above ? p.mu_plus : p.mu_minus;
    const double rho = side == Side::above ? p.rho_plus : p.rho_minus;
    // The additive constant drops out of the differences.
    auto pr = [&](double x, double y) { return pressure_unanchored(ctx, {x, y}, side); };
    const double px = (pr(at.x + dh, at.y) - pr(at.x - dh, at.y)) / (2.0 * dh);
    const double py = (pr(at.x, at.y + dh) - pr(at.x, at.y - dh)) / (2.0 * dh);
    const Velocity v = induced(f, omega, at.x, at.y);
    const double r1 = v.v1 + (p.k / mu) * px;
    const double r2 = v.v2 + p.V + (p.k / mu) * (py + rho * p.g);
    return std::hypot(r1, r2);
}

RellichResidual rellich_residual(const GridFunction& f, const GridFunction& omega) {
    require_same_grid(f, omega, "rellich_residual");
    const Vector fp = spectral_derivative(f, 1).values;
    const Vector fn = normal_trace(f, omega).values;
    const Vector aw = apply_A(f, omega).values;
    auto eval = [&](double s) {
        GridFunction integrand(f.grid);
        for (Eigen::Index j = 0; j < fp.size(); ++j) {
            const double t = aw[j] + s * omega.values[j];
            integrand.values[j] = (fn[j] * fn[j] + fp[j] * fn[j] * t - 0.25 * t * t) / (1.0 + fp[j] * fp[j]);
        }
        return integrate(integrand);
    };
    return RellichResidual{eval(-1.0), eval(1.0)};
}

}  // namespace muskat
