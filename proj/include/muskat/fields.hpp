#pragma once

#include <optional>
#include <vector>

#include "muskat/grid.hpp"
#include "muskat/params.hpp"

namespace muskat {

enum class Side { above, below, on_interface };

const char* to_string(Side s) noexcept;

struct Point {
    double x = 0.0;
    double y = 0.0;
};

struct FieldSample {
    Point point;
    double v1 = 0.0;
    double v2 = 0.0;
    std::optional<double> pressure;  ///< moving-frame pressure, when reconstructed
    Side side = Side::on_interface;
};

/// Euclidean distance from p to the polygon through the interface nodes.
double distance_to_interface(const GridFunction& f, Point p);

/// Side of the graph y = f(x) containing p, using a guard band of
/// `guard` around the curve (points inside it are on_interface).
Side classify(const GridFunction& f, Point p, double guard);

/// Velocity induced by the sheet at points off the interface, by the
/// trapezoidal rule on the grid. Throws PointTooClose for points within
/// guard_factor*h of the curve.
std::vector<FieldSample> biot_savart(const GridFunction& f, const GridFunction& omega, const std::vector<Point>& points,
                                     double guard_factor = 2.0);

struct Traces {
    GridFunction v1;
    GridFunction v2;
};

/// One-sided limits of the velocity on the interface: principal value
/// part plus or minus half the jump (1, f') w / (1 + f'^2).
Traces trace_velocity(const GridFunction& f, const GridFunction& omega, Side side);

/// (1/2 pi) B(f)[w], the common normal velocity <v, (-f', 1)>.
GridFunction normal_trace(const GridFunction& f, const GridFunction& omega);

struct PressureOptions {
    /// Height of the horizontal path; 0 selects max|f| + 10h.
    double d = 0.0;
    double guard_factor = 2.0;
    double quad_tol = 1e-11;
};

struct PressureCalibration {
    double c_minus = 0.0;  ///< gauge, fixed to 0
    double c_plus = 0.0;
    double d = 0.0;
    /// max over the probe set of |p+ - p- - sigma kappa| after calibration
    double jump_residual = 0.0;
};

/// Moving-frame pressure by integrating Darcy's law along an L-shaped path
/// (horizontal at height +-d, then vertical). The constants are fixed by
/// c- = 0 and a least-squares fit of c+ to the dynamic condition at five
/// probes around x = 0.
PressureCalibration calibrate_pressure(const GridFunction& f, const GridFunction& omega, const FluidParams& p,
                                       const PressureOptions& opts = {});

std::vector<FieldSample> reconstruct_pressure(const GridFunction& f, const GridFunction& omega, const FluidParams& p,
                                              const std::vector<Point>& points, const PressureOptions& opts = {},
                                              PressureCalibration* calibration = nullptr);

/// |v + (0, V) + (k/mu)(grad p + (0, rho g))| at `at`, with grad p from
/// centered differences of spacing `step` (default h/4).
double darcy_residual(const GridFunction& f, const GridFunction& omega, const FluidParams& p, Point at,
                      const PressureOptions& opts = {}, double step = 0.0);

struct RellichResidual {
    double r_plus = 0.0;   ///< with (A(f) - 1)[w]
    double r_minus = 0.0;  ///< with (A(f) + 1)[w]
};

RellichResidual rellich_residual(const GridFunction& f, const GridFunction& omega);

/// f'' / (1 + f'^2)^{3/2}.
GridFunction curvature(const GridFunction& f);

}  // namespace muskat
