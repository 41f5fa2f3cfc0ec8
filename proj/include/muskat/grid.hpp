#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace muskat {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Uniform grid on the truncated line [-L, L): x_j = -L + j h, h = 2L/N.
///
/// Spectral operations treat the window as one period; everything that
/// relies on this assumes the sampled functions decay well inside it.
class Grid {
public:
    Grid(double half_length, std::size_t n_points);

    double half_length() const noexcept { return half_length_; }
    std::size_t size() const noexcept { return n_; }
    double spacing() const noexcept { return 2.0 * half_length_ / static_cast<double>(n_); }
    double node(std::size_t j) const noexcept {
        return -half_length_ + static_cast<double>(j) * spacing();
    }
    Vector nodes() const;

    /// Angular wavenumber of the r2c coefficient m (0 <= m <= N/2): m*pi/L.
    double wavenumber(std::size_t m) const noexcept {
        return static_cast<double>(m) * 3.14159265358979323846 / half_length_;
    }

    friend bool operator==(const Grid& a, const Grid& b) noexcept {
        return a.half_length_ == b.half_length_ && a.n_ == b.n_;
    }

private:
    double half_length_;
    std::size_t n_;
};

/// Real samples of a function on a Grid.
struct GridFunction {
    Grid grid;
    Vector values;

    explicit GridFunction(const Grid& g) : grid(g), values(Vector::Zero(static_cast<Eigen::Index>(g.size()))) {}
    GridFunction(const Grid& g, Vector v);

    template <typename F>
    static GridFunction sample(const Grid& g, F&& fn) {
        GridFunction u(g);
        for (std::size_t j = 0; j < g.size(); ++j) u.values[static_cast<Eigen::Index>(j)] = fn(g.node(j));
        return u;
    }

    std::size_t size() const noexcept { return grid.size(); }
    double operator[](std::size_t j) const { return values[static_cast<Eigen::Index>(j)]; }
    double& operator[](std::size_t j) { return values[static_cast<Eigen::Index>(j)]; }
};

void require_same_grid(const GridFunction& a, const GridFunction& b, std::string_view what);
void require_finite(const GridFunction& u, std::string_view what);

/// Max |u| over the outermost 5% of nodes (2.5% at each end, at least one node).
double boundary_decay(const GridFunction& u);

/// True when boundary_decay(u) <= rel_threshold * max|u| (or u vanishes).
bool decays(const GridFunction& u, double rel_threshold);

/// Throws DecayCheckFailed naming `what` if `decays` fails.
void require_decay(const GridFunction& u, double rel_threshold, std::string_view what);

// Spectral operators. Forward DFT is unnormalized, the inverse carries 1/N.
// The Nyquist coefficient is dropped by every odd-order multiplier so that
// outputs stay real.

/// Derivative of order 1, 2 or 3.
GridFunction spectral_derivative(const GridFunction& u, int order);

/// Multiplier -i sgn(xi), with sgn(0) = 0.
GridFunction hilbert_transform(const GridFunction& u);

/// Applies a real, even symbol s(|xi|) modewise (used for implicit solves).
GridFunction apply_even_symbol(const GridFunction& u, const std::function<double(double)>& symbol);

/// r2c coefficients (length N/2 + 1), unnormalized.
std::vector<std::complex<double>> forward_coefficients(const GridFunction& u);

/// Rectangle rule h * sum u_j (the trapezoidal rule on a periodic grid).
double integrate(const GridFunction& u);

/// Discrete L2 norm sqrt(h * sum u_j^2).
double l2_norm(const GridFunction& u);

/// h * sum u_j v_j.
double inner_product(const GridFunction& u, const GridFunction& v);

double sup_norm(const GridFunction& u);

/// sqrt((h/N) * sum over all N modes of (1 + xi^2)^s |u_hat|^2); for s = 0
/// this equals l2_norm by Parseval.
double sobolev_norm(const GridFunction& u, double s);

/// Trigonometric interpolant of u evaluated at x (periodic in [-L, L)).
double interpolate(const GridFunction& u, double x);

enum class SpectralOp { derivative1, derivative2, derivative3, hilbert };

GridFunction apply_spectral(const GridFunction& u, SpectralOp op);

/// Dense circulant matrix representing `op` on the grid.
Matrix multiplier_matrix(const Grid& g, SpectralOp op);

}  // namespace muskat
