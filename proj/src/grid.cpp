#include "muskat/grid.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include <fftw3.h>

#include "muskat/errors.hpp"

namespace muskat {

namespace {

// FFTW planning is not thread-safe; execution with the new-array interface
// is. Plans are created once per size under a lock and never destroyed.
struct PlanPair {
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
};

const PlanPair& plans_for(std::size_t n) {
    static std::mutex mutex;
    static std::map<std::size_t, PlanPair> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    const int ni = static_cast<int>(n);
    double* in = fftw_alloc_real(n);
    fftw_complex* out = fftw_alloc_complex(n / 2 + 1);
    // ESTIMATE keeps plans (and therefore results) reproducible run to run.
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    PlanPair p;
    p.forward = fftw_plan_dft_r2c_1d(ni, in, out, flags);
    p.backward = fftw_plan_dft_c2r_1d(ni, out, in, flags | FFTW_DESTROY_INPUT);
    fftw_free(in);
    fftw_free(out);
    return cache.emplace(n, p).first->second;
}

using Spectrum = std::vector<std::complex<double>>;

Spectrum forward(const Vector& v) {
    const std::size_t n = static_cast<std::size_t>(v.size());
    Vector in = v;
    Spectrum out(n / 2 + 1);
    fftw_execute_dft_r2c(plans_for(n).forward, in.data(), reinterpret_cast<fftw_complex*>(out.data()));
    return out;
}

Vector backward(Spectrum coeffs, std::size_t n) {
    Vector out(static_cast<Eigen::Index>(n));
    fftw_execute_dft_c2r(plans_for(n).backward, reinterpret_cast<fftw_complex*>(coeffs.data()), out.data());
    out /= static_cast<double>(n);
    return out;
}

// Modewise multiplication by symbol(m, xi, is_nyquist).
template <typename Symbol>
GridFunction apply_symbol(const GridFunction& u, Symbol&& symbol) {
    const std::size_t n = u.size();
    Spectrum c = forward(u.values);
    for (std::size_t m = 0; m < c.size(); ++m) c[m] *= symbol(u.grid.wavenumber(m), m == n / 2);
    return GridFunction(u.grid, backward(std::move(c), n));
}

std::complex<double> op_symbol(SpectralOp op, double xi, bool nyquist) {
    using C = std::complex<double>;
    switch (op) {
        case SpectralOp::derivative1:
            return nyquist ? C(0.0) : C(0.0, xi);
        case SpectralOp::derivative2:
            return C(-xi * xi);
        case SpectralOp::derivative3:
            return nyquist ? C(0.0) : C(0.0, -xi * xi * xi);
        case SpectralOp::hilbert:
            return (nyquist || xi == 0.0) ? C(0.0) : C(0.0, -1.0);
    }
    return C(0.0);
}

}  // namespace

Grid::Grid(double half_length, std::size_t n_points) : half_length_(half_length), n_(n_points) {
    if (!(half_length > 0.0) || !std::isfinite(half_length))
        throw InvalidConfiguration("grid half length L must be positive");
    if (n_points % 2 != 0) throw InvalidConfiguration("N must be even");
    if (n_points < 16) throw InvalidConfiguration("N must be at least 16");
}

Vector Grid::nodes() const {
    Vector x(static_cast<Eigen::Index>(n_));
    for (std::size_t j = 0; j < n_; ++j) x[static_cast<Eigen::Index>(j)] = node(j);
    return x;
}

GridFunction::GridFunction(const Grid& g, Vector v) : grid(g), values(std::move(v)) {
    if (static_cast<std::size_t>(values.size()) != g.size())
        throw GridMismatch("sample count " + std::to_string(values.size()) + " does not match grid size " +
                           std::to_string(g.size()));
}

void require_same_grid(const GridFunction& a, const GridFunction& b, std::string_view what) {
    if (!(a.grid == b.grid)) throw GridMismatch(std::string(what) + ": arguments live on different grids");
}

void require_finite(const GridFunction& u, std::string_view what) {
    if (!u.values.allFinite()) throw NonFinite(std::string(what) + " contains non-finite values");
}

double boundary_decay(const GridFunction& u) {
    const std::size_t n = u.size();
    const std::size_t edge = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(0.025 * static_cast<double>(n))));
    double m = 0.0;
    for (std::size_t j = 0; j < edge; ++j) {
        m = std::max(m, std::abs(u[j]));
        m = std::max(m, std::abs(u[n - 1 - j]));
    }
    return m;
}

bool decays(const GridFunction& u, double rel_threshold) {
    const double peak = sup_norm(u);
    if (peak == 0.0) return true;
    return boundary_decay(u) <= rel_threshold * peak;
}

void require_decay(const GridFunction& u, double rel_threshold, std::string_view what) {
    if (!decays(u, rel_threshold)) {
        throw DecayCheckFailed(std::string(what) + " does not decay at the window edge (edge max " +
                               std::to_string(boundary_decay(u)) + ", sup " + std::to_string(sup_norm(u)) +
                               ", relative threshold " + std::to_string(rel_threshold) + ")");
    }
}

GridFunction apply_spectral(const GridFunction& u, SpectralOp op) {
    return apply_symbol(u, [op](double xi, bool nyq) { return op_symbol(op, xi, nyq); });
}

GridFunction spectral_derivative(const GridFunction& u, int order) {
    switch (order) {
        case 1:
            return apply_spectral(u, SpectralOp::derivative1);
        case 2:
            return apply_spectral(u, SpectralOp::derivative2);
        case 3:
            return apply_spectral(u, SpectralOp::derivative3);
        default:
            throw std::invalid_argument("spectral_derivative: order must be 1, 2 or 3, got " + std::to_string(order));
    }
}

GridFunction hilbert_transform(const GridFunction& u) { return apply_spectral(u, SpectralOp::hilbert); }

GridFunction apply_even_symbol(const GridFunction& u, const std::function<double(double)>& symbol) {
    return apply_symbol(u, [&](double xi, bool) { return std::complex<double>(symbol(xi)); });
}

std::vector<std::complex<double>> forward_coefficients(const GridFunction& u) { return forward(u.values); }

double integrate(const GridFunction& u) { return u.grid.spacing() * u.values.sum(); }

double l2_norm(const GridFunction& u) { return std::sqrt(u.grid.spacing() * u.values.squaredNorm()); }

double inner_product(const GridFunction& u, const GridFunction& v) {
    require_same_grid(u, v, "inner_product");
    return u.grid.spacing() * u.values.dot(v.values);
}

double sup_norm(const GridFunction& u) { return u.values.size() == 0 ? 0.0 : u.values.cwiseAbs().maxCoeff(); }

double sobolev_norm(const GridFunction& u, double s) {
    const std::size_t n = u.size();
    const Spectrum c = forward(u.values);
    double acc = 0.0;
    for (std::size_t m = 0; m < c.size(); ++m) {
        const double xi = u.grid.wavenumber(m);
        // Interior r2c coefficients stand for a +/- pair of modes.
        const double mult = (m == 0 || m == n / 2) ? 1.0 : 2.0;
        acc += mult * std::pow(1.0 + xi * xi, s) * std::norm(c[m]);
    }
    return std::sqrt(u.grid.spacing() / static_cast<double>(n) * acc);
}

double interpolate(const GridFunction& u, double x) {
    const std::size_t n = u.size();
    const Spectrum c = forward(u.values);
    const double s = x + u.grid.half_length();
    double acc = c[0].real();
    for (std::size_t m = 1; m < n / 2; ++m) {
        const double arg = u.grid.wavenumber(m) * s;
        acc += 2.0 * (c[m].real() * std::cos(arg) - c[m].imag() * std::sin(arg));
    }
    acc += c[n / 2].real() * std::cos(u.grid.wavenumber(n / 2) * s);
    return acc / static_cast<double>(n);
}

Matrix multiplier_matrix(const Grid& g, SpectralOp op) {
    const std::size_t n = g.size();
    GridFunction e(g);
    e[0] = 1.0;
    const GridFunction col = apply_spectral(e, op);
    Matrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t l = 0; l < n; ++l)
        for (std::size_t j = 0; j < n; ++j)
            m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(l)) = col[(j + n - l) % n];
    return m;
}

}  // namespace muskat
